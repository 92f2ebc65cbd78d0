import logging

import numpy as np

from src.dataio.preprocessing import distinct_levels, slice_by_height
from src.fitting.ols import fit_ols
from src.fitting.terms import CFM2D_TERMS
from src.shared.config import MIN_2D_SAMPLES, STATE_TOLERANCE
from src.shared.errors import ContractError

logger = logging.getLogger("default")


def fit_cfm2d(dataset, tolerance=STATE_TOLERANCE):
    """Fit ln F = b0 + b1*v + b2*d + b3*d^2 to samples taken at a single height."""
    heights = distinct_levels(dataset.heights(), tolerance)
    if len(heights) > 1:
        raise ContractError(
            f"2D fit needs a single height, '{dataset.label}' has {len(heights)}: {heights}"
        )
    if len(dataset) < MIN_2D_SAMPLES:
        raise ContractError(f"2D fit needs at least {MIN_2D_SAMPLES} samples, got {len(dataset)}")
    return fit_ols(dataset, CFM2D_TERMS)


def fit_cfm2d_per_height(dataset, tolerance=STATE_TOLERANCE):
    """One 2D fit per distinct height level, keyed by that height."""
    models = {}
    for height in distinct_levels(dataset.heights(), tolerance):
        models[height] = fit_cfm2d(slice_by_height(dataset, height, tolerance), tolerance)
        logger.info(f"[Dataset-{dataset.label}] 2D fit at h={height} m: rmse={models[height].diagnostics.rmse:.6g}")
    return models


class PerHeightPredictor:
    """Force prediction that routes each (d, h, v) to the 2D fit of the nearest trained height."""

    def __init__(self, models):
        if not models:
            raise ContractError("per-height predictor needs at least one fit")
        self.heights = np.array(sorted(models))
        self.models = [models[h] for h in self.heights]

    def model_for(self, h):
        return self.models[int(np.argmin(np.abs(self.heights - h)))]

    def __call__(self, d, h, v):
        return float(np.exp(self.model_for(h).linear_predictor(d, h, v)))
