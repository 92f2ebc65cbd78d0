import logging
import math

import numpy as np

from src.dataio.Measurement import MeasurementSample, MeasurementSet
from src.shared.errors import ContractError

logger = logging.getLogger("default")

OUT_OF_DOMAIN = "out_of_domain"


def synthesize_dataset(model, grid, noise_sd_n, repetitions, seed, label=None):
    """
    Generate measurements from a force model on every state of a grid.

    force = exp(linear predictor) + N(0, noise_sd_n), drawn in state order (d, h, v) and then
    repetition; identical arguments give identical sets. States outside the model's domain
    are kept and flagged "out_of_domain".
    """
    if repetitions < 1:
        raise ContractError(f"repetitions must be >= 1, got {repetitions}")
    if not (noise_sd_n >= 0 and math.isfinite(noise_sd_n)):
        raise ContractError(f"noise_sd_n must be a finite value >= 0, got {noise_sd_n}")

    rng = np.random.default_rng(seed)
    states = grid.states()
    d, h, v = (np.array(axis) for axis in zip(*states))
    mean_forces = np.exp(model.linear_predictor(d, h, v))
    noise = rng.normal(0.0, noise_sd_n, size=(len(states), repetitions)) if noise_sd_n > 0 else np.zeros((len(states), repetitions))

    samples, outside = [], 0
    for i, (di, hi, vi) in enumerate(states):
        flags = () if model.in_domain(di, hi, vi) else (OUT_OF_DOMAIN,)
        outside += bool(flags)
        for r in range(repetitions):
            samples.append(MeasurementSample(di, hi, vi, float(mean_forces[i] + noise[i, r]), r + 1, flags))
    if outside:
        logger.warning(f"{outside} of {len(states)} synthesized states lie outside the model domain")
    return MeasurementSet(tuple(samples), label if label is not None else model.label)
