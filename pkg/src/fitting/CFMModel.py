import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from src.fitting.terms import TermSpec, check_terms
from src.shared.errors import ContractError, ModelFormatError

logger = logging.getLogger("default")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FitDiagnostics:
    """
    Goodness of fit of one OLS run.

    rmse and r2 are computed on ln(F); rmse_n is the RMSE of exp(prediction) against the
    measured force in newtons. std_errors and p_values hold None for aliased terms.
    """

    rmse: float
    r2: float
    std_errors: Tuple[Optional[float], ...]
    p_values: Tuple[Optional[float], ...]
    dof: int
    rmse_n: float = 0.0
    n_samples: int = 0
    aliased: Tuple[TermSpec, ...] = ()


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned bounding box of the training states."""

    d_min: float
    d_max: float
    h_min: float
    h_max: float
    v_min: float
    v_max: float

    @classmethod
    def from_samples(cls, samples):
        if not len(samples):
            raise ContractError("cannot build a domain from an empty dataset")
        d, h, v = samples.distances(), samples.heights(), samples.velocities()
        return cls(min(d), max(d), min(h), max(h), min(v), max(v))

    @classmethod
    def from_grid(cls, grid):
        v = grid.velocities_mps or (float("nan"),)
        return cls(
            grid.distances_m[0], grid.distances_m[-1],
            grid.heights_m[0], grid.heights_m[-1],
            v[0], v[-1],
        )

    def contains(self, d, h, v, tolerance=1e-9):
        return (
            self.d_min - tolerance <= d <= self.d_max + tolerance
            and self.h_min - tolerance <= h <= self.h_max + tolerance
            and self.v_min - tolerance <= v <= self.v_max + tolerance
        )


@dataclass(frozen=True)
class CFMModel:
    """
    Log-linear impact-force model ln F = sum_j coefficient_j * term_j(d, h, v).

    A coefficient of None marks a term that was dropped as aliased during the fit;
    it does not contribute to predictions.
    """

    terms: Tuple[TermSpec, ...]
    coefficients: Tuple[Optional[float], ...]
    label: str = ""
    diagnostics: Optional[FitDiagnostics] = None
    domain: Optional[DomainBox] = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(check_terms(self.terms)))
        object.__setattr__(
            self,
            "coefficients",
            tuple(None if c is None else float(c) for c in self.coefficients),
        )
        if len(self.terms) != len(self.coefficients):
            raise ContractError(
                f"{len(self.terms)} terms but {len(self.coefficients)} coefficients"
            )

    def active_terms(self):
        return [(t, c) for t, c in zip(self.terms, self.coefficients) if c is not None]

    def coefficient(self, term):
        """Coefficient of term, 0.0 when the model does not contain it or it was aliased."""
        for t, c in zip(self.terms, self.coefficients):
            if t == term:
                return 0.0 if c is None else c
        return 0.0

    def linear_predictor(self, d, h, v):
        """ln F at (d, h, v); scalars give a float, arrays broadcast."""
        d, h, v = np.broadcast_arrays(
            np.asarray(d, dtype=float), np.asarray(h, dtype=float), np.asarray(v, dtype=float)
        )
        total = np.zeros(d.shape)
        for term, coefficient in self.active_terms():
            total = total + coefficient * term.evaluate(d, h, v)
        return float(total) if total.ndim == 0 else total

    def in_domain(self, d, h, v):
        return self.domain is None or self.domain.contains(d, h, v)

    def describe(self):
        """One line per term: name and coefficient (aliased terms marked)."""
        lines = [f"model {self.label}"]
        p_values = self.diagnostics.p_values if self.diagnostics else (None,) * len(self.terms)
        for term, coefficient, p_value in zip(self.terms, self.coefficients, p_values):
            if coefficient is None:
                lines.append(f"  {term.name:<10} aliased")
            elif p_value is None:
                lines.append(f"  {term.name:<10} {coefficient:.9g}")
            else:
                lines.append(f"  {term.name:<10} {coefficient:.9g}  p={p_value:.3g}")
        return "\n".join(lines)


def _encode_float(value):
    if value is None:
        return None
    value = float(value)
    if math.isfinite(value):
        return value
    return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")


def _decode_float(value):
    if value is None:
        return None
    if isinstance(value, str):
        if value not in ("nan", "inf", "-inf"):
            raise ModelFormatError(f"invalid number {value!r}")
        return float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFormatError(f"invalid number {value!r}")
    return float(value)


def model_to_dict(model):
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "label": model.label,
        "terms": [list(t.exponents) for t in model.terms],
        "coefficients": [_encode_float(c) for c in model.coefficients],
        "diagnostics": None,
        "domain": None,
    }
    diag = model.diagnostics
    if diag is not None:
        document["diagnostics"] = {
            "rmse": _encode_float(diag.rmse),
            "r2": _encode_float(diag.r2),
            "rmse_n": _encode_float(diag.rmse_n),
            "dof": diag.dof,
            "n_samples": diag.n_samples,
            "std_errors": [_encode_float(x) for x in diag.std_errors],
            "p_values": [_encode_float(x) for x in diag.p_values],
            "aliased": [list(t.exponents) for t in diag.aliased],
        }
    if model.domain is not None:
        document["domain"] = {k: _encode_float(v) for k, v in vars(model.domain).items()}
    return document


def _terms_from(rows):
    try:
        return [TermSpec(*(int(x) for x in row)) for row in rows]
    except (TypeError, ValueError) as e:
        raise ModelFormatError(f"invalid term list: {e}") from e


def model_from_dict(document):
    """Rebuild a CFMModel; any structural problem raises ModelFormatError."""
    try:
        terms = _terms_from(document["terms"])
        coefficients = [_decode_float(c) for c in document["coefficients"]]
        diagnostics = None
        if document.get("diagnostics") is not None:
            raw = document["diagnostics"]
            diagnostics = FitDiagnostics(
                rmse=_decode_float(raw["rmse"]),
                r2=_decode_float(raw["r2"]),
                std_errors=tuple(_decode_float(x) for x in raw["std_errors"]),
                p_values=tuple(_decode_float(x) for x in raw["p_values"]),
                dof=int(raw["dof"]),
                rmse_n=_decode_float(raw.get("rmse_n", 0.0)),
                n_samples=int(raw.get("n_samples", 0)),
                aliased=tuple(_terms_from(raw.get("aliased", []))),
            )
        domain = None
        if document.get("domain") is not None:
            domain = DomainBox(**{k: _decode_float(v) for k, v in document["domain"].items()})
        return CFMModel(tuple(terms), tuple(coefficients), str(document.get("label", "")), diagnostics, domain)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, ContractError) as e:
        raise ModelFormatError(f"malformed model document: {e}") from e


def dumps_model(model):
    return json.dumps(model_to_dict(model), sort_keys=True, indent=2) + "\n"


def loads_model(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"model file is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ModelFormatError("model document must be a JSON object")
    return model_from_dict(document)


def save_model(model, path):
    Path(path).write_text(dumps_model(model), encoding="utf-8")
    logger.info(f"Saved model '{model.label}' to {path}")


def load_model(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"model file is not UTF-8 text: {e.reason}") from e
    return loads_model(text)
