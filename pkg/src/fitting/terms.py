import re
from dataclasses import dataclass

import numpy as np

from src.shared.errors import ContractError, ForceDomainError

_FACTOR = re.compile(r"^([dhv])(?:\^(\d+))?$")


@dataclass(frozen=True)
class TermSpec:
    """A monomial d^exp_d * h^exp_h * v^exp_v; (0, 0, 0) is the intercept."""

    exp_d: int
    exp_h: int
    exp_v: int

    def __post_init__(self):
        if min(self.exp_d, self.exp_h, self.exp_v) < 0:
            raise ContractError(f"term exponents must be >= 0, got {self.exponents}")

    @property
    def exponents(self):
        return (self.exp_d, self.exp_h, self.exp_v)

    @property
    def degree(self):
        return self.exp_d + self.exp_h + self.exp_v

    @property
    def is_intercept(self):
        return self.degree == 0

    @property
    def velocity_degree(self):
        return self.exp_v

    def sort_key(self):
        # total degree, then d before h before v
        return (self.degree, -self.exp_d, -self.exp_h)

    @property
    def name(self):
        if self.is_intercept:
            return "1"
        factors = []
        for symbol, exponent in zip("dhv", self.exponents):
            if exponent == 1:
                factors.append(symbol)
            elif exponent > 1:
                factors.append(f"{symbol}^{exponent}")
        return "*".join(factors)

    def __str__(self):
        return self.name

    def evaluate(self, d, h, v):
        """Vectorized monomial value; broadcasts like numpy."""
        d, h, v = np.asarray(d, dtype=float), np.asarray(h, dtype=float), np.asarray(v, dtype=float)
        return d**self.exp_d * h**self.exp_h * v**self.exp_v


INTERCEPT = TermSpec(0, 0, 0)


def parse_term(text):
    """Inverse of TermSpec.name, e.g. 'd^2*v' -> TermSpec(2, 0, 1)."""
    text = text.replace(" ", "").replace("**", "^")
    if text == "1":
        return INTERCEPT
    exponents = {"d": 0, "h": 0, "v": 0}
    for factor in text.split("*"):
        match = _FACTOR.match(factor)
        if not match:
            raise ContractError(f"cannot parse term {text!r}")
        exponents[match.group(1)] += int(match.group(2) or 1)
    return TermSpec(exponents["d"], exponents["h"], exponents["v"])


def sort_terms(terms):
    return sorted(terms, key=TermSpec.sort_key)


def term_pool(max_degree):
    """
    Intercept plus every monomial in (d, h, v) of total degree 1..max_degree,
    in graded-lexicographic order.
    """
    if max_degree < 1:
        raise ContractError(f"max_degree must be >= 1, got {max_degree}")
    pool = [INTERCEPT]
    for degree in range(1, max_degree + 1):
        for a in range(degree, -1, -1):
            for b in range(degree - a, -1, -1):
                pool.append(TermSpec(a, b, degree - a - b))
    return pool


def check_terms(terms):
    terms = list(terms)
    if not terms:
        raise ContractError("term list is empty")
    if len(set(terms)) != len(terms):
        raise ContractError("term list contains duplicates")
    return terms


def design_matrix(samples, terms):
    """
    Regressors and response for a log-linear fit.

    Returns (X, y) with X[i, j] = term_j(d_i, h_i, v_i) and y[i] = ln(force_i).
    """
    terms = check_terms(terms)
    forces = np.asarray(samples.forces(), dtype=float)
    if np.any(forces <= 0):
        index = int(np.argmax(forces <= 0))
        raise ForceDomainError(
            f"force must be positive to take its logarithm, sample {index} has {forces[index]} N"
        )
    d = np.asarray(samples.distances(), dtype=float)
    h = np.asarray(samples.heights(), dtype=float)
    v = np.asarray(samples.velocities(), dtype=float)
    X = np.column_stack([term.evaluate(d, h, v) for term in terms]) if len(d) else np.empty((0, len(terms)))
    return X, np.log(forces)


# published nine-term model, in the order its coefficients are listed
CFM3D_TERMS = (
    INTERCEPT,
    TermSpec(0, 0, 1),
    TermSpec(1, 0, 0),
    TermSpec(2, 0, 0),
    TermSpec(1, 1, 0),
    TermSpec(0, 2, 0),
    TermSpec(2, 0, 1),
    TermSpec(1, 0, 2),
    TermSpec(1, 2, 0),
)

# ln F = b0 + b1*v + b2*d + b3*d^2
CFM2D_TERMS = (INTERCEPT, TermSpec(0, 0, 1), TermSpec(1, 0, 0), TermSpec(2, 0, 0))
