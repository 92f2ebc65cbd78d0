import logging

import numpy as np
import scipy.linalg
from scipy.special import betainc

from src.fitting.CFMModel import CFMModel, DomainBox, FitDiagnostics
from src.fitting.terms import check_terms, design_matrix
from src.shared.config import (
    ALIAS_TOLERANCE,
    EXACT_FIT_COEFFICIENT,
    EXACT_FIT_RATIO,
)
from src.shared.errors import UnderdeterminedFitError

logger = logging.getLogger("debugger")


def detect_aliased(X, tolerance=ALIAS_TOLERANCE):
    """
    Flag columns that are linear combinations of earlier, non-aliased columns.

    Columns are visited in the given order. A column is aliased when the norm of its component
    orthogonal to the span of the kept columns is at most tolerance * its own norm.
    Returns a list of booleans, one per column.
    """
    X = np.asarray(X, dtype=float)
    basis = np.empty((X.shape[0], 0))
    flags = []
    for j in range(X.shape[1]):
        column = X[:, j]
        norm = np.linalg.norm(column)
        residual = column.copy()
        # project twice, a single classical Gram-Schmidt pass loses orthogonality
        for _ in range(2):
            residual = residual - basis @ (basis.T @ residual)
        residual_norm = np.linalg.norm(residual)
        aliased = norm == 0.0 or residual_norm <= tolerance * norm
        flags.append(bool(aliased))
        if not aliased:
            basis = np.column_stack([basis, residual / residual_norm])
    return flags


def t_test_p_values(coefficients, std_errors, dof):
    """Two-sided Student-t p-values, P(|T| > |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2)."""
    t = np.asarray(coefficients, dtype=float) / np.asarray(std_errors, dtype=float)
    x = dof / (dof + t**2)
    return np.clip(betainc(dof / 2.0, 0.5, x), 0.0, 1.0)


def _p_values(beta, std_errors, rss, tss, dof):
    exact = dof == 0 or rss / dof <= EXACT_FIT_RATIO * tss
    if exact:
        return np.where(np.abs(beta) > EXACT_FIT_COEFFICIENT, 0.0, 1.0), True
    with np.errstate(divide="ignore", invalid="ignore"):
        p = t_test_p_values(beta, std_errors, dof)
    # a zero standard error with rss > 0 cannot happen for a full-rank design
    return np.nan_to_num(p, nan=1.0), False


def fit_ols(samples, terms, tolerance=ALIAS_TOLERANCE):
    """
    Ordinary least squares fit of ln(F) on the given terms.

    Aliased columns are dropped before solving and reported in the diagnostics;
    their coefficient, standard error and p-value are None.
    """
    terms = check_terms(terms)
    X, y = design_matrix(samples, terms)
    n = X.shape[0]
    aliased = detect_aliased(X, tolerance)
    active = [j for j, flag in enumerate(aliased) if not flag]
    p = len(active)
    # checked against the columns left after aliasing; dof = 0 is an exact fit
    if p == 0 or n < p:
        raise UnderdeterminedFitError(
            f"{n} samples cannot determine {p} independent terms of '{samples.label}'"
        )

    Q, R = scipy.linalg.qr(X[:, active], mode="economic")
    beta = scipy.linalg.solve_triangular(R, Q.T @ y)
    prediction = X[:, active] @ beta
    residuals = y - prediction
    rss = float(residuals @ residuals)
    tss = float(((y - y.mean()) ** 2).sum()) if np.ptp(y) > 0 else 0.0
    dof = n - p

    rmse = float(np.sqrt(rss / n))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    rmse_n = float(np.sqrt(np.mean((np.exp(prediction) - np.exp(y)) ** 2)))

    # diag((X^T X)^-1) = squared row norms of R^-1
    R_inv = scipy.linalg.solve_triangular(R, np.eye(p))
    unscaled = (R_inv**2).sum(axis=1)
    if dof > 0:
        std_errors = np.sqrt(unscaled * rss / dof)
    else:
        std_errors = np.full(p, np.nan)
    p_values, exact = _p_values(beta, std_errors, rss, tss, dof)

    coefficients, se_out, p_out = [None] * len(terms), [None] * len(terms), [None] * len(terms)
    for k, j in enumerate(active):
        coefficients[j] = float(beta[k])
        se_out[j] = float(std_errors[k])
        p_out[j] = float(p_values[k])

    dropped = tuple(t for t, flag in zip(terms, aliased) if flag)
    if dropped:
        logger.debug(f"[{samples.label}] aliased terms dropped: {', '.join(t.name for t in dropped)}")
    if exact:
        logger.debug(f"[{samples.label}] exact fit, p-values set by coefficient magnitude")

    diagnostics = FitDiagnostics(
        rmse=rmse,
        r2=float(r2),
        std_errors=tuple(se_out),
        p_values=tuple(p_out),
        dof=dof,
        rmse_n=rmse_n,
        n_samples=n,
        aliased=dropped,
    )
    return CFMModel(
        terms=tuple(terms),
        coefficients=tuple(coefficients),
        label=samples.label,
        diagnostics=diagnostics,
        domain=DomainBox.from_samples(samples),
    )
