import logging
from dataclasses import dataclass
from typing import Tuple

from src.fitting.ols import fit_ols
from src.fitting.terms import TermSpec
from src.shared.config import (
    MAX_WORKERS,
    P_VALUE_ALPHA,
    R2_SCORE_WEIGHT,
    SCORE_RMSE_SCALE,
    SCORE_TIE_TOLERANCE,
    STOP_THRESHOLD,
)
from src.shared.errors import CFMError, ContractError, EliminationError
from src.shared.parallel_execution import execute_in_parallel

logger = logging.getLogger("default")


@dataclass(frozen=True)
class EliminationStep:
    """One iteration of backward elimination: the removed term and what its removal cost."""

    term: TermSpec
    score: float
    delta_rmse: Tuple[float, ...]
    delta_r2: Tuple[float, ...]
    remaining: int


def p_value_filter(fits, alpha=P_VALUE_ALPHA):
    """
    Keep every term that is significant (p <= alpha) in at least one fit.

    Terms aliased in every fit count as insignificant; the intercept always survives.
    """
    fits = list(fits)
    if not fits:
        raise ContractError("p_value_filter needs at least one fit")
    if not 0 < alpha < 1:
        raise ContractError(f"alpha must lie in (0, 1), got {alpha}")
    terms = fits[0].terms
    for fit in fits[1:]:
        if fit.terms != terms:
            raise ContractError(
                f"fits '{fits[0].label}' and '{fit.label}' were made with different term lists"
            )

    survivors, removed = [], []
    for j, term in enumerate(terms):
        significant = any(
            fit.diagnostics.p_values[j] is not None and fit.diagnostics.p_values[j] <= alpha
            for fit in fits
        )
        if term.is_intercept or significant:
            survivors.append(term)
        else:
            removed.append(term)
    logger.info(
        f"p-value stage kept {len(survivors)} of {len(terms)} terms"
        + (f", removed {', '.join(t.name for t in removed)}" if removed else "")
    )
    return survivors


def _rmse(model, rmse_scale):
    return model.diagnostics.rmse_n if rmse_scale == "force" else model.diagnostics.rmse


def _refit_all(datasets, terms, removed):
    """Fit every dataset on terms minus removed; returns the list of models."""
    reduced = [t for t in terms if t != removed]
    try:
        return [fit_ols(ds, reduced) for ds in datasets]
    except CFMError as e:
        raise EliminationError(f"refit without {removed.name} failed: {e}", removed) from e


def _better(candidate, score, best, best_score, tie_tolerance):
    if best is None or score < best_score - tie_tolerance:
        return True
    if abs(score - best_score) <= tie_tolerance:
        # higher degree first; equal degree: candidates arrive in graded-lex order, later wins
        return candidate.degree >= best.degree
    return False


def stepwise_eliminate_trace(
    datasets,
    terms,
    stop_threshold=STOP_THRESHOLD,
    r2_weight=R2_SCORE_WEIGHT,
    rmse_scale=SCORE_RMSE_SCALE,
    max_workers=MAX_WORKERS,
    tie_tolerance=SCORE_TIE_TOLERANCE,
):
    """
    Backward elimination scored by sum over datasets of |dRMSE| + r2_weight * |dR2|.

    Each iteration refits every dataset once per removable term, relative to the current model,
    removes the cheapest term and stops as soon as the cheapest removal costs more than
    stop_threshold. Returns (surviving terms, list of EliminationStep).
    """
    datasets = list(datasets)
    terms = list(terms)
    if not datasets:
        raise ContractError("stepwise elimination needs at least one dataset")
    if not any(t.is_intercept for t in terms):
        raise ContractError("term list must contain the intercept")
    if rmse_scale not in ("force", "log"):
        raise ContractError(f"rmse_scale must be 'force' or 'log', got {rmse_scale!r}")

    try:
        current = [fit_ols(ds, terms) for ds in datasets]
    except CFMError as e:
        raise EliminationError(f"initial fit failed: {e}", None) from e

    steps = []
    while True:
        candidates = [t for t in terms if not t.is_intercept]
        if not candidates:
            break
        tasks = [(_refit_all, (datasets, terms, candidate)) for candidate in candidates]
        # the lowest failing candidate index is re-raised
        refits = execute_in_parallel(tasks, max_workers=max_workers)

        best, best_score, best_refit, best_deltas = None, None, None, None
        for candidate, refit in zip(candidates, refits):
            delta_rmse = tuple(abs(_rmse(new, rmse_scale) - _rmse(old, rmse_scale)) for new, old in zip(refit, current))
            delta_r2 = tuple(abs(new.diagnostics.r2 - old.diagnostics.r2) for new, old in zip(refit, current))
            score = sum(delta_rmse) + r2_weight * sum(delta_r2)
            if _better(candidate, score, best, best_score, tie_tolerance):
                best, best_score, best_refit, best_deltas = candidate, score, refit, (delta_rmse, delta_r2)

        if best_score > stop_threshold:
            logger.info(
                f"elimination stopped: cheapest removal ({best.name}) scores {best_score:.6g} > {stop_threshold}"
            )
            break
        terms = [t for t in terms if t != best]
        current = best_refit
        steps.append(EliminationStep(best, best_score, best_deltas[0], best_deltas[1], len(terms)))
        logger.info(f"eliminated {best.name} (score {best_score:.6g}), {len(terms)} terms left")

    return terms, steps


def stepwise_eliminate(datasets, terms, stop_threshold=STOP_THRESHOLD, **kwargs):
    return stepwise_eliminate_trace(datasets, terms, stop_threshold, **kwargs)[0]
