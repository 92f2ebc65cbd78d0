from dataclasses import dataclass
from typing import Dict

from src.evaluation.metrics import METRICS, ErrorReport, estimation_errors, render_report_table
from src.shared.config import MAX_WORKERS
from src.shared.errors import ContractError
from src.shared.parallel_execution import execute_in_parallel


@dataclass(frozen=True)
class ComparisonTable:
    """ErrorReports per predictor plus, per metric, whether each one is worse than the reference."""

    reports: Dict[str, ErrorReport]
    reference: str
    worse_than_reference: Dict[str, Dict[str, bool]]

    def worse_metrics(self, name):
        return [m for m, worse in self.worse_than_reference[name].items() if worse]

    def render(self):
        lines = [render_report_table(self.reports).rstrip("\n"), f"reference: {self.reference}"]
        for name in self.reports:
            if name != self.reference:
                worse = self.worse_metrics(name)
                lines.append(f"{name} worse than {self.reference} in: {', '.join(worse) if worse else 'none'}")
        return "\n".join(lines) + "\n"


def worse_flags(report, reference):
    """A metric is worse when it is strictly larger than the reference's."""
    return {m: report.metric(m) > reference.metric(m) for m in METRICS}


def compare_models(predictors, test, reference=None, max_workers=MAX_WORKERS):
    """
    Evaluate each (name, predictor) on test and flag metrics worse than the reference.

    The reference defaults to the first predictor.
    """
    predictors = list(predictors)
    if not predictors:
        raise ContractError("compare_models needs at least one predictor")
    names = [name for name, _ in predictors]
    if len(set(names)) != len(names):
        raise ContractError("predictor names must be unique")
    reference = names[0] if reference is None else reference
    if reference not in names:
        raise ContractError(f"reference {reference!r} is not among the predictors")

    results = execute_in_parallel(
        [(estimation_errors, (predictor, test, name)) for name, predictor in predictors],
        max_workers=max_workers,
    )
    reports = dict(zip(names, results))
    flags = {name: worse_flags(report, reports[reference]) for name, report in reports.items()}
    return ComparisonTable(reports, reference, flags)
