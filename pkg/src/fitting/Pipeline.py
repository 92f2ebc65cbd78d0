from src.fitting.ols import fit_ols
from src.fitting.selection import p_value_filter, stepwise_eliminate_trace
from src.fitting.terms import term_pool
from src.shared.config import (
    MAX_WORKERS,
    P_VALUE_ALPHA,
    POOL_DEGREE,
    R2_SCORE_WEIGHT,
    SCORE_RMSE_SCALE,
    STOP_THRESHOLD,
)
from src.shared.errors import CFMError, ContractError
from src.shared.logger_manager import LoggerMixin


class CFMPipeline(LoggerMixin):
    """
    Two-stage model acquisition over several datasets sharing one term list.

    Stage one fits the full polynomial pool to every dataset and drops terms that are
    insignificant everywhere; stage two eliminates terms one by one. The intermediate
    results stay on the instance for reporting.
    """

    def __init__(
        self,
        pool_degree=POOL_DEGREE,
        alpha=P_VALUE_ALPHA,
        stop_threshold=STOP_THRESHOLD,
        r2_weight=R2_SCORE_WEIGHT,
        rmse_scale=SCORE_RMSE_SCALE,
        max_workers=MAX_WORKERS,
    ):
        super().__init__()
        self.pool_degree = pool_degree
        self.alpha = alpha
        self.stop_threshold = stop_threshold
        self.r2_weight = r2_weight
        self.rmse_scale = rmse_scale
        self.max_workers = max_workers
        self.datasets = []
        self.pool_fits = []
        self.stage_one_terms = []
        self.elimination_trace = []
        self.final_terms = []
        self.models = []
        self.activity_logs = []

    def register_dataset(self, dataset):
        """Add a dataset to the fit."""
        if not len(dataset):
            raise ContractError(f"dataset '{dataset.label}' is empty")
        self.datasets.append(dataset)
        self.log_activity(f"registered dataset '{dataset.label}' ({len(dataset)} samples)")

    def run(self):
        """Run both stages and the final fit; returns one CFMModel per registered dataset."""
        if not self.datasets:
            self.log_error("no dataset registered")
            raise ContractError("fit_cfm3d needs at least one dataset")
        try:
            self._stage_one()
            self._stage_two()
            self.models = [fit_ols(ds, self.final_terms) for ds in self.datasets]
        except CFMError as e:
            self.log_error(str(e))
            raise
        for model in self.models:
            self.log_stage_event(
                "final", model.label,
                f"rmse={model.diagnostics.rmse:.6g} r2={model.diagnostics.r2:.6g} rmse_n={model.diagnostics.rmse_n:.6g}",
            )
        return self.models

    def _stage_one(self):
        pool = term_pool(self.pool_degree)
        self.pool_fits = [fit_ols(ds, pool) for ds in self.datasets]
        for fit in self.pool_fits:
            if fit.diagnostics.aliased:
                self.log_stage_event(
                    "one", fit.label,
                    f"aliased: {', '.join(t.name for t in fit.diagnostics.aliased)}",
                )
        self.stage_one_terms = p_value_filter(self.pool_fits, self.alpha)
        self.log_activity(f"stage one: {len(pool)} -> {len(self.stage_one_terms)} terms")

    def _stage_two(self):
        self.final_terms, self.elimination_trace = stepwise_eliminate_trace(
            self.datasets,
            self.stage_one_terms,
            stop_threshold=self.stop_threshold,
            r2_weight=self.r2_weight,
            rmse_scale=self.rmse_scale,
            max_workers=self.max_workers,
        )
        self.log_activity(
            f"stage two: {len(self.stage_one_terms)} -> {len(self.final_terms)} terms "
            f"({', '.join(t.name for t in self.final_terms)})"
        )

    def log_activity(self, activity):
        """Log a pipeline-level activity and keep it for the report."""
        self.activity_logs.append(activity)
        self.log_info(activity)

    def report(self):
        """Human-readable summary of both stages."""
        lines = [f"stage one survivors ({len(self.stage_one_terms)}): {', '.join(t.name for t in self.stage_one_terms)}"]
        for step in self.elimination_trace:
            lines.append(f"  removed {step.term.name:<8} score {step.score:.6g}")
        lines.append(f"final terms ({len(self.final_terms)}): {', '.join(t.name for t in self.final_terms)}")
        return "\n".join(lines)


def fit_cfm3d(
    datasets,
    pool_degree=POOL_DEGREE,
    alpha=P_VALUE_ALPHA,
    stop_threshold=STOP_THRESHOLD,
    **kwargs,
):
    """term pool -> per-dataset fit -> p-value filter -> stepwise elimination -> final fits."""
    pipeline = CFMPipeline(pool_degree, alpha, stop_threshold, **kwargs)
    for dataset in datasets:
        pipeline.register_dataset(dataset)
    return pipeline.run()
