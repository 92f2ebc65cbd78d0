from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from src.shared.errors import ContractError
from src.shared.utils import format_number

# column order of the accuracy tables
REPORT_COLUMNS = [
    ("max_ue_pct", "max UE %"),
    ("max_ue_n", "max UE N"),
    ("mean_ue_pct", "mean UE %"),
    ("mean_ue_n", "mean UE N"),
    ("max_oe_pct", "max OE %"),
    ("max_oe_n", "max OE N"),
    ("mean_oe_pct", "mean OE %"),
    ("mean_oe_n", "mean OE N"),
]
METRICS = [key for key, _ in REPORT_COLUMNS]


@dataclass(frozen=True)
class ErrorReport:
    """
    Under- and overestimation statistics of a force predictor.

    max_*_n is the error of the sample with the largest percentage error; max_*_n_abs is the
    largest error in newtons, which may come from another sample. Means are taken over the
    underestimated (resp. overestimated) samples only; an empty subset gives zeros.
    """

    max_ue_pct: float
    max_ue_n: float
    mean_ue_pct: float
    mean_ue_n: float
    max_oe_pct: float
    max_oe_n: float
    mean_oe_pct: float
    mean_oe_n: float
    n_samples: int
    n_under: int = 0
    n_over: int = 0
    max_ue_n_abs: float = 0.0
    max_oe_n_abs: float = 0.0
    label: str = ""

    def metric(self, key):
        return getattr(self, key)


def _subset_stats(errors_n, errors_pct):
    if errors_n.size == 0:
        return 0.0, 0.0, 0.0, 0.0, 0.0
    k = int(np.argmax(errors_pct))
    return (
        float(errors_pct[k]),
        float(errors_n[k]),
        float(errors_pct.mean()),
        float(errors_n.mean()),
        float(errors_n.max()),
    )


def estimation_errors_from_predictions(measured, predicted, label=""):
    """ErrorReport from paired measured and predicted forces (N)."""
    measured = np.asarray(measured, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if measured.size == 0:
        raise ContractError("cannot evaluate errors on an empty test set")
    if measured.shape != predicted.shape:
        raise ContractError("measured and predicted forces differ in length")
    err = predicted - measured
    under, over = err < 0, err > 0
    ue = _subset_stats(-err[under], -err[under] / measured[under] * 100.0)
    oe = _subset_stats(err[over], err[over] / measured[over] * 100.0)
    return ErrorReport(
        max_ue_pct=ue[0], max_ue_n=ue[1], mean_ue_pct=ue[2], mean_ue_n=ue[3],
        max_oe_pct=oe[0], max_oe_n=oe[1], mean_oe_pct=oe[2], mean_oe_n=oe[3],
        n_samples=int(measured.size),
        n_under=int(under.sum()),
        n_over=int(over.sum()),
        max_ue_n_abs=ue[4],
        max_oe_n_abs=oe[4],
        label=label,
    )


def predict_all(predictor, test):
    return np.array([predictor(s.distance_m, s.height_m, s.velocity_mps) for s in test.samples], dtype=float)


def model_predictor(model):
    """Force-prediction callable (d, h, v) -> N of a CFMModel."""

    def predict(d, h, v):
        return float(np.exp(model.linear_predictor(d, h, v)))

    predict.__name__ = model.label or "model"
    return predict


def estimation_errors(model, test, label=None):
    """Errors of a CFMModel (or any (d, h, v) -> N callable) on a test set."""
    if not len(test):
        raise ContractError("cannot evaluate errors on an empty test set")
    predictor = model if callable(model) else model_predictor(model)
    if label is None:
        label = getattr(model, "label", None) or getattr(predictor, "__name__", "")
    return estimation_errors_from_predictions(test.forces(), predict_all(predictor, test), label)


def reports_to_frame(reports):
    """DataFrame with one row per report in table column order."""
    rows = []
    for name, report in reports.items():
        data = asdict(report)
        row = {"predictor": name}
        row.update({title: data[key] for key, title in REPORT_COLUMNS})
        row.update({"n": report.n_samples, "n UE": report.n_under, "n OE": report.n_over})
        rows.append(row)
    return pd.DataFrame(rows)


def render_report_table(reports):
    """Aligned text table of {name: ErrorReport}."""
    frame = reports_to_frame(reports)
    return frame.to_string(index=False, formatters={t: format_number for _, t in REPORT_COLUMNS}) + "\n"


def reports_to_csv(reports):
    frame = reports_to_frame(reports)
    for _, title in REPORT_COLUMNS:
        frame[title] = frame[title].map(format_number)
    return frame.to_csv(index=False, lineterminator="\n")
