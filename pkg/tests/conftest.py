import pytest

from src.dataio.Measurement import GridSpec, MeasurementSample, MeasurementSet
from src.dataio.grids import KUKA_TRAIN_GRID, UR10E_FULL_GRID, UR10E_TRAIN_GRID
from src.dataio.synthesis import synthesize_dataset
from src.fitting.reference_models import KUKA_10NM_MODEL, KUKA_30NM_MODEL, UR10E_MODEL

# --------------------------- Fixtures --------------------------- #


@pytest.fixture
def ur_model():
    """Published UR10e model."""
    return UR10E_MODEL


@pytest.fixture
def full_grid_5x5x5():
    """UR10e distances and heights with all five speeds."""
    return UR10E_FULL_GRID


@pytest.fixture
def ur_noiseless(ur_model, full_grid_5x5x5):
    """Noise-free samples of the UR10e model on its full grid."""
    return synthesize_dataset(ur_model, full_grid_5x5x5, 0.0, 1, seed=0)


@pytest.fixture
def reference_suite():
    return [
        (UR10E_MODEL, UR10E_TRAIN_GRID),
        (KUKA_30NM_MODEL, KUKA_TRAIN_GRID),
        (KUKA_10NM_MODEL, KUKA_TRAIN_GRID),
    ]


@pytest.fixture
def small_set():
    """Three samples at one height, forces 499/500/501 N."""
    samples = [
        MeasurementSample(0.52, 0.14, 0.20, 499.0, 1),
        MeasurementSample(0.61, 0.14, 0.25, 500.0, 1),
        MeasurementSample(0.70, 0.14, 0.30, 501.0, 1),
    ]
    return MeasurementSet(tuple(samples), "ur10e")


@pytest.fixture
def grid_3x3x3():
    return GridSpec((0.52, 0.70, 0.88), (0.14, 0.30, 0.46), (0.20, 0.30, 0.40))


def make_set(rows, label="test"):
    """MeasurementSet from (d, h, v, F) tuples."""
    return MeasurementSet(tuple(MeasurementSample(d, h, v, f, 1) for d, h, v, f in rows), label)
