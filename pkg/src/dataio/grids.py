# dataio/grids.py
# Measurement grids of the two robot set-ups. Levels are written out so that they compare exactly.
from src.dataio.Measurement import GridSpec

VELOCITIES_ALL = (0.20, 0.25, 0.30, 0.35, 0.40)
VELOCITIES_TRAIN = (0.20, 0.30, 0.40)
HEIGHTS_ALL = (0.14, 0.22, 0.30, 0.38, 0.46)
HEIGHTS_TRAIN = (0.14, 0.30, 0.46)

UR10E_DISTANCES = (0.52, 0.61, 0.70, 0.79, 0.88)
UR10E_TRAIN_DISTANCES = (0.52, 0.70, 0.88)
KUKA_DISTANCES = (0.56, 0.635, 0.71, 0.785, 0.86)
KUKA_TRAIN_DISTANCES = (0.56, 0.71, 0.86)

# (d, h) positions skipped during the UR10e campaign
UR10E_OMITTED_POSITIONS = ((0.61, 0.30), (0.79, 0.30))

UR10E_FULL_GRID = GridSpec(UR10E_DISTANCES, HEIGHTS_ALL, VELOCITIES_ALL)
UR10E_TRAIN_GRID = GridSpec(UR10E_TRAIN_DISTANCES, HEIGHTS_TRAIN, VELOCITIES_TRAIN)
KUKA_FULL_GRID = GridSpec(KUKA_DISTANCES, HEIGHTS_ALL, VELOCITIES_ALL)
KUKA_TRAIN_GRID = GridSpec(KUKA_TRAIN_DISTANCES, HEIGHTS_TRAIN, VELOCITIES_TRAIN)

REFERENCE_GRIDS = {
    "ur10e-full": UR10E_FULL_GRID,
    "ur10e-train": UR10E_TRAIN_GRID,
    "kuka-full": KUKA_FULL_GRID,
    "kuka-train": KUKA_TRAIN_GRID,
}


def parse_levels(text):
    """Parse a comma-separated list of levels, e.g. '0.52,0.61,0.70'."""
    return tuple(float(x) for x in text.split(",") if x.strip())
