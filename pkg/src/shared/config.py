# shared/config.py
# Default constants. Every value here is a default only; callers and CLI flags override them.

# Measuring device
DEVICE_FORCE_LIMIT_N = 500.0  # samples above this are discarded, equality is kept
STATE_TOLERANCE = 1e-6  # m and m/s, matching grid states

# Model acquisition
POOL_DEGREE = 3
P_VALUE_ALPHA = 0.05
STOP_THRESHOLD = 0.5
R2_SCORE_WEIGHT = 100.0
SCORE_TIE_TOLERANCE = 1e-12
SCORE_RMSE_SCALE = "force"  # "force" (N) or "log"
ALIAS_TOLERANCE = 1e-9  # relative residual norm of a column below this -> aliased
EXACT_FIT_RATIO = 1e-12  # RSS/dof below this fraction of TSS -> exact fit
EXACT_FIT_COEFFICIENT = 1e-9
MIN_2D_SAMPLES = 4

# Safe speed
DEFAULT_MARGIN_FACTOR = 1.10
QUADRATIC_EPS = 1e-12

# TS 15066 constants
FORCE_LIMIT_QUASI_STATIC_N = 140.0
FORCE_LIMIT_TRANSIENT_N = 280.0
HAND_SPRING_CONSTANT_NPM = 75000.0

# Contact classification
TRANSIENT_WINDOW_S = 0.5
ONSET_THRESHOLD_N = 5.0
NOISE_FLOOR_N = 5.0

# Mechanics
INFINITE_MASS_THRESHOLD = 1e-12
IK_ROUND_TRIP_TOLERANCE_M = 1e-9
INTERIOR_REACH_FRACTION = 0.95

# Output
SIGNIFICANT_DIGITS = 9
MAX_WORKERS = 4
