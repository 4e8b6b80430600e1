from __future__ import annotations

assert __package__

PACKAGE_NAME = __package__.partition(".")[0]
PACKAGE_VERSION = "0.1.0"

# -------- #
# Settings #
# -------- #

SETTINGS_FILE_NAME = f"{PACKAGE_NAME}.settings.json"
SETTINGS_ENV_VAR = "GRWS_SETTINGS"

DEFAULT_RAY_DEPTH = 64
DEFAULT_BATTERY_N_MAX = 10
DEFAULT_BATTERY_K_MAX = 25
DEFAULT_START_BITS = 128
DEFAULT_MAX_DOUBLINGS = 4
DEFAULT_K_PROBE = 6
DEFAULT_J_PROBE = 12
DEFAULT_BERGER_DEPTH = 24
DEFAULT_BERGER_N_MAX = 12
DEFAULT_SWEEP_JOBS = 1
DEFAULT_APPROX_DPS = 30
DEFAULT_REPORT_PREFIX = 8
DEFAULT_DET_K_MAX = 6
DEFAULT_DET_J_MAX = 10

# ---------- #
# Exit codes #
# ---------- #

EXIT_OK = 0
EXIT_VALIDATION_ERROR = 1
EXIT_INVARIANT_BREACH = 2

# ------------ #
# Report notes #
# ------------ #

NOTE_TWO_VS_THREE_ATOMS = (
    "The measure built on the ray D = p^{{ k }} N is {{ k + 1 }}-atomic. "
    "Prose elsewhere describes this example shift as having a three-atomic Berger measure; "
    "the explicit construction gives {{ atoms }} atoms, and the atoms reproduce every tested moment exactly."
)
NOTE_BOUNDARY_ANTIDIAGONAL = (
    "The point lies on D = -N, the border of Sectors II and III; "
    "the construction is reported for diagnostics only."
)
NOTE_FINITE_DEPTH = (
    "Batteries test finitely many orders and indices (n <= {{ n_max }}, k <= {{ k_max }}); "
    "'holds-to-depth' is evidence, not proof."
)
