# ------ config/config.py ------

import os

# Project directories
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(PROJECT_ROOT, 'data')
SPECS_DIR = os.path.join(DATA_DIR, 'specs')

# Grid and enclosure settings
DEFAULT_DEPTH = 7
DEFAULT_TAU = 0.5
DEFAULT_BLOAT = 1.0  # in cell widths
DEFAULT_SAMPLES_PER_AXIS = 3  # corners + center pattern
DEFAULT_CELL_CAP = 2 ** 24
MAX_GRID_DIM = 3

# Integration settings
MAGNITUDE_CAP = 1e6
DEFAULT_SAMPLE_DT = 0.1

# Limit-set and lattice settings
OMEGA_ITERATION_FACTOR = 4  # iteration cap = factor * n_cells before the diagnostic
LATTICE_CAP = 4096

# Lyapunov settings
ZETA_TOL = 1e-3
DECREASE_TOL = 1e-9
DEFAULT_TMAX = 20.0
DEFAULT_HORIZON = 40.0
DECREASE_SAMPLES = 20
DECREASE_SPAN = 5.0
DECREASE_SAMPLE_DT = 0.1
SEPARATION_EPS = 1e-12

# Verification suite settings
RANDOM_SUITE_SEEDS = 200
RANDOM_SUITE_MAX_CELLS = 50
RANDOM_SUITE_DENSITY = 0.1
RANDOM_SUITE_OMEGA_SEED_OFFSET = 50_000
BRUTE_FORCE_MAX_CELLS = 12
ENCLOSURE_SAMPLES = 1000

# Output settings
CSV_FLOAT_FORMAT = None  # shortest round-trip repr


def get_cell_cap():
    """
    Maximum number of grid cells a build may allocate.

    Returns:
        int: MFW_CELL_CAP from the environment, or the default cap
    """
    value = os.environ.get('MFW_CELL_CAP')
    if value:
        return int(value)
    return DEFAULT_CELL_CAP


def tolerances():
    """
    Tolerances echoed into every analysis report.

    Returns:
        dict: Name to value mapping
    """
    return {
        'magnitude_cap': MAGNITUDE_CAP,
        'omega_iteration_factor': OMEGA_ITERATION_FACTOR,
        'lattice_cap': LATTICE_CAP,
        'zeta_tol': ZETA_TOL,
        'decrease_tol': DECREASE_TOL,
        'default_tmax': DEFAULT_TMAX,
        'default_horizon': DEFAULT_HORIZON,
        'separation_eps': SEPARATION_EPS,
        'cell_cap': get_cell_cap(),
    }
