"""Numerical tolerances and defaults shared across the package."""

UNIT_NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
CONVEX_TOL = 1e-12
DUPLICATE_TOL = 1e-12
COLLINEAR_TOL = 1e-12
STEINER_AREA_RTOL = 1e-9
ENERGY_CLAMP = 1e-9

MIN_GRID_RESOLUTION = 16
DEFAULT_RESOLUTION = {2: 2048, 3: 64, 4: 24}
DEFAULT_MC_NODES = 4096

EXACT_SIGN_MAX_DIM = 12
SIGN_SAMPLES = 4096

LEMMA10_C1 = 10.0
LEMMA11_C2 = 10.0
SMALL_CAP_C7 = 1.0 / 30.0

DEFAULT_SEED = 20240611
