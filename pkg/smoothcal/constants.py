"""
Smoothcal Constants

This module contains constants used throughout the package to avoid
magic numbers and keep numeric grids in one place.
"""

# Quadrature Constants
QUADRATURE_PANELS = 4096  # composite Simpson, 2**12 panels
QUADRATURE_POINTS = QUADRATURE_PANELS + 1

# Density Sampling Constants
DENSITY_GRID_SIZE = 16384  # 2**14 points for inverse-CDF sampling
DENSITY_MASS_TOLERANCE = 1e-8

# Stationary Sequence Constants
MAX_TOEPLITZ_N = 4096

# Default number of empirical coefficients when a config omits K
DEFAULT_K_CAP = 512

# Nikol'skii Constants
NIKOLSKII_RELATIVE_INCREMENT = 1e-6

# Conjugate / Supremum Grids
CONJUGATE_GRID_POINTS = 2049
CONJUGATE_DOUBLING_CAP = 2.0 ** 40
GLS_GRID_POINTS = 512
SHARP_GRID_POINTS = 1025
SHARP_DOUBLING_CAP = 2.0 ** 24
OVERLINE_RESTARTS = 32
OVERLINE_MAX_TERMS = 8
CONVEXITY_GRID_POINTS = 257

# Rosenthal Constants
ROSENTHAL_R = 1.77638

# Model Fitting Constants
MIN_LOGLIN_POINTS = 9
MAX_FIT_ITERATIONS = 200
GRADIENT_TOLERANCE = 1e-10
STEP_TOLERANCE = 1e-14
CONDITION_LIMIT = 1e12
BACKTRACK_STEPS = 40

# Output Constants
SCHEMA_TAG = '# smoothcal-schema v1'
RHO_HAT_HEADER = ('N', 'rho_hat')

# Exit Codes
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3
EXIT_IO_ERROR = 4
