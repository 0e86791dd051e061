"""Package-wide numeric defaults.

Double precision is the working arithmetic everywhere; the constants below
are the knobs the operations expose.  The empirical constants (M, L, K, A)
are calibration defaults for the diagnostic checkers, not proven values.
"""

import math

# Largest magnitude an iterated escape-speed value may reach before the
# overflow signal fires.  Kept below float max so downstream arithmetic
# (logs, midpoints, comparisons) stays finite.
CAP = 1e300

# exp() overflows doubles just above 709.78; stay under with headroom for
# polynomial coefficient sums.
EXP_ARG_LIMIT = 700.0

# Relative tolerance at which two potentials count as equal in ladders
# and cluster detection.
POTENTIAL_EQ_RTOL = 1e-12

# Root finding (simultaneous iteration).
ROOT_ITER_RTOL = 1e-12
ROOT_POST_RTOL = 1e-10
ROOT_MAX_ITER = 200

# Inverse branches and ray tracing.
INVERSE_RESIDUAL_RTOL = 1e-10
TRACER_TOL = 1e-10
TRACER_MAX_DEPTH = 128
FUNC_EQ_RTOL = 1e-8

# Tract certification.
STRIP_EDGE_SAMPLES = 720
TRACT_RETRY_BUDGET = 5
R_FLOOR = 2.0

# Empirical diagnostic constants (calibrated by the Monte-Carlo checkers).
CRITICAL_POINT_M = 4.0
COEFFICIENT_L = 8.0
DERIVATIVE_K = 4.0
GROWTH_A = 1.0
GROWTH_C = 1.0

# Pullback iteration.
CLASSIFY_MAX_ITER = 50
CLASSIFY_TOL = 1e-10
VERIFY_POTENTIAL_RTOL = 1e-6

# Sampling depth added on top of the grid depth when probing ladder
# separation conditions.
LADDER_EXTRA_DEPTH = 2


def default_depth(d: int) -> int:
    """Default orbit-grid depth per degree; valid only while the iterated
    escape speeds stay under CAP for the potentials in play."""
    return {1: 6, 2: 4}.get(d, 3)


def strip_epsilon(d: int) -> float:
    """Default fuzz half-width between the inner and outer strip bounds."""
    return math.pi / (4 * d)
