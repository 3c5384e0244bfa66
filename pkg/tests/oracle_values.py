"""Reference numbers frozen from tests/oracles/compute_oracles.py.

mpmath (30 digits) with explicit splitting for the integrals, scipy
solve_ivp (DOP853, rtol 1e-13) with event location for the bar orbit.
None of these were produced by the package under test.
"""

import math

# MMK, m = 3, r0 = 1/3
F_TILDE_MINUS_2R0 = -1.2179955620884587162
F3_AT_1 = 2.416417188418142364
G32_AT_2R0 = 2.8035443989946792067
H32_AT_5R0 = 1.35622501528832258
P31 = -1.7320508075688772935
# limit coefficient, j = 3, k = 2, M = 1, r = -1
S32_AT_MINUS1 = 0.19550110947788532096

# bar orbit, alpha = 1, m = 3, r0 = 1/3, j = 1, q = 1:
# first u = r_bar crossing, first and second u = -r_bar crossings,
# second u = r_bar crossing, period
BAR_J1_Q1_TIMES = (0.42803819750834177, 0.7593722142153928, 2.1166009123291656,
                   2.447934929036389, 2.875973126544645)

# two-step limit discriminant, alpha = 1, gamma = 3, M = 3, j = k = 1, beta = 1
DELTA_INF_ACAD_BETA1 = -0.8940075008415305

# small-amplitude tongue tips, alpha = 1, gamma = 3, m = 3, j = k = 1
ACADEMIC_TIPS = {1: -16.25, 2: -11.0, 3: -2.25, 4: 10.0, 5: 25.75}

SQRT3 = math.sqrt(3.0)
