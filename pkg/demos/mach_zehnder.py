"""
Two qubit measurements that cannot be ranked
=============================================

A phase theta is imprinted on (|0> + e^{i theta}|1>)/sqrt 2. We compare the
+/- basis measurement M with a basis F rotated by pi/4 and show that no
estimator on M matches the estimator (pi/4, pi/2) on F.
"""

import numpy as np

from optmeas import least_squares, measurement_preorder_bruteforce, no_go_witness, risk, risk_profile
from optmeas.scenarios import mach_zehnder, mz_measurements

family = mach_zehnder()  # 64 points on [0, 2 pi)
M, F, est_F = mz_measurements()
loss = least_squares()

# F with estimates (pi/4, pi/2) is exact at pi/4
print("R_F(pi/4)  =", risk(family, F, est_F, loss, np.pi / 4))

# on M, zero risk at pi/4 forces both estimates to pi/4, which is poor at pi/2
print("R_F(pi/2)  =", risk(family, F, est_F, loss, np.pi / 2))
print("R_M(pi/2)  =", risk(family, M, [[np.pi / 4], [np.pi / 4]], loss, np.pi / 2))

# brute force on the two points that matter
pair = mach_zehnder([np.pi / 4, np.pi / 2])
res = measurement_preorder_bruteforce(pair, M, F, loss)
print("M at least as good as F?", res.holds)
print("unmatched F-estimator:", res.counterexample.values.ravel())

# the reason: states at different phases do not commute
print(no_go_witness(family, loss))

# full profiles, e.g. for plotting
prof_F = risk_profile(family, F, est_F, loss)
prof_M = risk_profile(family, M, [[np.pi / 4], [np.pi / 4]], loss)
print("F better on", int(np.sum(prof_F.values < prof_M.values)), "of", family.n_points, "grid points")
