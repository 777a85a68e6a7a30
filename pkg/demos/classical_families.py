"""
Optimal measurements for classical families
============================================

When every state of a family is diagonal in one basis, measuring in that
basis is optimal: any competing estimator can be transferred to it without
losing risk anywhere.
"""

import numpy as np

from optmeas import least_squares, optimal_measurement_for_classical, risk_profile, transfer_estimator
from optmeas.ensembles import random_povm
from optmeas.quantum import classicality_certificate
from optmeas.scenarios import depolarizing, thermal

# Gibbs states of H = diag(0, 1): the energy basis is optimal
family = thermal(np.linspace(0.0, 5.0, 16))
M = optimal_measurement_for_classical(family)
print("energy basis:\n", M.effects.real.round(12))

# depolarized states keep |psi> as an eigenvector
psi = np.array([1.0, 1.0j, 0.0]) / np.sqrt(2)
dep = depolarizing(np.linspace(0.0, 1.0, 11), psi)
print("depolarizing basis contains psi:",
      max(abs(np.vdot(psi, e @ psi)) for e in optimal_measurement_for_classical(dep).effects))

# transfer a random competitor's estimator to the energy basis
rng = np.random.default_rng(1)
F = random_povm(2, 4, rng)
est = rng.uniform(0, 5, size=(4, 1))
basis = classicality_certificate(family).basis
est_M = transfer_estimator(basis, F, est)

loss = least_squares()
r_F = risk_profile(family, F, est, loss).values
r_M = risk_profile(family, M, est_M, loss).values
print("largest excess risk after transfer:", float(np.max(r_M - r_F)))
