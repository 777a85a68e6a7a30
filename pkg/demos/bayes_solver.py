"""
Least-squares Bayes measurement
================================

For a prior over the grid, the Bayes-optimal measurement is projective onto
the eigenspaces of the operator Lambda solving
Lambda rho_bar + rho_bar Lambda = 2 rho_bar', and the eigenvalues are the
estimates.
"""

import numpy as np

from optmeas import Prior, bayes_risk, least_squares, posterior_mean_estimator, solve_bayes_measurement
from optmeas.ensembles import random_family, random_povm
from optmeas.scenarios import diagonal_classical

fam = diagonal_classical([0.25, 0.75])
sol = solve_bayes_measurement(fam, Prior.uniform(2))
print("Lambda =\n", sol.lam.real)
print("estimates:", sol.estimator.values.ravel(), " Bayes risk:", sol.bayes_risk)

# a non-classical family with a random prior
rng = np.random.default_rng(3)
fam = random_family(2, 6, rng)
prior = Prior.normalised(rng.uniform(size=6))
sol = solve_bayes_measurement(fam, prior)
print("residual of the anticommutator equation:", sol.anticommutator_residual)

# random measurements with their best estimators never do better
loss = least_squares()
best = min(
    bayes_risk(fam, F, posterior_mean_estimator(fam, F, prior), loss, prior)
    for F in (random_povm(2, 3, rng) for _ in range(2000))
)
print(f"solver {sol.bayes_risk:.6f}  best of 2000 random {best:.6f}")
