"""
Nearly classical families
==========================

A family close to a classical one has a nearly optimal measurement. Closeness
is measured by the trace norm (additive bound 2 d eps) or by the max-relative
entropy in both directions (multiplicative bound 1 + eta). A third bound
drops the grid points where the family is not classical.
"""

import numpy as np

from optmeas import additive_bound, check_additive_risk_gap, least_squares, local_bound, multiplicative_bound
from optmeas.ensembles import random_povm
from optmeas.optimality import multiplicative_risk_ratio
from optmeas.quantum import ParametrisedState
from optmeas.scenarios import mach_zehnder, thermal

ref = thermal(np.linspace(0.0, 2.0, 8))
tilt = mach_zehnder([0.6]).states[0]

loss = least_squares()
rng = np.random.default_rng(0)
for eps in (1e-3, 1e-2, 1e-1):
    fam = ParametrisedState(ref.grid, (1 - eps) * ref.states + eps * tilt, ref.cell_volumes)
    add = additive_bound(fam, ref, loss)
    mult = multiplicative_bound(fam, ref)
    gaps, ratios = [], []
    for _ in range(200):
        F = random_povm(2, 3, rng)
        est = rng.uniform(0, 2, size=(3, 1))
        gaps.append(check_additive_risk_gap(fam, ref, add.measurement, F, est, loss))
        ratios.append(multiplicative_risk_ratio(fam, mult.measurement, F, est, loss))
    print(f"eps={eps:g}: gap {max(gaps):.2e} <= {add.value:.2e},  ratio {max(ratios):.4f} <= {1 + mult.value:.4f}")

# classical on the first half of the grid only
mixed = ParametrisedState(ref.grid, np.concatenate([ref.states[:4], mach_zehnder(np.linspace(0.1, 1.5, 4)).states]),
                          ref.cell_volumes)
lb = local_bound(mixed)
print("classical subset:", lb.gamma_indices, " excluded volume:", lb.delta)
