"""
Measurements that are never worth using
========================================

A measurement is refineable when some outcome leaves a post-measurement state
that still depends on the parameter; measuring that state again helps. A
measurement whose outcome probabilities ignore the parameter is beaten by a
Helstrom measurement between two well-separated grid points.
"""

import numpy as np

from optmeas import dominate_refineable, dominate_uninformative, least_squares
from optmeas.quantum import KrausMeasurement, ParametrisedState, Povm

loss = least_squares()

# two copies of diag(t, 1 - t); measure only the first copy
thetas = [0.2, 0.5, 0.8]
fam = ParametrisedState.from_states(thetas, [np.kron(np.diag([t, 1 - t]), np.diag([t, 1 - t])) for t in thetas])
first = KrausMeasurement.from_operators([np.kron(np.diag([1.0, 0.0]), np.eye(2)),
                                         np.kron(np.diag([0.0, 1.0]), np.eye(2))])
ev = dominate_refineable(fam, first, loss, test_estimators=[[[0.3], [0.7]], [[0.5], [0.5]]])
print("refined outcome labels:", ev.refined.labels)
print("lifted estimators keep their risk (max deviation):", ev.lift_max_deviation)
print(f"two-point Bayes risk {ev.refined_bayes_risk:.4f} < {ev.best_original_bayes_risk:.4f}")

# doing nothing (the trivial measurement) against the Helstrom construction
single = ParametrisedState.from_states(thetas, [np.diag([t, 1 - t]) for t in thetas])
ev = dominate_uninformative(single, Povm.trivial(2), loss)
print("pair used:", ev.sub_grid, " verdict:", ev.dominance.value, " margin:", round(ev.margin, 4))
print("risk on the pair:", ev.risk_tables["sub_grid"])
