import warnings

import numpy as np
import pytest

from optmeas import errors
from optmeas.bayes import (
    Prior,
    average_state_moments,
    bayes_risk,
    bayes_risk_terms,
    posterior_mean_estimator,
    solve_bayes_measurement,
)
from optmeas.ensembles import random_family, random_povm
from optmeas.estimation import Dominance, dominates_pair, least_squares, risk, risk_profile
from optmeas.quantum import ParametrisedState, Povm
from optmeas.scenarios import diagonal_classical, mach_zehnder, mz_measurements

PI = np.pi
LS = least_squares()


def test_prior_validation():
    with pytest.raises(ValueError):
        Prior([0.5, 0.6])
    with pytest.raises(ValueError):
        Prior([1.5, -0.5])
    np.testing.assert_allclose(Prior.normalised([1, 3]).weights, [0.25, 0.75])


def test_point_mass_bayes_risk_is_risk():
    fam = mach_zehnder()
    m, f, est = mz_measurements()
    j = 16
    assert bayes_risk(fam, f, est, LS, Prior.point_mass(fam.n_points, j)) == pytest.approx(
        risk(fam, f, est, LS, fam.grid[j]), abs=1e-14
    )


def test_mz_two_point_bayes_risk_by_hand():
    fam = mach_zehnder([0.0, PI / 2])
    m, _, _ = mz_measurements()
    est = [[PI / 6], [PI / 2]]
    # theta=0: outcome + surely; theta=pi/2: each outcome with probability 1/2
    by_hand = 0.5 * (PI / 6) ** 2 + 0.5 * (0.5 * (PI / 6 - PI / 2) ** 2)
    assert bayes_risk(fam, m, est, LS, Prior.uniform(2)) == pytest.approx(by_hand, abs=1e-12)
    a, b, c = bayes_risk_terms(m, est, fam, Prior.uniform(2))
    assert a - 2 * b + c == pytest.approx(by_hand, abs=1e-12)


def test_zero_risk_two_point():
    fam = diagonal_classical([0.0, 1.0])
    assert bayes_risk(fam, Povm.projective(np.eye(2)), [[1.0], [0.0]], LS, Prior.uniform(2)) == 0.0


def test_posterior_means():
    fam = diagonal_classical([0.25, 0.75])
    est = posterior_mean_estimator(fam, Povm.projective(np.eye(2)), Prior.uniform(2))
    np.testing.assert_allclose(est.values[:, 0], [0.625, 0.375], atol=1e-14)

    mz = mach_zehnder([0.0, PI / 2])
    est = posterior_mean_estimator(mz, mz_measurements()[0], Prior.uniform(2))
    np.testing.assert_allclose(est.values[:, 0], [PI / 6, PI / 2], atol=1e-14)

    est = posterior_mean_estimator(fam, Povm.projective(np.eye(2)), Prior.point_mass(2, 1))
    np.testing.assert_allclose(est.values[:, 0], [0.75, 0.75], atol=1e-14)


def test_outcome_never_occurs_gets_prior_mean():
    fam = diagonal_classical([0.0, 1.0])
    with pytest.warns(errors.OutcomeNeverOccurs):
        est = posterior_mean_estimator(fam, Povm.projective(np.eye(2)), Prior.point_mass(2, 0))
    np.testing.assert_allclose(est.values[:, 0], [0.0, 0.0])


def test_average_state_moments():
    fam = diagonal_classical([0.25, 0.75])
    rb, rbp = average_state_moments(fam, Prior.uniform(2))
    np.testing.assert_allclose(rb, np.diag([0.5, 0.5]))
    np.testing.assert_allclose(rbp, np.diag([0.3125, 0.1875]))
    rb, rbp = average_state_moments(fam, Prior.point_mass(2, 1))
    np.testing.assert_allclose(rbp, 0.75 * fam.states[1])


def test_multi_parameter_rejected():
    fam = ParametrisedState(np.array([[0.0, 0.0], [1.0, 0.0]]), diagonal_classical([0.2, 0.8]).states, np.ones(2))
    with pytest.raises(errors.MultiParameterUnsupported):
        average_state_moments(fam, Prior.uniform(2))


def test_single_outcome_terms():
    fam = diagonal_classical([0.25, 0.75])
    a, b, c = bayes_risk_terms(Povm.trivial(2), [[0.4]], fam, Prior.uniform(2))
    assert (a, b, c) == pytest.approx((0.16, 0.4 * 0.5, 0.5 * (0.0625 + 0.5625)))


# -- solver ------------------------------------------------------------------------

def test_solver_classical_example():
    fam = diagonal_classical([0.25, 0.75])
    sol = solve_bayes_measurement(fam, Prior.uniform(2))
    np.testing.assert_allclose(sol.lam, np.diag([0.625, 0.375]), atol=1e-14)
    assert sol.anticommutator_residual <= 1e-12
    # eigenvalues ascend, so the |1> projector comes first
    np.testing.assert_allclose(sol.measurement.effects[0], np.diag([0.0, 1.0]), atol=1e-14)
    np.testing.assert_allclose(sol.estimator.values[:, 0], [0.375, 0.625], atol=1e-14)
    pm = posterior_mean_estimator(fam, sol.measurement, Prior.uniform(2))
    np.testing.assert_allclose(pm.values, sol.estimator.values, atol=1e-12)


def test_solver_near_point_mass_collapses():
    fam = diagonal_classical([0.25, 0.75])
    sol = solve_bayes_measurement(fam, Prior([1 - 1e-6, 1e-6]))
    np.testing.assert_allclose(sol.lam, 0.25 * np.eye(2), atol=1e-5)


def test_solver_constant_family_single_outcome():
    rho = np.diag([0.3, 0.7])
    fam = ParametrisedState.from_states([0.0, 1.0, 2.0], [rho] * 3)
    prior = Prior([0.2, 0.3, 0.5])
    sol = solve_bayes_measurement(fam, prior)
    assert sol.measurement.n_outcomes == 1
    assert sol.estimator.values[0, 0] == pytest.approx(1.3, abs=1e-12)
    assert sol.eigenvalue_groups == (2,)
    fine = solve_bayes_measurement(fam, prior, fine_grained=True)
    assert fine.measurement.n_outcomes == 2


def test_solver_rank_deficient():
    with pytest.raises(errors.RankDeficientAverage) as info:
        solve_bayes_measurement(mach_zehnder([0.3]), Prior.uniform(1))
    assert info.value.kernel_dim == 1


def test_solver_risk_matches_direct_evaluation(rng):
    fam = random_family(3, 5, rng)
    prior = Prior.normalised(rng.uniform(size=5))
    sol = solve_bayes_measurement(fam, prior)
    assert sol.bayes_risk == pytest.approx(bayes_risk(fam, sol.measurement, sol.estimator, LS, prior), abs=1e-12)


def test_solver_beats_random_competitors(rng):
    fam = random_family(2, 4, rng)
    prior = Prior.normalised(rng.uniform(size=4))
    sol = solve_bayes_measurement(fam, prior)
    sol_prof = risk_profile(fam, sol.measurement, sol.estimator, LS)
    for _ in range(200):
        povm = random_povm(2, int(rng.integers(1, 5)), rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", errors.OutcomeNeverOccurs)
            est = posterior_mean_estimator(fam, povm, prior)
        assert sol.bayes_risk <= bayes_risk(fam, povm, est, LS, prior) + 1e-9
        assert dominates_pair(risk_profile(fam, povm, est, LS), sol_prof) is not Dominance.DOMINATES


def test_solution_to_dict():
    d = solve_bayes_measurement(diagonal_classical([0.25, 0.75]), Prior.uniform(2)).to_dict()
    assert set(d) == {"lambda", "effects", "estimator", "bayes_risk", "residuals"}
