import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optmeas import errors
from optmeas.ensembles import random_classical_family, random_povm
from optmeas.estimation import (
    Dominance,
    Estimator,
    RiskProfile,
    as_estimator,
    bregman_loss,
    custom_bregman,
    diameter,
    dominates_pair,
    kullback_leibler,
    least_squares,
    loss_from_name,
    measurement_preorder_bruteforce,
    risk,
    risk_profile,
    transfer_estimator,
    transfer_weights,
)
from optmeas.quantum import Povm, classicality_certificate
from optmeas.scenarios import mach_zehnder, mz_measurements

PI = np.pi


# -- losses ---------------------------------------------------------------------

def test_least_squares_values():
    ls = least_squares()
    assert bregman_loss(ls, [1.0, 2.0], [0.0, 0.0]) == 5.0
    assert ls(np.array([[1.0], [3.0]]), np.array([[0.0], [1.0]])).tolist() == [1.0, 4.0]


def test_kl_matches_relative_entropy():
    kl = kullback_leibler()
    p, q = np.array([0.2, 0.8]), np.array([0.5, 0.5])
    expected = 0.2 * np.log(0.4) + 0.8 * np.log(1.6)
    assert bregman_loss(kl, p, q) == pytest.approx(expected, abs=1e-14)
    # closed form agrees with the generic Bregman expression
    generic = kl.generator(p) - kl.generator(q) - kl.gradient(q) @ (p - q)
    assert bregman_loss(kl, p, q) == pytest.approx(generic, abs=1e-14)


def test_kl_domain():
    with pytest.raises(errors.OutOfDomain):
        kullback_leibler()(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(errors.OutOfDomain):
        kullback_leibler()(np.array([0.3, 0.3]), np.array([0.5, 0.5]))


@pytest.mark.parametrize("loss", [least_squares(), kullback_leibler()])
def test_gradient_matches_finite_differences(loss):
    x = np.array([0.3, 0.7])
    h = 1e-6
    fd = [(loss.generator(x + h * e) - loss.generator(x - h * e)) / (2 * h) for e in np.eye(2)]
    np.testing.assert_allclose(loss.gradient(x), fd, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
)
def test_custom_quadratic_generator_is_least_squares(a, b):
    g = custom_bregman(lambda x: np.sum(x * x, axis=-1), lambda x: 2 * x)
    assert bregman_loss(g, a, b) == pytest.approx(bregman_loss(least_squares(), a, b), rel=1e-9, abs=1e-9)
    assert bregman_loss(g, a, b) >= -1e-12


def test_loss_from_name():
    assert loss_from_name("ls").kind == "LeastSquares"
    assert loss_from_name("KL").kind == "KullbackLeibler"
    with pytest.raises(ValueError):
        loss_from_name("huber")


def test_diameter():
    assert diameter(least_squares(), np.array([[0.0], [1.0], [3.0]])) == 9.0


# -- estimators and risk ------------------------------------------------------------

def test_estimator_shapes():
    assert Estimator([1.0, 2.0]).values.shape == (2, 1)
    assert as_estimator([[1.0, 2.0]], 2).param_dim == 2
    with pytest.raises(errors.DimensionMismatch):
        as_estimator([[1.0, 2.0]], 1)


def test_mz_worked_example_risks():
    m, f, est_f = mz_measurements()
    fam = mach_zehnder()
    ls = least_squares()
    assert risk(fam, f, est_f, ls, PI / 4) <= 1e-12
    r_f = risk(fam, f, est_f, ls, PI / 2)
    # outcome 1 at pi/2 has probability (2 + 2 cos(pi/4)) / 4
    assert r_f == pytest.approx((2 + np.sqrt(2)) / 4 * (PI / 4) ** 2, abs=1e-12)
    r_c = risk(fam, m, [[PI / 4], [PI / 4]], ls, PI / 2)
    assert r_c == pytest.approx((PI / 4) ** 2, abs=1e-12)
    assert r_c - r_f > 0.05


def test_risk_rejects_mismatches():
    fam = mach_zehnder([0.0, 1.0])
    with pytest.raises(errors.DimensionMismatch):
        risk_profile(fam, Povm.trivial(3), [[0.0]], least_squares())
    with pytest.raises(errors.DimensionMismatch):
        risk_profile(fam, Povm.trivial(2), [[0.0], [1.0]], least_squares())
    with pytest.raises(errors.GridMismatch):
        risk(fam, Povm.trivial(2), [[0.0]], least_squares(), 0.5)


def test_risk_profile_by_hand(rng):
    fam = random_classical_family(3, 4, rng)
    povm = random_povm(3, 2, rng)
    est = rng.normal(size=(2, 1))
    prof = risk_profile(fam, povm, est, least_squares())
    for j, rho in enumerate(fam.states):
        expected = sum(
            np.trace(rho @ e).real * (est[k, 0] - fam.grid[j, 0]) ** 2 for k, e in enumerate(povm.effects)
        )
        assert prof.values[j] == pytest.approx(expected, abs=1e-12)


# -- dominance ---------------------------------------------------------------------

def _profile(vals):
    return RiskProfile(np.arange(len(vals), dtype=float)[:, None], np.asarray(vals, dtype=float))


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ([0.0, 1.0], [0.0, 2.0], Dominance.DOMINATES),
        ([0.0, 1.0], [0.0, 1.0 + 1e-12], Dominance.WEAKLY_BETTER),
        ([0.0, 3.0], [1.0, 2.0], Dominance.INCOMPARABLE),
    ],
)
def test_dominates_pair(a, b, expected):
    assert dominates_pair(_profile(a), _profile(b)) is expected


def test_dominates_pair_grid_mismatch():
    with pytest.raises(errors.GridMismatch):
        dominates_pair(_profile([0.0]), _profile([0.0, 1.0]))


# -- transfer and preorder ------------------------------------------------------------

def test_transfer_weights_are_stochastic(rng):
    fam = random_classical_family(3, 5, rng)
    basis = classicality_certificate(fam).basis
    m = transfer_weights(basis, random_povm(3, 4, rng))
    assert np.all(m >= -1e-14)
    np.testing.assert_allclose(m.sum(axis=0), 1.0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_transferred_estimator_never_worse(dim, n, k, seed):
    rng = np.random.default_rng(seed)
    fam = random_classical_family(dim, n, rng)
    basis = classicality_certificate(fam).basis
    povm = random_povm(dim, k, rng)
    est = rng.normal(size=(k, 1))
    r_f = risk_profile(fam, povm, est, least_squares()).values
    r_m = risk_profile(fam, Povm.projective(basis), transfer_estimator(basis, povm, est), least_squares()).values
    assert np.all(r_m <= r_f + 1e-9)


def test_mz_preorder_counterexample():
    m, f, _ = mz_measurements()
    fam = mach_zehnder([PI / 4, PI / 2])
    res = measurement_preorder_bruteforce(fam, m, f, least_squares())
    assert not res.holds
    np.testing.assert_allclose(res.counterexample.values[:, 0], [PI / 4, PI / 2])
    assert res.counterexample_profile[0] <= 1e-12


def test_preorder_holds_for_classical_optimal(rng):
    fam = random_classical_family(2, 3, rng)
    m = Povm.projective(classicality_certificate(fam).basis)
    res = measurement_preorder_bruteforce(fam, m, random_povm(2, 2, rng), least_squares(), transfer_candidates=True)
    assert res.holds


def test_preorder_cap():
    m, f, _ = mz_measurements()
    with pytest.raises(errors.SearchSpaceTooLarge):
        measurement_preorder_bruteforce(mach_zehnder(), m, f, least_squares(), cap=1000)


def test_spec_loss_examples():
    assert bregman_loss(least_squares(), [1, 0], [0, 1]) == 2.0
    assert bregman_loss(kullback_leibler(), [0.5, 0.5], [0.5, 0.5]) == 0.0
    expected = 0.5 * np.log(2) + 0.5 * np.log(2 / 3)
    assert bregman_loss(kullback_leibler(), [0.5, 0.5], [0.25, 0.75]) == pytest.approx(expected, abs=1e-14)


def test_mz_two_valued_profile_closed_form():
    m, _, _ = mz_measurements()
    fam = mach_zehnder()
    theta = fam.grid[:, 0]
    prof = risk_profile(fam, m, [[0.0], [PI]], least_squares()).values
    expected = np.cos(theta / 2) ** 2 * theta**2 + np.sin(theta / 2) ** 2 * (theta - PI) ** 2
    np.testing.assert_allclose(prof, expected, atol=1e-12)


def test_trivial_measurement_is_constant_profile():
    fam = mach_zehnder()
    prof = risk_profile(fam, Povm.trivial(2), [[1.0]], least_squares()).values
    np.testing.assert_allclose(prof, (1.0 - fam.grid[:, 0]) ** 2, atol=1e-14)


def test_mz_pairs_incomparable():
    m, f, est_f = mz_measurements()
    fam = mach_zehnder()
    a = risk_profile(fam, f, est_f, least_squares())
    b = risk_profile(fam, m, [[PI / 4], [PI / 4]], least_squares())
    assert dominates_pair(a, b) is Dominance.INCOMPARABLE
    assert dominates_pair(a, a) is Dominance.WEAKLY_BETTER
