import numpy as np
import pytest

from optmeas import errors
from optmeas.ensembles import random_classical_family, random_povm
from optmeas.estimation import diameter, kullback_leibler, least_squares
from optmeas.optimality import (
    Inconclusive,
    NoGo,
    Optimal,
    additive_bound,
    certify,
    check_additive_risk_gap,
    dephased_reference,
    local_bound,
    multiplicative_bound,
    multiplicative_risk_ratio,
    no_go_witness,
    optimal_measurement_for_classical,
)
from optmeas.quantum import Classical, ParametrisedState, classicality_certificate, ket, projector
from optmeas.scenarios import depolarizing, diagonal_classical, mach_zehnder, thermal

PI = np.pi
LS = least_squares()


def test_thermal_optimal_is_energy_basis():
    povm = optimal_measurement_for_classical(thermal(np.linspace(0.0, 3.0, 7)))
    np.testing.assert_allclose(povm.effects[0], np.diag([1.0, 0.0]), atol=1e-12)
    np.testing.assert_allclose(povm.effects[1], np.diag([0.0, 1.0]), atol=1e-12)


def test_depolarizing_optimal_contains_psi():
    psi = ket(1, 2j, -1)
    povm = optimal_measurement_for_classical(depolarizing(np.linspace(0, 0.9, 5), psi))
    hits = [np.vdot(psi, e @ psi).real for e in povm.effects]
    assert max(hits) == pytest.approx(1.0, abs=1e-10)


def test_mz_not_classical():
    with pytest.raises(errors.NotClassicalState) as info:
        optimal_measurement_for_classical(mach_zehnder())
    assert info.value.witness.commutator_norm == pytest.approx(0.5)


def test_no_go_mz_witness():
    fam = mach_zehnder()
    res = no_go_witness(fam, LS)
    assert isinstance(res, NoGo)
    assert res.commutator_norm == pytest.approx(0.5, abs=1e-12)
    assert res.thetas[0][0] == 0.0
    assert res.thetas[1][0] == pytest.approx(PI / 2)


def test_no_go_inconclusive_cases():
    assert isinstance(no_go_witness(thermal([0.0, 1.0, 2.0]), LS), Inconclusive)
    assert isinstance(no_go_witness(mach_zehnder([0.7]), LS), Inconclusive)
    with pytest.raises(errors.WrongLoss):
        no_go_witness(mach_zehnder(), kullback_leibler())


def test_certify():
    assert isinstance(certify(thermal([0.0, 1.0]), LS), Optimal)
    assert isinstance(certify(mach_zehnder(), LS), NoGo)
    assert isinstance(certify(mach_zehnder(), kullback_leibler()), Inconclusive)


# -- additive ----------------------------------------------------------------------

def test_additive_zero_for_classical(rng):
    fam = random_classical_family(3, 5, rng)
    b = additive_bound(fam, fam, LS)
    assert b.value == 0.0 and b.details["epsilon"] == 0.0


def test_additive_depolarized_mz():
    mz = mach_zehnder()
    states = 0.01 * mz.states + 0.99 * np.eye(2) / 2
    fam = ParametrisedState(mz.grid, states, mz.cell_volumes)
    ref = ParametrisedState(mz.grid, np.tile(np.eye(2) / 2, (mz.n_points, 1, 1)), mz.cell_volumes)
    b = additive_bound(fam, ref, LS)
    assert b.details["epsilon"] == pytest.approx(0.01, abs=1e-12)
    assert b.value == pytest.approx(2 * diameter(LS, mz.grid) * 0.01, abs=1e-12)


def test_additive_rejects_non_classical_reference():
    with pytest.raises(errors.NotClassicalReference):
        additive_bound(mach_zehnder(), mach_zehnder(), LS)


def test_additive_gap_within_bound(rng):
    fam = thermal(np.linspace(0.0, 2.0, 6))
    for _ in range(20):
        u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        tilt = u @ np.diag([1.0, -1.0]) @ u.conj().T * 0.01
        states = fam.states + 0.5 * (tilt - np.einsum("nii->n", tilt[None]).real[:, None, None] / 2)
        states = np.array([s / np.trace(s).real for s in states])
        if np.linalg.eigvalsh(states).min() < 0:
            continue
        pert = ParametrisedState(fam.grid, states, fam.cell_volumes)
        b = additive_bound(pert, fam, LS)
        f = random_povm(2, 3, rng)
        gap = check_additive_risk_gap(pert, fam, b.measurement, f, rng.uniform(0, 2, size=(3, 1)), LS)
        assert gap <= b.value + 1e-9


def test_additive_gap_classical_is_nonpositive(rng):
    fam = random_classical_family(3, 5, rng)
    m = optimal_measurement_for_classical(fam)
    gap = check_additive_risk_gap(fam, fam, m, random_povm(3, 4, rng), rng.normal(size=(4, 1)), LS)
    assert gap <= 1e-9


# -- multiplicative --------------------------------------------------------------------

def test_multiplicative_cases():
    fam = diagonal_classical([0.3, 0.5])
    assert multiplicative_bound(fam, fam).value == 0.0
    shifted = ParametrisedState.from_states([0.3, 0.5], [np.diag([0.31, 0.69]), np.diag([0.51, 0.49])])
    # diagonal states: D_max is the log of the largest eigenvalue ratio
    eta = max(
        max(0.31 / 0.3, 0.69 / 0.7) * max(0.3 / 0.31, 0.7 / 0.69),
        max(0.51 / 0.5, 0.49 / 0.5) * max(0.5 / 0.51, 0.5 / 0.49),
    ) - 1
    assert multiplicative_bound(shifted, fam).value == pytest.approx(eta, abs=1e-12)
    pure = mach_zehnder([0.0, 1.0])
    ref = ParametrisedState(pure.grid, np.tile(np.eye(2) / 2, (2, 1, 1)), pure.cell_volumes)
    assert multiplicative_bound(pure, ref).value == np.inf


def test_multiplicative_ratio_within_bound(rng):
    fam = thermal(np.linspace(0.0, 2.0, 6))
    mixed = ParametrisedState(fam.grid, 0.97 * fam.states + 0.03 * mach_zehnder([0.4]).states[0], fam.cell_volumes)
    b = multiplicative_bound(mixed, fam)
    for _ in range(20):
        ratio = multiplicative_risk_ratio(mixed, b.measurement, random_povm(2, 2, rng), rng.uniform(0, 2, (2, 1)), LS)
        assert ratio <= 1 + b.value + 1e-9


# -- local ----------------------------------------------------------------------------

def test_local_fully_classical(rng):
    fam = random_classical_family(2, 6, rng)
    lb = local_bound(fam)
    assert lb.delta == pytest.approx(0.0, abs=1e-12)
    assert len(lb.gamma_indices) == 6


def test_local_piecewise_family():
    diag = diagonal_classical(np.linspace(0.1, 0.4, 4))
    mz = mach_zehnder(np.linspace(0.3, 2.5, 4))
    fam = ParametrisedState(
        np.vstack([diag.grid - 10, mz.grid]), np.concatenate([diag.states, mz.states]), np.ones(8)
    )
    lb = local_bound(fam)
    assert lb.gamma_indices == (0, 1, 2, 3)
    assert lb.delta == 4.0
    assert isinstance(classicality_certificate(fam.restrict(lb.gamma_indices)), Classical)


def test_local_mz_without_antipodes_is_single_point():
    fam = mach_zehnder(np.linspace(0, PI, 16, endpoint=False))
    with pytest.warns(errors.EmptyClassicalSubset):
        lb = local_bound(fam)
    assert len(lb.gamma_indices) == 1 and lb.degenerate
    assert lb.delta == pytest.approx(fam.total_volume - fam.cell_volumes[lb.gamma_indices[0]])


def test_local_full_mz_grid_pairs_antipodes():
    # theta and theta + pi give orthogonal pure states, which commute
    lb = local_bound(mach_zehnder())
    assert len(lb.gamma_indices) == 2
    assert lb.gamma_indices[1] - lb.gamma_indices[0] == 32


def test_dephased_reference_is_classical(rng):
    fam = mach_zehnder([0.1, 0.5, 0.9])
    ref = dephased_reference(fam)
    assert isinstance(classicality_certificate(ref), Classical)
    np.testing.assert_allclose(np.einsum("nii->n", ref.states).real, 1.0, atol=1e-12)
    projector  # noqa: B018
