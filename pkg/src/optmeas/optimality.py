"""Optimal measurements for classical families, no-go witnesses and
approximate-optimality bounds.

Every "for all theta" statement is checked on the grid points of the
family; continuous parameter sets are represented by their grid and
``cell_volumes``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyClassicalSubset, GridMismatch, NotClassicalReference, NotClassicalState, WrongLoss
from .estimation import LossFunction, as_estimator, diameter, risk_profile, transfer_estimator
from .quantum import (
    Classical,
    NotClassical,
    ParametrisedState,
    Povm,
    classicality_certificate,
    commutator_norms,
    d_max,
    trace_norm,
)
from .tolerances import DEFAULT

__all__ = [
    "Optimal",
    "NoGo",
    "Inconclusive",
    "ApproxBound",
    "LocalBound",
    "optimal_measurement_for_classical",
    "no_go_witness",
    "certify",
    "additive_bound",
    "multiplicative_bound",
    "local_bound",
    "check_additive_risk_gap",
    "multiplicative_risk_ratio",
    "dephased_reference",
    "projective_basis",
]


@dataclass(frozen=True)
class Optimal:
    measurement: Povm
    basis: np.ndarray
    max_commutator: float


@dataclass(frozen=True)
class NoGo:
    """No optimal measurement exists under least squares: these two states
    do not commute. Convexity of the underlying parameter set is assumed by
    the caller."""

    indices: tuple[int, int]
    thetas: tuple[np.ndarray, np.ndarray]
    commutator_norm: float


@dataclass(frozen=True)
class Inconclusive:
    max_commutator: float
    reason: str


@dataclass(frozen=True)
class ApproxBound:
    kind: str
    value: float
    measurement: Povm | None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LocalBound:
    gamma_indices: tuple[int, ...]
    gamma_volume: float
    delta: float
    measurement: Povm
    degenerate: bool = False

    @property
    def kind(self) -> str:
        return "local"

    @property
    def value(self) -> float:
        return self.delta


def optimal_measurement_for_classical(family: ParametrisedState, tol_comm: float = DEFAULT.comm) -> Povm:
    """Projective measurement in the common eigenbasis of a classical family."""
    cert = classicality_certificate(family, tol_comm)
    if isinstance(cert, NotClassical):
        raise NotClassicalState(cert)
    return cert.measurement


def _is_least_squares(loss: LossFunction) -> bool:
    return loss.kind == "LeastSquares"


def no_go_witness(family: ParametrisedState, loss: LossFunction, tol_comm: float = DEFAULT.comm) -> NoGo | Inconclusive:
    if not _is_least_squares(loss):
        raise WrongLoss(f"the no-go witness needs least-squares loss, got {loss.kind}")
    cert = classicality_certificate(family, tol_comm)
    if isinstance(cert, NotClassical):
        return NoGo(cert.indices, cert.thetas, cert.commutator_norm)
    return Inconclusive(cert.max_commutator, "classical within tolerance; an optimal measurement exists")


def certify(family: ParametrisedState, loss: LossFunction, tol_comm: float = DEFAULT.comm):
    """Optimal for classical families, NoGo for non-classical ones under
    least squares, Inconclusive otherwise."""
    cert = classicality_certificate(family, tol_comm)
    if isinstance(cert, Classical):
        return Optimal(cert.measurement, cert.basis, cert.max_commutator)
    if _is_least_squares(loss):
        return NoGo(cert.indices, cert.thetas, cert.commutator_norm)
    return Inconclusive(cert.commutator_norm, f"non-classical family under {loss.kind} loss")


def projective_basis(povm: Povm) -> np.ndarray:
    """Columns ``|i>`` of a rank-one projective measurement, in outcome order."""
    cols = []
    for e in povm.effects:
        w, v = np.linalg.eigh(e)
        cols.append(v[:, -1])
    return np.array(cols).T


def _classical_reference(reference: ParametrisedState, family: ParametrisedState, tol_comm: float) -> Classical:
    if reference.grid.shape != family.grid.shape or not np.allclose(reference.grid, family.grid, rtol=0, atol=1e-12):
        raise GridMismatch("reference family must share the grid of the family")
    if reference.dim != family.dim:
        raise GridMismatch("reference family must share the Hilbert-space dimension")
    cert = classicality_certificate(reference, tol_comm)
    if isinstance(cert, NotClassical):
        raise NotClassicalReference(
            f"reference family is not classical (commutator {cert.commutator_norm:.3e} at {cert.indices})"
        )
    return cert


def additive_bound(
    family: ParametrisedState,
    reference: ParametrisedState,
    loss: LossFunction,
    diam: float | None = None,
    tol_comm: float = DEFAULT.comm,
) -> ApproxBound:
    """``2 d eps`` where ``eps`` is the largest trace-norm distance to a
    classical ``reference`` and ``d`` the loss diameter of the grid."""
    cert = _classical_reference(reference, family, tol_comm)
    eps = max(trace_norm(r - s) for r, s in zip(family.states, reference.states))
    d = diameter(loss, family.grid) if diam is None else float(diam)
    return ApproxBound(
        "additive",
        2.0 * d * eps,
        cert.measurement,
        {"epsilon": eps, "diameter": d, "basis": cert.basis},
    )


def multiplicative_bound(
    family: ParametrisedState,
    reference: ParametrisedState,
    tol_comm: float = DEFAULT.comm,
    tol_rank: float = DEFAULT.rank,
) -> ApproxBound:
    """``eta = max_theta exp(Dmax(rho||sigma) + Dmax(sigma||rho)) - 1`` (may be ``inf``)."""
    cert = _classical_reference(reference, family, tol_comm)
    per_point = []
    for r, s in zip(family.states, reference.states):
        total = d_max(r, s, tol_rank) + d_max(s, r, tol_rank)
        per_point.append(np.inf if np.isinf(total) else float(np.expm1(total)))
    eta = max(per_point)
    return ApproxBound("multiplicative", eta, cert.measurement, {"per_point": per_point, "basis": cert.basis})


def local_bound(family: ParametrisedState, tol_comm: float = DEFAULT.comm) -> LocalBound:
    """Greedy largest-volume grid subset on which the family is classical.

    Pairwise commuting states are jointly diagonalisable, so the subset is a
    clique of the commutation graph. Each grid point seeds a clique grown by
    adding compatible points in decreasing cell-volume order; the heaviest
    clique wins. The excluded volume is therefore an upper bound on the best
    achievable one.
    """
    n = family.n_points
    ok = commutator_norms(family.states) <= tol_comm
    order = np.lexsort((np.arange(n), -family.cell_volumes))
    best: list[int] = []
    best_vol = -1.0
    for seed in order:
        clique = [int(seed)]
        for j in order:
            if j != seed and all(ok[j, c] for c in clique):
                clique.append(int(j))
        vol = float(family.cell_volumes[clique].sum())
        if vol > best_vol:
            best, best_vol = clique, vol
    gamma = tuple(sorted(best))
    degenerate = len(gamma) == 1 and n > 1
    if degenerate:
        warnings.warn("no two grid points commute; using the single heaviest cell", EmptyClassicalSubset, stacklevel=2)
    sub = family.restrict(gamma)
    measurement = optimal_measurement_for_classical(sub, tol_comm)
    return LocalBound(gamma, best_vol, family.total_volume - best_vol, measurement, degenerate)


def check_additive_risk_gap(
    family: ParametrisedState,
    reference: ParametrisedState,
    m_opt: Povm,
    f_povm: Povm,
    f_estimator,
    loss: LossFunction,
) -> float:
    """Largest excess risk on ``family`` of the estimator transferred to
    ``m_opt`` (using the reference's basis) over ``(f_povm, f_estimator)``."""
    if reference.n_points != family.n_points:
        raise GridMismatch("reference family must share the grid of the family")
    basis = projective_basis(m_opt)
    est_m = transfer_estimator(basis, f_povm, as_estimator(f_estimator, family.param_dim))
    r_m = risk_profile(family, m_opt, est_m, loss).values
    r_f = risk_profile(family, f_povm, f_estimator, loss).values
    return float(np.max(r_m - r_f))


def multiplicative_risk_ratio(
    family: ParametrisedState,
    m_opt: Povm,
    f_povm: Povm,
    f_estimator,
    loss: LossFunction,
    floor: float = 1e-12,
) -> float:
    """Largest ratio of transferred-estimator risk to competitor risk on the
    grid, ignoring points where both risks are below ``floor``."""
    basis = projective_basis(m_opt)
    est_m = transfer_estimator(basis, f_povm, as_estimator(f_estimator, family.param_dim))
    r_m = risk_profile(family, m_opt, est_m, loss).values
    r_f = risk_profile(family, f_povm, f_estimator, loss).values
    live = (r_m > floor) | (r_f > floor)
    if not np.any(live):
        return 1.0
    with np.errstate(divide="ignore"):
        return float(np.max(np.where(r_f[live] > 0, r_m[live] / r_f[live], np.inf)))


def dephased_reference(family: ParametrisedState, basis: np.ndarray | None = None) -> ParametrisedState:
    """Classical family obtained by dephasing every state in ``basis``.

    Without a basis the eigenbasis of the grid-averaged state is used.
    """
    if basis is None:
        avg = family.states.mean(axis=0)
        _, basis = np.linalg.eigh(0.5 * (avg + avg.conj().T))
    b = np.asarray(basis, dtype=np.complex128)
    diag = np.einsum("ji,njk,ki->ni", b.conj(), family.states, b).real
    states = np.einsum("ji,ni,ki->njk", b, diag, b.conj())
    return ParametrisedState(family.grid, states, family.cell_volumes)
