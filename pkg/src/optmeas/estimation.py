"""Loss functions, risk, domination and estimator transfer.

Estimators are stored as ``(K, N)`` arrays: one parameter vector per
measurement outcome. Risk over a whole grid is computed as
``sum_k p_k(theta) L(est[k], theta)`` with the probability matrix from
:func:`optmeas.quantum.outcome_probabilities`.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, GridMismatch, OutOfDomain, SearchSpaceTooLarge
from .quantum import ParametrisedState, Povm, outcome_probabilities
from .tolerances import DEFAULT

__all__ = [
    "LossFunction",
    "least_squares",
    "kullback_leibler",
    "custom_bregman",
    "loss_from_name",
    "Estimator",
    "as_estimator",
    "RiskProfile",
    "bregman_loss",
    "loss_matrix",
    "risk",
    "risk_profile",
    "profile_from_probabilities",
    "Dominance",
    "dominates_pair",
    "transfer_weights",
    "transfer_estimator",
    "PreorderResult",
    "measurement_preorder_bruteforce",
    "diameter",
]


@dataclass(frozen=True)
class LossFunction:
    """A Bregman divergence generated by a strictly convex ``generator``.

    ``generator`` and ``gradient`` act on the last axis of their argument, so
    they can be evaluated on stacks of points. ``closed_form`` is an optional
    numerically stabler expression for ``B(a, b)``.
    """

    kind: str
    generator: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    in_domain: Callable[[np.ndarray], np.ndarray] = field(default=lambda x: np.ones(x.shape[:-1], dtype=bool))
    closed_form: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    domain: str = "R^N"

    def check_domain(self, x: np.ndarray) -> None:
        ok = np.asarray(self.in_domain(np.asarray(x, dtype=float)))
        if not np.all(ok):
            raise OutOfDomain(f"point(s) outside the {self.kind} domain ({self.domain})")

    def __call__(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        self.check_domain(a)
        self.check_domain(b)
        if self.closed_form is not None:
            return self.closed_form(a, b)
        diff = a - b
        return self.generator(a) - self.generator(b) - np.sum(self.gradient(b) * diff, axis=-1)


def least_squares() -> LossFunction:
    return LossFunction(
        kind="LeastSquares",
        generator=lambda x: np.sum(x * x, axis=-1),
        gradient=lambda x: 2.0 * x,
        closed_form=lambda a, b: np.sum((a - b) ** 2, axis=-1),
    )


def _simplex_interior(x: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    return np.all(x > 0, axis=-1) & (np.abs(np.sum(x, axis=-1) - 1.0) <= atol)


def kullback_leibler() -> LossFunction:
    """Generator ``sum x_i log x_i`` on the open probability simplex."""

    def closed(a, b):
        return np.sum(a * np.log(a / b) - a + b, axis=-1)

    return LossFunction(
        kind="KullbackLeibler",
        generator=lambda x: np.sum(x * np.log(x), axis=-1),
        gradient=lambda x: np.log(x) + 1.0,
        in_domain=_simplex_interior,
        closed_form=closed,
        domain="open simplex interior",
    )


def custom_bregman(generator, gradient, in_domain=None, domain: str = "custom") -> LossFunction:
    kw = {} if in_domain is None else {"in_domain": in_domain}
    return LossFunction(kind="CustomBregman", generator=generator, gradient=gradient, domain=domain, **kw)


def loss_from_name(name: str) -> LossFunction:
    table = {"ls": least_squares, "leastsquares": least_squares, "kl": kullback_leibler,
             "kullbackleibler": kullback_leibler}
    try:
        return table[name.lower().replace("_", "").replace("-", "")]()
    except KeyError:
        raise ValueError(f"unknown loss {name!r}; expected one of ls, kl") from None


def bregman_loss(loss: LossFunction, theta1, theta2) -> float:
    return float(loss(np.atleast_1d(theta1), np.atleast_1d(theta2)))


def diameter(loss: LossFunction, grid: np.ndarray) -> float:
    """Largest loss between any two grid points (both orders)."""
    g = np.asarray(grid, dtype=float)
    return float(np.max(loss(g[:, None, :], g[None, :, :])))


@dataclass(frozen=True, eq=False)
class Estimator:
    """Estimate per outcome, shape ``(K, N)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise DimensionMismatch(f"estimator values must have shape (K, N), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("estimator values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_outcomes(self) -> int:
        return self.values.shape[0]

    @property
    def param_dim(self) -> int:
        return self.values.shape[1]


def as_estimator(values, param_dim: int | None = None) -> Estimator:
    if isinstance(values, Estimator):
        est = values
    else:
        v = np.asarray(values, dtype=float)
        if v.ndim == 1 and param_dim is not None and param_dim > 1:
            v = v[None, :]
        est = Estimator(v)
    if param_dim is not None and est.param_dim != param_dim:
        raise DimensionMismatch(f"estimator has parameter dimension {est.param_dim}, expected {param_dim}")
    return est


@dataclass(frozen=True, eq=False)
class RiskProfile:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(self.values < -1e-12):
            raise ValueError("risk must be nonnegative")

    def to_rows(self):
        for theta, r in zip(self.grid, self.values):
            yield [*map(float, theta), float(r)]


def loss_matrix(loss: LossFunction, estimates: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """``out[k, j] = L(estimates[k], grid[j])``."""
    return loss(np.asarray(estimates)[:, None, :], np.asarray(grid)[None, :, :])


def profile_from_probabilities(probs: np.ndarray, losses: np.ndarray) -> np.ndarray:
    """Risk per grid point from ``probs[j, k]`` and ``losses[k, j]``."""
    return np.einsum("jk,kj->j", probs, losses)


def _check_pair(family: ParametrisedState, povm: Povm, est: Estimator) -> None:
    if povm.dim != family.dim:
        raise DimensionMismatch(f"measurement dimension {povm.dim} != state dimension {family.dim}")
    if est.n_outcomes != povm.n_outcomes:
        raise DimensionMismatch(f"estimator has {est.n_outcomes} outcomes, measurement has {povm.n_outcomes}")
    if est.param_dim != family.param_dim:
        raise DimensionMismatch(f"estimator parameter dimension {est.param_dim} != grid dimension {family.param_dim}")


def risk_profile(family: ParametrisedState, povm: Povm, estimator, loss: LossFunction) -> RiskProfile:
    est = as_estimator(estimator, family.param_dim)
    _check_pair(family, povm, est)
    probs = outcome_probabilities(family.states, povm)
    values = profile_from_probabilities(probs, loss_matrix(loss, est.values, family.grid))
    return RiskProfile(family.grid, values)


def risk(family: ParametrisedState, povm: Povm, estimator, loss: LossFunction, theta) -> float:
    """Expected loss of ``(povm, estimator)`` at the grid point ``theta``."""
    j = family.index_of(theta)
    est = as_estimator(estimator, family.param_dim)
    _check_pair(family, povm, est)
    probs = outcome_probabilities(family.states[j], povm)[0]
    losses = loss(est.values, family.grid[j][None, :])
    return float(probs @ losses)


class Dominance(enum.Enum):
    DOMINATES = "Dominates"
    WEAKLY_BETTER = "WeaklyBetter"
    INCOMPARABLE = "Incomparable"


def dominates_pair(a: RiskProfile, b: RiskProfile, tol_dom: float = DEFAULT.dom) -> Dominance:
    """Compare risk profile ``a`` against ``b`` pointwise."""
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise GridMismatch("risk profiles live on different grids")
    if np.all(a.values <= b.values + tol_dom):
        if np.any(a.values < b.values - tol_dom):
            return Dominance.DOMINATES
        return Dominance.WEAKLY_BETTER
    return Dominance.INCOMPARABLE


def transfer_weights(basis: np.ndarray, povm: Povm) -> np.ndarray:
    """``m[k, i] = <i| F_k |i>`` for the columns ``|i>`` of ``basis``."""
    b = np.asarray(basis, dtype=np.complex128)
    if b.shape[0] != povm.dim:
        raise DimensionMismatch(f"basis dimension {b.shape[0]} != measurement dimension {povm.dim}")
    return np.einsum("ji,kjl,li->ki", b.conj(), povm.effects, b).real


def transfer_estimator(basis: np.ndarray, povm: Povm, estimator) -> Estimator:
    """Estimator for the projective measurement in ``basis`` that never does
    worse than ``(povm, estimator)`` on families diagonal in that basis.

    Each outcome ``i`` gets the average of the original estimates weighted
    by ``<i|F_k|i>``.
    """
    est = as_estimator(estimator)
    if est.n_outcomes != povm.n_outcomes:
        raise DimensionMismatch(f"estimator has {est.n_outcomes} outcomes, measurement has {povm.n_outcomes}")
    m = transfer_weights(basis, povm)
    return Estimator(m.T @ est.values)


@dataclass
class PreorderResult:
    """Outcome of a lattice search for ``M <= F``.

    ``holds`` is only lattice-complete: a found counterexample is genuine for
    the lattice-restricted F-estimator but the M side was searched over the
    lattice (plus optional extra candidates) only.
    """

    holds: bool
    counterexample: Estimator | None = None
    counterexample_profile: np.ndarray | None = None
    n_checked: int = 0


def _lattice_profiles(probs: np.ndarray, losses: np.ndarray, n_outcomes: int):
    m = losses.shape[0]
    combos = np.array(list(itertools.product(range(m), repeat=n_outcomes)), dtype=int)
    # profile[c, j] = sum_k probs[j, k] * losses[combo[c, k], j]
    prof = np.zeros((combos.shape[0], probs.shape[0]))
    for k in range(n_outcomes):
        prof += losses[combos[:, k]] * probs[:, k][None, :]
    return combos, prof


def measurement_preorder_bruteforce(
    family: ParametrisedState,
    m_povm: Povm,
    f_povm: Povm,
    loss: LossFunction,
    estimator_lattice=None,
    cap: int = 10**7,
    tol_dom: float = DEFAULT.dom,
    transfer_candidates: bool = False,
) -> PreorderResult:
    """Search for an F-estimator that no M-estimator matches pointwise.

    Estimators on both sides range over ``estimator_lattice`` (default: the
    grid points). F-estimators are visited in lexicographic lattice order
    and the first unmatched one is returned.

    With ``transfer_candidates`` the M side also tries, for each F-estimator,
    the transferred estimator built from the eigenbasis of ``m_povm``; this
    only makes sense when ``m_povm`` is rank-one projective.
    """
    lattice = family.grid if estimator_lattice is None else np.asarray(estimator_lattice, dtype=float)
    if lattice.ndim == 1:
        lattice = lattice[:, None]
    m = lattice.shape[0]
    n_f = m ** f_povm.n_outcomes
    n_m = m ** m_povm.n_outcomes
    if n_f * n_m > cap:
        raise SearchSpaceTooLarge(f"{n_f} x {n_m} candidate evaluations exceed the cap of {cap}")

    losses = loss_matrix(loss, lattice, family.grid)
    p_m = outcome_probabilities(family.states, m_povm)
    p_f = outcome_probabilities(family.states, f_povm)
    _, m_prof = _lattice_profiles(p_m, losses, m_povm.n_outcomes)
    f_combos, f_prof = _lattice_profiles(p_f, losses, f_povm.n_outcomes)

    basis = None
    if transfer_candidates:
        _, basis = np.linalg.eigh(sum(i * e for i, e in enumerate(m_povm.effects, start=1)))

    chunk = max(1, int(2e6 // max(1, n_m * family.n_points)))
    for start in range(0, n_f, chunk):
        block = f_prof[start : start + chunk]
        matched = np.all(m_prof[None, :, :] <= block[:, None, :] + tol_dom, axis=2).any(axis=1)
        for offset in np.flatnonzero(~matched):
            c = start + int(offset)
            est = lattice[f_combos[c]]
            if basis is not None:
                cand = transfer_estimator(basis, f_povm, est)
                cand_prof = risk_profile(family, Povm.projective(basis), cand, loss).values
                if np.all(cand_prof <= f_prof[c] + tol_dom):
                    continue
            return PreorderResult(False, Estimator(est), f_prof[c].copy(), c + 1)
    return PreorderResult(True, n_checked=n_f)
