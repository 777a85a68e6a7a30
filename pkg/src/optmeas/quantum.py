"""Hermitian linear algebra and quantum primitives.

States are plain complex ``numpy`` arrays validated by :func:`validate_state`.
Measurements and parametrised families are small immutable containers around
stacked arrays so that probabilities over a whole parameter grid can be
computed with a single ``einsum``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    GridMismatch,
    NotComplete,
    NotHermitian,
    NotPsd,
    OutcomeImpossible,
    StatesEqual,
    TraceNotOne,
    ValidationError,
)
from .tolerances import DEFAULT

__all__ = [
    "validate_state",
    "Povm",
    "KrausMeasurement",
    "ParametrisedState",
    "outcome_distribution",
    "outcome_probabilities",
    "trace_norm",
    "trace_distance",
    "operator_norm",
    "d_max",
    "helstrom_measurement",
    "post_measurement_state",
    "Classical",
    "NotClassical",
    "classicality_certificate",
    "commutator_norms",
    "group_eigenvalues",
    "restrict_to_support",
    "ket",
    "projector",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_square(mat, name: str = "matrix") -> np.ndarray:
    a = np.asarray(mat, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("finite", np.inf, f"{name} has non-finite entries")
    return a


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=np.complex128)
    return v / np.linalg.norm(v)


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def validate_state(
    mat,
    tol_herm: float = DEFAULT.herm,
    tol_psd: float = DEFAULT.psd,
    tol_trace: float = DEFAULT.trace,
) -> np.ndarray:
    """Check that ``mat`` is a density matrix and return a read-only copy.

    The returned matrix is the Hermitian part of the input, so tiny
    anti-Hermitian roundoff does not propagate.

    Raises
    ------
    NotHermitian, NotPsd, TraceNotOne
        Each carries the measured residual in ``.residual``.
    """
    a = _as_square(mat, "state")
    herm_res = operator_norm(a - a.conj().T)
    if herm_res > tol_herm:
        raise NotHermitian(herm_res)
    a = 0.5 * (a + a.conj().T)
    min_eig = float(np.linalg.eigvalsh(a)[0])
    if min_eig < -tol_psd:
        raise NotPsd(-min_eig)
    trace_res = abs(np.trace(a).real - 1.0)
    if trace_res > tol_trace:
        raise TraceNotOne(trace_res)
    return _frozen(a)


def _check_effects(effects: np.ndarray, tol_psd: float, tol_povm: float) -> None:
    dim = effects.shape[1]
    for e in effects:
        herm_res = operator_norm(e - e.conj().T)
        if herm_res > tol_psd:
            raise NotHermitian(herm_res)
        min_eig = float(np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0])
        if min_eig < -tol_psd:
            raise NotPsd(-min_eig)
    comp = operator_norm(effects.sum(axis=0) - np.eye(dim))
    if comp > tol_povm:
        raise NotComplete(comp)


@dataclass(frozen=True, eq=False)
class Povm:
    """A generalised measurement given by its effects, shape ``(K, d, d)``."""

    effects: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.effects, dtype=np.complex128)
        if e.ndim != 3 or e.shape[1] != e.shape[2] or e.shape[0] < 1:
            raise DimensionMismatch(f"effects must have shape (K, d, d), got {e.shape}")
        object.__setattr__(self, "effects", _frozen(e))

    @classmethod
    def from_effects(
        cls,
        effects: Sequence,
        tol_psd: float = DEFAULT.psd,
        tol_povm: float = DEFAULT.povm,
    ) -> "Povm":
        """Build a POVM after checking positivity and completeness."""
        e = np.asarray(effects, dtype=np.complex128)
        if e.ndim != 3 or e.shape[1] != e.shape[2]:
            raise DimensionMismatch(f"effects must have shape (K, d, d), got {e.shape}")
        _check_effects(e, tol_psd, tol_povm)
        e = 0.5 * (e + np.conj(np.swapaxes(e, 1, 2)))
        return cls(e)

    @classmethod
    def projective(cls, basis) -> "Povm":
        """Rank-one projective measurement onto the columns of ``basis``."""
        b = np.asarray(basis, dtype=np.complex128)
        return cls(np.einsum("ik,jk->kij", b, b.conj()))

    @classmethod
    def trivial(cls, dim: int) -> "Povm":
        return cls(np.eye(dim, dtype=np.complex128)[None])

    @property
    def n_outcomes(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return self.n_outcomes

    def __getitem__(self, k: int) -> np.ndarray:
        return self.effects[k]

    def __iter__(self):
        return iter(self.effects)


@dataclass(frozen=True, eq=False)
class KrausMeasurement:
    """Measurement with known post-measurement states, Kraus operators ``(K, d, d)``."""

    kraus: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=np.complex128)
        if k.ndim != 3 or k.shape[1] != k.shape[2] or k.shape[0] < 1:
            raise DimensionMismatch(f"Kraus operators must have shape (K, d, d), got {k.shape}")
        object.__setattr__(self, "kraus", _frozen(k))

    @classmethod
    def from_operators(cls, kraus: Sequence, tol_povm: float = DEFAULT.povm) -> "KrausMeasurement":
        k = np.asarray(kraus, dtype=np.complex128)
        out = cls(k)
        comp = operator_norm(out.povm.effects.sum(axis=0) - np.eye(out.dim))
        if comp > tol_povm:
            raise NotComplete(comp)
        return out

    @classmethod
    def from_povm_projective(cls, povm: Povm) -> "KrausMeasurement":
        """Lüders instrument: Kraus operators are the square roots of the effects."""
        ops = []
        for e in povm.effects:
            w, v = np.linalg.eigh(e)
            ops.append((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)
        return cls(np.array(ops))

    @property
    def povm(self) -> Povm:
        return Povm(np.einsum("kji,kjl->kil", self.kraus.conj(), self.kraus))

    @property
    def n_outcomes(self) -> int:
        return self.kraus.shape[0]

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]


@dataclass(frozen=True, eq=False)
class ParametrisedState:
    """A family of density matrices over a finite parameter grid.

    Attributes
    ----------
    grid : ndarray, shape (n, N)
        Parameter values, one row per grid point.
    states : ndarray, shape (n, d, d)
        ``states[j]`` is the state at ``grid[j]``.
    cell_volumes : ndarray, shape (n,)
        Quadrature weights standing in for the measure of each grid cell.
    """

    grid: np.ndarray
    states: np.ndarray
    cell_volumes: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim == 1:
            grid = grid[:, None]
        states = np.asarray(self.states, dtype=np.complex128)
        vols = np.asarray(self.cell_volumes, dtype=float).reshape(-1)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise DimensionMismatch(f"grid must have shape (n, N), got {grid.shape}")
        if states.ndim != 3 or states.shape[1] != states.shape[2]:
            raise DimensionMismatch(f"states must have shape (n, d, d), got {states.shape}")
        if states.shape[0] != grid.shape[0] or vols.shape[0] != grid.shape[0]:
            raise DimensionMismatch(
                f"grid ({grid.shape[0]}), states ({states.shape[0]}) and "
                f"cell_volumes ({vols.shape[0]}) must have equal length"
            )
        if not np.all(np.isfinite(grid)):
            raise ValidationError("finite", np.inf, "grid has non-finite entries")
        if np.any(vols < 0) or not np.all(np.isfinite(vols)):
            raise ValidationError("cell_volumes", float(-vols.min()), "cell volumes must be nonnegative")
        if len(np.unique(grid, axis=0)) != grid.shape[0]:
            raise ValidationError("distinct_grid", 0.0, "grid points must be pairwise distinct")
        object.__setattr__(self, "grid", _frozen(grid))
        object.__setattr__(self, "states", _frozen(states))
        object.__setattr__(self, "cell_volumes", _frozen(vols))

    @classmethod
    def from_states(cls, grid, states, cell_volumes=None, **tols) -> "ParametrisedState":
        """Validate every state and build the family.

        ``cell_volumes`` defaults to unit weight per grid point.
        """
        validated = [validate_state(s, **tols) for s in states]
        n = len(validated)
        if cell_volumes is None:
            cell_volumes = np.ones(n)
        return cls(grid, np.array(validated), cell_volumes)

    @property
    def n_points(self) -> int:
        return self.grid.shape[0]

    @property
    def param_dim(self) -> int:
        return self.grid.shape[1]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def total_volume(self) -> float:
        return float(self.cell_volumes.sum())

    def restrict(self, indices) -> "ParametrisedState":
        idx = np.asarray(indices, dtype=int)
        return ParametrisedState(self.grid[idx], self.states[idx], self.cell_volumes[idx])

    def index_of(self, theta) -> int:
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        hits = np.flatnonzero(np.all(np.isclose(self.grid, t, rtol=0, atol=1e-12), axis=1))
        if hits.size == 0:
            raise GridMismatch(f"{theta!r} is not a grid point")
        return int(hits[0])


def outcome_probabilities(states: np.ndarray, povm: Povm) -> np.ndarray:
    """Tr(rho M_k) for a stack of states; returns shape ``(n, K)``."""
    states = np.asarray(states)
    if states.ndim == 2:
        states = states[None]
    if states.shape[-1] != povm.dim:
        raise DimensionMismatch(f"state dimension {states.shape[-1]} != measurement dimension {povm.dim}")
    p = np.einsum("nij,kji->nk", states, povm.effects).real
    return np.clip(p, 0.0, 1.0)


def outcome_distribution(rho, povm: Povm) -> np.ndarray:
    """Outcome probabilities ``p_k = Tr(rho M_k)`` of a single state."""
    return outcome_probabilities(np.asarray(rho)[None], povm)[0]


def trace_norm(a) -> float:
    a = np.asarray(a, dtype=np.complex128)
    if np.allclose(a, a.conj().T, rtol=0, atol=1e-14):
        return float(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T))).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


def trace_distance(rho, sigma) -> float:
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def d_max(rho, sigma, tol_rank: float = DEFAULT.rank) -> float:
    """Max-relative entropy ``inf{g : rho <= e^g sigma}`` in nats.

    Returns ``inf`` when the support of ``rho`` is not contained in the
    support of ``sigma``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    sigma = np.asarray(sigma, dtype=np.complex128)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} and {sigma.shape} differ")
    w, v = np.linalg.eigh(sigma)
    cut = tol_rank * max(w[-1], 0.0)
    support = w > cut
    kernel = v[:, ~support]
    if kernel.shape[1] and np.trace(kernel.conj().T @ rho @ kernel).real > tol_rank:
        return np.inf
    vs = v[:, support]
    inv_sqrt = vs / np.sqrt(w[support])
    lam = np.linalg.eigvalsh(inv_sqrt.conj().T @ rho @ inv_sqrt)[-1]
    return max(float(np.log(lam)), 0.0) if lam > 0 else 0.0


def helstrom_measurement(rho1, rho2, tol_eq: float = DEFAULT.eq) -> Povm:
    """Two-outcome measurement that best discriminates ``rho1`` from ``rho2``.

    Outcome 0 projects onto the nonnegative eigenspace of ``rho1 - rho2``
    (zero eigenvalues included), outcome 1 onto the rest.
    """
    diff = np.asarray(rho1, dtype=np.complex128) - np.asarray(rho2, dtype=np.complex128)
    if trace_norm(diff) <= tol_eq:
        raise StatesEqual("states are equal within tolerance; no informative discrimination exists")
    w, v = np.linalg.eigh(0.5 * (diff + diff.conj().T))
    nonneg = w >= -1e-12 * np.abs(w).max()
    p1 = v[:, nonneg] @ v[:, nonneg].conj().T
    p2 = v[:, ~nonneg] @ v[:, ~nonneg].conj().T
    return Povm(np.array([p1, p2]))


def post_measurement_state(rho, kraus: KrausMeasurement, i: int, tol_prob: float = DEFAULT.prob) -> np.ndarray:
    f = kraus.kraus[i]
    out = f @ np.asarray(rho) @ f.conj().T
    p = np.trace(out).real
    if p <= tol_prob:
        raise OutcomeImpossible(f"outcome {i} has probability {p:.3e}; post-measurement state undefined")
    out = out / p
    return 0.5 * (out + out.conj().T)


def group_eigenvalues(w: np.ndarray, rel_gap: float = DEFAULT.group) -> list[np.ndarray]:
    """Split ascending eigenvalues into index groups separated by more than ``rel_gap``.

    The gap is relative to the largest eigenvalue magnitude.
    """
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        return []
    scale = max(float(np.abs(w).max()), np.finfo(float).tiny)
    breaks = np.flatnonzero(np.diff(w) > rel_gap * scale) + 1
    return np.split(np.arange(w.size), breaks)


def commutator_norms(states: np.ndarray) -> np.ndarray:
    """Symmetric matrix of ``||[rho_a, rho_b]||`` over all pairs of a state stack."""
    states = np.asarray(states)
    n = states.shape[0]
    out = np.zeros((n, n))
    for a in range(n - 1):
        comm = states[a] @ states[a + 1 :] - states[a + 1 :] @ states[a]
        norms = np.linalg.norm(comm, ord=2, axis=(1, 2)) if comm.size else np.zeros(0)
        out[a, a + 1 :] = norms
        out[a + 1 :, a] = norms
    return out


@dataclass(frozen=True)
class Classical:
    """Certificate that a family is diagonal in ``basis`` (columns)."""

    basis: np.ndarray
    max_commutator: float

    is_classical = True

    @property
    def measurement(self) -> Povm:
        return Povm.projective(self.basis)


@dataclass(frozen=True)
class NotClassical:
    """Witness pair of grid indices whose states fail to commute."""

    indices: tuple[int, int]
    thetas: tuple[np.ndarray, np.ndarray]
    commutator_norm: float

    is_classical = False


def _canonical_basis(basis: np.ndarray) -> np.ndarray:
    # order columns by their dominant coordinate and make that coordinate real positive
    lead = np.argmax(np.abs(basis) > np.abs(basis).max(axis=0) - 1e-9, axis=0)
    order = np.lexsort((np.arange(basis.shape[1]), lead))
    b = basis[:, order]
    lead = lead[order]
    phases = b[lead, np.arange(b.shape[1])]
    return b * (np.abs(phases) / phases)


def _joint_eigenbasis(states: np.ndarray, rel_gap: float) -> np.ndarray:
    dim = states.shape[1]
    blocks = [np.eye(dim, dtype=np.complex128)]
    for rho in states:
        refined = []
        for b in blocks:
            if b.shape[1] == 1:
                refined.append(b)
                continue
            h = b.conj().T @ rho @ b
            w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
            for idx in group_eigenvalues(w, rel_gap):
                refined.append(b @ v[:, idx])
        blocks = refined
    return np.concatenate(blocks, axis=1)


def classicality_certificate(
    family: ParametrisedState,
    tol_comm: float = DEFAULT.comm,
    rel_gap: float = DEFAULT.group,
) -> Classical | NotClassical:
    """Decide whether all states of the family commute.

    On success the common eigenbasis is built by successively splitting the
    eigenspaces of the first state by each later state. Otherwise the pair
    with the largest commutator norm is returned (first pair on ties, up to
    a relative 1e-12).
    """
    norms = commutator_norms(family.states)
    worst = float(norms.max()) if norms.size else 0.0
    if worst > tol_comm:
        # first pair in lexicographic order among those tied with the maximum
        a, b = np.argwhere(np.triu(norms >= worst * (1 - 1e-12), k=1))[0]
        a, b = int(a), int(b)
        return NotClassical((a, b), (family.grid[a], family.grid[b]), float(norms[a, b]))
    basis = _canonical_basis(_joint_eigenbasis(family.states, rel_gap))
    return Classical(basis, worst)


def restrict_to_support(family: ParametrisedState, tol_rank: float = DEFAULT.rank):
    """Compress a family onto the orthogonal complement of its joint kernel.

    Returns ``(restricted_family, isometry)`` where ``isometry`` has the
    support basis as columns, so ``isometry.conj().T @ rho @ isometry`` is the
    restricted state.
    """
    total = family.states.sum(axis=0)
    w, v = np.linalg.eigh(0.5 * (total + total.conj().T))
    keep = w > tol_rank * w[-1]
    iso = v[:, keep]
    states = np.einsum("ia,nij,jb->nab", iso.conj(), family.states, iso)
    return ParametrisedState(family.grid, states, family.cell_volumes), iso
