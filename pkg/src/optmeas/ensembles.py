"""Seeded random states, measurements and families for property sweeps."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .quantum import KrausMeasurement, ParametrisedState, Povm


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1), dtype=np.complex128)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> Povm:
    """Random POVM ``S^{-1/2} G_k^dag G_k S^{-1/2}`` with ``S = sum_k G_k^dag G_k``."""
    return random_kraus(dim, n_outcomes, rng).povm


def random_kraus(dim: int, n_outcomes: int, rng: np.random.Generator) -> KrausMeasurement:
    g = rng.normal(size=(n_outcomes, dim, dim)) + 1j * rng.normal(size=(n_outcomes, dim, dim))
    s = np.einsum("kji,kjl->il", g.conj(), g)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return KrausMeasurement(g @ inv_sqrt)


def random_povm_batch(dim: int, n_outcomes: int, batch: int, rng: np.random.Generator) -> np.ndarray:
    """Effects of ``batch`` random POVMs, shape ``(batch, K, d, d)``."""
    g = rng.normal(size=(batch, n_outcomes, dim, dim)) + 1j * rng.normal(size=(batch, n_outcomes, dim, dim))
    e = np.einsum("bkji,bkjl->bkil", g.conj(), g)
    s = e.sum(axis=1)
    w, v = np.linalg.eigh(s)
    inv_sqrt = np.einsum("bij,bj,bkj->bik", v, 1 / np.sqrt(w), v.conj())
    return np.einsum("bij,bkjl,blm->bkim", inv_sqrt, e, inv_sqrt)


def random_classical_family(
    dim: int,
    n_points: int,
    rng: np.random.Generator,
    param_dim: int = 1,
    basis: np.ndarray | None = None,
) -> ParametrisedState:
    """Random probability vectors over a fixed (random) orthonormal basis."""
    basis = random_unitary(dim, rng) if basis is None else basis
    probs = rng.dirichlet(np.ones(dim), size=n_points)
    states = np.einsum("ji,ni,ki->njk", basis, probs, basis.conj())
    grid = np.sort(rng.uniform(-1.0, 1.0, size=(n_points, param_dim)), axis=0)
    return ParametrisedState(grid, states, rng.uniform(0.1, 1.0, size=n_points))


def random_family(
    dim: int,
    n_points: int,
    rng: np.random.Generator,
    param_dim: int = 1,
    rank: int | None = None,
) -> ParametrisedState:
    """Independent random states per grid point (generically non-classical)."""
    states = np.array([random_density_matrix(dim, rng, rank) for _ in range(n_points)])
    grid = np.sort(rng.uniform(-1.0, 1.0, size=(n_points, param_dim)), axis=0)
    return ParametrisedState(grid, states, np.ones(n_points))
