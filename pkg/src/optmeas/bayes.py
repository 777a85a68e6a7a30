"""Bayes risk, posterior means and the single-parameter Bayes measurement.

For least-squares loss and a discrete prior the Bayes-optimal
measurement/estimator pair is read off the Hermitian operator ``lam`` solving
``lam @ rho_bar + rho_bar @ lam = 2 * rho_bar_prime``: measure in its
eigenbasis and report the eigenvalue.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    GridMismatch,
    MultiParameterUnsupported,
    OutcomeNeverOccurs,
    RankDeficientAverage,
)
from .estimation import Estimator, LossFunction, as_estimator, risk_profile
from .quantum import ParametrisedState, Povm, group_eigenvalues, operator_norm, outcome_probabilities
from .tolerances import DEFAULT

__all__ = [
    "Prior",
    "bayes_risk",
    "posterior_mean_estimator",
    "average_state_moments",
    "BayesSolution",
    "solve_bayes_measurement",
    "bayes_risk_terms",
    "bayes_operators",
]


@dataclass(frozen=True, eq=False)
class Prior:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("prior weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"prior weights sum to {w.sum()!r}, expected 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "Prior":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalised(cls, weights) -> "Prior":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Prior":
        w = np.zeros(n)
        w[index] = 1.0
        return cls(w)


def _check_prior(family: ParametrisedState, prior: Prior) -> None:
    if prior.weights.shape[0] != family.n_points:
        raise GridMismatch(f"prior has {prior.weights.shape[0]} weights for {family.n_points} grid points")


def bayes_risk(family: ParametrisedState, povm: Povm, estimator, loss: LossFunction, prior: Prior) -> float:
    _check_prior(family, prior)
    return float(prior.weights @ risk_profile(family, povm, estimator, loss).values)


def posterior_mean_estimator(family: ParametrisedState, povm: Povm, prior: Prior, tol_prob: float = DEFAULT.prob) -> Estimator:
    """Posterior mean of the parameter for each outcome.

    Outcomes with zero marginal probability get the prior mean and trigger an
    :class:`~optmeas.errors.OutcomeNeverOccurs` warning.
    """
    _check_prior(family, prior)
    if povm.dim != family.dim:
        raise DimensionMismatch(f"measurement dimension {povm.dim} != state dimension {family.dim}")
    joint = prior.weights[:, None] * outcome_probabilities(family.states, povm)
    marginal = joint.sum(axis=0)
    prior_mean = prior.weights @ family.grid
    out = np.tile(prior_mean, (povm.n_outcomes, 1))
    seen = marginal > tol_prob
    out[seen] = (joint[:, seen].T @ family.grid) / marginal[seen, None]
    if not np.all(seen):
        warnings.warn(
            f"outcome(s) {np.flatnonzero(~seen).tolist()} never occur under the prior; "
            "their estimate is set to the prior mean",
            OutcomeNeverOccurs,
            stacklevel=2,
        )
    return Estimator(out)


def _single_parameter(family: ParametrisedState) -> np.ndarray:
    if family.param_dim != 1:
        raise MultiParameterUnsupported("only single-parameter families are supported here")
    return family.grid[:, 0]


def average_state_moments(family: ParametrisedState, prior: Prior):
    """Prior average of the state and of ``theta * state``.

    Only single-parameter families are accepted, since the second operator
    is scalar-weighted.
    """
    _check_prior(family, prior)
    theta = _single_parameter(family)
    rho_bar = np.einsum("n,nij->ij", prior.weights, family.states)
    rho_bar_prime = np.einsum("n,nij->ij", prior.weights * theta, family.states)
    return rho_bar, rho_bar_prime


def bayes_operators(povm: Povm, estimator) -> tuple[np.ndarray, np.ndarray]:
    """``(sum_i F_i est_i, sum_i F_i est_i**2)`` for a single-parameter estimator."""
    est = as_estimator(estimator)
    if est.param_dim != 1:
        raise MultiParameterUnsupported("bayes operators need a single-parameter estimator")
    v = est.values[:, 0]
    return np.einsum("k,kij->ij", v, povm.effects), np.einsum("k,kij->ij", v**2, povm.effects)


def bayes_risk_terms(povm: Povm, estimator, family: ParametrisedState, prior: Prior):
    """The three scalars whose combination ``a - 2 b + c`` is the least-squares Bayes risk."""
    rho_bar, rho_bar_prime = average_state_moments(family, prior)
    lam, lam2 = bayes_operators(povm, estimator)
    theta = family.grid[:, 0]
    return (
        float(np.trace(lam2 @ rho_bar).real),
        float(np.trace(lam @ rho_bar_prime).real),
        float(prior.weights @ theta**2),
    )


@dataclass(frozen=True, eq=False)
class BayesSolution:
    lam: np.ndarray
    measurement: Povm
    estimator: Estimator
    bayes_risk: float
    anticommutator_residual: float
    eigenvalue_groups: tuple[int, ...]

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "lambda": matrix_to_json(self.lam),
            "effects": [matrix_to_json(e) for e in self.measurement.effects],
            "estimator": {"values": self.estimator.values.tolist()},
            "bayes_risk": self.bayes_risk,
            "residuals": {"anticommutator": self.anticommutator_residual},
        }


def solve_bayes_measurement(
    family: ParametrisedState,
    prior: Prior,
    tol_rank: float = DEFAULT.rank,
    rel_gap: float = DEFAULT.group,
    fine_grained: bool = False,
) -> BayesSolution:
    """Least-squares Bayes measurement and estimator for a single parameter.

    Solves the anticommutator equation in the eigenbasis of the averaged
    state, where it decouples entrywise, then measures projectively onto the
    eigenspaces of the solution. Eigenvalues closer than ``rel_gap`` share
    one projector (the coarsest Bayes measurement) unless ``fine_grained``.

    Raises
    ------
    RankDeficientAverage
        If the averaged state is singular.
    """
    rho_bar, rho_bar_prime = average_state_moments(family, prior)
    w, v = np.linalg.eigh(rho_bar)
    kernel = int(np.sum(w <= tol_rank * w[-1]))
    if kernel:
        raise RankDeficientAverage(kernel)
    rp = v.conj().T @ rho_bar_prime @ v
    lam = v @ (2.0 * rp / (w[:, None] + w[None, :])) @ v.conj().T
    lam = 0.5 * (lam + lam.conj().T)

    mu, u = np.linalg.eigh(lam)
    groups = [np.array([i]) for i in range(mu.size)] if fine_grained else group_eigenvalues(mu, rel_gap)
    effects = np.array([u[:, g] @ u[:, g].conj().T for g in groups])
    values = np.array([mu[g].mean() for g in groups])

    theta = family.grid[:, 0]
    risk_value = float(
        np.trace(lam @ lam @ rho_bar).real
        - 2.0 * np.trace(lam @ rho_bar_prime).real
        + prior.weights @ theta**2
    )
    residual = operator_norm(lam @ rho_bar + rho_bar @ lam - 2.0 * rho_bar_prime)
    return BayesSolution(
        lam=lam,
        measurement=Povm(effects),
        estimator=Estimator(values[:, None]),
        bayes_risk=risk_value,
        anticommutator_residual=residual,
        eigenvalue_groups=tuple(len(g) for g in groups),
    )
