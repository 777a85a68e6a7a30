"""Constructions that dominate refineable and uninformative measurements.

Both constructions argue on a two-point sub-grid ``{theta_1, theta_2}``
with the uniform prior: the posterior-mean estimator there is the unique
Bayes estimator for any Bregman loss, hence admissible, and it separates
the two outcomes of a Helstrom measurement.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bayes import Prior, bayes_risk, posterior_mean_estimator
from .errors import (
    EstimatorsEqual,
    MeasurementInformative,
    NotRefineable,
    ProfilesDiffer,
    StateConstant,
)
from .estimation import (
    Dominance,
    Estimator,
    LossFunction,
    as_estimator,
    dominates_pair,
    risk_profile,
)
from .quantum import (
    KrausMeasurement,
    ParametrisedState,
    Povm,
    helstrom_measurement,
    outcome_probabilities,
    post_measurement_state,
    trace_distance,
    trace_norm,
)
from .tolerances import DEFAULT

__all__ = [
    "RefinabilityWitness",
    "RefinedMeasurement",
    "find_refinability",
    "refine_measurement",
    "lift_estimator",
    "RefinementEvidence",
    "dominate_refineable",
    "is_uninformative",
    "UninformativeEvidence",
    "dominate_uninformative",
    "constant_reduction",
    "bregman_average_improvement",
    "is_constant_family",
]


@dataclass(frozen=True)
class RefinabilityWitness:
    outcome: int
    indices: tuple[int, int]
    thetas: tuple[np.ndarray, np.ndarray]
    post_state_gap: float
    probabilities: tuple[float, float]


def is_constant_family(family: ParametrisedState, tol_eq: float = DEFAULT.eq) -> bool:
    return all(trace_norm(s - family.states[0]) <= tol_eq for s in family.states[1:])


def find_refinability(
    family: ParametrisedState,
    kraus: KrausMeasurement,
    tol_prob: float = DEFAULT.prob,
    tol_eq: float = DEFAULT.eq,
) -> RefinabilityWitness | None:
    """First outcome and grid pair whose post-measurement states differ.

    Scans outcomes in ascending order, then grid pairs lexicographically.
    Returns ``None`` when the measurement is not refineable on the grid.
    """
    probs = outcome_probabilities(family.states, kraus.povm)
    for i in range(kraus.n_outcomes):
        live = np.flatnonzero(probs[:, i] > tol_prob)
        posts = {int(j): post_measurement_state(family.states[j], kraus, i, tol_prob) for j in live}
        for x, a in enumerate(live):
            for b in live[x + 1 :]:
                gap = trace_distance(posts[int(a)], posts[int(b)])
                if gap > tol_eq:
                    a, b = int(a), int(b)
                    return RefinabilityWitness(
                        i, (a, b), (family.grid[a], family.grid[b]), gap, (float(probs[a, i]), float(probs[b, i]))
                    )
    return None


@dataclass(frozen=True)
class RefinedMeasurement:
    """Kraus measurement where one outcome is followed by a second measurement.

    ``labels[k]`` is ``(i,)`` for untouched outcomes and ``(i, 0)``,
    ``(i, 1)`` for the two refined ones. ``parent[k]`` is the original
    outcome that new outcome ``k`` came from.
    """

    kraus: KrausMeasurement
    labels: tuple[tuple[int, ...], ...]
    parent: np.ndarray
    second_stage: Povm


def refine_measurement(
    kraus: KrausMeasurement,
    witness: RefinabilityWitness,
    family: ParametrisedState,
    tol_prob: float = DEFAULT.prob,
    tol_eq: float = DEFAULT.eq,
) -> RefinedMeasurement:
    i = witness.outcome
    a, b = witness.indices
    post_a = post_measurement_state(family.states[a], kraus, i, tol_prob)
    post_b = post_measurement_state(family.states[b], kraus, i, tol_prob)
    second = helstrom_measurement(post_a, post_b, tol_eq)
    ops = list(kraus.kraus[:i]) + [second.effects[0] @ kraus.kraus[i], second.effects[1] @ kraus.kraus[i]]
    ops += list(kraus.kraus[i + 1 :])
    labels = [(k,) for k in range(i)] + [(i, 0), (i, 1)] + [(k,) for k in range(i + 1, kraus.n_outcomes)]
    parent = np.array([lab[0] for lab in labels])
    return RefinedMeasurement(KrausMeasurement(np.array(ops)), tuple(labels), parent, second)


def lift_estimator(refined: RefinedMeasurement, estimator) -> Estimator:
    """Copy the estimate of each original outcome onto its refined outcomes."""
    est = as_estimator(estimator)
    return Estimator(est.values[refined.parent])


@dataclass
class RefinementEvidence:
    witness: RefinabilityWitness
    refined: RefinedMeasurement
    estimator: Estimator
    sub_grid: tuple[int, int]
    refined_bayes_risk: float
    best_original_bayes_risk: float
    lift_max_deviation: float
    risk_tables: dict = field(default_factory=dict)

    @property
    def strict_improvement(self) -> float:
        return self.best_original_bayes_risk - self.refined_bayes_risk


def dominate_refineable(
    family: ParametrisedState,
    kraus: KrausMeasurement,
    loss: LossFunction,
    test_estimators=(),
    tol_prob: float = DEFAULT.prob,
    tol_eq: float = DEFAULT.eq,
) -> RefinementEvidence:
    """Build the refined measurement and the evidence that it dominates.

    Evidence has two parts. Every estimator in ``test_estimators`` lifted to
    the refined measurement keeps its risk profile exactly
    (``lift_max_deviation``). And on the two-point sub-grid of the witness,
    the refined posterior-mean estimator has strictly smaller uniform-prior
    Bayes risk than the best estimator available to the original
    measurement, so no lifted estimator can match it pointwise.
    """
    if is_constant_family(family, tol_eq):
        raise StateConstant("family is constant on the grid")
    witness = find_refinability(family, kraus, tol_prob, tol_eq)
    if witness is None:
        raise NotRefineable("no outcome has a parameter-dependent post-measurement state")
    refined = refine_measurement(kraus, witness, family, tol_prob, tol_eq)
    mf = refined.kraus.povm
    f = kraus.povm

    deviation = 0.0
    for est in test_estimators:
        est = as_estimator(est, family.param_dim)
        r_f = risk_profile(family, f, est, loss).values
        r_mf = risk_profile(family, mf, lift_estimator(refined, est), loss).values
        deviation = max(deviation, float(np.max(np.abs(r_f - r_mf))))

    sub = family.restrict(witness.indices)
    prior = Prior.uniform(2)
    est_mf = posterior_mean_estimator(sub, mf, prior, tol_prob)
    est_f = posterior_mean_estimator(sub, f, prior, tol_prob)
    refined_risk = bayes_risk(sub, mf, est_mf, loss, prior)
    original_risk = bayes_risk(sub, f, est_f, loss, prior)
    tables = {
        "sub_grid": {
            "refined": risk_profile(sub, mf, est_mf, loss).values.tolist(),
            "original_bayes": risk_profile(sub, f, est_f, loss).values.tolist(),
        },
        "full_grid": {
            "refined": risk_profile(family, mf, est_mf, loss).values.tolist(),
            "original_bayes": risk_profile(family, f, est_f, loss).values.tolist(),
        },
    }
    return RefinementEvidence(
        witness, refined, est_mf, witness.indices, refined_risk, original_risk, deviation, tables
    )


def is_uninformative(family: ParametrisedState, povm: Povm, tol: float = 1e-9) -> bool:
    probs = outcome_probabilities(family.states, povm)
    return bool(np.all(probs.max(axis=0) - probs.min(axis=0) <= tol))


def constant_reduction(family: ParametrisedState, povm: Povm, estimator) -> Estimator:
    """The constant estimator at the probability-weighted mean estimate.

    Only meaningful for uninformative measurements, where the weights do
    not depend on the parameter; the first grid point's probabilities are
    used.
    """
    est = as_estimator(estimator, family.param_dim)
    p = outcome_probabilities(family.states[0], povm)[0]
    theta0 = p @ est.values
    return Estimator(np.tile(theta0, (povm.n_outcomes, 1)))


@dataclass
class UninformativeEvidence:
    measurement: Povm
    estimator: Estimator
    sub_grid: tuple[int, int]
    constant: np.ndarray
    dominance: Dominance
    margin: float
    constant_reductions_ok: bool
    risk_tables: dict = field(default_factory=dict)


def dominate_uninformative(
    family: ParametrisedState,
    povm: Povm,
    loss: LossFunction,
    test_estimators=(),
    tol: float = 1e-9,
    tol_eq: float = DEFAULT.eq,
    tol_dom: float = DEFAULT.dom,
) -> UninformativeEvidence:
    """Helstrom measurement plus two-point Bayes estimator beating an
    uninformative measurement.

    The pair of grid points with the largest trace distance is used (first
    pair on ties). Evidence: every tested estimator of ``povm`` is weakly
    improved by its constant reduction, and the constructed pair dominates
    the best constant (the prior mean) on the two-point sub-grid.
    """
    if not is_uninformative(family, povm, tol):
        raise MeasurementInformative("outcome probabilities depend on the parameter")
    n = family.n_points
    best, pair = -1.0, None
    for a in range(n):
        for b in range(a + 1, n):
            d = trace_norm(family.states[a] - family.states[b])
            if d > best + 1e-15:
                best, pair = d, (a, b)
    if pair is None or best <= tol_eq:
        raise StateConstant("family is constant on the grid")

    sub = family.restrict(pair)
    m = helstrom_measurement(sub.states[0], sub.states[1], tol_eq)
    prior = Prior.uniform(2)
    est_m = posterior_mean_estimator(sub, m, prior)
    constant = prior.weights @ sub.grid
    r_m = risk_profile(sub, m, est_m, loss)
    r_c = risk_profile(sub, Povm.trivial(family.dim), Estimator(constant[None, :]), loss)
    dom = dominates_pair(r_m, r_c, tol_dom)
    margin = float(np.min(r_c.values - r_m.values))

    reductions_ok = True
    for est in test_estimators:
        est = as_estimator(est, family.param_dim)
        r_est = risk_profile(family, povm, est, loss).values
        r_red = risk_profile(family, povm, constant_reduction(family, povm, est), loss).values
        reductions_ok &= bool(np.all(r_red <= r_est + tol_dom))

    tables = {
        "sub_grid": {"constructed": r_m.values.tolist(), "best_constant": r_c.values.tolist()},
        "full_grid": {"constructed": risk_profile(family, m, est_m, loss).values.tolist()},
    }
    return UninformativeEvidence(m, est_m, pair, constant, dom, margin, reductions_ok, tables)


def bregman_average_improvement(
    est_a,
    est_b,
    povm: Povm,
    family: ParametrisedState,
    loss: LossFunction,
    tol: float = DEFAULT.dom,
) -> Estimator:
    """Midpoint of two distinct estimators that share a risk profile.

    By strict convexity of a Bregman loss in its first argument, the
    midpoint's risk is no larger anywhere and strictly smaller wherever an
    outcome on which the two differ has positive probability.
    """
    a = as_estimator(est_a, family.param_dim)
    b = as_estimator(est_b, family.param_dim)
    if np.array_equal(a.values, b.values):
        raise EstimatorsEqual("estimators are identical")
    r_a = risk_profile(family, povm, a, loss).values
    r_b = risk_profile(family, povm, b, loss).values
    gap = float(np.max(np.abs(r_a - r_b)))
    if gap > tol:
        raise ProfilesDiffer(f"risk profiles differ by {gap:.3e}")
    return Estimator(0.5 * (a.values + b.values))
