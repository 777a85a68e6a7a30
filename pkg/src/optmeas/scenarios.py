"""Canonical parametrised families and brute-force qubit oracles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import expm

from .bayes import Prior
from .errors import InvalidRange, SearchSpaceTooLarge, UnsupportedDimension
from .estimation import Estimator, LossFunction, as_estimator, loss_matrix
from .quantum import ParametrisedState, Povm, ket, outcome_probabilities, projector, validate_state
from .tolerances import DEFAULT

__all__ = [
    "ScenarioSpec",
    "build_scenario",
    "mach_zehnder",
    "thermal",
    "depolarizing",
    "diagonal_classical",
    "mz_ket",
    "mz_measurements",
    "oracle_measurement_grid",
    "OracleResult",
    "oracle_best_pair",
    "SHORTHANDS",
]

SHORTHANDS = {"mz": "MachZehnder", "thermal": "Thermal", "depol": "Depolarizing", "diag": "DiagonalClassical"}


def _uniform_volumes(points: np.ndarray, period: float | None = None) -> np.ndarray:
    """Cell widths for a sorted 1-D grid; constant widths for evenly spaced points."""
    n = points.size
    if n == 1:
        return np.ones(1)
    if period is not None:
        return np.full(n, period / n)
    edges = np.concatenate(([points[0]], 0.5 * (points[1:] + points[:-1]), [points[-1]]))
    widths = np.diff(edges)
    widths[0] += 0.5 * (points[1] - points[0])
    widths[-1] += 0.5 * (points[-1] - points[-2])
    return widths


@dataclass
class ScenarioSpec:
    """Recipe for a parametrised family.

    ``grid`` holds explicit points; otherwise ``start``, ``stop``, ``count``
    and ``endpoint`` define an evenly spaced grid. ``params`` carries
    kind-specific inputs: ``H`` (Hamiltonian) for Thermal, ``psi`` for
    Depolarizing, ``path`` for Custom.
    """

    kind: str
    grid: list[float] | None = None
    start: float | None = None
    stop: float | None = None
    count: int | None = None
    endpoint: bool | None = None
    params: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        data = dict(data)
        kind = data.pop("kind")
        return cls(kind=SHORTHANDS.get(kind, kind), **data)

    def points(self, default: tuple[float, float, int, bool]) -> np.ndarray:
        if self.grid is not None:
            return np.asarray(self.grid, dtype=float)
        start, stop, count, endpoint = default
        start = start if self.start is None else self.start
        stop = stop if self.stop is None else self.stop
        count = count if self.count is None else self.count
        endpoint = endpoint if self.endpoint is None else self.endpoint
        return np.linspace(start, stop, int(count), endpoint=endpoint)


def mz_ket(theta: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * theta)]) / np.sqrt(2.0)


def mach_zehnder(grid=None, count: int = 64) -> ParametrisedState:
    """Pure phase family ``(|0> + e^{i theta}|1>)/sqrt 2``; default 64 points on [0, 2 pi)."""
    if grid is None:
        points = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        vols = np.full(count, 2 * np.pi / count)
    else:
        points = np.asarray(grid, dtype=float)
        vols = _uniform_volumes(points)
    states = [validate_state(projector(mz_ket(t))) for t in points]
    return ParametrisedState(points, np.array(states), vols)


def thermal(betas, hamiltonian=None) -> ParametrisedState:
    """Gibbs states ``exp(-beta H)/Tr exp(-beta H)``; ``H`` defaults to ``diag(0, 1)``."""
    h = np.diag([0.0, 1.0]) if hamiltonian is None else np.asarray(hamiltonian, dtype=np.complex128)
    betas = np.asarray(betas, dtype=float)
    states = []
    for b in betas:
        g = expm(-b * h)
        states.append(validate_state(g / np.trace(g).real))
    return ParametrisedState(betas, np.array(states), _uniform_volumes(betas))


def depolarizing(ps, psi=None, dim: int | None = None) -> ParametrisedState:
    """``(1 - p)|psi><psi| + p 1/d`` for ``p`` in [0, 1]."""
    ps = np.asarray(ps, dtype=float)
    if np.any(ps < 0) or np.any(ps > 1):
        raise InvalidRange("depolarizing strength must lie in [0, 1]")
    if psi is None:
        psi = np.eye(dim or 2)[0]
    psi = ket(*np.asarray(psi, dtype=np.complex128))
    d = psi.size
    pure = projector(psi)
    states = [validate_state((1 - p) * pure + p * np.eye(d) / d) for p in ps]
    return ParametrisedState(ps, np.array(states), _uniform_volumes(ps))


def diagonal_classical(thetas) -> ParametrisedState:
    """Qubit family ``diag(theta, 1 - theta)`` for ``theta`` in [0, 1]."""
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas < 0) or np.any(thetas > 1):
        raise InvalidRange("diagonal family needs theta in [0, 1]")
    states = [np.diag([t, 1 - t]).astype(np.complex128) for t in thetas]
    return ParametrisedState(thetas, np.array(states), _uniform_volumes(thetas))


def build_scenario(spec: ScenarioSpec) -> ParametrisedState:
    kind = SHORTHANDS.get(spec.kind, spec.kind)
    if kind == "MachZehnder":
        if spec.grid is None and spec.start is None and spec.stop is None:
            return mach_zehnder(count=spec.count or 64)
        return mach_zehnder(spec.points((0.0, 2 * np.pi, 64, False)))
    if kind == "Thermal":
        h = spec.params.get("H")
        if h is not None:
            h = np.asarray(h, dtype=float)
        betas = spec.points((0.0, 5.0, 16, True))
        if np.any(betas < 0):
            raise InvalidRange("inverse temperature must be nonnegative")
        return thermal(betas, h)
    if kind == "Depolarizing":
        psi = spec.params.get("psi")
        if psi is not None:
            psi = np.asarray(psi, dtype=float)
        return depolarizing(spec.points((0.0, 1.0, 11, True)), psi, spec.params.get("dim"))
    if kind == "DiagonalClassical":
        return diagonal_classical(spec.points((0.05, 0.95, 10, True)))
    if kind == "Custom":
        from .io import load_state

        return load_state(spec.params["path"])
    raise InvalidRange(f"unknown scenario kind {spec.kind!r}")


def mz_measurements() -> tuple[Povm, Povm, Estimator]:
    """The +/- basis, the rotated e-basis and the estimator ``(pi/4, pi/2)`` on the latter."""
    plus = ket(1, 1)
    minus = ket(1, -1)
    e1 = np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    e2 = np.array([np.exp(-1j * np.pi / 4), -1.0]) / np.sqrt(2)
    m = Povm.projective(np.column_stack([plus, minus]))
    f = Povm.projective(np.column_stack([e1, e2]))
    return m, f, Estimator([[np.pi / 4], [np.pi / 2]])


def oracle_measurement_grid(dim: int = 2, resolution: int = 10) -> list[Povm]:
    """Rank-one projective qubit measurements on a Bloch-angle grid.

    Polar angles ``j pi / resolution`` and azimuths ``2 pi k / resolution``
    for ``j, k < resolution``; the trivial one-outcome measurement is
    appended last.
    """
    if dim != 2:
        raise UnsupportedDimension("oracles are qubit-only")
    out = []
    for j in range(resolution):
        polar = np.pi * j / resolution
        for k in range(resolution):
            az = 2 * np.pi * k / resolution
            up = np.array([np.cos(polar / 2), np.exp(1j * az) * np.sin(polar / 2)])
            down = np.array([-np.exp(-1j * az) * np.sin(polar / 2), np.cos(polar / 2)])
            out.append(Povm.projective(np.column_stack([up, down])))
    out.append(Povm.trivial(2))
    return out


@dataclass
class OracleResult:
    """Exhaustive search outcome. ``table`` rows are sorted best first."""

    criterion: str
    best_measurement: int
    best_estimator: Estimator
    best_value: float
    table: list[dict] = field(default_factory=list)
    n_evaluations: int = 0


def oracle_best_pair(
    family: ParametrisedState,
    loss: LossFunction,
    measurements: list[Povm],
    estimator_lattice,
    criterion: str = "bayes",
    prior: Prior | None = None,
    reference: tuple[Povm, Estimator] | None = None,
    reference_lattice=None,
    cap: int = 10**8,
    tol_dom: float = DEFAULT.dom,
) -> OracleResult:
    """Exhaustive search over ``measurements`` x lattice estimators.

    ``criterion="bayes"`` ranks pairs by Bayes risk under ``prior``; since
    Bayes risk is a sum over outcomes, each outcome's best lattice value is
    found independently, which is the same as enumerating all lattice
    estimators.

    ``criterion="domination"`` looks for pairs ``(F, est)`` that the
    reference cannot match: for each, ``margin`` is the smallest, over the
    reference estimators, of the largest pointwise excess risk. The
    reference estimators are ``reference[1]`` when given, otherwise every
    estimator on ``reference_lattice``. A positive margin means no reference
    estimator is at least as good. Rows are ranked by decreasing margin.
    """
    lattice = np.asarray(estimator_lattice, dtype=float)
    if lattice.ndim == 1:
        lattice = lattice[:, None]
    losses = loss_matrix(loss, lattice, family.grid)  # (m, n)
    m = lattice.shape[0]

    if criterion == "bayes":
        prior = prior or Prior.uniform(family.n_points)
        n_eval = sum(p.n_outcomes for p in measurements) * m
        if n_eval * family.n_points > cap:
            raise SearchSpaceTooLarge(f"{n_eval} evaluations exceed the cap of {cap}")
        rows = []
        for idx, povm in enumerate(measurements):
            joint = prior.weights[:, None] * outcome_probabilities(family.states, povm)  # (n, K)
            per_outcome = losses @ joint  # (m, K)
            choice = np.argmin(per_outcome, axis=0)
            value = float(per_outcome[choice, np.arange(povm.n_outcomes)].sum())
            rows.append({"measurement": idx, "estimator": lattice[choice].tolist(), "value": value})
        rows.sort(key=lambda r: (r["value"], r["measurement"]))
        best = rows[0]
        return OracleResult("bayes", best["measurement"], Estimator(best["estimator"]), best["value"], rows, n_eval)

    if criterion == "domination":
        if reference is None:
            raise ValueError("domination criterion needs a reference measurement")
        ref_povm, ref_est = reference
        ref_p = outcome_probabilities(family.states, ref_povm)
        if ref_est is not None:
            ref_est = as_estimator(ref_est, family.param_dim)
            ref_prof = (ref_p * loss_matrix(loss, ref_est.values, family.grid).T).sum(axis=1)[None, :]
        else:
            ref_lat = lattice if reference_lattice is None else np.asarray(reference_lattice, dtype=float)
            if ref_lat.ndim == 1:
                ref_lat = ref_lat[:, None]
            ref_losses = loss_matrix(loss, ref_lat, family.grid)
            ref_combos = np.array(list(itertools.product(range(ref_lat.shape[0]), repeat=ref_povm.n_outcomes)))
            ref_prof = sum(ref_losses[ref_combos[:, k]] * ref_p[:, k] for k in range(ref_povm.n_outcomes))
        n_eval = sum(m**p.n_outcomes for p in measurements) * ref_prof.shape[0]
        if n_eval > cap:
            raise SearchSpaceTooLarge(f"{n_eval} evaluations exceed the cap of {cap}")
        rows = []
        for idx, povm in enumerate(measurements):
            p = outcome_probabilities(family.states, povm)
            combos = np.array(list(itertools.product(range(m), repeat=povm.n_outcomes)))
            prof = sum(losses[combos[:, k]] * p[:, k] for k in range(povm.n_outcomes))
            excess = (ref_prof[None, :, :] - prof[:, None, :]).max(axis=2)  # (cands, refs)
            margins = excess.min(axis=1)
            c = int(np.argmax(margins))
            rows.append({"measurement": idx, "estimator": lattice[combos[c]].tolist(), "value": float(margins[c])})
        rows.sort(key=lambda r: (-r["value"], r["measurement"]))
        best = rows[0]
        return OracleResult("domination", best["measurement"], Estimator(best["estimator"]), best["value"], rows, n_eval)

    raise ValueError(f"unknown criterion {criterion!r}")
