"""JSON and CSV exchange formats.

Matrices are ``{"dim": n, "re": [[...]], "im": [[...]]}``. Floats go through
``json`` which writes the shortest round-trip representation, so
``load(dump(x)) == x`` bit for bit.
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .bayes import Prior
from .errors import DimensionMismatch
from .estimation import Estimator, RiskProfile
from .quantum import KrausMeasurement, ParametrisedState, Povm

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "state_to_json",
    "state_from_json",
    "load_state",
    "save_state",
    "povm_to_json",
    "povm_from_json",
    "kraus_to_json",
    "kraus_from_json",
    "estimator_to_json",
    "estimator_from_json",
    "prior_to_json",
    "prior_from_json",
    "profile_to_csv",
    "profile_to_json",
    "dumps",
    "read_json",
]


def matrix_to_json(mat) -> dict:
    a = np.asarray(mat, dtype=np.complex128)
    return {"dim": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise DimensionMismatch(f"matrix parts have shapes {re.shape} and {im.shape}")
    if "dim" in obj and int(obj["dim"]) != re.shape[0]:
        raise DimensionMismatch(f"declared dim {obj['dim']} does not match {re.shape[0]}")
    return re + 1j * im


def state_to_json(family: ParametrisedState) -> dict:
    return {
        "param_dim": family.param_dim,
        "grid": family.grid.tolist(),
        "cell_volumes": family.cell_volumes.tolist(),
        "states": [matrix_to_json(s) for s in family.states],
    }


def state_from_json(obj: dict, validate: bool = True) -> ParametrisedState:
    grid = np.asarray(obj["grid"], dtype=float)
    if grid.ndim == 1:
        grid = grid[:, None]
    if "param_dim" in obj and int(obj["param_dim"]) != grid.shape[1]:
        raise DimensionMismatch(f"param_dim {obj['param_dim']} does not match grid width {grid.shape[1]}")
    states = [matrix_from_json(m) for m in obj["states"]]
    dims = {s.shape[0] for s in states}
    if len(dims) != 1:
        raise DimensionMismatch(f"states have differing dimensions {sorted(dims)}")
    vols = obj.get("cell_volumes")
    if validate:
        return ParametrisedState.from_states(grid, states, vols)
    return ParametrisedState(grid, np.array(states), np.ones(len(states)) if vols is None else vols)


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_state(path) -> ParametrisedState:
    return state_from_json(read_json(path))


def save_state(family: ParametrisedState, path) -> None:
    Path(path).write_text(dumps(state_to_json(family)))


def povm_to_json(povm: Povm) -> dict:
    return {"effects": [matrix_to_json(e) for e in povm.effects]}


def povm_from_json(obj: dict) -> Povm:
    return Povm.from_effects([matrix_from_json(m) for m in obj["effects"]])


def kraus_to_json(kraus: KrausMeasurement) -> dict:
    return {"kraus": [matrix_to_json(k) for k in kraus.kraus]}


def kraus_from_json(obj: dict) -> KrausMeasurement:
    return KrausMeasurement.from_operators([matrix_from_json(m) for m in obj["kraus"]])


def estimator_to_json(est: Estimator) -> dict:
    return {"values": est.values.tolist()}


def estimator_from_json(obj: dict) -> Estimator:
    return Estimator(np.asarray(obj["values"], dtype=float))


def prior_to_json(prior: Prior) -> dict:
    return {"weights": prior.weights.tolist()}


def prior_from_json(obj: dict) -> Prior:
    return Prior(obj["weights"])


def profile_to_csv(profile: RiskProfile) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n = profile.grid.shape[1]
    writer.writerow([f"theta_{i + 1}" for i in range(n)] + ["risk"])
    for row in profile.to_rows():
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()


def profile_to_json(profile: RiskProfile) -> dict:
    return {"grid": profile.grid.tolist(), "risk": profile.values.tolist()}


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline.

    Infinite values are written as the string ``"inf"`` to stay valid JSON.
    """
    return json.dumps(_finite(obj), sort_keys=True, indent=2, default=_default) + "\n"


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _finite(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if np.isinf(f):
            return "inf" if f > 0 else "-inf"
        if np.isnan(f):
            return "nan"
        return f
    return obj
