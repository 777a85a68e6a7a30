"""Numerical tolerances shared across the package."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-9
    povm: float = 1e-9
    comm: float = 1e-8
    prob: float = 1e-12
    # eigenvalues below rank * lambda_max count as kernel
    rank: float = 1e-10
    # relative gap under which eigenvalues are grouped into one eigenspace
    group: float = 1e-8
    # trace distance below which two states are considered equal
    eq: float = 1e-8
    dom: float = 1e-9

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def override(self, **kwargs: float) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in kwargs.items()})


DEFAULT = Tolerances()
