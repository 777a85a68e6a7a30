"""Command-line front end.

Usage::

    optmeas risk --scenario mz --povm pm.json --estimator est.json --loss ls --format csv
    optmeas certify --state family.json
    optmeas bayes --scenario diag --prior prior.json
    optmeas bounds --state family.json --reference classical.json
    optmeas admissibility --scenario mz --kraus identity.json
    optmeas oracle --scenario diag --resolution 50

Exit codes: 0 success, 2 invalid input, 3 dimension or grid mismatch,
4 search space over the cap.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .admissibility import dominate_refineable, dominate_uninformative, find_refinability, is_uninformative
from .bayes import Prior, posterior_mean_estimator, solve_bayes_measurement
from .errors import DimensionMismatch, GridMismatch, OptMeasError, SearchSpaceTooLarge
from .estimation import loss_from_name, risk_profile
from .io import (
    dumps,
    estimator_from_json,
    estimator_to_json,
    kraus_from_json,
    load_state,
    matrix_to_json,
    povm_from_json,
    povm_to_json,
    prior_from_json,
    profile_to_csv,
    profile_to_json,
    read_json,
)
from .optimality import (
    ApproxBound,
    NoGo,
    Optimal,
    additive_bound,
    certify,
    dephased_reference,
    local_bound,
    multiplicative_bound,
)
from .quantum import KrausMeasurement
from .scenarios import SHORTHANDS, ScenarioSpec, build_scenario, oracle_measurement_grid, oracle_best_pair
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_INVALID, EXIT_DIMENSION, EXIT_CAP = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", help="ParametrisedState JSON file")
    parser.add_argument("--scenario", help=f"shorthand ({', '.join(SHORTHANDS)}) or ScenarioSpec JSON file")
    parser.add_argument("--povm", help="POVM JSON file")
    parser.add_argument("--kraus", help="Kraus measurement JSON file")
    parser.add_argument("--estimator", help="estimator JSON file")
    parser.add_argument("--loss", default="ls", choices=["ls", "kl"])
    parser.add_argument("--prior", help="prior JSON file (default: uniform)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optmeas", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("risk", "risk profile of a measurement/estimator pair"),
        ("certify", "optimal measurement or no-go witness"),
        ("bayes", "least-squares Bayes measurement for a prior"),
        ("bounds", "approximate-optimality bounds against a classical reference"),
        ("admissibility", "inadmissibility certificate for a measurement"),
        ("oracle", "exhaustive qubit search"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "bounds":
            p.add_argument("--reference", help="classical reference family (default: dephased family)")
            p.add_argument("--diameter", type=float, help="override the grid loss diameter")
        if name == "oracle":
            p.add_argument("--resolution", type=int, default=20)
            p.add_argument("--lattice-count", type=int, default=41)
            p.add_argument("--criterion", choices=["bayes", "domination"], default="bayes")
            p.add_argument("--top", type=int, default=0, help="keep only the first N table rows (0 = all)")
        if name == "admissibility":
            p.add_argument("--n-test-estimators", type=int, default=20)
        if name == "bayes":
            p.add_argument("--fine-grained", action="store_true")
    return parser


def _split_tolerances(argv: list[str]) -> tuple[list[str], dict[str, float]]:
    rest, tols = [], {}
    it = iter(argv)
    for arg in it:
        if arg.startswith("--tol-"):
            key, _, value = arg[len("--tol-") :].partition("=")
            if not value:
                value = next(it, "")
            try:
                tols[key.replace("-", "_")] = float(value)
            except ValueError:
                raise CliError(EXIT_INVALID, f"tolerance {arg!r} needs a numeric value") from None
        else:
            rest.append(arg)
    return rest, tols


def _load_family(args):
    if bool(args.state) == bool(args.scenario):
        raise CliError(EXIT_INVALID, "exactly one of --state and --scenario is required")
    if args.state:
        return load_state(args.state)
    if args.scenario in SHORTHANDS:
        return build_scenario(ScenarioSpec(kind=args.scenario))
    return build_scenario(ScenarioSpec.from_dict(read_json(args.scenario)))


def _require(path: str | None, flag: str) -> str:
    if not path:
        raise CliError(EXIT_INVALID, f"{flag} is required")
    return path


def _prior(args, family) -> Prior:
    if args.prior:
        return prior_from_json(read_json(args.prior))
    return Prior.uniform(family.n_points)


def _metadata(args, tols: Tolerances) -> dict:
    return {
        "command": args.command,
        "seed": args.seed,
        "tolerances": tols.to_dict(),
        "versions": {"optmeas": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
    }


def cmd_risk(args, tols):
    family = _load_family(args)
    povm = povm_from_json(read_json(_require(args.povm, "--povm")))
    est = estimator_from_json(read_json(_require(args.estimator, "--estimator")))
    profile = risk_profile(family, povm, est, loss_from_name(args.loss))
    if args.format == "csv":
        return profile_to_csv(profile)
    return {"profile": profile_to_json(profile), "loss": args.loss}


def _certificate_dict(cert) -> dict:
    if isinstance(cert, Optimal):
        return {"verdict": "Optimal", "measurement": povm_to_json(cert.measurement),
                "max_commutator": cert.max_commutator}
    if isinstance(cert, NoGo):
        return {"verdict": "NoGo", "witness": {"indices": list(cert.indices),
                "thetas": [t.tolist() for t in cert.thetas], "commutator_norm": cert.commutator_norm}}
    return {"verdict": "Inconclusive", "max_commutator": cert.max_commutator, "reason": cert.reason}


def cmd_certify(args, tols):
    family = _load_family(args)
    return _certificate_dict(certify(family, loss_from_name(args.loss), tols.comm))


def cmd_bayes(args, tols):
    family = _load_family(args)
    sol = solve_bayes_measurement(family, _prior(args, family), tols.rank, tols.group, args.fine_grained)
    return sol.to_dict()


def _bound_dict(bound: ApproxBound) -> dict:
    out = {"kind": bound.kind, "value": bound.value, "measurement": povm_to_json(bound.measurement)}
    out.update({k: v for k, v in bound.details.items() if k != "basis"})
    return out


def cmd_bounds(args, tols):
    family = _load_family(args)
    loss = loss_from_name(args.loss)
    reference = load_state(args.reference) if args.reference else dephased_reference(family)
    local = local_bound(family, tols.comm)
    return {
        "bounds": [
            _bound_dict(additive_bound(family, reference, loss, args.diameter, tols.comm)),
            _bound_dict(multiplicative_bound(family, reference, tols.comm, tols.rank)),
            {"kind": "local", "value": local.delta, "gamma_indices": list(local.gamma_indices),
             "gamma_volume": local.gamma_volume, "degenerate": local.degenerate,
             "measurement": povm_to_json(local.measurement)},
        ],
        "reference": "file" if args.reference else "dephased",
    }


def cmd_admissibility(args, tols):
    family = _load_family(args)
    loss = loss_from_name(args.loss)
    if args.kraus:
        kraus = kraus_from_json(read_json(args.kraus))
        povm = kraus.povm
    else:
        povm = povm_from_json(read_json(_require(args.povm, "--povm or --kraus")))
        kraus = KrausMeasurement.from_povm_projective(povm)
    rng = np.random.default_rng(args.seed)
    lo, hi = family.grid.min(axis=0), family.grid.max(axis=0)
    tests = [rng.uniform(lo, hi, size=(povm.n_outcomes, family.param_dim)) for _ in range(args.n_test_estimators)]

    if is_uninformative(family, povm):
        ev = dominate_uninformative(family, povm, loss, tests, tol_eq=tols.eq, tol_dom=tols.dom)
        return {
            "kind": "uninformative",
            "witness": {"sub_grid": list(ev.sub_grid), "dominance": ev.dominance.value, "margin": ev.margin,
                        "constant": ev.constant.tolist(), "constant_reductions_ok": ev.constant_reductions_ok},
            "constructed_measurement": povm_to_json(ev.measurement),
            "estimator": estimator_to_json(ev.estimator),
            "risk_tables": ev.risk_tables,
        }
    if find_refinability(family, kraus, tols.prob, tols.eq) is not None:
        ev = dominate_refineable(family, kraus, loss, tests, tols.prob, tols.eq)
        w = ev.witness
        return {
            "kind": "refineable",
            "witness": {"outcome": w.outcome, "indices": list(w.indices), "post_state_gap": w.post_state_gap,
                        "probabilities": list(w.probabilities),
                        "refined_bayes_risk": ev.refined_bayes_risk,
                        "best_original_bayes_risk": ev.best_original_bayes_risk,
                        "lift_max_deviation": ev.lift_max_deviation},
            "constructed_measurement": {"kraus": [matrix_to_json(k) for k in ev.refined.kraus.kraus],
                                        "labels": [list(lab) for lab in ev.refined.labels]},
            "estimator": estimator_to_json(ev.estimator),
            "risk_tables": ev.risk_tables,
        }
    return {"kind": None, "reason": "measurement is neither uninformative nor refineable on this grid"}


def cmd_oracle(args, tols):
    family = _load_family(args)
    if family.dim != 2:
        raise CliError(EXIT_INVALID, "oracle is qubit-only")
    loss = loss_from_name(args.loss)
    grid = oracle_measurement_grid(2, args.resolution)
    lo, hi = float(family.grid.min()), float(family.grid.max())
    lattice = np.linspace(lo, hi, args.lattice_count)
    prior = _prior(args, family)
    if args.criterion == "bayes":
        res = oracle_best_pair(family, loss, grid, lattice, "bayes", prior=prior)
    else:
        ref = povm_from_json(read_json(_require(args.povm, "--povm")))
        res = oracle_best_pair(family, loss, grid, lattice, "domination", reference=(ref, None), tol_dom=tols.dom)
    out = {
        "criterion": res.criterion,
        "best": {"measurement": povm_to_json(grid[res.best_measurement]), "index": res.best_measurement,
                 "estimator": estimator_to_json(res.best_estimator), "value": res.best_value},
        "n_evaluations": res.n_evaluations,
        "table": res.table[: args.top] if args.top else res.table,
    }
    if args.criterion == "bayes" and family.param_dim == 1:
        try:
            sol = solve_bayes_measurement(family, prior, tols.rank, tols.group)
            out["solver_bayes_risk"] = sol.bayes_risk
            out["quantization_gap"] = res.best_value - sol.bayes_risk
            out["posterior_mean_of_best"] = estimator_to_json(
                posterior_mean_estimator(family, grid[res.best_measurement], prior))
        except OptMeasError:
            pass
    return out


COMMANDS = {
    "risk": cmd_risk,
    "certify": cmd_certify,
    "bayes": cmd_bayes,
    "bounds": cmd_bounds,
    "admissibility": cmd_admissibility,
    "oracle": cmd_oracle,
}


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Run a command and return ``(exit_code, output_text)`` without writing."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, tol_overrides = _split_tolerances(argv)
        args = build_parser().parse_args(argv)
        # ``--out csv`` / ``--out json`` select a format and write to stdout
        if args.out in ("csv", "json") and args.format is None:
            args.format, args.out = args.out, None
        args.format = args.format or "json"
        try:
            tols = DEFAULT.override(**tol_overrides)
        except KeyError as exc:
            raise CliError(EXIT_INVALID, str(exc)) from None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = COMMANDS[args.command](args, tols)
        meta = _metadata(args, tols)
        meta["warnings"] = list(dict.fromkeys(f"{w.category.__name__}: {w.message}" for w in caught))
        if isinstance(result, str):
            # CSV keeps its header on line one; metadata goes to a sidecar file
            text, sidecar = result, dumps({"metadata": meta})
        else:
            result["metadata"] = meta
            text, sidecar = dumps(result), None
    except CliError as exc:
        return exc.code, f"error: {exc}\n"
    except (DimensionMismatch, GridMismatch) as exc:
        return EXIT_DIMENSION, f"error: {exc}\n"
    except SearchSpaceTooLarge as exc:
        return EXIT_CAP, f"error: {exc}\n"
    except (OptMeasError, ValueError, KeyError, FileNotFoundError, OSError) as exc:
        return EXIT_INVALID, f"error: {type(exc).__name__}: {exc}\n"
    if args.out:
        Path(args.out).write_text(text)
        if sidecar is not None:
            Path(args.out + ".meta.json").write_text(sidecar)
        return EXIT_OK, ""
    return EXIT_OK, text


def main(argv: list[str] | None = None) -> int:
    try:
        code, text = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code not in (0, None) else 0
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
