"""Command-line surface.

Subcommands: build, evaluate, sweep, boundary, simulate.  Reports are JSON
(deterministic key order) or CSV with a fixed header and floats at 17
significant digits.  Exit codes: 0 success, 2 validation/feasibility
failure, 3 bad input, 4 I/O failure, 5 bad bisection bracket.

A relative --out path is resolved against $STEERKIT_OUT_DIR when set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .criteria import (
    MU_MAX,
    Criterion,
    default_sets_for,
    detect,
    threshold_mum,
)
from .errors import BracketError, SteerkitError, StateFormatError, ValidationError
from .measurements import (
    build_gsic,
    build_mums,
    gsic_rank1_t,
    max_feasible_t_gsic,
    max_feasible_t_mum,
    mum_projective_t,
    validate_gsic,
    validate_mums,
)
from .shotsim import ShotConfig, estimate_j, verdict_with_confidence
from .states import FAMILY_PARAMS, load_density, make_family_state

_CRITERION_TOKENS = {
    "thm1-mum": Criterion.THM1_MUM,
    "thm2-mum": Criterion.THM2_MUM,
    "thm3-gsic": Criterion.THM3_GSIC,
    "thm4-gsic": Criterion.THM4_GSIC,
    "cor1-h": Criterion.COR1_H,
}


def _tool_block() -> dict:
    return {"name": "steerkit", "version": __version__}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get("STEERKIT_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, out: str | None) -> None:
    out = _resolve_out(out)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _parse_params(text: str | None) -> dict[str, float]:
    params: dict[str, float] = {}
    if not text:
        return params
    for item in text.split(","):
        if "=" not in item:
            raise StateFormatError(f"bad parameter {item!r}; expected name=value")
        key, val = item.split("=", 1)
        try:
            params[key.strip()] = float(val)
        except ValueError as exc:
            raise StateFormatError(f"bad value for {key.strip()!r}: {val!r}") from exc
    return params


def _load_state(args):
    if getattr(args, "state", None):
        rho = load_density(args.state)
        meta = {"file": args.state}
    elif getattr(args, "family", None):
        params = _parse_params(args.params)
        rho = make_family_state(args.family, params)
        meta = {"family": args.family, "params": params}
    else:
        raise StateFormatError("provide either --state FILE or --family NAME [--params ...]")
    return rho, meta


def _auto_criterion(rho, token: str, mum_only: bool = False) -> Criterion:
    if token != "auto":
        return _CRITERION_TOKENS[token]
    if (rho.dim_a, rho.dim_b) == (2, 2) and not mum_only:
        return Criterion.COR1_H
    if rho.dim_b == 2:
        return Criterion.THM1_MUM
    if rho.dim_a == 2:
        return Criterion.THM2_MUM
    raise StateFormatError(f"no criterion applies to dims {rho.dim_a}x{rho.dim_b}: one side must be a qubit")


def _measurement_block(criterion: Criterion, alice_set, bob_set, conjugated: bool) -> dict | None:
    if criterion == Criterion.COR1_H:
        return {"kind": "pauli-correlation", "d": 2}
    if criterion in (Criterion.THM1_MUM, Criterion.THM3_GSIC):
        qudit, qubit = alice_set, bob_set
    else:
        qudit, qubit = bob_set, alice_set
    block = {"kind": "mum", "d": qudit.d, "t": qudit.t}
    qblock = {"kind": "mum", "d": 2, "t": qubit.t, "conjugated": conjugated}
    if hasattr(qudit, "kappa"):
        block["kappa"] = qudit.kappa
        qblock["kappa"] = qubit.kappa
    else:
        block["kind"] = qblock["kind"] = "gsic"
        block["a"] = qudit.a
        qblock["a"] = qubit.a
    block["qubit_side"] = qblock
    return block


# ---------------------------------------------------------------------------
# build


def cmd_build(args) -> int:
    d = args.d
    if args.t is not None:
        t = args.t
    elif args.kind == "mum":
        targets = {
            "projective": mum_projective_t,
            "rank1": mum_projective_t,
            "max-t": max_feasible_t_mum,
        }
        t = targets[args.target or ("projective" if d == 2 else "max-t")](d)
    else:
        targets = {
            "projective": gsic_rank1_t,
            "rank1": gsic_rank1_t,
            "max-t": max_feasible_t_gsic,
        }
        t = targets[args.target or ("rank1" if d == 2 else "max-t")](d)
    if args.kind == "mum":
        s = build_mums(d, t)
        report = validate_mums(s, args.tol)
    else:
        s = build_gsic(d, t)
        report = validate_gsic(s, args.tol)
    payload = s.to_dict()
    payload["validation"] = report.to_dict()
    payload["tool"] = _tool_block()
    _dump_json(payload, args.out)
    return 0 if report.passed else 2


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(args) -> int:
    rho, state_meta = _load_state(args)
    criterion = _auto_criterion(rho, args.criterion)
    alice_set, bob_set = default_sets_for(
        criterion, (rho.dim_a, rho.dim_b), args.t_qudit, args.t_qubit, not args.no_conjugate
    )
    verdict = detect(rho, criterion, args.mu, alice_set=alice_set, bob_set=bob_set)
    payload = verdict.to_dict()
    payload["measurement"] = _measurement_block(criterion, alice_set, bob_set, not args.no_conjugate)
    payload["state"] = state_meta
    payload["tool"] = _tool_block()
    _dump_json(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# sweep


def _parse_axis(text: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = text.split("=", 1)
        lo, hi, steps = rng.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise StateFormatError(f"bad axis {text!r}; expected name=min:max:steps") from exc
    if steps < 2:
        raise StateFormatError(f"axis {name!r} needs steps >= 2")
    return name.strip(), np.linspace(lo, hi, steps)


def _sweep_worker(task) -> tuple:
    family, base_params, axis_names, values, token, mu, t_qudit, t_qubit, conjugate = task
    params = dict(base_params)
    params.update(zip(axis_names, values))
    rho = make_family_state(family, params)
    criterion = _auto_criterion(rho, token)
    v = detect(rho, criterion, mu, t_qudit=t_qudit, t_qubit=t_qubit, conjugate_qubit=conjugate)
    return (*values, v.j_value, v.threshold, v.margin, int(v.detected))


def cmd_sweep(args) -> int:
    if not args.family:
        raise StateFormatError("sweep requires --family")
    base_params = _parse_params(args.params)
    axes = [_parse_axis(a) for a in args.axis]
    if not 1 <= len(axes) <= 2:
        raise StateFormatError("sweep takes one or two --axis arguments")
    names = [n for n, _ in axes]
    grids = [g for _, g in axes]
    points = [(v1,) for v1 in grids[0]] if len(axes) == 1 else [
        (v1, v2) for v1 in grids[0] for v2 in grids[1]
    ]
    tasks = [
        (args.family, base_params, names, pt, args.criterion, args.mu,
         args.t_qudit, args.t_qubit, not args.no_conjugate)
        for pt in points
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_worker, tasks, chunksize=64))
    else:
        rows = [_sweep_worker(t) for t in tasks]
    header = ",".join([*names, "j", "threshold", "margin", "detected"])
    lines = [header]
    for row in rows:
        *floats, flag = row
        lines.append(",".join([_fmt(x) for x in floats] + [str(flag)]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# boundary


def _reference_boundary(family: str, param: str, fixed: dict[str, float], mu: float) -> float | None:
    """Closed-form location of H = 1/mu inside the family, when one exists."""
    if family == "werner-derivative":
        if param == "p":
            theta = fixed.get("theta", 0.0)
            denom = mu * (1.0 + 2.0 * math.sin(2.0 * theta))
            p = 1.0 / denom if denom > 0 else math.inf
            return p if 0.0 <= p <= 1.0 else None
        if param == "theta":
            p = fixed.get("p", 0.0)
            if p <= 0:
                return None
            x = (1.0 / (p * mu) - 1.0) / 2.0
            if not -1.0 <= x <= 1.0:
                return None
            theta = math.asin(x) / 2.0
            return theta if 0.0 <= theta <= math.pi / 4 else None
    if family == "max-steerable-mixed" and param == "tau":
        tau = (1.0 - 1.0 / mu) / 2.0
        return tau if -1.0 <= tau <= 1.0 else None
    if family == "munro-mems" and param == "C":
        c = (1.0 / mu + 1.0) / 4.0
        return c if 2.0 / 3.0 <= c <= 1.0 else None
    return None


def cmd_boundary(args) -> int:
    if not args.family:
        raise StateFormatError("boundary requires --family")
    fixed = _parse_params(args.fix)
    if args.param in fixed:
        raise StateFormatError(f"--param {args.param!r} also appears in --fix")
    lo, hi = args.bracket
    probe = make_family_state(args.family, {**fixed, args.param: lo})
    criterion = _auto_criterion(probe, args.criterion)

    def detected_at(x: float) -> bool:
        params = dict(fixed)
        params[args.param] = x
        return detect(make_family_state(args.family, params), criterion, args.mu).detected

    lo_flag = detected_at(lo)
    hi_flag = detected_at(hi)
    if lo_flag == hi_flag:
        raise BracketError(
            f"bracket [{lo}, {hi}] does not straddle a boundary "
            f"(detected={lo_flag} at both ends)"
        )
    iterations = 0
    while hi - lo > args.tol:
        mid = 0.5 * (lo + hi)
        if detected_at(mid) == lo_flag:
            lo = mid
        else:
            hi = mid
        iterations += 1
    boundary = 0.5 * (lo + hi)
    payload = {
        "family": args.family,
        "param": args.param,
        "fixed": fixed,
        "bracket": list(args.bracket),
        "tol": args.tol,
        "criterion": criterion.value,
        "mu": args.mu,
        "boundary": boundary,
        "iterations": iterations,
        "reference": _reference_boundary(args.family, args.param, fixed, args.mu),
        "tool": _tool_block(),
    }
    _dump_json(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    rho, state_meta = _load_state(args)
    criterion = _auto_criterion(rho, args.criterion, mum_only=True)
    if criterion not in (Criterion.THM1_MUM, Criterion.THM2_MUM):
        raise StateFormatError("simulate supports the MUM criteria (thm1-mum, thm2-mum)")
    alice_set, bob_set = default_sets_for(
        criterion, (rho.dim_a, rho.dim_b), args.t_qudit, args.t_qubit, not args.no_conjugate
    )
    cfg = ShotConfig(shots_per_setting=args.shots, seed=args.seed, sample_padded=args.sample_padded)
    direction = "BobToAlice" if criterion == Criterion.THM1_MUM else "AliceToBob"
    est = estimate_j(rho, alice_set, bob_set, cfg, direction)
    if criterion == Criterion.THM1_MUM:
        threshold = threshold_mum(rho.dim_a, alice_set.kappa, bob_set.kappa, args.mu)
    else:
        threshold = threshold_mum(rho.dim_b, bob_set.kappa, alice_set.kappa, args.mu)
    verdict = verdict_with_confidence(est, threshold, args.z)
    exact = detect(rho, criterion, args.mu, alice_set=alice_set, bob_set=bob_set)
    payload = {
        "criterion": criterion.value,
        "direction": direction,
        "mu": args.mu,
        "threshold": threshold,
        "z": args.z,
        "verdict": verdict.value,
        "estimate": est.to_dict(),
        "j_exact": exact.j_value,
        "measurement": _measurement_block(criterion, alice_set, bob_set, not args.no_conjugate),
        "state": state_meta,
        "tool": _tool_block(),
    }
    _dump_json(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", help="density-matrix JSON file")
    p.add_argument("--family", choices=sorted(FAMILY_PARAMS), help="named state family")
    p.add_argument("--params", help="family parameters, e.g. p=0.5,theta=0.6")


def _add_measure_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=float, default=MU_MAX, help="noise weight in (0, 1/sqrt(3)]")
    p.add_argument("--t-qudit", type=float, default=None, help="override qudit-side t")
    p.add_argument("--t-qubit", type=float, default=None, help="override qubit-side t")
    p.add_argument("--no-conjugate", action="store_true", help="pair the raw qubit set instead of its conjugate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steerkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"steerkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct and validate a measurement set")
    p.add_argument("kind", choices=["mum", "gsic"])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--target", choices=["projective", "rank1", "max-t"], default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("evaluate", help="evaluate one criterion on a state")
    _add_state_args(p)
    p.add_argument("--criterion", choices=["auto", *sorted(_CRITERION_TOKENS)], default="auto")
    _add_measure_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="evaluate a criterion over a parameter grid (CSV)")
    p.add_argument("--family", choices=sorted(FAMILY_PARAMS))
    p.add_argument("--params", help="fixed family parameters")
    p.add_argument("--axis", action="append", default=[], help="name=min:max:steps (1 or 2 axes)")
    p.add_argument("--criterion", choices=["auto", *sorted(_CRITERION_TOKENS)], default="auto")
    _add_measure_args(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="bisect a detection boundary along one parameter")
    p.add_argument("--family", choices=sorted(FAMILY_PARAMS))
    p.add_argument("--param", required=True)
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--fix", help="fixed family parameters, e.g. theta=0.785")
    p.add_argument("--criterion", choices=["auto", *sorted(_CRITERION_TOKENS)], default="auto")
    p.add_argument("--mu", type=float, default=MU_MAX)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("simulate", help="finite-shot estimate of J with a confidence verdict")
    _add_state_args(p)
    p.add_argument("--criterion", choices=["auto", "thm1-mum", "thm2-mum"], default="auto")
    _add_measure_args(p)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--z", type=float, default=5.0)
    p.add_argument("--sample-padded", action="store_true", help="spend shots on the constant settings too")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (StateFormatError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SteerkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
