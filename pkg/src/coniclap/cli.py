"""Command-line entry point: ``coniclap {run,parse,standardize,validate,example4}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .conicsolve import SolveOptions, SolverBackendError
from .cutloop import LoopConfig, LoopError, RelaxationMode, run
from .fixtures import EXAMPLE4_RADIUS, example4, example4_xbar
from .instance_io import CbfError, dumps, load_problem, read_cbf, to_standard_form
from .model import CutCandidate, clean, elementary_split
from .oracle import BoxTooLarge, EnumBox, derive_box, validate_cut
from .separation import NormKind, Normalization, SeparationConfig, separate

EXIT_OK, EXIT_USAGE, EXIT_INSTANCE, EXIT_SOLVER = 0, 1, 2, 3
NORMS = [k.value for k in NormKind]
MODES = {"oa": RelaxationMode.OUTER_APPROX, "conic": RelaxationMode.CONIC}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coniclap", description="Disjunctive cuts for mixed-integer conic programs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="root-node cutting-plane loop on a CBF instance")
    r.add_argument("--instance", required=True, type=Path)
    r.add_argument("--norm", default="standard", choices=NORMS)
    r.add_argument("--rounds", type=int, default=200)
    r.add_argument("--mode", choices=sorted(MODES), default="oa")
    r.add_argument("--zmicp", type=float, default=None, help="best known integer objective (for gap columns)")
    r.add_argument("--output", type=Path, default=None, help="JSON report path (CSV goes next to it)")
    r.add_argument("--csv", type=Path, default=None)
    r.add_argument("--csv-time", action="store_true", help="add wall time to the CSV")
    r.add_argument("--time-limit", type=float, default=None)
    r.add_argument("--no-strengthen", action="store_true")
    r.add_argument("--lifting", action="store_true")
    r.add_argument("--seed", type=int, default=0, help="accepted for reproducibility records; the loop is deterministic")

    for name, text in (("parse", "parse a CBF file and print its raw data"),
                       ("standardize", "print the standard form of a CBF file")):
        q = sub.add_parser(name, help=text)
        q.add_argument("instance", type=Path)

    v = sub.add_parser("validate", help="check a cut by enumerating integer assignments")
    v.add_argument("--instance", required=True, type=Path)
    v.add_argument("--cut", required=True, type=Path, help="JSON with alpha [[index, value], ...] and beta")
    v.add_argument("--bound", action="append", default=[], metavar="J:LO:HI",
                   help="integer bounds; derived from the relaxation when omitted")

    e = sub.add_parser("example4", help="separate the worked disk example")
    e.add_argument("--case", choices=sorted(EXAMPLE4_RADIUS), required=True)
    e.add_argument("--norm", choices=NORMS, default="alpha")
    e.add_argument("--json", action="store_true", help="print the cut as JSON as well")
    return p


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _cmd_run(a) -> int:
    if a.rounds < 0:
        raise UsageError("--rounds must be nonnegative")
    if a.zmicp is not None and not math.isfinite(a.zmicp):
        raise UsageError("--zmicp must be finite")
    cfg = LoopConfig(normalization=a.norm, max_rounds=a.rounds, relaxation_mode=MODES[a.mode],
                     z_micp=a.zmicp, time_limit=a.time_limit, strengthen=not a.no_strengthen,
                     lifting=a.lifting, solve_options=SolveOptions())
    problem = load_problem(a.instance)
    if a.zmicp is not None:
        # z_micp is given in the file's own sense; the loop minimizes
        cfg.z_micp = (a.zmicp - problem.obj_offset) * problem.obj_sign
    report = run(problem, cfg, instance=a.instance.name)
    data = report.to_json()
    data["seed"] = a.seed
    text = dumps(data)
    csv_text = report.to_csv(with_time=a.csv_time)
    if a.output is not None:
        a.output.write_text(text + "\n")
        csv_path = a.csv or a.output.with_suffix(".csv")
        csv_path.write_text(csv_text)
    else:
        if a.csv is not None:
            a.csv.write_text(csv_text)
        print(text)
    last = report.rounds[-1]
    gap = "n/a" if last.gap_pct is None else f"{last.gap_pct:.2f}%"
    print(f"status={report.status} rounds={len(report.rounds) - 1} bound={report.z_star:.8g} gap={gap}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_parse(a) -> int:
    print(dumps(read_cbf(a.instance).to_json()))
    return EXIT_OK


def _cmd_standardize(a) -> int:
    print(dumps(to_standard_form(read_cbf(a.instance)).to_json()))
    return EXIT_OK


def _parse_bounds(specs: list[str]) -> dict[int, tuple[int, int]]:
    out = {}
    for s in specs:
        try:
            j, lo, hi = (int(t) for t in s.split(":"))
        except ValueError:
            raise UsageError(f"bad --bound {s!r}; expected J:LO:HI") from None
        out[j] = (lo, hi)
    return out


def _cmd_validate(a) -> int:
    bounds = _parse_bounds(a.bound)
    problem = load_problem(a.instance)
    try:
        data = json.loads(a.cut.read_text())
        cut = CutCandidate.from_json(data, problem.n)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read cut: {exc}") from None
    box = EnumBox(bounds) if bounds else derive_box(problem)
    res = validate_cut(problem, cut, box)
    out = {"verdict": res.verdict.value, "solves": res.solves,
           "worst_slack": None if math.isinf(res.worst_slack) else res.worst_slack}
    if res.assignment is not None:
        out["assignment"] = {str(k): v for k, v in res.assignment.items()}
    if res.witness is not None:
        out["witness"] = [float(t) for t in res.witness]
    print(dumps(out))
    return EXIT_OK


def _fmt_cut(alpha: np.ndarray, beta: float, names) -> str:
    terms = [f"{alpha[j]:+.6g}*{names[j]}" for j in np.flatnonzero(np.abs(alpha) > 1e-9)]
    return f"{' '.join(terms) or '0'} >= {beta:.6g}"


def _cmd_example4(a) -> int:
    R = EXAMPLE4_RADIUS[a.case]
    P = example4(a.case)
    xbar = example4_xbar(a.case)
    D = elementary_split(P, 1, xbar[1])
    t0 = time.perf_counter()
    out = separate(P, D, xbar, Normalization.parse(a.norm), SeparationConfig())
    secs = time.perf_counter() - t0
    names = [f"x{j}" for j in range(P.n)]
    iters = out.solve.iterations if out.solve is not None else 0
    print("case  R     norm      status      cgcp_obj     class           iters  seconds")
    cls = out.classification.value
    print(f"{a.case:<5s} {R:<5.2f} {a.norm:<9s} {out.status:<11s} {out.cgcp_obj:<12.6g} {cls:<15s} "
          f"{iters:<6d} {secs:.3f}")
    if out.cut is None:
        print("no violated cut")
        return EXIT_OK
    c = out.cut
    print("cut:   " + _fmt_cut(clean(c.alpha, 1e-7), float(clean(c.beta, 1e-8)), names))
    # restricted to the plane x0 = R the cut reads a1 x1 + a2 x2 >= beta - a0 R
    a0, a1, a2 = clean(c.alpha, 1e-7)
    rhs = float(clean(c.beta - a0 * R, 1e-7))
    scale = max(abs(a1), abs(a2)) or 1.0
    print(f"plane: {a1 / scale:+.6g}*x1 {a2 / scale:+.6g}*x2 >= {rhs / scale:.6g}")
    if a.json:
        print(dumps(c.to_json()))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "parse": _cmd_parse, "standardize": _cmd_standardize,
            "validate": _cmd_validate, "example4": _cmd_example4}


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except SolverBackendError as exc:
        _err(f"solver backend: {exc}")
        return EXIT_SOLVER
    except (CbfError, LoopError, BoxTooLarge, OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INSTANCE


if __name__ == "__main__":
    sys.exit(main())
