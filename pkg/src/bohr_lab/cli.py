"""Command-line interface: ``bohr-lab {radius,verify,sharpness,constants,slice}``.

Exit codes: 0 pass, 1 inequality violation, 2 parameter/condition error,
3 no root, 4 sharpness probe failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import (
    BohrLabError,
    InvalidMapError,
    NoRootError,
    PreconditionError,
    SharpnessProbeError,
)
from .functionals import PolynomialWeights, check_weight_condition, cs_constant, mp_constant
from .geometry import MapDescriptor, coordinate_vector
from .radius import FAMILIES, RBR, R2, Xi, minimal_root
from .slice_engine import extract_slice
from .verification import (
    DEFAULT_B_GRID,
    PLAN_IDS,
    SHARPNESS_B_GRID,
    VerificationPlan,
    builder_family,
    probe_sharpness,
    verify_below_radius,
)

HEADER = "# bohr-lab v1"
EXIT_OK, EXIT_VIOLATION, EXIT_PARAM, EXIT_NO_ROOT, EXIT_PROBE = 0, 1, 2, 3, 4

log = logging.getLogger("bohr_lab")


# --------------------------------------------------------------------------
# formatting and output


def fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%#.12g" % x
    return str(x)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float("%.12g" % x)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_json_ready(obj), indent=2, sort_keys=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit(text: str, output) -> None:
    if output:
        write_atomic(Path(output), text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# argument parsing


def parse_order(text):
    if str(text).strip().lower() in ("inf", "infinity"):
        return math.inf
    return int(text)


def parse_float_list(text) -> tuple:
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def parse_b_grid(text) -> tuple:
    """``start:stop:step`` (stop included) or a comma-separated list."""
    text = str(text)
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("b-grid step must be positive")
        vals, i = [], 0
        while start + i * step < stop - 1e-12:
            vals.append(round(start + i * step, 12))
            i += 1
        vals.append(stop)
        return tuple(vals)
    return parse_float_list(text)


def parse_int_range(text) -> list:
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--smax", type=int, default=64)
    p.add_argument("--quad-m", dest="quad_m", type=int, default=256)
    p.add_argument("--directions", type=int, default=32)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)


def _theorem_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--m1", type=parse_order, default=1)
    p.add_argument("--m2", type=int, default=1)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--d", type=parse_float_list, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bohr-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="JSON file whose keys mirror the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radius", help="minimal root of a radius equation")
    p.add_argument("--family", default=None, choices=sorted(FAMILIES))
    _theorem_params(p)
    _common(p)

    p = sub.add_parser("verify", help="check an inequality below its radius")
    p.add_argument("--theorem", default=None, type=str.lower, choices=[t.lower() for t in PLAN_IDS])
    _theorem_params(p)
    p.add_argument("--b-grid", dest="b_grid", type=parse_b_grid, default=DEFAULT_B_GRID)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", default="2")
    p.add_argument("--r-count", dest="r_count", type=int, default=100)
    p.add_argument("--r-frac", dest="r_frac", type=float, default=0.999)
    _common(p)

    p = sub.add_parser("sharpness", help="extremal witness above the radius")
    p.add_argument("--theorem", default=None, type=str.lower, choices=["t41", "t12", "t21", "t14"])
    _theorem_params(p)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--b-grid", dest="b_grid", type=parse_b_grid, default=SHARPNESS_B_GRID)
    _common(p)

    p = sub.add_parser("constants", help="table of c_s and M_p")
    p.add_argument("--cs", type=parse_int_range, default=[])
    p.add_argument("--p", type=parse_float_list, default=())
    _common(p)

    p = sub.add_parser("slice", help="dump slice coefficients of a map descriptor")
    p.add_argument("--map", dest="map_json", default=None, help="descriptor JSON or @file")
    p.add_argument("--direction", default=None, help="JSON list of [re, im] pairs (default e_1)")
    p.add_argument("--rho", type=float, default=0.95)
    _common(p)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = json.loads(Path(known.config).read_text())
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**cfg)


REQUIRED = {"radius": ("family", "--family"), "verify": ("theorem", "--theorem"),
            "sharpness": ("theorem", "--theorem"), "slice": ("map_json", "--map")}


def _check_config(args) -> None:
    need = REQUIRED.get(args.command)
    if need and getattr(args, need[0]) is None:
        raise PreconditionError(f"{args.command} needs {need[1]} (flag or config key)")
    if not 1e-14 <= args.tol <= 1e-6:
        raise PreconditionError(f"tol must lie in [1e-14, 1e-6], got {args.tol}")
    if args.smax < 8:
        raise PreconditionError(f"S_max must be at least 8, got {args.smax}")


# --------------------------------------------------------------------------
# commands


def query_from_args(family: str, args):
    if family == "xi":
        return Xi(args.p, args.q, args.m, args.m1, args.m2, args.mu, args.nu)
    cls = FAMILIES[family]
    names = {
        "r2": ("p", "m1"),
        "r3": ("p",),
        "rbr": ("p", "m1", "N"),
        "rn": ("N",),
        "rnprime": ("N",),
        "rpkm": ("p", "k", "m"),
        "psie": ("p", "q", "m", "lam"),
    }[family]
    return cls(*(getattr(args, n) for n in names))


def theorem_params_from_args(theorem: str, args):
    if theorem == "T41":
        return Xi(args.p, args.q, args.m, args.m1, args.m2, args.mu, args.nu)
    if theorem == "T12":
        return R2(args.p, args.m1)
    if theorem == "T14":
        return RBR(args.p, args.m1, args.N)
    if theorem == "T21":
        if not args.d:
            raise PreconditionError("t21 needs weights via --d d1,d2,...")
        return PolynomialWeights(args.d, args.p)
    if theorem == "lemma21":
        return {"N": args.N}
    return None


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())


def cmd_radius(args) -> int:
    query = query_from_args(args.family, args)
    res = minimal_root(query, args.tol)
    if args.format == "json":
        emit(dumps_json(res.to_dict()), args.output)
    else:
        header = ["family", "params", "root", "bracket_lo", "bracket_hi", "residual", "second_sign_change"]
        row = [query.family, _params_text(query.params()), res.root, *res.bracket, res.residual_at_root, res.second_sign_change]
        emit(csv_text(header, [row]), args.output)
    return EXIT_OK


def _canonical_theorem(name: str) -> str:
    return {t.lower(): t for t in PLAN_IDS}[name.lower()]


def cmd_verify(args) -> int:
    theorem = _canonical_theorem(args.theorem)
    params = theorem_params_from_args(theorem, args)
    if theorem == "T21":
        ok, lhs = check_weight_condition(params)
        if not ok:
            raise PreconditionError(
                "weight condition violated: 8*d1*M_p^2 + 6*c_2*d2*M_p^4 + ... = "
                f"{lhs:.12g} exceeds p = {params.p:.12g}"
            )
    n = 1 if theorem == "classical1D" else args.n
    plan = VerificationPlan(
        theorem=theorem,
        params=params,
        maps=tuple(builder_family(n, args.t)),
        b_grid=tuple(args.b_grid),
        n=n,
        t=float(args.t) if args.t not in ("inf", "Inf") else math.inf,
        direction_count=args.directions,
        seed=args.seed,
        r_count=args.r_count,
        r_fraction=args.r_frac,
        S_max=args.smax,
    )
    result = verify_below_radius(plan)
    summary = result.summary()
    bad = result.counterexamples
    if bad:
        summary["witness"] = _row_dict(bad[0])
    prefix = Path(args.output or f"verify-{theorem.lower()}")
    if prefix.suffix in (".csv", ".json"):
        prefix = prefix.with_suffix("")
    write_atomic(prefix.parent / (prefix.name + ".csv"), _verify_csv(result))
    write_atomic(prefix.parent / (prefix.name + ".json"), dumps_json(summary))
    sys.stdout.write(dumps_json(summary))
    if bad:
        sys.stderr.write("counterexample: " + json.dumps(_json_ready(_row_dict(bad[0]))) + "\n")
        return EXIT_VIOLATION
    return EXIT_OK


def _row_dict(row) -> dict:
    return {"map": row.map_label, "direction": row.direction, "check": row.check, **row.report.to_dict()}


def _verify_csv(result) -> str:
    names = []
    for row in result.rows:
        for k in row.report.terms:
            if k not in names:
                names.append(k)
    header = ["map", "direction", "check", "r", "lhs", *names, "tail", "bound", "margin"]
    rows = []
    for row in result.rows:
        rep = row.report
        rows.append(
            [row.map_label, row.direction, row.check, rep.r, rep.lhs]
            + [rep.terms.get(k) for k in names]
            + [rep.tail, rep.bound, rep.margin]
        )
    return csv_text(header, rows)


def cmd_sharpness(args) -> int:
    theorem = _canonical_theorem(args.theorem)
    params = theorem_params_from_args(theorem, args)
    witness = probe_sharpness(theorem, params, args.delta, tuple(args.b_grid), S_max=args.smax)
    record = witness.to_dict()
    if args.format == "json":
        emit(dumps_json(record), args.output)
    else:
        terms = list(record["terms"])
        header = ["theorem", "params", "b", "r", "radius", "lhs", "tail", "margin", *terms]
        row = [theorem, _params_text(record["params"]), witness.b, witness.r, witness.radius,
               witness.lhs, witness.tail, witness.margin, *record["terms"].values()]
        emit(csv_text(header, [row]), args.output)
    return EXIT_OK


def cmd_constants(args) -> int:
    rows = []
    for s in args.cs:
        value, t_star = cs_constant(s)
        rows.append(["c_s", s, value, t_star])
    for p in args.p:
        rows.append(["M_p", p, mp_constant(p), None])
    if args.format == "json":
        emit(dumps_json([dict(zip(("quantity", "index", "value", "maximizer"), r)) for r in rows]), args.output)
    else:
        emit(csv_text(["quantity", "index", "value", "maximizer"], rows), args.output)
    return EXIT_OK


def _load_map(text: str) -> MapDescriptor:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return MapDescriptor.from_json(text)


def cmd_slice(args) -> int:
    fmap = _load_map(args.map_json)
    if args.direction:
        direction = np.array([complex(re, im) for re, im in json.loads(args.direction)])
    else:
        direction = coordinate_vector(fmap.n, 1)
    M = max(args.quad_m, 8 * args.smax)
    coeffs = extract_slice(fmap, direction, S_max=args.smax, rho=args.rho, M=M)
    if args.format == "json":
        emit(dumps_json({"c": list(coeffs.c), "rho": coeffs.rho, "M": coeffs.M}), args.output)
    else:
        emit(csv_text(["s", "c_s"], coeffs.rows()), args.output)
    return EXIT_OK


COMMANDS = {
    "radius": cmd_radius,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "constants": cmd_constants,
    "slice": cmd_slice,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: cannot read config: {exc}\n")
        return EXIT_PARAM
    args = parser.parse_args(argv)
    try:
        _check_config(args)
        return COMMANDS[args.command](args)
    except NoRootError as exc:
        sys.stderr.write(f"error: {exc} (residual range [{exc.residual_min:.6g}, {exc.residual_max:.6g}])\n")
        return EXIT_NO_ROOT
    except SharpnessProbeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PROBE
    except (PreconditionError, InvalidMapError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAM
    except BohrLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
