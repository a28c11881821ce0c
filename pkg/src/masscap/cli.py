"""Command-line front end: ``masscap report|verify|sweep|horn|smallsphere``.

Exit codes: 0 success, 1 usage or input error, 2 inequality violation or
failed suite, 3 profile not certified ``R >= 0`` under ``--require-nonneg-R``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import suites
from .capacity import capacity_exterior, reference_coord
from .errors import MasscapError
from .families import load_profile, profile_from_dict
from .geometry import ConformalProfile, SurfaceSlice, adm_mass
from .harmonic import b_curve, exterior_harmonic
from .inequalities import VIOL_TOL, certify, mass_lower_bound_two_ended, neg_schwarzschild_willmore, slice_reports
from .singularity import HornSpec, horn_classify, load_horn
from .smallsphere import mass_capacity_expansion_check, willmore_expansion_fit

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_UNCERTIFIED = 0, 1, 2, 3

FAMILY_CHOICES = (
    "flat", "schwarzschild", "neg-schwarzschild", "tanh", "horn",
    "gaussian", "plummer", "isotropic-schwarzschild", "two-ended-plummer",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------------------
# formatting


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj) -> str:
    """JSON with every float written at 17 significant digits."""

    def enc(o) -> str:
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (float, np.floating)):
            o = float(o)
            if math.isnan(o):
                return "NaN"
            if math.isinf(o):
                return "Infinity" if o > 0 else "-Infinity"
            return fmt(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_table(header, rows) -> str:
    cells = [list(header)] + [[_cell(v) if not isinstance(v, float) else f"{v:.10g}" for v in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(len(header))).rstrip() for c in cells) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------------------
# profiles


def _family_spec(args) -> dict:
    fam = args.family
    m = args.mass if args.mass is not None else (0.5 if fam == "horn" else 1.0)
    if fam == "flat":
        return {"family": "flat"}
    if fam == "schwarzschild":
        return {"family": "schwarzschild", "params": {"mass": m}}
    if fam == "neg-schwarzschild":
        return {"family": "neg-schwarzschild", "params": {"mass": abs(m)}}
    if fam == "tanh":
        return {"family": "mass-profile", "params": {"kind": "tanh", "mass": m}}
    if fam == "horn":
        return {"family": "horn", "params": {"b": args.exponent, "mass": m}}
    if fam in ("gaussian", "plummer"):
        return {"family": "conformal", "params": {"kind": fam, "eps": args.eps}}
    if fam == "isotropic-schwarzschild":
        return {"family": "conformal", "params": {"kind": fam, "mass": m}}
    return {"family": "conformal", "params": {"kind": fam, "mass": m, "eps": args.eps}}


def _load(args):
    if args.file and args.family:
        raise UsageError("give either --file or --family, not both")
    try:
        if args.file:
            return load_profile(args.file)
        if args.family:
            return profile_from_dict(_family_spec(args))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid profile: {exc}") from exc
    raise UsageError("a profile is required (--family or --file)")


def _profile_info(profile) -> dict:
    meta = profile.meta or {}
    info = {k: meta[k] for k in ("family", "params", "domain") if k in meta}
    info.setdefault("family", profile.label)
    return info


def _check_tol(args) -> float:
    tol = VIOL_TOL if args.tol is None else args.tol
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


# --------------------------------------------------------------------------------------
# commands


REPORT_HEADER = ("slice", "name", "lhs", "rhs", "margin", "normalized_margin", "equality", "hypothesis_ok")


def _report_dict(rep, slice_coord) -> dict:
    d = {"name": rep.name, "slice": slice_coord, "lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin,
         "normalized_margin": rep.normalized_margin, "equality": rep.equality, "hypothesis_ok": rep.hypothesis_ok}
    d.update({k: v for k, v in rep.to_dict().items() if k in ("sense", "rigidity", "notes")})
    return d


def cmd_report(args) -> int:
    tol = _check_tol(args)
    profile = _load(args)
    coords = args.slice if args.slice else [reference_coord(profile)]
    try:
        mass = adm_mass(profile).value
        slices, reports = [], []
        for x in coords:
            sl = SurfaceSlice(profile, x)
            slices.append({"coord": x, "area_radius": sl.area_radius, "mean_curvature": sl.mean_curvature,
                           "willmore": sl.willmore, "hawking_mass": sl.hawking_mass,
                           "capacity": capacity_exterior(profile, x).value})
            reports.extend((x, rep) for rep in slice_reports(profile, x))
            if mass < 0 and (profile.meta or {}).get("family") == "neg-schwarzschild":
                reports.append((x, neg_schwarzschild_willmore(profile, x)))
        if isinstance(profile, ConformalProfile) and profile.complete and not profile.smooth_center:
            reports.append((None, mass_lower_bound_two_ended(profile)))
    except (MasscapError, ValueError) as exc:
        raise UsageError(f"cannot evaluate profile: {exc}") from exc
    hyp = certify(profile)

    if args.format == "json":
        doc = {"profile": _profile_info(profile), "mass": mass, "hypotheses": hyp, "slices": slices,
               "reports": [_report_dict(r, x) for x, r in reports]}
        _emit(to_json(doc), args.out)
    else:
        rows = [(("" if x is None else x), r.name, r.lhs, r.rhs, r.margin, r.normalized_margin, r.equality,
                 r.hypothesis_ok) for x, r in reports]
        _emit((to_csv if args.format == "csv" else to_table)(REPORT_HEADER, rows), args.out)

    if args.require_nonneg_R and not hyp["nonneg_scalar_curvature"]:
        return EXIT_UNCERTIFIED
    violated = any(r.hypothesis_ok and r.normalized_margin < -tol for _, r in reports)
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_verify(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    results = suites.run_suite(args.suite, count=args.count, seed=args.seed)
    if args.format == "json":
        doc = {"suite": args.suite, "passed": all(r.passed for r in results),
               "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail, "warnings": r.warnings}
                          for r in results]}
        _emit(to_json(doc), args.out)
    else:
        # timings are left out so that repeated runs give identical output
        _emit("".join(r.line(timing=False) + "\n" for r in results), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


SWEEP_HEADER = ("profile_id", "slice", "inequality", "lhs", "rhs", "margin", "normalized_margin", "hypothesis_ok")
B_LEVELS = np.linspace(0.02, 0.98, 49)


def cmd_sweep(args) -> int:
    tol = _check_tol(args)
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    rows, curves, profiles = [], [], {}
    violated = False
    for pid, prof, x, rep in suites.sweep_rows(args.count, args.seed):
        profiles[pid] = prof
        rows.append((pid, x, rep.name, rep.lhs, rep.rhs, rep.margin, rep.normalized_margin, rep.hypothesis_ok))
        curves.append((pid, rep.name, SurfaceSlice(prof, x).area_radius, rep.normalized_margin))
        violated |= rep.hypothesis_ok and rep.normalized_margin < -tol
    _emit(to_csv(SWEEP_HEADER, rows), args.out)
    if args.out:
        stem = Path(args.out).with_suffix("")
        Path(f"{stem}_margin_curves.csv").write_text(
            to_csv(("profile_id", "inequality", "area_radius", "normalized_margin"), curves), encoding="utf-8")
        b_rows = []
        for pid, prof in profiles.items():
            curve = b_curve(exterior_harmonic(prof, float(suites.sweep_slices(prof)[0])), B_LEVELS)
            b_rows.extend((pid, t, b) for t, b in zip(curve.levels, curve.values))
        Path(f"{stem}_B_curves.csv").write_text(to_csv(("profile_id", "t", "B"), b_rows), encoding="utf-8")
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_horn(args) -> int:
    try:
        if args.file:
            spec = load_horn(args.file)
        elif args.family:
            profile = _load(args)
            spec = HornSpec.from_profile(profile, reference_coord(profile))
        else:
            spec = HornSpec.power(args.exponent)
        v = horn_classify(spec)
    except UsageError:
        raise
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, MasscapError) as exc:
        raise UsageError(f"invalid horn: {exc}") from exc
    doc = {"verdict": v.verdict, "limit": v.limit, "rate": v.rate, "analytic": v.analytic, "agrees": v.agrees,
           "gradient_scaling_ok": v.gradient_scaling_ok, "radii": v.radii, "Q": v.values}
    if args.format == "json":
        _emit(to_json(doc), args.out)
    else:
        rows = list(zip(v.radii, v.values))
        head = f"# verdict={v.verdict} limit={v.limit} rate={fmt(v.rate)}\n"
        _emit(head + (to_csv if args.format == "csv" else to_table)(("r", "Q"), rows), args.out)
    return EXIT_OK


def cmd_smallsphere(args) -> int:
    profile = _load(args)
    if not (args.rmin > 0 and args.rmax > args.rmin):
        raise UsageError("need 0 < --rmin < --rmax")
    grid = np.geomspace(args.rmin, args.rmax, 12)
    try:
        fit = willmore_expansion_fit(profile, grid)
        mc = mass_capacity_expansion_check(profile, grid)
    except (MasscapError, ValueError) as exc:
        raise UsageError(f"small-sphere expansion unavailable: {exc}") from exc
    doc = {
        "profile": _profile_info(profile),
        "scalar_curvature_p": fit.scalar_curvature_p,
        "laplacian_scalar_curvature_p": fit.laplacian_scalar_curvature_p,
        "coefficients": fit.coefficients, "predicted": fit.predicted,
        "relative_errors": fit.relative_errors(), "fit_residual": fit.residual,
        "c4_conditional": fit.c4_conditional, "c4_warning": fit.warning,
        "r2_coefficient": mc.r2_coefficient, "predicted_r2": mc.predicted_r2,
        "r2_relative_error": mc.r2_relative_error, "hypothesis_ok": mc.hypothesis_ok,
        "inequality_ok": mc.inequality_ok, "mass": mc.mass, "mass_limit": mc.mass_limit,
    }
    if args.format == "json":
        _emit(to_json(doc), args.out)
    else:
        rows = [(k, v) for k, v in doc.items() if not isinstance(v, (dict, tuple))]
        rows += [(f"c{2 * i}", c) for i, c in enumerate(fit.coefficients)]
        _emit((to_csv if args.format == "csv" else to_table)(("key", "value"), rows), args.out)
    if args.require_nonneg_R and not mc.hypothesis_ok:
        return EXIT_UNCERTIFIED
    return EXIT_VIOLATION if mc.inequality_ok is False else EXIT_OK


# --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILY_CHOICES)
    common.add_argument("--mass", type=float, help="ADM mass parameter (default 1, or 0.5 for horn)")
    common.add_argument("--exponent", type=float, default=0.8, help="horn exponent b")
    common.add_argument("--eps", type=float, default=0.1, help="amplitude of conformal bumps")
    common.add_argument("--file", help="profile JSON (horn JSON for the horn command)")
    common.add_argument("--format", choices=("json", "csv", "table"), help="default: json (table for verify)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tol", type=float, help="violation tolerance on normalized margins")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--count", type=int, default=100)
    common.add_argument("--require-nonneg-R", dest="require_nonneg_R", action="store_true")

    parser = _Parser(prog="masscap", description="Mass, capacity and Willmore inequalities for symmetric metrics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("report", parents=[common], help="inequality margins on slices of one profile")
    p.add_argument("--slice", type=float, nargs="+")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=tuple(suites.SUITES) + ("all",), default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="margins over seeded random mass profiles")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("horn", parents=[common], help="classify a horn-like end")
    p.set_defaults(func=cmd_horn)

    p = sub.add_parser("smallsphere", parents=[common], help="small-sphere expansion about a smooth center")
    p.add_argument("--rmin", type=float, default=0.01)
    p.add_argument("--rmax", type=float, default=0.1)
    p.set_defaults(func=cmd_smallsphere)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "table" if args.command == "verify" else "json"
    try:
        return args.func(args)
    except (UsageError, OSError) as exc:
        print(f"masscap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
