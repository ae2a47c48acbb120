"""Command-line front end; all input and output is machine-readable.

Commands

  eigs       zeros of D in a box                -> zero-set JSON
  density    real-axis-wedge density report     -> density JSON / CSV
  indicator  indicator table over a theta grid  -> indicator JSON / CSV
  invert-b   recover B from a spectrum file     -> JSON
  compare    compare two spectrum files         -> verdict JSON
  sl-eigs    transformed-problem eigenvalues    -> JSON / CSV
  validate   profile validation report          -> JSON

Exit codes: 0 success, 2 validation/usage error, 3 numerical failure (with a
diagnostic JSON object on stderr).  Artifacts embed the profile content hash
and the tolerance set; identical inputs yield byte-identical files for any
ITE_THREADS setting.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from ._parallel import parallel_map
from .cartwright import Wedge, indicator_estimate, wedge_density
from .errors import (DegenerateProfile, DomainError, InsufficientData,
                     InvalidProfile, IteigError, NoConvergence, ParseError,
                     QuadratureFailure, RegionTooSmall, StepUnderflow,
                     Unresolved, BoundaryZero)
from .inverse import Spectrum, compare_spectra, recover_B, sl_eigenvalues
from .profiles import (RefractionProfile, compute_liouville, potential_callable,
                       potential_norms, profile_from_dict, validate)
from .zeros import (BoxRegion, FindOptions, ZeroSet, find_zeros,
                    zero_set_from_real_axis)

_USAGE_ERRORS = (InvalidProfile, ParseError, DomainError, RegionTooSmall)
_NUMERICAL_ERRORS = (StepUnderflow, NoConvergence, Unresolved, BoundaryZero,
                     QuadratureFailure, DegenerateProfile, InsufficientData)


@dataclass
class RunConfig:
    command: str
    profile: RefractionProfile | None = None
    out: str | None = None
    fmt: str = "json"
    params: dict = field(default_factory=dict)


def canonical_json(obj) -> str:
    """Sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _parse_profile(spec: str) -> RefractionProfile:
    spec = spec.strip()
    if spec.startswith("{"):
        try:
            data = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"inline profile JSON: {exc.msg}") from exc
    else:
        data = load_json(spec)
    return profile_from_dict(data)


def _parse_floats(text: str, n: int, what: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != n:
        raise ParseError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def _provenance(profile: RefractionProfile | None, tolerances: dict) -> dict:
    out = {"tool": "iteig", "version": __version__, "tolerances": tolerances}
    if profile is not None:
        out["profile"] = profile.to_dict()
        out["profile_hash"] = profile.content_hash()
    return out


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_to_csv(header: list[str], rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _indicator_ray(work):
    profile, theta, rs = work
    return indicator_estimate(profile, theta, rs)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_eigs(args) -> int:
    profile = _parse_profile(args.profile)
    validate(profile)
    re0, re1, im0, im1 = _parse_floats(args.box, 4, "--box")
    opt = FindOptions(min_box=args.min_box, newton_tol=args.newton_tol)
    zs = find_zeros(profile, BoxRegion(re0, re1, im0, im1), opt)
    artifact = zs.to_dict()
    artifact["provenance"] = _provenance(profile, {
        "min_box": opt.min_box, "newton_tol": opt.newton_tol,
        "phase_rtol": opt.phase_rtol, "refine_rtol": opt.refine_rtol})
    _emit(canonical_json(artifact), args.out)
    if args.spectrum_out:
        wedge = Wedge.sigma1(args.wedge_eps)
        spec = Spectrum.from_zero_set(zs, wedge, r_max=max(abs(re0), abs(re1)))
        Path(args.spectrum_out).write_text(canonical_json(spec.to_dict()))
    return 0


def _cmd_density(args) -> int:
    profile = _parse_profile(args.profile)
    validate(profile)
    lo, hi = _parse_floats(args.window, 2, "--window")
    lmap = compute_liouville(profile)
    wedge = Wedge.sigma1(args.wedge_eps)
    if args.axis_only:
        # Cheap mode: real zeros only.  Complex wedge zeros are ignored, so
        # the measured density can sit well below the full-wedge law; the
        # report carries the gap.
        zs = zero_set_from_real_axis(profile, args.k_max, k_min=args.k_min,
                                     strip_check=not args.no_strip_check)
        est = wedge_density(zs, wedge, (lo, hi))
    else:
        height = max(3.0, args.k_max * math.sin(args.wedge_eps) * 1.001)
        region = BoxRegion(args.k_min, args.k_max, -height, height)
        zs = find_zeros(profile, region)
        est = wedge_density(zs, wedge, (lo, hi), r_min=args.k_min * 1.01)
    predicted = (1.0 + lmap.B) / math.pi
    artifact = {
        "wedge": wedge.to_dict(),
        "delta_hat": est.delta_hat,
        "stderr": est.stderr,
        "residual": est.residual,
        "fit_window": list(est.fit_window),
        "predicted_delta": predicted,
        "delta_gap": est.delta_hat - predicted,
        "B_quadrature": lmap.B,
        "counts": [[r, n] for r, n in est.counts],
        "axis_specialization": bool(args.axis_only),
        "provenance": _provenance(profile, {
            "k_max": args.k_max, "k_min": args.k_min,
            "strip_check": not args.no_strip_check}),
    }
    if args.format == "csv":
        _emit(_rows_to_csv(["r", "N"], [(r, int(n)) for r, n in est.counts]), args.out)
    else:
        _emit(canonical_json(artifact), args.out)
    return 0


def _cmd_indicator(args) -> int:
    profile = _parse_profile(args.profile)
    validate(profile)
    thetas = [float(t) for t in args.thetas.split(",") if t]
    lmap = compute_liouville(profile)
    rs = [max(2.0, 0.2 * args.r_max) + i * (args.r_max - max(2.0, 0.2 * args.r_max))
          / (args.n_samples - 1) for i in range(args.n_samples)]
    # rays are independent; ITE_THREADS > 1 fans them out, order preserved
    work = [(profile, th, rs) for th in thetas + [math.pi / 2.0, -math.pi / 2.0]]
    ests = parallel_map(_indicator_ray, work)
    table = []
    for theta, est in zip(thetas, ests[:-2]):
        table.append({"theta": theta, "h_hat": est.h_hat,
                      "predicted": (1.0 + lmap.B) * abs(math.sin(theta)),
                      "samples": [[r, v] for r, v in est.samples]})
    up, dn = ests[-2], ests[-1]
    artifact = {
        "table": table,
        "width": up.h_hat + dn.h_hat,
        "predicted_width": 2.0 * (1.0 + lmap.B),
        "B_quadrature": lmap.B,
        "provenance": _provenance(profile, {"r_max": args.r_max,
                                            "n_samples": args.n_samples}),
    }
    if args.format == "csv":
        rows = [(t["theta"], t["h_hat"], t["predicted"]) for t in table]
        _emit(_rows_to_csv(["theta", "h_hat", "predicted"], rows), args.out)
    else:
        _emit(canonical_json(artifact), args.out)
    return 0


def _cmd_invert_b(args) -> int:
    spec = Spectrum.from_dict(load_json(args.spectrum))
    lo, hi = _parse_floats(args.window, 2, "--window")
    b_hat, diag = recover_B(spec, (lo, hi))
    artifact = {"B_hat": b_hat, "diagnostics": diag,
                "provenance": _provenance(None, {"window": [lo, hi]})}
    _emit(canonical_json(artifact), args.out)
    return 0


def _cmd_compare(args) -> int:
    s1 = Spectrum.from_dict(load_json(args.spectrum_a))
    s2 = Spectrum.from_dict(load_json(args.spectrum_b))
    verdict = compare_spectra(s1, s2, pair_tol=args.pair_tol)
    artifact = {
        "conclusion": verdict.conclusion,
        "same_B": verdict.same_B,
        "B1_hat": verdict.B1_hat,
        "B2_hat": verdict.B2_hat,
        "matched_pairs": verdict.matched_pairs,
        "max_pair_distance": verdict.max_pair_distance,
        "provenance": _provenance(None, {"pair_tol": args.pair_tol}),
    }
    _emit(canonical_json(artifact), args.out)
    return 0


def _cmd_sl_eigs(args) -> int:
    profile = _parse_profile(args.profile)
    validate(profile)
    lmap = compute_liouville(profile)
    mode = args.mode.replace("-", "_")
    eigs = sl_eigenvalues(potential_callable(profile, lmap), lmap.B, mode,
                          args.k_max)
    artifact = {"mode": mode, "B": lmap.B, "eigenvalues": eigs,
                "provenance": _provenance(profile, {"k_max": args.k_max})}
    if args.format == "csv":
        _emit(_rows_to_csv(["index", "k"], list(enumerate(eigs, 1))), args.out)
    else:
        _emit(canonical_json(artifact), args.out)
    return 0


def _cmd_validate(args) -> int:
    profile = _parse_profile(args.profile)
    report = validate(profile)
    lmap = compute_liouville(profile)
    artifact = {
        "valid": report.valid,
        "smoothness_warning": report.smoothness_warning,
        "boundary_gaps": report.boundary_gaps,
        "min_n": report.min_n,
        "B": lmap.B,
        "potential_norms": potential_norms(profile, lmap),
        "provenance": _provenance(profile, {}),
    }
    _emit(canonical_json(artifact), args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="iteig",
        description="Transmission-eigenvalue toolkit for a stratified dielectric ball")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, needs_profile=True):
        if needs_profile:
            p.add_argument("--profile", required=True,
                           help="profile JSON file or inline JSON object")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("eigs", help="zeros of the determinant in a box")
    add_common(p)
    p.add_argument("--box", required=True, help="re_min,re_max,im_min,im_max")
    p.add_argument("--min-box", type=float, default=1e-6, dest="min_box")
    p.add_argument("--newton-tol", type=float, default=1e-12, dest="newton_tol")
    p.add_argument("--spectrum-out", default=None, dest="spectrum_out",
                   help="also write the forward-wedge spectrum JSON here")
    p.add_argument("--wedge-eps", type=float, default=0.1, dest="wedge_eps")
    p.set_defaults(fn=_cmd_eigs)

    p = sub.add_parser("density", help="forward-wedge zero density report")
    add_common(p)
    p.add_argument("--k-max", type=float, required=True, dest="k_max")
    p.add_argument("--k-min", type=float, default=0.05, dest="k_min")
    p.add_argument("--window", required=True, help="r_lo,r_hi fit window")
    p.add_argument("--wedge-eps", type=float, default=0.1, dest="wedge_eps")
    p.add_argument("--axis-only", action="store_true", dest="axis_only",
                   help="count only real zeros (cheap, undercounts the wedge)")
    p.add_argument("--no-strip-check", action="store_true", dest="no_strip_check")
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("indicator", help="indicator function table and width")
    add_common(p)
    p.add_argument("--thetas", default="0.5235987755982988,1.0471975511965976,"
                                       "1.5707963267948966",
                   help="comma-separated angles in radians")
    p.add_argument("--r-max", type=float, default=200.0, dest="r_max")
    p.add_argument("--n-samples", type=int, default=33, dest="n_samples")
    p.set_defaults(fn=_cmd_indicator)

    p = sub.add_parser("invert-b", help="recover B from a spectrum file")
    add_common(p, needs_profile=False)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--window", required=True, help="r_lo,r_hi fit window")
    p.set_defaults(fn=_cmd_invert_b)

    p = sub.add_parser("compare", help="compare two spectrum files")
    add_common(p, needs_profile=False)
    p.add_argument("--spectrum-a", required=True, dest="spectrum_a")
    p.add_argument("--spectrum-b", required=True, dest="spectrum_b")
    p.add_argument("--pair-tol", type=float, default=1e-6, dest="pair_tol")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("sl-eigs", help="transformed-problem eigenvalues")
    add_common(p)
    p.add_argument("--mode", choices=("dirichlet", "dirichlet-neumann"),
                   default="dirichlet")
    p.add_argument("--k-max", type=float, required=True, dest="k_max")
    p.set_defaults(fn=_cmd_sl_eigs)

    p = sub.add_parser("validate", help="validate a profile")
    add_common(p)
    p.set_defaults(fn=_cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except _NUMERICAL_ERRORS as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 3
    except IteigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
