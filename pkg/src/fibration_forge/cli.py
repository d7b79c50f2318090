"""``fibration-forge`` command line.

Exit codes: 0 all checks pass, 2 bad input, 3 domain error, 4 a
verification check failed. Reports are JSON with no timestamps, so a run
is reproducible byte for byte from its inputs, flags and seed.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from . import io as ffio
from .angles import (
    ComplexSubspace,
    RealSubspace,
    aligning_isometry_conjugate,
    aligning_isometry_real,
    principal_angles_complex,
    principal_angles_conjugate,
    principal_angles_real,
    subspace_residual,
)
from .exceptions import (
    DomainError,
    ExtensionFailedError,
    MismatchError,
    VerificationError,
)
from .fibration import (
    DEFAULT_SCHEDULE,
    BumpProfile,
    GermComposite,
    build_fibration,
    extend_germ,
    hopf_fibre_through,
    hopf_map,
    slope_sup,
    transversality_margin,
    verify_fibration,
)
from .grassmann import GreatCircle, chart_to_plane
from .numeric import min_abs_imag_eigenvalue
from .report import CheckRecord, Report
from .structures import ComplexStructure, RetractionPath

TOOL = "fibration-forge"
CHECK_TOL = 1e-7

_PATH_ARGS = ("matrix", "first", "second", "align", "artifact", "germ")
_SKIP_ARGS = ("handler", "verb", "report", "out", "samples_out", "svg", "seed")


class InputError(Exception):
    """A file could not be read or parsed."""


# -- helpers ---------------------------------------------------------------


def _load(loader, path):
    try:
        return loader(path)
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _command_echo(args):
    inputs, flags = {}, {}
    for key, value in sorted(vars(args).items()):
        if key in _SKIP_ARGS or value is None:
            continue
        if key in _PATH_ARGS:
            inputs[key] = ([os.path.basename(v) for v in value] if isinstance(value, list)
                           else os.path.basename(value))
        else:
            flags[key] = value
    return {"verb": args.verb, "inputs": inputs, "flags": flags}


def _envelope(args, report, **extra):
    out = {
        "tool": TOOL,
        "version": __version__,
        "command": _command_echo(args),
        "seed": args.seed,
    }
    out.update(extra)
    out.update(report.to_dict() if report is not None else {"checks": [], "passed": False})
    return out


def _emit(args, payload):
    text = ffio.dumps(payload)
    if getattr(args, "report", None):
        ffio.write_text_atomic(args.report, text)
    else:
        sys.stdout.write(text)


def _finish(args, report, **extra):
    _emit(args, _envelope(args, report, **extra))
    return 0 if report.passed else 4


def _error_payload(exc):
    return {"type": type(exc).__name__, "message": str(exc)}


def _check(report, name, margin, ok, witness=None):
    report.add(CheckRecord(name, bool(ok), float(margin), witness))


# -- retract ---------------------------------------------------------------


def run_retract(args):
    T = _load(ffio.load_matrix, args.matrix)
    path = RetractionPath.of(T)
    ts = np.linspace(0.0, 1.0, args.t_grid)
    maps = path.sample(ts)
    E = path.endpoint
    I = np.eye(T.shape[0])
    report = Report()
    J = path.J.matrix
    _check(report, "J_T_squares_to_minus_identity", np.linalg.norm(J @ J + I, 2),
           np.linalg.norm(J @ J + I, 2) < CHECK_TOL)
    _check(report, "stage_junction", path.junction_residual, path.junction_residual < CHECK_TOL)
    margins = min_abs_imag_eigenvalue(maps)
    k = int(np.argmin(margins))
    _check(report, "path_nondegenerate", margins[k], margins[k] > 1e-9, {"t": ts[k]})
    orth = np.linalg.norm(E.T @ E - I, 2)
    _check(report, "endpoint_orthogonal", orth, orth < CHECK_TOL)
    cx = np.linalg.norm(E @ E + I, 2)
    _check(report, "endpoint_complex_structure", cx, cx < CHECK_TOL)
    if args.samples_out:
        ffio.write_json(args.samples_out, {"t": ts.tolist(), "maps": maps.tolist()})
    return _finish(args, report, J_T=J.tolist(), endpoint=E.tolist(),
                   path_margins=margins.tolist())


# -- angles ----------------------------------------------------------------


def _angles_payload(profile):
    return {"angles": profile.angles.tolist(), "cosines": np.cos(profile.angles).tolist()}


def run_angles(args):
    setting = args.setting
    first = _load(ffio.load_subspace, args.first)
    if setting == "conjugate":
        if args.second is not None:
            raise InputError("the conjugate setting takes a single subspace")
        expected_align = 1
    else:
        if args.second is None:
            raise InputError(f"the {setting} setting needs two subspaces")
        expected_align = 2
    if args.align is not None and setting == "complex":
        raise InputError("--align is available for the real and conjugate settings")
    if args.align is not None and len(args.align) != expected_align:
        raise InputError(f"--align needs {expected_align} file(s) in the {setting} setting")

    want = ComplexSubspace if setting != "real" else RealSubspace
    subspaces = [first] + ([_load(ffio.load_subspace, args.second)] if args.second else [])
    subspaces += [_load(ffio.load_subspace, p) for p in (args.align or [])]
    for S in subspaces:
        if not isinstance(S, want):
            raise InputError(f"the {setting} setting needs "
                             f"{'complex' if want is ComplexSubspace else 'real'} subspaces")

    if setting == "real":
        profile = principal_angles_real(subspaces[0], subspaces[1])
    elif setting == "complex":
        profile = principal_angles_complex(subspaces[0], subspaces[1])
    else:
        profile = principal_angles_conjugate(subspaces[0])

    report = Report()
    res = profile.pairing_residual()
    _check(report, "pairing_residual", res, res < args.tol)
    extra = _angles_payload(profile)
    if args.align is not None:
        try:
            if setting == "real":
                P, Q, P2, Q2 = subspaces
                F = aligning_isometry_real(P, Q, P2, Q2, tol=args.tol)
                pairs = [("maps_first", P, P2), ("maps_second", Q, Q2)]
            else:
                P, Q = subspaces
                F = aligning_isometry_conjugate(P, Q, tol=args.tol)
                pairs = [("maps_subspace", P, Q), ("maps_conjugate", P.conjugate(), Q.conjugate())]
        except MismatchError as exc:
            report.add(CheckRecord("aligning_isometry", False, None, _error_payload(exc)))
            return _finish(args, report, **extra)
        orth = np.linalg.norm(F.T @ F - np.eye(F.shape[0]), 2)
        _check(report, "isometry_orthogonal", orth, orth < args.tol)
        for name, src, dst in pairs:
            r = subspace_residual(F, src.basis, dst.basis)
            _check(report, name, r, r < args.tol)
        extra["isometry"] = F.tolist()
    return _finish(args, report, **extra)


# -- fibrations ------------------------------------------------------------


def _bump_from_args(args):
    try:
        return BumpProfile(args.r0, args.r1, 1)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _fibration_summary(F):
    base = F.base if isinstance(F, GermComposite) else F
    s = slope_sup(base.bump)
    return {
        "n": F.n,
        "n_exp": base.bump.n_exp,
        "epsilon": base.epsilon,
        "slope_sup": s,
        "gap_norm": base.gap_norm,
    }


def _certificate_check(report, base, epsilon):
    lhs = slope_sup(base.bump) * base.gap_norm
    _check(report, "certificate", epsilon - lhs, lhs < epsilon,
           {"slope_times_gap": lhs, "epsilon": epsilon})


def run_build_fibration(args):
    A = _load(ffio.load_matrix, args.matrix)
    F = build_fibration(A, base_bump=_bump_from_args(args), max_exponent=args.max_exponent,
                        t_grid=args.t_grid, lambda_grid=args.lambda_grid)
    report = Report()
    _certificate_check(report, F, F.epsilon)
    report = report.merge(verify_fibration(F, n_samples=args.samples, n_pairs=args.pairs,
                                           seed=args.seed))
    if args.out:
        ffio.write_json(args.out, ffio.fibration_to_json(F))
    return _finish(args, report, fibration=_fibration_summary(F))


def run_verify(args):
    F = _load(ffio.load_fibration, args.artifact)
    base = F.base if isinstance(F, GermComposite) else F
    grid = base.grid_params
    margin = transversality_margin(base.A, base.J, int(grid.get("t_grid", 101)),
                                   int(grid.get("lambda_grid", 401)))
    report = Report()
    drift = base.epsilon - margin.epsilon
    _check(report, "epsilon_reproduced", drift,
           drift <= 1e-9 * max(1.0, margin.epsilon),
           {"stored": base.epsilon, "recomputed": margin.epsilon})
    _certificate_check(report, base, min(base.epsilon, margin.epsilon))
    report = report.merge(verify_fibration(F, n_samples=args.samples, n_pairs=args.pairs,
                                           seed=args.seed))
    return _finish(args, report, fibration=_fibration_summary(F))


def run_extend_germ(args):
    germ = _load(ffio.load_germ, args.germ)
    try:
        composite, report = extend_germ(germ, schedule=args.radii,
                                        base_bump=_bump_from_args(args),
                                        n_samples=args.samples, n_pairs=args.pairs,
                                        seed=args.seed, max_exponent=args.max_exponent)
    except ExtensionFailedError as exc:
        best = exc.report if exc.report is not None else Report()
        failed = Report([CheckRecord("extension", False, None, _error_payload(exc))])
        _emit(args, _envelope(args, failed.merge(best),
                              attempts=getattr(exc, "attempts", [])))
        return 4
    if args.out:
        ffio.write_json(args.out, ffio.fibration_to_json(composite))
    return _finish(args, report, accepted_radius=composite.radius,
                   attempts=list(composite.attempts), fibration=_fibration_summary(composite))


# -- sample-fibres ---------------------------------------------------------


def _fibre_samples(F, count, points, seed):
    rng = np.random.default_rng(seed)
    X = F.sample_points(count, rng)
    charts = F.chart(X)
    ts = 2 * np.pi * np.arange(points) / points
    circles = np.stack([GreatCircle(chart_to_plane(F.P, C))(ts) for C in charts])
    return ts, circles


def _stereographic(P):
    """Project from ``(0, 0, 0, 1)`` into ``R^3``; the pole itself maps to NaN."""
    denom = 1.0 - P[..., 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        Y = P[..., :3] / denom[..., np.newaxis]
    Y[denom < 1e-9] = np.nan
    return Y


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


def _svg(circles, size=600, clip=6.0, elevation=np.radians(25.0)):
    Y = _stereographic(circles)
    # orthographic view looking down a tilted y-axis
    u = Y[..., 0]
    v = Y[..., 2] * np.cos(elevation) - Y[..., 1] * np.sin(elevation)
    half = size / 2
    scale = half / clip
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for k in range(len(circles)):
        color = _PALETTE[k % len(_PALETTE)]
        segment = []
        segments = []
        for a, b in zip(u[k], v[k]):
            if not (np.isfinite(a) and np.isfinite(b)) or max(abs(a), abs(b)) > clip:
                if len(segment) > 1:
                    segments.append(segment)
                segment = []
                continue
            segment.append(f"{half + scale * a:.3f},{half - scale * b:.3f}")
        closed = len(segment) == len(u[k])
        if len(segment) > 1:
            segments.append(segment + ([segment[0]] if closed else []))
        for seg in segments:
            lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                         f'points="{" ".join(seg)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def run_sample_fibres(args):
    F = _load(ffio.load_fibration, args.artifact)
    if args.svg and F.n != 1:
        raise InputError("--svg is only available for fibrations of the 3-sphere (n = 1)")
    ts, circles = _fibre_samples(F, args.count, args.points, args.seed)
    count, points, dim = circles.shape
    csv_text = ffio.fibres_to_csv(np.repeat(np.arange(count), points),
                                  np.tile(ts, count), circles.reshape(-1, dim))
    report = Report()
    norm_err = float(np.max(np.abs(np.linalg.norm(circles, axis=-1) - 1)))
    _check(report, "unit_norm", norm_err, norm_err < 1e-12)
    if count >= 2:
        i, j = np.triu_indices(count, 1)
        d = np.linalg.norm(circles[i][:, :, None, :] - circles[j][:, None, :, :], axis=-1)
        dmin = d.min(axis=(1, 2))
        k = int(np.argmin(dmin))
        _check(report, "fibres_disjoint", dmin[k], dmin[k] > 0,
               {"pair": [int(i[k]), int(j[k])]})
    if args.out:
        ffio.write_text_atomic(args.out, csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.svg:
        ffio.write_text_atomic(args.svg, _svg(circles))
    if args.report:
        _emit(args, _envelope(args, report))
    return 0 if report.passed else 4


# -- hopf ------------------------------------------------------------------


def run_hopf(args):
    pts = [np.array(p, dtype=float) for p in (args.point or [])]
    if args.random:
        rng = np.random.default_rng(args.seed)
        R = rng.standard_normal((args.random, 4))
        pts += list(R / np.linalg.norm(R, axis=1, keepdims=True))
    if not pts:
        raise InputError("give at least one --point or --random N")
    X = np.stack(pts)
    Y = hopf_map(X)
    J = ComplexStructure.standard(4)
    ts = 2 * np.pi * np.arange(args.fibre_samples) / args.fibre_samples
    report = Report()
    for k, (x, y) in enumerate(zip(X, Y)):
        unit = abs(float(np.linalg.norm(y)) - 1.0)
        fibre = hopf_fibre_through(J, x)(ts)
        spread = float(np.max(np.abs(hopf_map(fibre) - y)))
        _check(report, f"hopf[{k}]", max(unit, spread), unit < 1e-12 and spread < 1e-12,
               {"x": x, "y": y, "norm_residual": unit, "fibre_spread": spread})
    return _finish(args, report, images=Y.tolist())


# -- parser ----------------------------------------------------------------


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _grid_size(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"grid needs at least 2 points, got {text}")
    return value


def _add_common(p, randomized=True):
    p.add_argument("--report", metavar="PATH", help="write the JSON report here (default stdout)")
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed for randomized checks" if randomized else argparse.SUPPRESS)


def _add_verification(p):
    p.add_argument("--samples", type=_nonnegative_int, default=10_000,
                   help="sample points for the eigenvalue check")
    p.add_argument("--pairs", type=_nonnegative_int, default=500,
                   help="random pairs for the disjointness check")


def _add_bump(p):
    p.add_argument("--r0", type=_positive_float, default=0.25, help="inner bump radius")
    p.add_argument("--r1", type=_positive_float, default=1.0, help="outer bump radius")
    p.add_argument("--max-exponent", type=_positive_int, default=10_000)


def build_parser():
    parser = argparse.ArgumentParser(
        prog=TOOL, description="Construct and certify great circle fibrations of spheres."
    )
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("retract", help="retract a linear map onto an orthogonal complex structure")
    p.add_argument("matrix", help="JSON matrix file")
    p.add_argument("--t-grid", type=_grid_size, default=11, help="number of path samples")
    p.add_argument("--samples-out", metavar="PATH", help="write the sampled path as JSON")
    _add_common(p, randomized=False)
    p.set_defaults(handler=run_retract)

    p = sub.add_parser("angles", help="principal angles between subspaces")
    p.add_argument("first", help="subspace JSON")
    p.add_argument("second", nargs="?", help="second subspace JSON (real/complex settings)")
    p.add_argument("--setting", choices=("real", "complex", "conjugate"), default="real")
    p.add_argument("--align", nargs="+", metavar="FILE",
                   help="target subspace(s) for an aligning isometry")
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    _add_common(p, randomized=False)
    p.set_defaults(handler=run_angles)

    p = sub.add_parser("build-fibration", help="build and verify a fibration tangent to A")
    p.add_argument("matrix", help="JSON matrix file for A")
    p.add_argument("--out", metavar="PATH", help="write the fibration artifact")
    p.add_argument("--t-grid", type=_grid_size, default=101)
    p.add_argument("--lambda-grid", type=_grid_size, default=401)
    _add_bump(p)
    _add_verification(p)
    _add_common(p)
    p.set_defaults(handler=run_build_fibration)

    p = sub.add_parser("verify", help="re-verify a fibration artifact")
    p.add_argument("artifact")
    _add_verification(p)
    _add_common(p)
    p.set_defaults(handler=run_verify)

    p = sub.add_parser("extend-germ", help="extend a polynomial germ to a global fibration")
    p.add_argument("germ", help="germ JSON")
    p.add_argument("--out", metavar="PATH", help="write the extension artifact")
    p.add_argument("--radii", nargs="+", type=_positive_float, default=list(DEFAULT_SCHEDULE),
                   metavar="RHO", help="gluing radii to try, in order")
    _add_bump(p)
    _add_verification(p)
    _add_common(p)
    p.set_defaults(handler=run_extend_germ)

    p = sub.add_parser("sample-fibres", help="sample great circle fibres as CSV")
    p.add_argument("artifact")
    p.add_argument("--count", type=_positive_int, default=3, help="number of fibres")
    p.add_argument("--points", type=_positive_int, default=64, help="samples per fibre")
    p.add_argument("--out", metavar="PATH", help="CSV path (default stdout)")
    p.add_argument("--svg", metavar="PATH", help="stereographic SVG plot (n = 1 only)")
    _add_common(p)
    p.set_defaults(handler=run_sample_fibres)

    p = sub.add_parser("hopf", help="evaluate the Hopf map S^3 -> S^2")
    p.add_argument("--point", nargs=4, type=float, action="append", metavar="X",
                   help="a unit vector in R^4 (repeatable)")
    p.add_argument("--random", type=_nonnegative_int, default=0,
                   help="also test N random unit vectors")
    p.add_argument("--fibre-samples", type=_positive_int, default=64)
    _add_common(p)
    p.set_defaults(handler=run_hopf)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"{TOOL}: {type(exc).__name__}: {exc}", file=sys.stderr)
        _emit(args, _envelope(args, None, error=_error_payload(exc)))
        return 3
    except VerificationError as exc:
        print(f"{TOOL}: {type(exc).__name__}: {exc}", file=sys.stderr)
        _emit(args, _envelope(args, None, error=_error_payload(exc)))
        return 4


if __name__ == "__main__":
    sys.exit(main())
