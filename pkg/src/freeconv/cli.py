"""Command-line front end.

Subcommands wrap the engines and write CSV tables with JSON sidecars.
Exit codes: 0 full success, 1 configuration/parse error, 2 partial
numerical failure (some grid points did not converge); diagnostics go to
stderr.  The worker count for Monte Carlo trials comes from --workers or
the FREECONV_WORKERS environment variable.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import rect, rmt, square
from .errors import DomainError, FreeconvError, SpecError
from .inversion import DEFAULT_LADDER, PointFlag
from .measures import RectIDLaw, RectStable
from .regularity import property_H_probe
from .specparse import parse_measure_spec

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def _load_spec(text):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read().strip()
    return parse_measure_spec(text)


def _parse_grid(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise DomainError(f"bad grid spec {text!r}; expected lo:hi:points") from None
    if not (lo < hi and n >= 2):
        raise DomainError("grid requires lo < hi and points >= 2")
    return np.linspace(lo, hi, n)


def _parse_ladder(text):
    if not text:
        return DEFAULT_LADDER
    eps = [float(x) for x in text.split(",")]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("epsilon ladder must be positive and decreasing")
    return tuple(eps)


def _write_curve(curve, out_prefix):
    csv_path = out_prefix + ".csv"
    json_path = out_prefix + ".json"
    curve.write_csv(csv_path)
    curve.write_sidecar(json_path)
    return csv_path, json_path


def _curve_exit(curve):
    if np.any(curve.flags == int(PointFlag.FAILED)):
        n_bad = int(np.sum(curve.flags == int(PointFlag.FAILED)))
        print(f"warning: {n_bad} grid points failed to converge", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _workers(args):
    if args.workers is not None:
        return args.workers
    return int(os.environ.get("FREECONV_WORKERS", "1"))


def cmd_convolve_square(args):
    mu = _load_spec(args.mu)
    nu = _load_spec(args.nu)
    grid = _parse_grid(args.grid)
    handle = square.SquareConvHandle(mu, nu, tol=args.tol)
    curve = square.density_curve_square(handle, grid,
                                        ladder=_parse_ladder(args.eps_ladder))
    paths = _write_curve(curve, args.out)
    print(f"wrote {paths[0]} and {paths[1]}; "
          f"mass {curve.total_mass():.6f}, atoms {curve.atoms}")
    return _curve_exit(curve)


def cmd_convolve_rect(args):
    mu = _load_spec(args.mu)
    nu = _load_spec(args.nu)
    grid = _parse_grid(args.grid)
    handle = rect.RectConvHandle(mu, nu, lam=args.lam, tol=args.tol)
    curve = rect.rect_density_curve(handle, grid,
                                    ladder=_parse_ladder(args.eps_ladder))
    paths = _write_curve(curve, args.out)
    print(f"wrote {paths[0]} and {paths[1]}; "
          f"mass {curve.total_mass():.6f}, atoms {curve.atoms}")
    return _curve_exit(curve)


def cmd_atoms(args):
    mu = _load_spec(args.mu)
    nu = _load_spec(args.nu)
    handle = rect.RectConvHandle(mu, nu, lam=args.lam)
    mass = rect.atom_at_zero(handle)
    payload = {"atom_at_zero": mass,
               "mu_mass0": handle.mu.mass_at_zero(),
               "nu_mass0": (handle.nu_id.mass_at_zero() if handle.both_id()
                            else handle.nu.mass_at(0.0))}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    return EXIT_OK


def cmd_hole(args):
    mu = _load_spec(args.mu)
    nu = _load_spec(args.nu)
    handle = rect.RectConvHandle(mu, nu, lam=args.lam)
    rep = rect.hole_detect(handle, resolution=args.resolution)
    payload = {"has_hole": rep.has_hole,
               "hole_radius_estimate": rep.hole_radius_estimate,
               "atom_at_zero": rep.atom_at_zero,
               "diagnostics": rep.diagnostics}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    return EXIT_OK


def _rmt_target(args, muA, muB):
    if args.target:
        return _load_spec(args.target)
    if args.model == "square":
        handle = square.SquareConvHandle(muA, muB)
        grid = np.linspace(*_target_window(muA, muB), 1201)
        return square.density_curve_square(handle, grid)
    handle = rect.RectConvHandle(muA, muB, lam=args.lam)
    grid = np.linspace(*_target_window(muA, muB), 1201)
    return rect.rect_density_curve(handle, grid)


def _target_window(muA, muB):
    loA, hiA = muA.support()
    loB, hiB = muB.support()
    lo, hi = loA + loB, hiA + hiB
    pad = 0.25 * (hi - lo) + 1.0
    return lo - pad, hi + pad


def cmd_rmt_verify(args):
    muA = _load_spec(args.muA)
    muB = _load_spec(args.muB)
    if args.model == "square":
        spec = rmt.square_model_spectrum(muA, muB, args.N, trials=args.trials,
                                         seed=args.seed, workers=_workers(args))
    else:
        spec = rmt.rect_model_spectrum(muA, muB, args.N, lam=args.lam,
                                       trials=args.trials, seed=args.seed,
                                       workers=_workers(args))
    target = _rmt_target(args, muA, muB)
    ks = rmt.ks_distance(spec, target)
    ok = ks < args.ks_threshold
    print(f"KS distance {ks:.6f} against threshold {args.ks_threshold}: "
          f"{'pass' if ok else 'FAIL'}")
    if args.out:
        spec.write_csv(args.out + ".csv")
        spec.write_summary(args.out + ".json", ks=ks)
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_classify(args):
    mu = _load_spec(args.mu)
    if args.nu:
        nu = _load_spec(args.nu)
        regime = square.classify_origin_regime(mu, nu)
        print(json.dumps({"origin_regime": regime.value}, indent=2))
        return EXIT_OK
    report = property_H_probe(mu)
    text = report.to_json(args.out + ".json" if args.out else None)
    print(text)
    return EXIT_OK


def cmd_stable_density(args):
    grid = _parse_grid(args.grid)
    law = RectStable(args.alpha, args.t, args.lam)
    if args.alpha in (1.0, 2.0):
        dens = law.density(grid)
        errs = np.zeros_like(grid)
        from .inversion import DensityCurve
        curve = DensityCurve(grid, dens, errs)
        hole = law.hole_radius()
        if hole:
            curve.diagnostics["hole_radius"] = hole
    else:
        curve = rect.rect_law_density_curve(
            RectIDLaw.from_measure(law, args.lam), grid)
    paths = _write_curve(curve, args.out)
    print(f"wrote {paths[0]} and {paths[1]}")
    return _curve_exit(curve)


def build_parser():
    p = argparse.ArgumentParser(
        prog="freeconv",
        description="free (square) and rectangular free convolution numerics")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rect_lambda=False):
        sp.add_argument("--out", default="freeconv_out",
                        help="output path prefix (.csv/.json appended)")
        sp.add_argument("--tol", type=float, default=1e-12,
                        help="solver tolerance")
        sp.add_argument("--eps-ladder", default="",
                        help="comma-separated epsilon ladder for boundary values")
        if rect_lambda:
            sp.add_argument("--lambda", dest="lam", type=float, default=None,
                            help="ratio lambda (defaults to the operands')")

    sp = sub.add_parser("convolve-square", help="density of mu (+) nu")
    sp.add_argument("--mu", required=True, help="ID operand spec (or @file)")
    sp.add_argument("--nu", required=True, help="second operand spec")
    sp.add_argument("--grid", required=True, help="lo:hi:points")
    common(sp)
    sp.set_defaults(fn=cmd_convolve_square)

    sp = sub.add_parser("convolve-rect", help="density of mu (+)_lambda nu")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp.add_argument("--grid", required=True)
    common(sp, rect_lambda=True)
    sp.set_defaults(fn=cmd_convolve_rect)

    sp = sub.add_parser("atoms", help="mass of the rectangular convolution at 0")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--out", default="")
    sp.set_defaults(fn=cmd_atoms)

    sp = sub.add_parser("hole", help="support hole around the origin")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--resolution", type=float, default=1e-4)
    sp.add_argument("--out", default="")
    sp.set_defaults(fn=cmd_hole)

    sp = sub.add_parser("rmt-verify",
                        help="Monte Carlo spectrum against the solver")
    sp.add_argument("--model", choices=("square", "rect"), required=True)
    sp.add_argument("--muA", required=True)
    sp.add_argument("--muB", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.5)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ks-threshold", type=float, default=0.02)
    sp.add_argument("--target", default="",
                    help="optional closed-form target spec (defaults to solver)")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--out", default="")
    sp.set_defaults(fn=cmd_rmt_verify)

    sp = sub.add_parser("classify",
                        help="origin regime of mu (+) nu, or battery report")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", default="")
    sp.add_argument("--out", default="")
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("stable-density",
                        help="closed-form rectangular stable density table")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--out", default="freeconv_out")
    sp.set_defaults(fn=cmd_stable_density)

    return p


def _merge_dash_values(argv):
    """Fold values that begin with '-' (negative grid bounds, ladders) into
    --opt=value form so argparse does not mistake them for flags."""
    merged = []
    folding = {"--grid", "--eps-ladder"}
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in folding and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_dash_values(list(argv)))
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except SpecError as e:
        print(f"spec error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FreeconvError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
