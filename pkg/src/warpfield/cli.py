"""Command-line front end.

Exit codes: 0 when every certificate passes, 1 when a certificate (or a
construction that needs one) fails, 2 for usage and input errors.
"""
import argparse
import json
import sys

import numpy as np

from .errors import CertificateError, UsageError, WarpfieldError
from .gl_bend import build_gl_curve, curve_rows, stage1_homotopy
from .isotopy import IsotopyConfig, gromov_lawson_isotopy
from .profile import RadialProfile, curvature_certificate, flat_profile
from .retract import RetractConfig, classify, deformation_retract
from .surgery import StdMetricDescriptor, handle_curvature_certificate, surgery_j, surgery_j_inv
from .svg import curve_figure, profile_figure, torpedo_figure
from .torpedo import DEFAULT_WIDTH, TorpedoSpec, torpedo_profile
from .verify import SUITES, format_table, run_suites

EXIT_OK, EXIT_CERT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _write(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _dump(obj):
    return json.dumps(obj, indent=1, sort_keys=True)


def _read_profile(path):
    try:
        return RadialProfile.from_csv(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _path_cert(path):
    return _dump(path.family_certificate())


def _status(passed):
    return EXIT_OK if passed else EXIT_CERT


# ---------------------------------------------------------------- commands


def cmd_torpedo(args):
    spec = TorpedoSpec(args.delta, args.b, args.width)
    prof = torpedo_profile(spec, args.points)
    cert = curvature_certificate(prof, args.n, margin=args.margin, delta=args.delta)
    _write(args.out, prof.to_csv())
    _write(args.cert, cert.to_json(include_grid=False))
    if args.svg:
        family = [(f"delta = {d:g}", torpedo_profile(TorpedoSpec(d, args.b, args.width)))
                  for d in sorted({args.delta, args.delta / 2, args.delta * 2 / 3})
                  if d * np.pi / 2 <= args.b]
        _write(args.svg, torpedo_figure(family))
    print(f"torpedo delta={args.delta:g} b={args.b:g} n={args.n}: R_min={cert.R_min:.6g} "
          f"{'PASS' if cert.passed else 'FAIL'}")
    return _status(cert.passed)


def cmd_bend(args):
    ambient = _read_profile(args.input) if args.input else flat_profile(args.rho_bar)
    curve, cert = build_gl_curve(ambient, args.p, args.q, args.delta, args.margin, args.rho_bar)
    path = stage1_homotopy(curve, ambient, args.p, args.q, args.steps, args.margin)
    if args.curve:
        rows = ["segment,t,r"] + [f"{a},{t:.17g},{r:.17g}" for a, t, r in curve_rows(curve)]
        _write(args.curve, "\n".join(rows))
    _write(args.out, path.to_csv(stride=args.stride))
    summary = {"curve": {"theta": curve.design.theta, "tilt": curve.design.tilt,
                         "contact_radius": curve.contact_radius, "length": curve.length},
               "induced": cert.to_dict(include_grid=False), **path.family_certificate()}
    _write(args.cert, _dump(summary))
    if args.svg:
        _write(args.svg, curve_figure([(f"delta = {args.delta:g}", curve_rows(curve))]))
    print(f"bend: theta={curve.design.theta:.6g} R_min={path.R_min:.6g} {'PASS' if path.passed else 'FAIL'}")
    return _status(path.passed and cert.passed)


def cmd_isotopy(args):
    g = _read_profile(args.input)
    config = IsotopyConfig(args.delta, args.steps, args.margin, args.rho_bar)
    path = gromov_lawson_isotopy(g, args.p, args.q, config)
    _write(args.out, path.to_csv(stride=args.stride))
    _write(args.cert, _path_cert(path))
    print(f"isotopy: {len(path) - 1} steps R_min={path.R_min:.6g} {'PASS' if path.passed else 'FAIL'}")
    return _status(path.passed)


def cmd_retract(args):
    w = _read_profile(args.input)
    cls = classify(w, args.rho_std, args.zero_tol)
    _write(args.classify_json, _dump(cls.to_dict()))
    config = RetractConfig(args.p, args.q, args.steps, args.margin, args.zero_tol)
    path = deformation_retract(w, args.rho_std, config)
    _write(args.out, path.to_csv(stride=args.stride))
    _write(args.cert, _path_cert(path))
    if args.svg:
        _write(args.svg, profile_figure([("input", w), ("retracted", path.end)], "Retraction"))
    print(f"retract: case {cls.case_id} R_min={path.R_min:.6g} {'PASS' if path.passed else 'FAIL'}")
    return _status(path.passed)


def cmd_surgery(args):
    try:
        with open(args.input) as fh:
            d = StdMetricDescriptor.from_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    out = surgery_j(d) if args.direction == "fwd" else surgery_j_inv(d)
    _write(args.out, out.to_json())
    passed = True
    if args.cert:
        cert = handle_curvature_certificate(d.p, d.q, d.delta, d.delta_h, args.margin)
        _write(args.cert, cert.to_json(include_grid=False))
        passed = cert.passed
    print(f"surgery {args.direction}: side {d.side} -> {out.side}")
    return _status(passed)


def cmd_verify(args):
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
    results = run_suites(args.seed, names)
    print(format_table(results))
    if args.json:
        _write(args.json, _dump([{"suite": r.name, "cases": r.cases, "failures": r.failures,
                                  "pass": r.passed, "detail": r.detail} for r in results]))
    return _status(all(r.passed for r in results))


def cmd_figures(args):
    """All three figures at once (torpedo family, bending curve, retraction forms)."""
    from .verify import retraction_examples

    prefix = args.prefix
    tors = [(f"delta = {d:g}", torpedo_profile(TorpedoSpec(d, 0.5))) for d in (0.1, 0.15, 0.2)]
    _write(f"{prefix}torpedo.svg", torpedo_figure(tors))
    ambient = flat_profile(1.0)
    curve, _ = build_gl_curve(ambient, 2, 2, 0.05)
    _write(f"{prefix}bend.svg", curve_figure([("delta = 0.05", curve_rows(curve))]))
    forms = [(name, w) for name, w, _ in retraction_examples()]
    _write(f"{prefix}retract.svg", profile_figure(forms, "Forms of w"))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common(sp, steps=True):
    sp.add_argument("--config", help="JSON file whose keys override these defaults")
    sp.add_argument("--margin", type=float, default=None)
    if steps:
        sp.add_argument("--steps", type=int, default=64)
        sp.add_argument("--stride", type=int, default=1, help="write every k-th knot of each profile")


def build_parser():
    ap = _Parser(prog="warpfield", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("torpedo", help="torpedo profile and its curvature certificate")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--width", type=float, default=DEFAULT_WIDTH)
    sp.add_argument("--points", type=int, default=2048)
    sp.add_argument("--out")
    sp.add_argument("--cert", default="cert.json")
    sp.add_argument("--svg")
    _common(sp, steps=False)
    sp.set_defaults(func=cmd_torpedo)

    sp = sub.add_parser("bend", help="bent curve and the first-stage homotopy")
    sp.add_argument("--input", help="ambient profile CSV (default: flat)")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--rho-bar", type=float, default=1.0)
    sp.add_argument("--out")
    sp.add_argument("--curve")
    sp.add_argument("--cert")
    sp.add_argument("--svg")
    _common(sp)
    sp.set_defaults(func=cmd_bend)

    sp = sub.add_parser("isotopy", help="full isotopy to a standard metric")
    sp.add_argument("--input", required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--rho-bar", type=float, default=None)
    sp.add_argument("--out")
    sp.add_argument("--cert")
    _common(sp)
    sp.set_defaults(func=cmd_isotopy)

    sp = sub.add_parser("retract", help="deformation to torpedo form near the origin")
    sp.add_argument("--input", required=True)
    sp.add_argument("--rho-std", type=float, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--zero-tol", type=float, default=None)
    sp.add_argument("--out")
    sp.add_argument("--classify-json")
    sp.add_argument("--cert")
    sp.add_argument("--svg")
    _common(sp)
    sp.set_defaults(func=cmd_retract)

    sp = sub.add_parser("surgery", help="map a standard-metric descriptor across the surgery")
    sp.add_argument("--input", required=True)
    sp.add_argument("--direction", choices=("fwd", "inv"), default="fwd")
    sp.add_argument("--out")
    sp.add_argument("--cert", help="also certify the attached handle")
    _common(sp, steps=False)
    sp.set_defaults(func=cmd_surgery)

    sp = sub.add_parser("verify", help="run the seeded property suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    sp.add_argument("--json")
    sp.add_argument("--config")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("figures", help="write the three figure SVGs")
    sp.add_argument("--prefix", default="")
    sp.set_defaults(func=cmd_figures)
    return ap


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a file")
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _apply_config(ap, argv):
    """Load --config into the subcommand defaults; explicit flags still win."""
    path = _config_path(argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    subs = ap._subparsers._group_actions[0].choices
    if path is None or command not in subs:
        return
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    sub = subs[command]
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    known = {a.dest for a in sub._actions}
    bad = sorted(set(cfg) - known - {"func", "command"})
    if bad or "func" in cfg or "command" in cfg:
        raise UsageError(f"unknown config keys: {', '.join(bad) or 'func/command'}")
    for action in sub._actions:
        if action.dest in cfg:
            action.required = False
    sub.set_defaults(**cfg)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"warpfield: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateError as exc:
        print(f"warpfield: certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except WarpfieldError as exc:
        print(f"warpfield: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
