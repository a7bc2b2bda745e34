"""Command-line front end: curves -> samples -> fit -> diagnostics -> export."""

import argparse
import json
import math
import re
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import _kernels, curves, field
from .aaafit import FitConfig
from .ratcore import poles_and_residues
from .schwarz import SchwarzApprox, fit_schwarz, orbit, reflect

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_IO = 0, 2, 3, 4

DEMOS = {
    "ellipse": dict(curve="ellipse:rho=2", n=100, law="uniform", rel_tol=1e-13, max_degree=150,
                    levels=(1e-8, 1e-1), metrics=("involution", "branch_vs_oracle")),
    "halfellipse": dict(curve="halfellipse:rho=2", n=100, law="uniform", rel_tol=1e-13, max_degree=150,
                        levels=(1e-8, 1e-1), metrics=("involution", "branch_vs_oracle")),
    "squiggle": dict(curve="squiggle", n=400, law="uniform", rel_tol=1e-13, max_degree=150,
                     levels=(1e-8, 1e-1), metrics=("involution",)),
    "superellipse": dict(curve="superellipse6", n=200, law="uniform", rel_tol=1e-13, max_degree=150,
                         levels=(1e-8, 1e-1), metrics=("involution",)),
    "inlet": dict(curve="inlet", total=300, law="clustered", rel_tol=1e-13, max_degree=500,
                  levels=(1e-8, 1e-1), metrics=("involution",)),
    "semis": dict(curve="semis", n=400, law="clustered", rel_tol=1e-13, max_degree=150,
                  levels=(1e-8, 1e-1), metrics=("involution",)),
    "lshape": dict(curve="lshape", n=300, law="clustered", rel_tol=1e-8, max_degree=500,
                   levels=(1e-5, 1e-1), metrics=("involution",)),
}

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan"
_COMPLEX_RE = re.compile(
    rf"^\s*(?:(?P<re>[+-]?(?:{_NUM}))(?P<im>[+-](?:{_NUM})?)i|(?P<re_only>[+-]?(?:{_NUM}))|(?P<im_only>[+-]?(?:{_NUM})?)i)\s*$"
)


def parse_complex(text):
    """Parse ``a``, ``bi`` or ``a+bi`` (signs optional, ``i`` alone means 1i)."""
    m = _COMPLEX_RE.match(text.replace(" ", ""))
    if not m:
        raise ValueError(f"malformed complex literal {text!r}; expected a, bi or a+bi (e.g. 1.3i, 2-0.5i)")

    def coef(s):
        return float(s + "1") if s in ("", "+", "-") else float(s)

    if m["re_only"] is not None:
        return complex(float(m["re_only"]), 0.0)
    if m["im_only"] is not None:
        return complex(0.0, coef(m["im_only"]))
    return complex(float(m["re"]), coef(m["im"]))


def format_complex(z):
    z = complex(z)
    im = z.imag
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{z.real!r}{sign}{abs(im)!r}i"


def _pair(text, kind, n):
    try:
        vals = [kind(v) for v in text.split(",")]
    except ValueError:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise OSError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from None


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None


def _emit(text, out):
    if out:
        _write_text(out, text + "\n")
    else:
        print(text)


def _load_model(path):
    try:
        return SchwarzApprox.from_dict(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path} is not a model document ({exc})") from None


def _make_samples(curve, n, sigma=None, total=None):
    counts = curve.split_total(total) if total is not None else n
    if sigma is None:
        return curves.sample_uniform(curve, counts)
    return curves.sample_clustered(curve, counts, sigma)


def _build_config(args):
    doc = {}
    if getattr(args, "config", None):
        doc.update(_read_json(args.config))
    for key, attr in (("rel_tol", "tol"), ("max_degree", "max_degree"),
                      ("cleanup_residue_tol", "cleanup_tol"), ("mode", "mode")):
        val = getattr(args, attr, None)
        if val is not None:
            doc[key] = val
    return FitConfig.from_dict(doc)


def poles_csv(s):
    rep = poles_and_residues(s.rat)
    lines = ["re,im,residue_re,residue_im,abs,offscale"]
    for p, res, off in zip(rep.poles.tolist(), rep.residues.tolist(), rep.offscale_mask.tolist()):
        lines.append(f"{p.real!r},{p.imag!r},{res.real!r},{res.imag!r},{abs(p)!r},{str(bool(off)).lower()}")
    return "\n".join(lines)


# --------------------------------------------------------------- subcommands


def cmd_curves(args):
    for kind in curves.CATALOG:
        c = curves.CATALOG[kind]()
        flavour = "corners at " + ",".join(f"{p:g}" for p in c.corner_params) if c.corner_params else "analytic"
        print(f"{c.spec:28s} {c.npieces} piece(s), {'closed' if c.closed else 'open'}, {flavour}")
    return EXIT_OK


def cmd_sample(args):
    c = curves.parse_curve(args.curve)
    n = [int(v) for v in args.n.split(",")] if "," in str(args.n) else int(args.n)
    S = _make_samples(c, n, args.cluster, args.total)
    _emit(json.dumps(S.to_dict()), args.out)
    return EXIT_OK


def cmd_fit(args):
    S = curves.SampleSet.from_dict(_read_json(args.samples))
    s = fit_schwarz(S, _build_config(args))
    if args.out:
        _write_text(args.out, s.to_json())
        print(json.dumps({k: v for k, v in s.fit.to_dict().items() if k != "history"}))
    else:
        print(s.to_json())
    if not s.fit.converged:
        print(f"warning: fit did not converge (rel error {s.fit.final_rel_error:.2e} > {s.tol_used:.0e})",
              file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_poles(args):
    _emit(poles_csv(_load_model(args.model)), args.out)
    return EXIT_OK


def cmd_reflect(args):
    s = _load_model(args.model)
    print(format_complex(reflect(s, parse_complex(args.point))))
    return EXIT_OK


def cmd_orbit(args):
    s = _load_model(args.model)
    if args.steps < 1:
        raise ValueError("--steps must be at least 1")
    orb = orbit(s, parse_complex(args.point), args.steps)
    for i, z in enumerate(orb.points, 1):
        print(f"{i} {format_complex(z)}")
    print(f"two_cycle={str(orb.two_cycle).lower()} escaped={str(orb.escaped).lower()}")
    return EXIT_OK


def cmd_field(args):
    s = _load_model(args.model)
    metric = {"involution": "involution", "branch": "branch_vs_oracle",
              "branch_vs_oracle": "branch_vs_oracle"}[args.metric]
    levels = tuple(_pair(args.levels, float, 2))
    nx, ny = _pair(args.grid, int, 2)
    samples = curves.SampleSet.from_dict(_read_json(args.samples)).Z if args.samples else None
    if args.box:
        x0, x1, y0, y1 = _pair(args.box, float, 4)
        xr, yr = (x0, x1), (y0, y1)
    else:
        xr, yr = field.default_box(samples if samples is not None else s.rat.support)
    g = field.evaluate_field(s, metric, xr, yr, nx, ny, levels)
    dest = args.dest or f"field.{args.out}"
    field.export(g, args.out, dest, samples)
    counts = {name: int(g.mask(name).sum()) for name in field.LABELS}
    print(json.dumps({"path": dest, "counts": counts}))
    return EXIT_OK


def demo_plan(case):
    """Parameters the demo for ``case`` runs with."""
    try:
        plan = dict(DEMOS[case])
    except KeyError:
        raise ValueError(f"unknown demo case {case!r}; choose from {', '.join(DEMOS)}") from None
    plan["sigma"] = curves.DEFAULT_SIGMA if plan["law"] == "clustered" else None
    return plan


def run_demo(case, outdir, grid=(400, 400)):
    """Run one figure pipeline end to end and write every artifact to ``outdir``."""
    plan = demo_plan(case)
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {outdir}: {exc.strerror or exc}") from None
    c = curves.parse_curve(plan["curve"])
    cfg = FitConfig(rel_tol=plan["rel_tol"], max_degree=plan["max_degree"])
    S = _make_samples(c, plan.get("n"), plan["sigma"], plan.get("total"))
    t0 = time.perf_counter()
    s = fit_schwarz(S, cfg)
    fit_seconds = time.perf_counter() - t0
    files = {"samples": "samples.json", "model": "model.json", "poles": "poles.csv"}
    _write_text(outdir / files["samples"], json.dumps(S.to_dict()))
    _write_text(outdir / files["model"], s.to_json())
    _write_text(outdir / files["poles"], poles_csv(s) + "\n")
    xr, yr = field.default_box(S.Z)
    for metric in plan["metrics"]:
        g = field.evaluate_field(s, metric, xr, yr, grid[0], grid[1], plan["levels"])
        stem = "field_" + ("branch" if metric == "branch_vs_oracle" else metric)
        for fmt in ("csv", "svg"):
            name = f"{stem}.{fmt}"
            field.export(g, fmt, outdir / name, S.Z)
            files[f"{stem}_{fmt}"] = name
    rep = poles_and_residues(s.rat)
    manifest = {
        "case": case,
        "curve": S.curve_id,
        "samples": len(S),
        "sampling": S.clustering,
        "config": cfg.to_dict(),
        "levels": list(plan["levels"]),
        "grid": list(grid),
        "box": [*xr, *yr],
        "report": {k: v for k, v in s.fit.to_dict().items() if k != "history"},
        "onscale_poles": int((~rep.offscale_mask).sum()),
        "fit_seconds": fit_seconds,
        "backend": _kernels.BACKEND,
        "files": files,
    }
    _write_text(outdir / "manifest.json", json.dumps(manifest, indent=2))
    return manifest


def cmd_demo(args):
    grid = tuple(_pair(args.grid, int, 2))
    outdir = args.dir or f"demo_{args.case}"
    manifest = run_demo(args.case, outdir, grid)
    rep = manifest["report"]
    print(f"{args.case}: {manifest['samples']} samples, degree {rep['degree']}, "
          f"{manifest['onscale_poles']} poles, rel error {rep['final_rel_error']:.1e} -> {outdir}")
    if not rep["converged"]:
        print(f"warning: fit did not reach rel_tol {manifest['config']['rel_tol']:.0e}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="schwarzfun", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("curves", help="list the curve catalog")
    q.add_argument("action", choices=["list"])
    q.set_defaults(func=cmd_curves)

    q = sub.add_parser("sample", help="sample a catalog curve")
    q.add_argument("--curve", required=True, help='e.g. "ellipse:rho=2", "squiggle", "lshape"')
    q.add_argument("--n", default="100", help="samples per piece (int or comma list per piece)")
    q.add_argument("--total", type=int, help="total samples split over pieces by the curve's weights")
    q.add_argument("--cluster", type=float, metavar="SIGMA", help="root-exponential clustering toward corners")
    q.add_argument("--out", help="write JSON here instead of stdout")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("fit", help="fit the Schwarz function of a sample set")
    q.add_argument("--samples", required=True)
    q.add_argument("--tol", type=float)
    q.add_argument("--max-degree", type=int)
    q.add_argument("--cleanup-tol", type=float)
    q.add_argument("--mode", choices=["standard", "sign_reserved"])
    q.add_argument("--config", help="JSON FitConfig block")
    q.add_argument("--out", help="write the model JSON here; the report goes to stdout")
    q.set_defaults(func=cmd_fit)

    q = sub.add_parser("poles", help="poles, residues and off-scale flags as CSV")
    q.add_argument("--model", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_poles)

    q = sub.add_parser("reflect", help="reflect a point across the curve")
    q.add_argument("--model", required=True)
    q.add_argument("--point", required=True)
    q.set_defaults(func=cmd_reflect)

    q = sub.add_parser("orbit", help="iterate the reflection")
    q.add_argument("--model", required=True)
    q.add_argument("--point", required=True)
    q.add_argument("--steps", type=int, default=4)
    q.set_defaults(func=cmd_orbit)

    q = sub.add_parser("field", help="error field on a grid")
    q.add_argument("--model", required=True)
    q.add_argument("--metric", choices=["involution", "branch", "branch_vs_oracle"], default="involution")
    q.add_argument("--levels", default="1e-8,1e-1")
    q.add_argument("--grid", default="400,400")
    q.add_argument("--box", help="x0,x1,y0,y1 (default: 1.5x the curve extent)")
    q.add_argument("--out", choices=["csv", "json", "svg"], default="csv", help="output format")
    q.add_argument("--dest", help="output path (default field.<format>)")
    q.add_argument("--samples", help="sample file to draw the curve in svg output")
    q.set_defaults(func=cmd_field)

    q = sub.add_parser("demo", help="reproduce one figure pipeline")
    q.add_argument("--case", required=True, choices=list(DEMOS))
    q.add_argument("--dir", help="output directory (default demo_<case>)")
    q.add_argument("--grid", default="400,400")
    q.set_defaults(func=cmd_demo)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
