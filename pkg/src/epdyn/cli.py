"""Command-line front end.

Every command writes a CSV artifact plus a JSON manifest next to it.  The
manifest stores the command path and the full parsed argument set, so
``epdyn --manifest run.manifest.json`` re-executes the run and reproduces
the CSV byte for byte.  Each CSV starts with a comment line carrying the
manifest checksum (SHA-256 of the canonical JSON of command, arguments
and package version), followed by the header row.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import EPDynError
from .models import Family, ModelSpec

SPECTRUM_COLUMNS = ["param_value", "re_E", "im_E", "re_lambda", "im_lambda", "class"]
EP_COLUMNS = ["family", "n", "g", "param", "re_E", "im_E", "order", "type", "gap"]
SURVIVAL_COLUMNS = ["t", "P", "method", "model_family", "g", "param"]
FIT_COLUMNS = ["exponent", "coefficient"]
FIT_FOOTER = ["rms", "t_min", "t_max", "condition"]
PUISEUX_COLUMNS = ["family", "n", "g", "param", "re_E", "im_E", "variable", "detuning",
                   "power", "re_coefficient", "im_coefficient", "source"]

_NON_CONFIG = {"manifest", "outdir", "handler"}


def fmt(x) -> str:
    """17-significant-digit, round-trip safe number formatting."""
    if isinstance(x, (str, bool)) or x is None:
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def parse_range(text: str, with_step: bool):
    parts = [float(p) for p in text.split(":")]
    if with_step:
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError("expected start:stop:step with step > 0 and stop >= start")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)
    if len(parts) != 2 or not parts[0] < parts[1]:
        raise ValueError("expected lo:hi with lo < hi")
    return tuple(parts)


# -- model flags ------------------------------------------------------------

def _add_model_flags(p, needs_param=True):
    p.add_argument("--family", required=True, choices=[f.value for f in Family],
                   help="hq (qubit), hd (end dot), hn (side dot)")
    p.add_argument("--g", type=float, required=True, help="chain coupling g")
    p.add_argument("--n", type=int, default=None, help="attachment site (hn only)")
    if needs_param:
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--V", dest="param", type=float, help="qubit coupling V")
        grp.add_argument("--eps", dest="param", type=float, help="dot potential eps_d")
        grp.add_argument("--param", dest="param", type=float, help="V or eps_d")


def _model(args, param=None) -> ModelSpec:
    family = Family.parse(args.family)
    value = args.param if param is None else param
    if value is None:
        value = 0.0
    if family is Family.QUBIT:
        return ModelSpec.qubit(args.g, value)
    if family is Family.END_DOT:
        return ModelSpec.end_dot(args.g, value)
    if args.n is None:
        raise ValueError("--n is required for the hn family")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = ModelSpec.side_dot(args.g, value, args.n)
    if not model.validated:
        print(f"epdyn: warning: site n={args.n} is outside the validated set (2, 4, 6)", file=sys.stderr)
    return model


# -- output -----------------------------------------------------------------

def _config(command, args) -> dict:
    data = {}
    for k, v in sorted(vars(args).items()):
        if k in _NON_CONFIG or k.startswith("_"):
            continue
        if isinstance(v, np.ndarray):
            v = v.tolist()
        elif isinstance(v, tuple):
            v = list(v)
        data[k] = v
    return {"command": command, "arguments": data, "version": __version__}


def _checksum(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class Output:
    def __init__(self, command, args, default_name):
        self.command = command
        self.args = args
        self.config = _config(command, args)
        self.checksum = _checksum(self.config)
        outdir = Path(args.outdir)
        name = getattr(args, "out", None) or default_name
        self.path = Path(name) if Path(name).is_absolute() else outdir / name
        self.files = {}

    def write_csv(self, columns, rows, footer=None):
        buf = io.StringIO()
        buf.write(f"# epdyn {self.command} manifest-sha256={self.checksum}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        for row in footer or ():
            writer.writerow([fmt(v) for v in row])
        self.path.parent.mkdir(parents=True, exist_ok=True)
        data = buf.getvalue().encode()
        self.path.write_bytes(data)
        self.files[self.path.name] = hashlib.sha256(data).hexdigest()
        return self.path

    def write_text(self, path: Path, text: str):
        data = text.encode()
        path.write_bytes(data)
        self.files[path.name] = hashlib.sha256(data).hexdigest()

    def finish(self):
        manifest = dict(self.config)
        manifest["manifest_sha256"] = self.checksum
        manifest["outdir"] = str(self.path.parent)
        manifest["files"] = dict(sorted(self.files.items()))
        mpath = self.path.with_suffix(".manifest.json")
        mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        print(f"wrote {self.path} ({mpath.name})")
        return mpath


# -- commands ---------------------------------------------------------------

def cmd_spectrum(args):
    from .spectra import discrete_states
    out = Output("spectrum", args, "spectrum.csv")
    rows = []
    for value in parse_range(args.param_range, True):
        for s in discrete_states(_model(args, float(value))):
            rows.append((value, s.energy.real, s.energy.imag, s.lam.real, s.lam.imag, s.classification.value))
    out.write_csv(SPECTRUM_COLUMNS, rows)
    _maybe_plot(out, args, "spectrum")
    out.finish()


def _ep_rows(records):
    return [(r.family.value, r.n, r.g, r.param, r.energy.real, r.energy.imag, r.order,
             "" if r.ep_type is None else r.ep_type.value, r.gap) for r in records]


def cmd_ep_locate(args):
    from .eppoints import locate_ep2
    out = Output("ep locate", args, "ep-locate.csv")
    records = locate_ep2(_model(args, 0.0), parse_range(args.window, False), samples=args.samples)
    out.write_csv(EP_COLUMNS, _ep_rows(records))
    out.finish()


def cmd_ep_closed_form(args):
    from .eppoints import closed_form_eps
    out = Output("ep closed-form", args, "ep-closed-form.csv")
    out.write_csv(EP_COLUMNS, _ep_rows(closed_form_eps(_model(args, 0.0))))
    out.finish()


def cmd_ep_locate3(args):
    from .eppoints import locate_ep3
    if args.family != Family.SIDE_DOT.value:
        raise ValueError("third-order EP search is defined for the hn family")
    out = Output("ep locate3", args, "ep-locate3.csv")
    gw = parse_range(args.g_window, False) if args.g_window else None
    ew = parse_range(args.eps_window, False) if args.eps_window else None
    rec = locate_ep3(args.n, gw, ew)
    out.write_csv(EP_COLUMNS, _ep_rows([rec]))
    out.finish()


def _select_ep(args):
    from .eppoints import closed_form_eps, locate_ep2
    model = _model(args, 0.0)
    if args.window:
        records = locate_ep2(model, parse_range(args.window, False))
    else:
        records = closed_form_eps(model)
    if not records:
        raise ValueError("no exceptional point found")
    if not 0 <= args.index < len(records):
        raise ValueError(f"--index must be in [0, {len(records) - 1}]")
    ep = records[args.index]
    return ep.model, ep


def cmd_ep_puiseux(args):
    from .eppoints import puiseux
    model, ep = _select_ep(args)
    exp = puiseux(model, ep, args.variable, args.order, numeric=args.numeric)
    out = Output("ep puiseux", args, "ep-puiseux.csv")
    rows = [(ep.family.value, ep.n, ep.g, ep.param, ep.energy.real, ep.energy.imag, exp.variable,
             exp.detuning, str(p), complex(c).real, complex(c).imag, exp.source)
            for p, c in sorted(exp.coefficients.items())]
    out.write_csv(PUISEUX_COLUMNS, rows)
    out.finish()


def _time_grid(args):
    from .dynamics import linear_grid, log_grid
    grid = args.grid
    if grid == "auto":
        grid = "linear" if args.tmax <= 100 else "log"
    if grid == "linear":
        tmin = args.tmin or 0.0
        return linear_grid(args.tmax, args.dt, tmin)
    tmin = args.tmin or 0.1
    return log_grid(tmin, args.tmax, args.per_decade)


def cmd_survival(args):
    from .dynamics import evaluate_approximant, lattice_survival, spectral_survival
    model = _model(args)
    t = _time_grid(args)
    if args.method == "lattice":
        series = lattice_survival(model, t, args.n_sites, check_norm=False)
    else:
        series = spectral_survival(model, t, method=args.route)
    rows = [(ti, p, series.method, model.family.value, model.g, model.param)
            for ti, p in zip(series.times, series.values)]
    for name in args.approximant or ():
        kw = {}
        if args.anchor is not None:
            kw["anchor_time"] = args.anchor
        approx = evaluate_approximant(name, model, t, **kw)
        rows += [(ti, p, approx.method, model.family.value, model.g, model.param)
                 for ti, p in zip(approx.times, approx.values)]
    out = Output("survival", args, "survival.csv")
    out.write_csv(SURVIVAL_COLUMNS, rows)
    _maybe_plot(out, args, "survival")
    out.finish()


def read_csv(path):
    """Rows of an epdyn CSV as dicts (comment lines skipped)."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [dict(zip(header, row)) for row in reader]


def _series_from_csv(path, method=None):
    from .dynamics import TimeSeries
    header, rows = read_csv(path)
    if header != SURVIVAL_COLUMNS:
        raise ValueError(f"{path} is not a survival CSV")
    methods = [r["method"] for r in rows]
    if method is None:
        method = next((m for m in methods if not m.startswith("approximant")), methods[0])
    sel = [r for r in rows if r["method"] == method]
    if not sel:
        raise ValueError(f"no rows with method {method!r} in {path}")
    first = sel[0]
    family = Family.parse(first["model_family"])
    g, p = float(first["g"]), float(first["param"])
    model = None  # the side-dot site is not part of the survival schema
    if family is Family.QUBIT:
        model = ModelSpec.qubit(g, p)
    elif family is Family.END_DOT:
        model = ModelSpec.end_dot(g, p)
    t = np.array([float(r["t"]) for r in sel])
    v = np.array([float(r["P"]) for r in sel])
    return TimeSeries(t, v, method, model)


def cmd_fit(args):
    from .dynamics import linear_grid, spectral_survival
    from .fitting import HALF_POWERS, fit_powers
    if args.input:
        series = _series_from_csv(args.input, args.method)
    else:
        if args.tmax is None:
            raise ValueError("--tmax is required when fitting without --input")
        model = _model(args)
        series = spectral_survival(model, linear_grid(args.tmax, args.dt))
    window = parse_range(args.window, False) if args.window else None
    if args.basis == "half":
        exponents = HALF_POWERS[:args.terms]
    else:
        exponents = tuple(Fraction(k) for k in range(1, args.terms + 1))
    res = fit_powers(series, window, exponents)
    out = Output("fit", args, "fit.csv")
    rows = [(str(e), c) for e, c in zip(res.exponents, res.coefficients)]
    footer = [("rms", res.rms), ("t_min", res.window[0]), ("t_max", res.window[1]),
              ("condition", res.condition)]
    out.write_csv(FIT_COLUMNS, rows, footer)
    _maybe_plot(out, args, "fit")
    out.finish()


def _sweep_point(job):
    from .eppoints import locate_ep2
    n, g, window, samples = job
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = ModelSpec.side_dot(g, 0.5 * (window[0] + window[1]), n)
    return locate_ep2(model, window, samples=samples)


def cmd_sweep(args):
    from .eppoints import locate_ep3
    from .exceptions import NotFoundError
    if args.family != Family.SIDE_DOT.value:
        raise ValueError("sweep is defined for the hn family")
    gs = parse_range(args.g_range, True)
    window = parse_range(args.eps_window, False)
    jobs = [(args.n, float(g), window, args.samples) for g in gs]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    records = [r for batch in results for r in batch]
    try:
        records.append(locate_ep3(args.n, (float(gs[0]), float(gs[-1])), window))
    except NotFoundError as exc:
        print(f"epdyn: note: {exc}", file=sys.stderr)
    out = Output("sweep", args, "sweep.csv")
    out.write_csv(EP_COLUMNS, _ep_rows(records))
    out.finish()


# -- plot scripts -----------------------------------------------------------

_PLOT_HEAD = '''"""Plot script generated by epdyn; edit freely."""
import csv
import sys

import matplotlib.pyplot as plt

PATH = sys.argv[1] if len(sys.argv) > 1 else {path!r}


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))


data = rows(PATH)
'''

_PLOT_BODY = {
    "survival": '''
SCALE = {scale!r}
fig, ax = plt.subplots()
for method in dict.fromkeys(r["method"] for r in data):
    sel = [r for r in data if r["method"] == method]
    t = [float(r["t"]) for r in sel]
    p = [float(r["P"]) for r in sel]
    style = "--" if method.startswith("approximant") else "-"
    ax.plot(t, p, style, label=method)
if SCALE == "loglog":
    ax.set_xscale("log")
    ax.set_yscale("log")
ax.set_xlabel("t")
ax.set_ylabel("P(t)")
ax.legend()
plt.show()
''',
    "spectrum": '''
fig, ax = plt.subplots()
x = [float(r["param_value"]) for r in data]
y = [float(r["re_E"]) for r in data]
ax.plot(x, y, ".", ms=1)
for edge in (-2.0, 2.0):
    ax.axhline(edge, color="grey", lw=0.8)
ax.set_xlabel("parameter")
ax.set_ylabel("Re E")
plt.show()
''',
    "fit": '''
SERIES = {series!r}
coef = [(float(r["exponent"].split("/")[0]) / (float(r["exponent"].split("/")[1]) if "/" in r["exponent"] else 1.0),
         float(r["coefficient"])) for r in data if r["exponent"] not in ("rms", "t_min", "t_max", "condition")]
info = {{r["exponent"]: float(r["coefficient"]) for r in data if r["exponent"] in ("rms", "t_min", "t_max", "condition")}}


def model(t):
    return 1.0 + sum(c * t ** e for e, c in coef)


fig, ax = plt.subplots()
if SERIES:
    series = [r for r in rows(SERIES) if not r["method"].startswith("approximant")]
    t = [float(r["t"]) for r in series if info["t_min"] <= float(r["t"]) <= info["t_max"]]
    p = [float(r["P"]) for r in series if info["t_min"] <= float(r["t"]) <= info["t_max"]]
    ax.plot(t, [pi - model(ti) for ti, pi in zip(t, p)])
    ax.set_ylabel("P(t) - fit")
else:
    n = 400
    t = [info["t_min"] + (info["t_max"] - info["t_min"]) * k / n for k in range(n + 1)]
    ax.plot(t, [model(ti) for ti in t])
    ax.set_ylabel("fitted P(t)")
ax.axhline(0.0, color="grey", lw=0.8)
ax.set_xlabel("t")
ax.set_title("rms = %.3g" % info["rms"])
plt.show()
''',
    "ep": '''
fig, ax = plt.subplots()
for kind in dict.fromkeys(r["type"] for r in data):
    sel = [r for r in data if r["type"] == kind]
    ax.plot([float(r["param"]) for r in sel], [float(r["re_E"]) for r in sel], "o", label=f"type {{kind}}")
ax.set_xlabel("parameter")
ax.set_ylabel("Re E at EP")
ax.legend()
plt.show()
''',
}


def detect_schema(header) -> str:
    if header == SURVIVAL_COLUMNS:
        return "survival"
    if header == SPECTRUM_COLUMNS:
        return "spectrum"
    if header == FIT_COLUMNS:
        return "fit"
    if header == EP_COLUMNS:
        return "ep"
    raise ValueError(f"unrecognised CSV schema: {header}")


def emit_plot_script(csv_path, scale="auto", series=None, out=None) -> str:
    """Standalone matplotlib script for an epdyn CSV; returns the script text.

    Survival CSVs default to log-log axes unless every time is below 100;
    spectrum CSVs get band-edge guides at +-2; fit CSVs plot residuals
    against ``series`` (a survival CSV) when given.
    """
    header, rows = read_csv(csv_path)
    schema = detect_schema(header)
    if scale == "auto" and schema == "survival":
        tmax = max(float(r["t"]) for r in rows)
        scale = "linear" if tmax <= 100 else "loglog"
    text = _PLOT_HEAD.format(path=str(csv_path)) + _PLOT_BODY[schema].format(
        scale=scale, series=None if series is None else str(series))
    if out is not None:
        Path(out).write_text(text)
    return text


def _maybe_plot(out: Output, args, schema):
    if not getattr(args, "plot_script", False):
        return
    scale = "auto"
    series = getattr(args, "input", None) if schema == "fit" else None
    text = emit_plot_script(out.path, scale=scale, series=series)
    out.write_text(out.path.with_suffix(".plot.py"), text)


def cmd_plot(args):
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".plot.py")
    emit_plot_script(args.input, args.scale, args.series, out)
    print(f"wrote {out}")


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epdyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"epdyn {__version__}")
    parser.add_argument("--outdir", default=".", help="directory for CSV and manifest files")
    parser.add_argument("--manifest", help="re-execute the run recorded in a manifest file")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("spectrum", help="discrete spectrum over a parameter range")
    _add_model_flags(p, needs_param=False)
    p.add_argument("--param-range", required=True, help="start:stop:step of V or eps_d")
    p.add_argument("--out")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(handler=cmd_spectrum)

    ep = sub.add_parser("ep", help="exceptional points").add_subparsers(dest="ep_command", required=True)
    p = ep.add_parser("locate", help="second-order EPs in a parameter window")
    _add_model_flags(p, needs_param=False)
    p.add_argument("--window", required=True, help="lo:hi of V or eps_d")
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_ep_locate)

    p = ep.add_parser("closed-form", help="closed-form EPs (hq, hd)")
    _add_model_flags(p, needs_param=False)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_ep_closed_form)

    p = ep.add_parser("locate3", help="third-order EP of the side dot")
    p.add_argument("--family", default="hn", choices=["hn"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g-window")
    p.add_argument("--eps-window")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_ep_locate3)

    p = ep.add_parser("puiseux", help="Puiseux expansion at an EP")
    _add_model_flags(p, needs_param=False)
    p.add_argument("--window", help="locate EPs in lo:hi instead of using closed forms")
    p.add_argument("--index", type=int, default=0, help="which EP (sorted by parameter, energy)")
    p.add_argument("--variable", choices=["E", "lambda", "norm"], default="E")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--numeric", action="store_true", help="fit coefficients even where closed forms exist")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_ep_puiseux)

    p = sub.add_parser("survival", help="survival probability with approximant overlays")
    _add_model_flags(p)
    p.add_argument("--method", choices=["spectral", "lattice"], default="spectral")
    p.add_argument("--route", choices=["auto", "real_axis", "steepest_descent"], default="auto")
    p.add_argument("--approximant", action="append", help="approximant form (repeatable)")
    p.add_argument("--anchor", type=float, help="anchor time for t**-3 law constants")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--tmin", type=float)
    p.add_argument("--grid", choices=["auto", "linear", "log"], default="auto")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--per-decade", type=int, default=20)
    p.add_argument("--n-sites", type=int)
    p.add_argument("--out")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(handler=cmd_survival)

    p = sub.add_parser("fit", help="power-law fit of a survival series")
    p.add_argument("--input", help="survival CSV to fit (otherwise computed from model flags)")
    p.add_argument("--method", help="which method rows of the input to fit")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--g", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", "--V", "--param", dest="param", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--window", help="lo:hi fit window (default: whole series)")
    p.add_argument("--basis", choices=["half", "integer"], default="half")
    p.add_argument("--terms", type=int, default=6)
    p.add_argument("--out")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("sweep", help="(g, eps_d) sweep of EP2As and the EP3 they form")
    p.add_argument("--family", default="hn", choices=["hn"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g-range", required=True, help="start:stop:step")
    p.add_argument("--eps-window", required=True, help="lo:hi")
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("plot", help="emit a plotting script for an epdyn CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--scale", choices=["auto", "linear", "loglog"], default="auto")
    p.add_argument("--series", help="survival CSV for fit residuals")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_plot)
    return parser


def _command_name(args):
    return args.command if args.command != "ep" else f"ep {args.ep_command}"


def _from_manifest(path, outdir):
    manifest = json.loads(Path(path).read_text())
    words = manifest["command"].split()
    ns = argparse.Namespace(**manifest["arguments"])
    ns.command = words[0]
    if words[0] == "ep":
        ns.ep_command = words[1]
    ns.outdir = outdir if outdir is not None else manifest.get("outdir", ".")
    ns.manifest = None
    handler = _HANDLERS[manifest["command"]]
    ns.handler = handler
    return ns


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "ep locate": cmd_ep_locate,
    "ep closed-form": cmd_ep_closed_form,
    "ep locate3": cmd_ep_locate3,
    "ep puiseux": cmd_ep_puiseux,
    "survival": cmd_survival,
    "fit": cmd_fit,
    "sweep": cmd_sweep,
}


_RANGE_FLAGS = ("--window", "--param-range", "--g-range", "--g-window", "--eps-window")
_GLOBAL_FLAGS = ("--outdir", "--manifest")


def _normalise_argv(argv):
    # argparse reads "-2:-1.5" as an option, so range values are glued to
    # their flag; global flags may appear after the subcommand
    head, out = [], []
    it = iter(argv)
    for tok in it:
        name = tok.split("=", 1)[0]
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        elif name in _GLOBAL_FLAGS:
            nxt = None if "=" in tok else next(it, None)
            head.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return head + out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_normalise_argv(argv))
    try:
        if args.manifest:
            outdir = args.outdir if args.outdir != "." else None
            args = _from_manifest(args.manifest, outdir)
        elif args.command is None:
            parser.print_usage(sys.stderr)
            print("epdyn: error: a command is required", file=sys.stderr)
            return 2
        os.makedirs(args.outdir, exist_ok=True)
        args.handler(args)
    except (EPDynError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"epdyn: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
