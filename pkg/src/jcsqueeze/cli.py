"""Command-line entry point.

Settings resolve as: built-in defaults < ``--config`` file (``key=value``
lines, keys spelled like the long flags) < explicit command-line flags.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .dynamics import AtomMixture, ModelParams, lifted_coefficients, transition_series
from .entanglement import dem_exact_from_amplitudes, dem_paper, exact_amplitudes
from .errors import ConsistencyError, NumericDomainError, TruncationError
from .photon_stats import SqueezedField, photon_distribution
from .results_io import (
    atomic_output,
    dem_result_to_dict,
    dumps_json,
    write_surface_matrix,
    write_sweep_csv,
    write_sweep_json,
    write_table,
)
from .sweep import SweepSpec, TimeSpec, fig3_spec, revival_time, run_sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_TRUNCATION = 4

WORKERS_ENV = "JCSQUEEZE_WORKERS"
SQRT5 = math.sqrt(5.0)


class UsageError(Exception):
    pass


def _number(text):
    """Real or complex number (``2.2``, ``1+0.5j``); returns float when purely real."""
    try:
        z = complex(str(text).replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return z.real if z.imag == 0 else z


def _grid(text):
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step))
            return tuple(np.round(start + step * np.arange(n + 1), 12))
        return tuple(float(p) for p in text.split(",") if p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _time(text):
    if str(text).strip().lower() in ("revival", "tr"):
        return "revival"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"time must be a number or 'revival', got {text!r}") from None


def _bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model and numerics")
    g.add_argument("--theta", type=_number, default=SQRT5, help="coherent amplitude (default sqrt 5)")
    g.add_argument("--r", type=float, default=0.0, help="squeeze magnitude")
    g.add_argument("--squeeze-phase", type=float, default=0.0)
    g.add_argument("--lambda1", type=float, default=0.5, help="initial excited-state weight")
    g.add_argument("--g", type=float, default=1.0, help="coupling constant")
    g.add_argument("--omega0", type=float, default=1.0)
    g.add_argument("--base", choices=["e", "2"], default="e", help="logarithm base")
    g.add_argument("--tail-eps", type=float, default=1e-12)
    g.add_argument("--max-cutoff", type=int, default=16384)
    g.add_argument("--compensated", type=_bool, nargs="?", const=True, default=False,
                   help="use compensated summation for c(t), s(t)")
    o = p.add_argument_group("output")
    o.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    o.add_argument("--format", choices=["csv", "json"], default="csv")
    o.add_argument("--workers", type=int, default=int(os.environ.get(WORKERS_ENV, "1") or 1))
    o.add_argument("--config", default=None, help="key=value file of flag defaults")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="jcsqueeze",
        description="Jaynes-Cummings model with a squeezed field: photon statistics, "
                    "transition probabilities and atom-field mutual entropy.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    add("pn", "photon-number distribution as CSV n,p")

    p = add("ct", "c(t), s(t) over a uniform time grid as CSV t,c,s")
    p.add_argument("--t-max", type=float, default=25.0)
    p.add_argument("--steps", type=int, default=500)

    p = add("dem", "DEM at a single point as JSON")
    p.add_argument("--t", type=_time, default="revival")
    p.add_argument("--mode", choices=["paper", "exact", "both"], default="both")

    p = add("compare", "paper vs exact DEM over time as CSV t,dem_paper,dem_exact,gap")
    p.add_argument("--t-max", type=float, default=25.0)
    p.add_argument("--steps", type=int, default=500)

    for name, text in (("sweep", "DEM over a (lambda1, r, t) grid"),
                       ("fig3", "DEM surface over lambda1 in [0,1], r in [0,3] at the revival time")):
        p = add(name, text)
        p.add_argument("--mode", choices=["paper", "exact", "both"], default="paper")
        p.add_argument("--matrix", default=None, help="also write a gnuplot nonuniform matrix here")
        if name == "sweep":
            p.add_argument("--lambda1-grid", type=_grid, default=_grid("0:1:0.05"))
            p.add_argument("--r-grid", type=_grid, default=_grid("0:3:0.25"))
            p.add_argument("--t", type=_time, default="revival")
            p.add_argument("--t-max", type=float, default=None,
                           help="use a time grid on [0, t-max] instead of --t")
            p.add_argument("--steps", type=int, default=500)

    p = add("fig1", "c(t) for r = 0, 1, 2 as CSV t,c_r0,c_r1,c_r2")
    p.add_argument("--t-max", type=float, default=25.0)
    p.add_argument("--steps", type=int, default=500)

    p = add("fig2", "P(n) for r = 0, 1, 2 as CSV n,p_r0,p_r1,p_r2")
    p.add_argument("--n-max", type=int, default=40)

    parser.subparsers = sub
    return parser


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = read_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except UsageError as exc:
            parser.error(str(exc))
        subparser = parser.subparsers.choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        cfg.pop("config", None)
        subparser.set_defaults(**cfg)
        args = parser.parse_args(argv)
    _validate(parser, args)
    return args


def _validate(parser, args):
    theta = complex(args.theta)
    checks = [
        (math.isfinite(theta.real) and math.isfinite(theta.imag), "--theta must be finite"),
        (math.isfinite(args.r) and args.r >= 0, "--r must be >= 0"),
        (math.isfinite(args.squeeze_phase), "--squeeze-phase must be finite"),
        (0.0 <= args.lambda1 <= 1.0, "--lambda1 must lie in [0, 1]"),
        (math.isfinite(args.g) and args.g > 0, "--g must be > 0"),
        (math.isfinite(args.omega0), "--omega0 must be finite"),
        (0.0 < args.tail_eps < 1.0, "--tail-eps must lie in (0, 1)"),
        (args.max_cutoff >= 16, "--max-cutoff must be >= 16"),
        (args.workers >= 1, "--workers must be >= 1"),
    ]
    if hasattr(args, "steps"):
        checks.append((args.steps >= 1, "--steps must be >= 1"))
    if getattr(args, "t_max", None) is not None:
        checks.append((math.isfinite(args.t_max) and args.t_max > 0, "--t-max must be > 0"))
    t = getattr(args, "t", "revival")
    if t != "revival":
        checks.append((math.isfinite(t) and t >= 0, "--t must be >= 0"))
    elif hasattr(args, "t"):
        checks.append((abs(theta) > 0, "revival time needs --theta != 0"))
    for name in ("lambda1_grid", "r_grid"):
        grid = getattr(args, name, None)
        if grid is not None:
            lo, hi = (0.0, 1.0) if name == "lambda1_grid" else (0.0, math.inf)
            ok = len(grid) > 0 and min(grid) >= lo and max(grid) <= hi and all(
                b > a for a, b in zip(grid, grid[1:]))
            checks.append((ok, f"--{name.replace('_', '-')} must be ascending within [{lo}, {hi}]"))
    if getattr(args, "n_max", 0) < 0:
        checks.append((False, "--n-max must be >= 0"))
    for ok, msg in checks:
        if not ok:
            parser.error(msg)


def _field(args, r=None):
    return SqueezedField(args.theta, args.r if r is None else r, args.squeeze_phase)


def _params(args):
    return ModelParams(args.g, args.omega0)


def _time_grid(args):
    return np.linspace(0.0, args.t_max, args.steps + 1)


def cmd_pn(args):
    dist = photon_distribution(_field(args), args.tail_eps, args.max_cutoff)
    with atomic_output(args.output) as out:
        if args.format == "json":
            out.write(dumps_json({"n": list(range(len(dist.probs))), "p": list(dist.probs),
                                  "tail_mass": dist.tail_mass, "cutoff": dist.cutoff}))
        else:
            write_table(out, ["n", "p"], [range(len(dist.probs)), dist.probs])


def cmd_ct(args):
    dist = photon_distribution(_field(args), args.tail_eps, args.max_cutoff)
    times = _time_grid(args)
    if args.compensated:
        from .dynamics import transition_c, transition_s
        c = np.array([transition_c(dist, _params(args), t, True) for t in times])
        s = np.array([transition_s(dist, _params(args), t, True) for t in times])
    else:
        c, s = transition_series(dist, _params(args), times)
    with atomic_output(args.output) as out:
        write_table(out, ["t", "c", "s"], [times, c, s])


def cmd_dem(args):
    fld = _field(args)
    params = _params(args)
    t = revival_time(args.theta, args.g) if args.t == "revival" else args.t
    dist = photon_distribution(fld, args.tail_eps, args.max_cutoff)
    atom = AtomMixture.from_excited(args.lambda1)
    results = []
    if args.mode in ("paper", "both"):
        results.append(dem_paper(lifted_coefficients(dist, atom, params, t), args.base))
    if args.mode in ("exact", "both"):
        amps = exact_amplitudes(fld, dist.cutoff, args.max_cutoff)
        results.append(dem_exact_from_amplitudes(amps, atom, params, t, args.base))
    theta = complex(args.theta)
    doc = {
        "inputs": {"theta_real": theta.real, "theta_imag": theta.imag, "r": args.r,
                   "squeeze_phase": args.squeeze_phase, "lambda1": args.lambda1,
                   "g": args.g, "omega0": args.omega0, "t": t,
                   "tail_mass": dist.tail_mass, "cutoff": dist.cutoff},
        "results": [dem_result_to_dict(r) for r in results],
    }
    with atomic_output(args.output) as out:
        out.write(dumps_json(doc))


def compare_series(fld, atom, params, times, base="e", tail_eps=1e-12, max_cutoff=16384):
    """Paper-mode and exact DEM at each time; returns ``(paper, exact)`` arrays."""
    dist = photon_distribution(fld, tail_eps, max_cutoff)
    amps = exact_amplitudes(fld, dist.cutoff, max_cutoff)
    paper = np.array([dem_paper(lifted_coefficients(dist, atom, params, float(t)), base).dem
                      for t in times])
    exact = np.array([dem_exact_from_amplitudes(amps, atom, params, float(t), base).dem
                      for t in times])
    return paper, exact


def cmd_compare(args):
    times = _time_grid(args)
    paper, exact = compare_series(_field(args), AtomMixture.from_excited(args.lambda1),
                                  _params(args), times, args.base, args.tail_eps, args.max_cutoff)
    with atomic_output(args.output) as out:
        write_table(out, ["t", "dem_paper", "dem_exact", "gap"], [times, paper, exact, paper - exact])


def _emit_sweep(args, spec):
    result = run_sweep(spec, workers=args.workers)
    with atomic_output(args.output) as out:
        if args.format == "json":
            write_sweep_json(out, result)
        else:
            write_sweep_csv(out, result)
    if args.matrix:
        with atomic_output(args.matrix) as out:
            write_surface_matrix(out, result, spec.modes[0])
    for row in result.failed:
        print(f"warning: lambda1={row.lambda1} r={row.r} t={row.t}: {row.error}", file=sys.stderr)


def _common_spec_kw(args):
    return dict(theta=args.theta, squeeze_phase=args.squeeze_phase, params=_params(args),
                mode=args.mode, tail_eps=args.tail_eps, max_cutoff=args.max_cutoff, base=args.base)


def cmd_sweep(args):
    if args.t_max is not None:
        time = TimeSpec("grid", t_max=args.t_max, steps=args.steps)
    elif args.t == "revival":
        time = TimeSpec("revival")
    else:
        time = TimeSpec("fixed", t=args.t)
    spec = SweepSpec(args.lambda1_grid, args.r_grid, time, **_common_spec_kw(args))
    _emit_sweep(args, spec)


def cmd_fig3(args):
    kw = _common_spec_kw(args)
    spec = fig3_spec(kw.pop("mode"), kw.pop("theta"), kw.pop("params"), **kw)
    _emit_sweep(args, spec)


def cmd_fig1(args):
    times = _time_grid(args)
    cols = [times]
    for r in (0.0, 1.0, 2.0):
        dist = photon_distribution(_field(args, r), args.tail_eps, args.max_cutoff)
        cols.append(transition_series(dist, _params(args), times)[0])
    with atomic_output(args.output) as out:
        write_table(out, ["t", "c_r0", "c_r1", "c_r2"], cols)


def cmd_fig2(args):
    n = np.arange(args.n_max + 1)
    cols = [n]
    for r in (0.0, 1.0, 2.0):
        p = photon_distribution(_field(args, r), args.tail_eps, args.max_cutoff).probs
        padded = np.zeros(len(n))
        k = min(len(p), len(n))
        padded[:k] = p[:k]
        cols.append(padded)
    with atomic_output(args.output) as out:
        write_table(out, ["n", "p_r0", "p_r1", "p_r2"], cols)


COMMANDS = {
    "pn": cmd_pn, "ct": cmd_ct, "dem": cmd_dem, "compare": cmd_compare,
    "sweep": cmd_sweep, "fig1": cmd_fig1, "fig2": cmd_fig2, "fig3": cmd_fig3,
}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (NumericDomainError, ConsistencyError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
