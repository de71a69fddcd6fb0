"""``modal-barrier`` command line interface.

Every subcommand reads an edge list, writes CSV (stdout or ``--output``) and,
when writing to a file, a ``<output>.json`` sidecar with the package version
and the fully resolved configuration.  Exit codes: 0 success, 1 invalid
input, 2 file I/O failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .distributed import run_distributed
from .dynamics import (
    compare_kappa,
    default_gamma,
    simulate_diffusion,
    threshold_crossing_time,
)
from .epidemic import EpidemicParams, monte_carlo_epidemic
from .errors import ModalBarrierError, ValidationError
from .graph import Graph, read_edge_list, read_partition
from .metrics import check_prop1, check_prop2, check_prop3
from .resistance import (
    DEFAULT_EPSILON,
    DEFAULT_EPSILON_B,
    barrier_weights,
    compute_resistance,
    shuffle_weights,
)
from .spectral import detect_q, gap_scores, spectrum_of

THREADS_ENV = "MODAL_BARRIER_THREADS"


def fmt(x) -> str:
    """Shortest round-trip text for a float; integers stay integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def _csv(header, rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return out.getvalue()


def _edge_rows(g: Graph, values):
    return [(str(g.label(int(i))), str(g.label(int(j))), float(v))
            for i, j, v in zip(g.tails, g.heads, values)]


def read_edge_values(path, g: Graph, column: str = "weight") -> np.ndarray:
    """Read an ``edge_tail,edge_head,<column>`` CSV into canonical edge order."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 3:
        raise ValidationError(f"{path}: expected header edge_tail,edge_head,{column}", "cli-io")
    index = {(int(i), int(j)): k for k, (i, j) in enumerate(zip(g.tails, g.heads))}
    values = np.full(g.m, np.nan)
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValidationError(f"{path} line {lineno}: expected 3 fields", "cli-io")
        try:
            a, b = g.index_of(row[0]), g.index_of(row[1])
            v = float(row[2])
        except (ValidationError, ValueError) as exc:
            raise ValidationError(f"{path} line {lineno}: {exc}", "cli-io") from None
        k = index.get((min(a, b), max(a, b)))
        if k is None:
            raise ValidationError(f"{path} line {lineno}: ({row[0]}, {row[1]}) is not an edge", "cli-io")
        values[k] = v
    if np.isnan(values).any():
        raise ValidationError(f"{path}: {int(np.isnan(values).sum())} edges have no value", "cli-io")
    return values


# -- subcommands ------------------------------------------------------------


def cmd_spectrum(args, g):
    s = spectrum_of(g, args.eigensolver)
    return _csv(["index", "eigenvalue"], enumerate(s.eigenvalues.tolist())), {}


def cmd_detect_q(args, g):
    s = spectrum_of(g, args.eigensolver)
    q = detect_q(s, args.max_q)
    scores = gap_scores(s, args.max_q)
    return _csv(["q"], [(q,)]), {"gap_scores": [None if math.isnan(x) else x for x in scores]}


def _resistance(args, g):
    extra = {}
    if args.method == "distributed":
        r, stats = run_distributed(g, args.epsilon, args.p, args.prune, args.paper_literal)
        extra["stats"] = stats.as_dict()
    else:
        r = compute_resistance(g, args.method, args.q, args.epsilon, args.p, args.paper_literal)
    return np.asarray(r, dtype=float), extra


def cmd_resistance(args, g):
    r, extra = _resistance(args, g)
    return _csv(["edge_tail", "edge_head", "resistance"], _edge_rows(g, r)), extra


def _barrier(args, g):
    if args.resistance_file:
        r = read_edge_values(args.resistance_file, g, "resistance")
    else:
        r, _ = _resistance(args, g)
    return np.asarray(barrier_weights(r, args.epsilon_b))


def cmd_weights(args, g):
    if args.mode == "unit":
        w = np.ones(g.m)
    else:
        w = _barrier(args, g)
        if args.mode == "shuffled":
            w = np.asarray(shuffle_weights(w, args.seed))
    return _csv(["edge_tail", "edge_head", "weight"], _edge_rows(g, w)), {}


def _weights_arg(args, g):
    return g.weights if args.weights_file is None else read_edge_values(args.weights_file, g)


def cmd_diffuse(args, g):
    w = _weights_arg(args, g)
    start, target = g.index_of(args.start), g.index_of(args.target)
    run = simulate_diffusion(g, w, start, args.kappa, args.steps, target, keep_trajectory=False)
    gamma = default_gamma(g.n) if args.gamma is None else args.gamma
    t = threshold_crossing_time(run, target, gamma)
    extra = {"kappa": run.kappa, "gamma": gamma, "crossing_time": t}
    return _csv(["step", "x_target"], enumerate(run.target_series.tolist())), extra


def _epidemic_params(args):
    return EpidemicParams(
        pa=args.pa, horizon=args.days, runs=args.runs, seed=args.seed, count=args.count
    )


def _patient_zero(args, g):
    return "random" if args.patient_zero is None else g.index_of(args.patient_zero)


def cmd_epidemic(args, g):
    w = _weights_arg(args, g)
    curve = monte_carlo_epidemic(g, w, _epidemic_params(args), _patient_zero(args, g))
    return _csv(["day", "mean_infected"], enumerate(curve.tolist())), {}


def cmd_verify(args, g):
    p = read_partition(args.partition_file, g)
    g2 = g.unit_weighted() if args.compare_graph is None else read_edge_list(args.compare_graph)
    reports = [check_prop1(g, p), check_prop2(g, p), check_prop3(g, g2, p)]
    rows = [(r.name, r.lhs, r.rhs, r.slack, r.status) for r in reports]
    extra = {"inputs": {r.name: r.inputs for r in reports}}
    return _csv(["proposition", "lhs", "rhs", "slack", "status"], rows), extra


def cmd_compare(args, g):
    wb = _barrier(args, g)
    schemes = {"unit": np.ones(g.m), "barrier": wb, "shuffled": np.asarray(shuffle_weights(wb, args.seed))}
    extra = {}
    if args.kind == "diffusion":
        start, target = g.index_of(args.start), g.index_of(args.target)
        kappa = compare_kappa(g, *schemes.values()) if args.kappa is None else args.kappa
        gamma = default_gamma(g.n) if args.gamma is None else args.gamma
        cols = {}
        for name, w in schemes.items():
            run = simulate_diffusion(g, w, start, kappa, args.steps, target, keep_trajectory=False)
            cols[name] = run.target_series
            extra[f"crossing_time_{name}"] = threshold_crossing_time(run, target, gamma)
        extra.update(kappa=kappa, gamma=gamma)
        label = "step"
    else:
        params = _epidemic_params(args)
        pz = _patient_zero(args, g)
        cols = {name: monte_carlo_epidemic(g, w, params, pz) for name, w in schemes.items()}
        label = "day"
    n = len(cols["unit"])
    rows = ((t, cols["unit"][t], cols["barrier"][t], cols["shuffled"][t]) for t in range(n))
    return _csv([label, "unit", "barrier", "shuffled"], rows), extra


# -- parser -----------------------------------------------------------------


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _pos_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _pos_float(s):
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _nonneg_float(s):
    v = float(s)
    if not v >= 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a non-negative number")
    return v


def _prob(s):
    v = float(s)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _add_resistance_opts(p, methods=("exact", "approx-i", "approx-ii", "distributed")):
    p.add_argument("--method", choices=methods, default="exact")
    p.add_argument("--q", type=_pos_int, default=None, help="modes to aggregate (exact; default: detected)")
    p.add_argument("--epsilon", type=_pos_float, default=DEFAULT_EPSILON)
    p.add_argument("--p", type=_nonneg_int, default=None, help="Neumann truncation order (default ceil(n/2))")
    p.add_argument("--prune", type=_nonneg_float, default=0.0, help="distributed: drop entries below this")
    p.add_argument("--paper-literal", action="store_true",
                   help="use the extra eps factor on the S_ll term (comparison only)")


def _add_barrier_opts(p):
    _add_resistance_opts(p)
    p.add_argument("--resistance-file", help="CSV from the resistance subcommand")
    p.add_argument("--epsilon-b", type=_pos_float, default=DEFAULT_EPSILON_B)
    p.add_argument("--seed", type=int, default=0)


def _add_diffusion_opts(p):
    p.add_argument("--start", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--gamma", type=_nonneg_float, default=None, help="threshold (default 0.5/n)")
    p.add_argument("--kappa", type=_pos_float, default=None, help="step size (default 0.1/max weighted degree)")
    p.add_argument("--steps", type=_nonneg_int, default=10000)


def _add_epidemic_opts(p):
    p.add_argument("--pa", type=_prob, default=0.03)
    p.add_argument("--days", type=_nonneg_int, default=120)
    p.add_argument("--runs", type=_pos_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patient-zero", default=None, help="vertex id (default: random per run)")
    p.add_argument("--count", choices=("infected", "contagious-only"), default="infected")


class _Parser(argparse.ArgumentParser):
    """Argument errors are validation failures: structured message, exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        _fail("cli-io", f"{self.prog}: {message}", 1)
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modal-barrier", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("graph", help="edge list: 'i j' or 'i j w' per line")
        p.add_argument("-o", "--output", help="CSV path (default stdout)")
        p.set_defaults(func=func)
        return p

    for name, func, help in (
        ("spectrum", cmd_spectrum, "Laplacian eigenvalues"),
        ("detect-q", cmd_detect_q, "cluster count from the largest relative eigenvalue gap"),
    ):
        p = add(name, func, help)
        p.add_argument("--eigensolver", choices=("auto", "jacobi", "lapack"), default="auto")
        if name == "detect-q":
            p.add_argument("--max-q", type=_pos_int, default=None)

    _add_resistance_opts(add("resistance", cmd_resistance, "edge resistances"))

    p = add("weights", cmd_weights, "barrier, shuffled or unit edge weights")
    p.add_argument("--mode", choices=("barrier", "shuffled", "unit"), default="barrier")
    _add_barrier_opts(p)

    p = add("diffuse", cmd_diffuse, "diffusion series at a target vertex")
    p.add_argument("--weights-file", help="CSV from the weights subcommand (default: graph weights)")
    _add_diffusion_opts(p)

    p = add("epidemic", cmd_epidemic, "Monte Carlo mean infected count per day")
    p.add_argument("--weights-file", help="CSV from the weights subcommand (default: graph weights)")
    _add_epidemic_opts(p)

    p = add("verify", cmd_verify, "check the spectral bounds for a given partition")
    p.add_argument("--partition-file", required=True, help="'vertex cluster' lines")
    p.add_argument("--compare-graph", help="reweighted copy for the robustness bound (default: unit weights)")

    p = add("compare", cmd_compare, "unit vs barrier vs shuffled side by side")
    p.add_argument("--kind", choices=("diffusion", "epidemic"), required=True)
    _add_barrier_opts(p)
    p.add_argument("--start")
    p.add_argument("--target")
    p.add_argument("--gamma", type=_nonneg_float, default=None)
    p.add_argument("--kappa", type=_pos_float, default=None)
    p.add_argument("--steps", type=_nonneg_int, default=10000)
    p.add_argument("--pa", type=_prob, default=0.03)
    p.add_argument("--days", type=_nonneg_int, default=120)
    p.add_argument("--runs", type=_pos_int, default=1000)
    p.add_argument("--patient-zero", default=None)
    p.add_argument("--count", choices=("infected", "contagious-only"), default="infected")
    return parser


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _fail(module: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"module": module, "error": message}) + "\n")
    return code


def _thread_limit():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
        if n < 1:
            raise ValueError
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer", "cli-io") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compare" and args.kind == "diffusion" and (args.start is None or args.target is None):
        parser.error("compare --kind diffusion needs --start and --target")
    try:
        with _thread_limit():
            g = read_edge_list(args.graph)
            text, extra = args.func(args, g)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            sidecar = {"version": __version__, "config": _config(args), **extra}
            with open(args.output + ".json", "w", encoding="utf-8") as fh:
                json.dump(sidecar, fh, indent=2, sort_keys=True)
                fh.write("\n")
        else:
            sys.stdout.write(text)
    except ModalBarrierError as exc:
        return _fail(exc.module, str(exc), exc.exit_code)
    except OSError as exc:
        return _fail("cli-io", f"{exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
