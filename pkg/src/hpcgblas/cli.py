"""Command-line entry point: ``hpcgblas bench ...`` and ``hpcgblas cost ...``.

Exit codes: 0 success, 1 configuration error, 2 symmetry failure,
3 solver breakdown.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .bench import BenchConfig, SymmetryError, report_to_csv, run_benchmark
from .cg import CGBreakdown
from .cost_model import compare_distributions
from .problem import GridDims

EXIT_OK, EXIT_CONFIG, EXIT_SYMMETRY, EXIT_BREAKDOWN = 0, 1, 2, 3


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments, which is reserved here
    def error(self, message):
        raise _ConfigError(message)


def _add_grid(p):
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--nz", type=int, required=True)


def build_parser():
    parser = _Parser(prog="hpcgblas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="run timed CG + multigrid solves")
    _add_grid(b)
    b.add_argument("--levels", type=int, default=4)
    b.add_argument("--sweeps", type=int, default=1)
    b.add_argument("--max-iters", type=int, default=500)
    b.add_argument("--rtol", type=float, default=1e-6)
    b.add_argument("--fixed-iters", type=int, default=None)
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-precond", action="store_true")
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--skip-symmetry", action="store_true")
    b.add_argument("--format", choices=("json", "csv"), default="json")
    b.add_argument("--output", default=None)

    c = sub.add_parser("cost", help="tabulate the BSP communication model")
    _add_grid(c)
    c.add_argument("--nodes", required=True, help="comma-separated node counts")
    c.add_argument("--format", choices=("table", "csv"), default="table")
    c.add_argument("--output", default=None)
    return parser


COST_FIELDS = ["p", "px", "py", "pz", "computation", "geometric_comm", "geometric_raw",
               "blockcyclic_comm", "twod_comm", "synchronization"]


def cost_rows(dims, nodes):
    rows = []
    for p in nodes:
        cmp_ = compare_distributions(dims, p)
        rows.append({"p": p, "px": cmp_.grid.px, "py": cmp_.grid.py, "pz": cmp_.grid.pz,
                     "computation": cmp_.geometric.computation,
                     "geometric_comm": cmp_.geometric.communication,
                     "geometric_raw": cmp_.geometric.raw_communication,
                     "blockcyclic_comm": cmp_.blockcyclic.communication,
                     "twod_comm": cmp_.twod_communication,
                     "synchronization": cmp_.geometric.synchronization})
    return rows


def _format_cost(rows, fmt):
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.DictWriter(buf, COST_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()
    buf.write(f"{'p':>5} {'grid':>10} {'comp':>10} {'geometric':>10} "
              f"{'blockcyc':>10} {'2d':>10} {'sync':>4}\n")
    for r in rows:
        grid = f"{r['px']}x{r['py']}x{r['pz']}"
        buf.write(f"{r['p']:>5} {grid:>10} {r['computation']:>10.1f} "
                  f"{r['geometric_comm']:>10.0f} {r['blockcyclic_comm']:>10.0f} "
                  f"{r['twod_comm']:>10.1f} {r['synchronization']:>4}\n")
    return buf.getvalue()


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "cost":
            nodes = [int(t) for t in args.nodes.split(",") if t.strip()]
            rows = cost_rows(GridDims(args.nx, args.ny, args.nz), nodes)
            _emit(_format_cost(rows, args.format), args.output)
            return EXIT_OK
        cfg = BenchConfig(nx=args.nx, ny=args.ny, nz=args.nz, levels=args.levels,
                          sweeps=args.sweeps, max_iters=args.max_iters, rtol=args.rtol,
                          fixed_iterations=args.fixed_iters, runs=args.runs, seed=args.seed,
                          preconditioner=not args.no_precond, threads=args.threads,
                          skip_symmetry=args.skip_symmetry)
        report = run_benchmark(cfg)
    except (_ConfigError, ValueError) as exc:
        print(f"hpcgblas: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SymmetryError as exc:
        print(f"hpcgblas: {exc}", file=sys.stderr)
        return EXIT_SYMMETRY
    except CGBreakdown as exc:
        print(f"hpcgblas: solver breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    text = report.to_json(indent=2) + "\n" if args.format == "json" else report_to_csv(report)
    _emit(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
