"""Benchmark harness: symmetry test, timed solves and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import dot, mxv, set_num_threads, vector
from .cg import CGConfig, cg_solve
from .multigrid import KernelTimer, mg_vcycle
from .problem import GridDims, build_hierarchy, build_rhs
from .smoother import SmootherConfig, rbgs_symmetric

SCHEMA_VERSION = 1


class SymmetryError(RuntimeError):
    def __init__(self, report):
        super().__init__("symmetry test failed: "
                         f"matrix_ok={report.symmetry.matrix_ok} "
                         f"preconditioner_ok={report.symmetry.preconditioner_ok}")
        self.report = report


@dataclass
class BenchConfig:
    nx: int
    ny: int
    nz: int
    levels: int = 4
    sweeps: int = 1
    max_iters: int = 500
    rtol: float = 1e-6
    fixed_iterations: int | None = None
    runs: int = 10
    seed: int = 0
    preconditioner: bool = True
    threads: int = 1
    skip_symmetry: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def dims(self):
        return GridDims(self.nx, self.ny, self.nz)


@dataclass
class SymmetryVerdict:
    matrix_ok: bool
    preconditioner_ok: bool
    matrix_gap: float
    preconditioner_gap: float
    tolerance: float

    @property
    def passed(self):
        return self.matrix_ok and self.preconditioner_ok


@dataclass
class LevelTiming:
    level: int
    smoother_seconds: float
    transfer_seconds: float


@dataclass
class RunRecord:
    run: int
    solve_seconds: float
    mg_seconds: float
    iterations: int
    final_residual: float
    converged: bool
    levels: list
    residual_history: list = field(default_factory=list)


@dataclass
class Report:
    config: dict
    setup_seconds: float
    symmetry: SymmetryVerdict | None
    runs: list
    schema_version: int = SCHEMA_VERSION

    # aggregates are derived, never stored independently
    @property
    def mean_solve_seconds(self):
        return sum(r.solve_seconds for r in self.runs) / len(self.runs)

    @property
    def mean_mg_seconds(self):
        return sum(r.mg_seconds for r in self.runs) / len(self.runs)

    @property
    def mg_share(self):
        total = sum(r.solve_seconds for r in self.runs)
        return sum(r.mg_seconds for r in self.runs) / total if total > 0 else 0.0

    def level_shares(self):
        """Mean per-level ``(smoother_share, transfer_share)`` of solve time."""
        out = []
        for lv in range(len(self.runs[0].levels)):
            sm = tr = 0.0
            for run in self.runs:
                t = run.levels[lv]
                sm += t.smoother_seconds / run.solve_seconds
                tr += t.transfer_seconds / run.solve_seconds
            out.append({"level": lv, "smoother_share": sm / len(self.runs),
                        "transfer_share": tr / len(self.runs)})
        return out

    def to_dict(self):
        d = asdict(self)
        d["aggregate"] = {
            "mean_solve_seconds": self.mean_solve_seconds,
            "mean_mg_seconds": self.mean_mg_seconds,
            "mg_share": self.mg_share,
            "levels": self.level_shares(),
        }
        return d

    @classmethod
    def from_dict(cls, d):
        sym = d.get("symmetry")
        runs = [RunRecord(**{**r, "levels": [LevelTiming(**t) for t in r["levels"]]})
                for r in d["runs"]]
        return cls(config=d["config"], setup_seconds=d["setup_seconds"],
                   symmetry=SymmetryVerdict(**sym) if sym is not None else None,
                   runs=runs, schema_version=d.get("schema_version", SCHEMA_VERSION))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


CSV_FIELDS = ["run", "level", "kernel", "seconds", "solve_seconds", "mg_seconds",
              "iterations", "final_residual", "converged"]


def report_to_csv(report: Report) -> str:
    """One row per ``(run, level, kernel)``; run-level fields are repeated."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for run in report.runs:
        for t in run.levels:
            for kernel, secs in (("smoother", t.smoother_seconds),
                                 ("transfer", t.transfer_seconds)):
                w.writerow([run.run, t.level, kernel, repr(secs), repr(run.solve_seconds),
                            repr(run.mg_seconds), run.iterations, repr(run.final_residual),
                            int(run.converged)])
    return buf.getvalue()


def runs_from_csv(text: str) -> list:
    """Rebuild the run records (without residual histories) from CSV."""
    runs = {}
    for row in csv.DictReader(io.StringIO(text)):
        k = int(row["run"])
        if k not in runs:
            runs[k] = RunRecord(run=k, solve_seconds=float(row["solve_seconds"]),
                                mg_seconds=float(row["mg_seconds"]),
                                iterations=int(row["iterations"]),
                                final_residual=float(row["final_residual"]),
                                converged=bool(int(row["converged"])), levels=[])
        lv = int(row["level"])
        levels = runs[k].levels
        while len(levels) <= lv:
            levels.append(LevelTiming(len(levels), 0.0, 0.0))
        if row["kernel"] == "smoother":
            levels[lv].smoother_seconds = float(row["seconds"])
        else:
            levels[lv].transfer_seconds = float(row["seconds"])
    return [runs[k] for k in sorted(runs)]


def random_vectors(n, seed):
    """Two vectors uniform on [-1, 1) from numpy's PCG64 generator."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n)


def symmetry_test(hierarchy, seed: int = 0, smoother_cfg: SmootherConfig | None = None,
                  smoother=rbgs_symmetric) -> SymmetryVerdict:
    """Check ``x.Ay == y.Ax`` and the same for one V-cycle from ``z = 0``.

    The tolerance is ``1e-8 * |x| |y| * 26 * sqrt(n)``.
    """
    A = hierarchy.A
    n = A.nrows
    x, y = random_vectors(n, seed)
    tol = 1e-8 * math.sqrt(dot(x, x)) * math.sqrt(dot(y, y)) * 26.0 * math.sqrt(n)

    ax, ay = vector(n), vector(n)
    mxv(ax, None, A, x)
    mxv(ay, None, A, y)
    gap_a = abs(dot(x, ay) - dot(y, ax))

    mx, my = vector(n), vector(n)
    mg_vcycle(hierarchy, mx, x, smoother_cfg, smoother=smoother)
    mg_vcycle(hierarchy, my, y, smoother_cfg, smoother=smoother)
    gap_m = abs(dot(x, my) - dot(y, mx))
    return SymmetryVerdict(gap_a <= tol, gap_m <= tol, gap_a, gap_m, tol)


def run_benchmark(cfg: BenchConfig, hierarchy=None) -> Report:
    """Build the problem once, check symmetry, then time ``cfg.runs`` solves.

    Raises
    ------
    SymmetryError
        If the symmetry test fails (unless ``cfg.skip_symmetry``); the
        partial report is attached.
    """
    set_num_threads(cfg.threads)
    t0 = time.perf_counter()
    if hierarchy is None:
        hierarchy = build_hierarchy(cfg.dims, cfg.levels)
    setup = time.perf_counter() - t0

    scfg = SmootherConfig(cfg.sweeps)
    sym = None if cfg.skip_symmetry else symmetry_test(hierarchy, cfg.seed, scfg)
    report = Report(config=asdict(cfg), setup_seconds=setup, symmetry=sym, runs=[])
    if sym is not None and not sym.passed:
        raise SymmetryError(report)

    ccfg = CGConfig(max_iters=cfg.max_iters, rtol=cfg.rtol,
                    use_preconditioner=cfg.preconditioner,
                    fixed_iterations=cfg.fixed_iterations)
    b = build_rhs(cfg.dims)
    x0 = vector(b.size)
    depth = hierarchy.num_levels
    for k in range(cfg.runs):
        timer = KernelTimer()
        t0 = time.perf_counter()
        res = cg_solve(hierarchy, b, x0, ccfg, scfg, timer)
        solve = time.perf_counter() - t0
        levels = [LevelTiming(lv, timer.get("smoother", lv), timer.get("transfer", lv))
                  for lv in range(depth)]
        report.runs.append(RunRecord(run=k, solve_seconds=solve, mg_seconds=timer.get("mg"),
                                     iterations=res.iterations,
                                     final_residual=res.final_residual,
                                     converged=res.converged, levels=levels,
                                     residual_history=list(res.residual_history)))
    return report
