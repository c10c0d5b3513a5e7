"""Run the harness, then round-trip its report through JSON and CSV."""

import dataclasses

from hpcgblas import BenchConfig, Report, run_benchmark
from hpcgblas.bench import report_to_csv, runs_from_csv

report = run_benchmark(BenchConfig(16, 16, 16, levels=4, fixed_iterations=20, runs=3))
print("symmetry:", report.symmetry)
print(f"setup {report.setup_seconds:.3f}s, mean solve {report.mean_solve_seconds:.3f}s,"
      f" MG share {report.mg_share:.1%}")
for share in report.level_shares():
    print("  ", share)

assert Report.from_json(report.to_json()) == report
runs = runs_from_csv(report_to_csv(report))
assert runs == [dataclasses.replace(r, residual_history=[]) for r in report.runs]
print("JSON and CSV round trips are lossless")
