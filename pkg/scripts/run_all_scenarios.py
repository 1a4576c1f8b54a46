"""Run every registered scenario with default settings and print verdicts and timings.

    python scripts/run_all_scenarios.py --out opdyn-out --seed 0
"""

import argparse
import time

from opdyn.config import ScenarioConfig
from opdyn.report import emit_report, run_scenario
from opdyn.scenarios import REGISTRY


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="opdyn-out")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in REGISTRY:
        t0 = time.perf_counter()
        report = run_scenario(ScenarioConfig(scenario=name), args.seed)
        emit_report(report, args.out)
        dt = time.perf_counter() - t0
        print(f"{name:8s} {report.verdict:13s} {dt:6.2f}s")
        for p in report.probes:
            print(f"    {p.probe:28s} {p.verdict}")
        for f in report.failures:
            print(f"    {f['probe']:28s} FAILED {f['error']}: {f['message']}")


if __name__ == "__main__":
    main()
