"""Command line: ``opdyn run``, ``opdyn list`` and ``opdyn selftest``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import elementary as el
from . import opmodel as om
from .config import ScenarioConfig, apply_overrides, load_config, resolve_seed
from .errors import OpdynError
from .report import emit_report, run_scenario
from .scenarios import REGISTRY


def _cmd_run(args) -> int:
    cfg = ScenarioConfig()
    if args.config:
        load_config(args.config, cfg)
    apply_overrides(cfg, args.set or [])
    cfg.scenario = args.scenario
    seed = resolve_seed(args.seed, cfg)
    out = args.out or cfg.out
    report = run_scenario(cfg, seed)
    paths = emit_report(report, out, include_timing=args.timing)
    print(f"{report.scenario}: {report.anchor}")
    for p in report.probes:
        print(f"  {p.probe:28s} {p.verdict}")
    for f in report.failures:
        print(f"  {f['probe']:28s} FAILED ({f['error']}: {f['message']})")
    print(f"wrote {len(paths)} files to {out}")
    return 0


def _cmd_list(args) -> int:
    for name, sc in REGISTRY.items():
        print(f"{name:8s} {sc.anchor}")
    return 0


def selftest() -> list:
    """Convention checks: column-stacking lift, adjoint lift, pairing modes."""
    rng = np.random.default_rng(0)
    d = 4
    A, B, T = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(3))
    E = el.elementary([A], [B])
    L = el.kron_lift(E).matrix
    xs, x = rng.standard_normal(d), rng.standard_normal(d)
    phi = el.rank_one_functional(xs, x)
    bil = om.Truncation(d)
    her = om.Truncation(d, pairing=om.HERMITIAN)
    checks = [
        ("vec(ATB) = (B^T kron A) vec(T)", np.allclose(L @ el.vec(T), el.vec(A @ T @ B))),
        ("unvec(vec(T)) = T", np.array_equal(el.unvec(el.vec(T), d), T)),
        ("<x*, E(T) x> = (L^T phi) . vec(T)",
         np.isclose(xs @ el.apply(E, T) @ x, (el.adjoint_lift(E).matrix @ phi) @ el.vec(T))),
        ("tr(T N) = trace_functional(N) . vec(T)",
         np.isclose(np.trace(T @ B), el.trace_functional(B) @ el.vec(T))),
        ("bilinear adjoint is the transpose", np.array_equal(om.dual_adjoint(A, bil), A.T)),
        ("hermitian adjoint is the conjugate transpose", np.array_equal(om.dual_adjoint(A, her), A.conj().T)),
        ("bilinear pairing <A^T y, z> = <y, A z>",
         np.isclose(om.pairing(A.T @ xs, x, bil), om.pairing(xs, A @ x, bil))),
        ("hermitian pairing <A* y, z> = <y, A z>",
         np.isclose(om.pairing(A.conj().T @ xs, x, her), om.pairing(xs, A @ x, her))),
    ]
    return [(name, bool(ok)) for name, ok in checks]


def _cmd_selftest(args) -> int:
    results = selftest()
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if all(ok for _, ok in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opdyn", description="Hypercyclicity probes for derivations on truncated operator spaces.")
    ap.add_argument("--version", action="version", version=f"opdyn {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named scenario and write its reports")
    run.add_argument("scenario", choices=list(REGISTRY))
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key (repeatable)")
    run.add_argument("--out", help="output directory (default: output.dir)")
    run.add_argument("--seed", type=int, help="seed (default: run.seed, then $OPDYN_SEED, then 0)")
    run.add_argument("--timing", action="store_true", help="include wall time (breaks byte determinism)")
    run.set_defaults(func=_cmd_run)
    sub.add_parser("list", help="list scenarios and their anchors").set_defaults(func=_cmd_list)
    sub.add_parser("selftest", help="check vectorization and pairing conventions").set_defaults(func=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OpdynError, OSError) as exc:
        print(f"opdyn: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
