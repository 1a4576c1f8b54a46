"""Run reports: execution, JSON and CSV emission, and parsing back.

The JSON document keeps a fixed key order and stores complex numbers as
strings ``"re+imi"`` / ``"re-imi"`` (both parts in shortest round-trip
form). Wall time is measured but only written when asked for, so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .dynamics import ProbeReport, StepRecord
from .errors import ConfigError
from .scenarios import REGISTRY, Context, resolve

REPORT_VERSION = 1
NO_OP = "no-op"
MIXED = "mixed"


@dataclass
class RunReport:
    scenario: str
    anchor: str
    seed: int
    config: dict
    probes: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    version: str = __version__
    wall_time: float | None = None

    @property
    def verdict(self) -> str:
        verdicts = {p.verdict for p in self.probes}
        if not verdicts:
            return NO_OP
        return verdicts.pop() if len(verdicts) == 1 else MIXED

    def summary(self) -> dict:
        return {"verdict": self.verdict, "probes": {p.probe: p.verdict for p in self.probes},
                "failures": len(self.failures)}

    def probe(self, name: str) -> ProbeReport:
        for p in self.probes:
            if p.probe == name:
                return p
        raise KeyError(name)


def run_scenario(cfg: ScenarioConfig, seed: int = 0) -> RunReport:
    if cfg.scenario not in REGISTRY:
        raise ConfigError(f"unknown scenario (known: {', '.join(REGISTRY)})", key="scenario.name")
    sc = REGISTRY[cfg.scenario]
    full = resolve(cfg)
    full.seed = seed
    ctx = Context(full, seed, np.random.default_rng(seed))
    t0 = time.perf_counter()
    sc.run(ctx)
    wall = time.perf_counter() - t0
    return RunReport(sc.name, sc.anchor, seed, full.echo(), ctx.reports, ctx.failures, wall_time=wall)


# ------------------------------------------------------------ serialization


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


_NUM = r"(?:\d+(?:\.\d*)?(?:e[-+]?\d+)?|inf|nan)"
_COMPLEX_RE = re.compile(rf"^([-+]?{_NUM})([-+])({_NUM})i$")


def parse_complex(s: str) -> complex | None:
    m = _COMPLEX_RE.match(s)
    if not m:
        return None
    re_, sign, im = m.groups()
    return complex(float(re_), float(im) if sign == "+" else -float(im))


def plain(obj):
    """Recursively convert to JSON-ready values (complex to strings, arrays to lists)."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return format_complex(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _unplain(obj):
    if isinstance(obj, dict):
        return {k: _unplain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_unplain(v) for v in obj]
    if isinstance(obj, str):
        z = parse_complex(obj)
        return obj if z is None else z
    return obj


def probe_to_dict(p: ProbeReport) -> dict:
    return {
        "probe": p.probe,
        "verdict": p.verdict,
        "flags": list(p.flags),
        "params": p.params,
        "certificate": p.certificate,
        "details": p.details,
        "records": [{"n": r.n, "score": r.score, "residual": r.residual, "extra": r.extra} for r in p.records],
    }


def report_to_dict(report: RunReport, include_timing: bool = False) -> dict:
    out = {
        "opdyn_report_version": REPORT_VERSION,
        "artifact_version": report.version,
        "scenario": report.scenario,
        "anchor": report.anchor,
        "seed": report.seed,
        "summary": report.summary(),
        "config": report.config,
        "probes": [probe_to_dict(p) for p in report.probes],
        "failures": report.failures,
    }
    if include_timing and report.wall_time is not None:
        out["wall_time"] = report.wall_time
    return plain(out)


def dumps(report: RunReport, include_timing: bool = False) -> str:
    return json.dumps(report_to_dict(report, include_timing), indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> RunReport:
    doc = json.loads(text)
    if doc.get("opdyn_report_version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {doc.get('opdyn_report_version')!r}")
    probes = []
    for p in doc["probes"]:
        records = [StepRecord(r["n"], _unplain(r["score"]), _unplain(r["residual"]), _unplain(r["extra"]))
                   for r in p["records"]]
        probes.append(ProbeReport(p["probe"], p["verdict"], records, _unplain(p["params"]),
                                  _unplain(p["certificate"]), _unplain(p["details"]), list(p["flags"])))
    return RunReport(doc["scenario"], doc["anchor"], doc["seed"], _unplain(doc["config"]), probes,
                     _unplain(doc["failures"]), doc["artifact_version"], doc.get("wall_time"))


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(x) -> str:
    if isinstance(x, complex):
        return format_complex(x)
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def probe_csv(p: ProbeReport) -> str:
    lines = ["n,score,residual"]
    lines += [f"{r.n},{_cell(r.score)},{_cell(r.residual)}" for r in p.records]
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, out_dir: str, formats=("structured-text", "tabular"),
                include_timing: bool = False) -> list:
    """Write ``<scenario>.json`` and one ``<scenario>__<probe>.csv`` per probe; return the paths."""
    paths = []
    if "structured-text" in formats:
        path = os.path.join(out_dir, f"{report.scenario}.json")
        _atomic_write(path, dumps(report, include_timing))
        paths.append(path)
    if "tabular" in formats:
        for p in report.probes:
            path = os.path.join(out_dir, f"{report.scenario}__{p.probe}.csv")
            _atomic_write(path, probe_csv(p))
            paths.append(path)
    return paths
