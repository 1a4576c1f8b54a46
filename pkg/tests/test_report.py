import json
import math

import pytest
from hypothesis import given, strategies as st

from opdyn.config import ScenarioConfig
from opdyn.dynamics import EVIDENCE, INCONCLUSIVE, ProbeReport, StepRecord
from opdyn.errors import ConfigError
from opdyn.report import (RunReport, dumps, emit_report, format_complex, parse_complex,
                          parse_report, probe_csv, run_scenario)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_string_roundtrip(z):
    assert parse_complex(format_complex(z)) == z


def test_complex_format_shape():
    assert format_complex(1 - 2j) == "1.0-2.0i"
    assert format_complex(complex(0.5, -0.0)) == "0.5-0.0i"
    assert parse_complex("hello") is None


def test_empty_report_is_no_op():
    rep = RunReport("x", "anchor", 0, {})
    assert rep.verdict == "no-op"
    doc = json.loads(dumps(rep))
    assert doc["summary"]["verdict"] == "no-op" and doc["probes"] == []


def test_mixed_and_shared_verdicts():
    a = ProbeReport("a", EVIDENCE)
    b = ProbeReport("b", INCONCLUSIVE)
    assert RunReport("x", "", 0, {}, [a]).verdict == EVIDENCE
    assert RunReport("x", "", 0, {}, [a, b]).verdict == "mixed"


def test_report_roundtrip():
    rep = run_scenario(ScenarioConfig(scenario="prop3_1"), seed=0)
    text = dumps(rep)
    back = parse_report(text)
    assert dumps(back) == text
    cert = back.probe("tau_S_B").certificate
    assert isinstance(cert["eigenvalue"], complex) and isinstance(cert["xstar"][0], complex)
    with pytest.raises(KeyError):
        back.probe("nope")


def test_report_version_checked():
    with pytest.raises(ValueError):
        parse_report('{"opdyn_report_version": 99}')


def test_timing_only_on_request():
    rep = run_scenario(ScenarioConfig(scenario="prop5_4"), seed=0)
    assert "wall_time" not in json.loads(dumps(rep))
    assert json.loads(dumps(rep, include_timing=True))["wall_time"] >= 0


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig(scenario="nope"))


def test_csv_and_emit(tmp_path):
    p = ProbeReport("p", EVIDENCE, [StepRecord(1, 0.5, 1e-3), StepRecord(2, 0.25, math.inf)])
    assert probe_csv(p) == "n,score,residual\n1,0.5,0.001\n2,0.25,inf\n"
    rep = RunReport("sc", "", 0, {}, [p])
    paths = emit_report(rep, str(tmp_path / "out"))
    assert sorted(x.rsplit("/", 1)[1] for x in paths) == ["sc.json", "sc__p.csv"]
    assert not [f for f in (tmp_path / "out").iterdir() if f.name.startswith(".tmp")]
    assert b"\r" not in (tmp_path / "out" / "sc.json").read_bytes()
