import pytest

from opdyn.config import ScenarioConfig
from opdyn.dynamics import EVIDENCE, INCONCLUSIVE, OBSTRUCTED, TRUNCATION_FLAG
from opdyn.report import run_scenario
from opdyn.scenarios import REGISTRY

EXPECTED = {
    "ex2_1": EVIDENCE, "thm2_2": EVIDENCE, "dw": EVIDENCE, "ex2_4": EVIDENCE, "rmk2_6": EVIDENCE,
    "prop3_2": OBSTRUCTED, "thm3_4": OBSTRUCTED, "thm5_1": OBSTRUCTED, "prop5_4": OBSTRUCTED,
    "prop3_1": "mixed", "thm4_1": "mixed", "cor5_2": "mixed", "ex5_3": "mixed", "tarbard": "mixed",
}


def test_registry_complete():
    assert set(REGISTRY) == set(EXPECTED)
    for sc in REGISTRY.values():
        assert sc.anchor


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_scenario_verdicts(scenario_runs, name):
    rep = scenario_runs[name][0]
    assert not rep.failures
    assert rep.verdict == EXPECTED[name]
    for p in rep.probes:
        assert TRUNCATION_FLAG in p.flags
        if p.verdict == OBSTRUCTED:
            assert p.certificate


def test_control_probe_stays_inconclusive(scenario_runs):
    assert scenario_runs["prop3_1"][0].probe("tau_Bw_S").verdict == INCONCLUSIVE


def test_probe_failure_is_recorded_not_raised():
    cfg = ScenarioConfig(scenario="ex2_1", d=8, ambient_factor=1)
    cfg.weights = (1, 2)  # too few weights for d = 8
    rep = run_scenario(cfg, 0)
    assert rep.failures and all(f["error"] == "SpecificationError" for f in rep.failures)
    assert rep.verdict in ("no-op", EVIDENCE, INCONCLUSIVE, "mixed")
