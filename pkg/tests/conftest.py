import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("opdyn", deadline=None, max_examples=40)
settings.load_profile("opdyn")


@pytest.fixture(scope="session")
def scenario_runs():
    """Every scenario run twice with default config and seed 0: {name: (report, text1, text2)}."""
    from opdyn.config import ScenarioConfig
    from opdyn.report import dumps, probe_csv, run_scenario
    from opdyn.scenarios import REGISTRY

    out = {}
    for name in REGISTRY:
        texts = []
        for _ in range(2):
            rep = run_scenario(ScenarioConfig(scenario=name), seed=0)
            texts.append(dumps(rep) + "".join(probe_csv(p) for p in rep.probes))
        out[name] = (rep, texts[0], texts[1])
    return out
