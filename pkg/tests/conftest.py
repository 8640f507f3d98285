import json
import random

import pytest

from fnforms import Chart, make_connection

CONN_A = {"dim": 3, "coords": ["x", "y", "z"], "phi": [["0", "0", "0"], ["0", "0", "0"], ["0", "-x", "1"]]}


@pytest.fixture
def chart3():
    return Chart(("x", "y", "z"))


@pytest.fixture
def conn_a(chart3):
    # vertical span(∂z), horizontal span(∂x, ∂y + x∂z)
    return make_connection(chart3, CONN_A["phi"])


@pytest.fixture
def conn_a_path(tmp_path):
    p = tmp_path / "connA.json"
    p.write_text(json.dumps(CONN_A), encoding="utf-8")
    return p


@pytest.fixture
def rng():
    return random.Random(20240611)
