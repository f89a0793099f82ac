import json

import numpy as np
import pytest

from src.hunter_saxton_integrators.grid import GridKind, build_grid
from src.hunter_saxton_integrators.schemes_hs import hs_initial_state
from src.hunter_saxton_integrators.waves import WaveSpec, generate_wave

# Reference constants for the published experiments


@pytest.fixture(scope="session")
def reference_values():
    with open("tests/data/reference_values.json") as f:
        data = json.load(f)
    return data


@pytest.fixture(scope="session")
def half_line(reference_values):
    return reference_values["half_line"]


@pytest.fixture(scope="session")
def mhs_params(reference_values):
    return reference_values["mhs_wave"]


@pytest.fixture(scope="session")
def hs2_params(reference_values):
    return reference_values["hs2_wave"]


# Grids, initial data and generated waves


@pytest.fixture(scope="session")
def half_line_grid(half_line):
    return build_grid(GridKind.HALF_LINE, half_line["L"], half_line["N"])


@pytest.fixture(scope="function")
def hs_start(half_line_grid):
    return hs_initial_state(half_line_grid)


@pytest.fixture(scope="session")
def mhs_spec(mhs_params):
    p = mhs_params
    return WaveSpec.mhs(p["omega"], p["m"], p["M"], p["c"])


@pytest.fixture(scope="session")
def mhs_wave(mhs_spec, mhs_params):
    return generate_wave(mhs_spec, mhs_params["N"])


@pytest.fixture(scope="session")
def hs2_spec(hs2_params):
    p = hs2_params
    return WaveSpec.hs2(p["b"], p["z"], p["Z"], p["c"])


@pytest.fixture(scope="session")
def hs2_wave(hs2_spec, hs2_params):
    return generate_wave(hs2_spec, hs2_params["N"])


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(20240617)


# Configuration files


@pytest.fixture(scope="function")
def config_path():
    return "tests/data/config_hs_eb1.txt"


@pytest.fixture(scope="function")
def write_config(tmp_path):
    def write(text, name="run.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
