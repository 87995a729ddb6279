import pathlib

import numpy as np
import pytest

import degenex
from degenex.degeneration import (
    from_combinatorial,
    ghz_w_combinatorial,
    ghz_w_generic,
)

DATA_DIR = pathlib.Path(degenex.__file__).parent / "data"


@pytest.fixture(scope="session")
def generic3():
    return ghz_w_generic(3)


@pytest.fixture(scope="session")
def comb_spec():
    return ghz_w_combinatorial()


@pytest.fixture(scope="session")
def comb_deg(comb_spec):
    deg, q = from_combinatorial(comb_spec)
    assert abs(q - 0.75) < 1e-15
    return deg


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


@pytest.fixture(scope="session")
def data_dir():
    assert DATA_DIR.is_dir()
    return DATA_DIR
