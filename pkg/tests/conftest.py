import functools
import math

import numpy as np
import pytest

from quasiprob import distributions, fockspace, prep
from quasiprob.statespec import StateSpec, parse_state_spec

TEST_STATES = ["vacuum", "fock:1", "fock:2", "fock:3", "coherent:1", "thermal:0.5", "squeezed:0.4,0"]


@functools.lru_cache(maxsize=None)
def state(text, dim=64):
    return fockspace.make_state(parse_state_spec(text), dim)


def calibrate_all(dim=64):
    cals = {}
    for route in ("wigner_parity", "wigner_from_charfn", "kr_from_charfn", "kr_vacuum_form"):
        cals[route] = distributions.calibrate(route, StateSpec.vacuum(), dim)
    cals["kr_from_p"] = distributions.calibrate("kr_from_p", prep.PRepresentation.delta(0), dim)
    return cals


@pytest.fixture(scope="session")
def calibrated():
    return calibrate_all()


@pytest.fixture
def fresh_cache():
    """Empty calibration cache for the test, restored afterwards."""
    distributions.clear_calibrations()
    yield
    calibrate_all()


def vacuum_wigner(q, p):
    return np.exp(-(q**2 + p**2)) / math.pi
