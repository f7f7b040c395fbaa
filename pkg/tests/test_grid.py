import json

import numpy as np
import pytest

from quasiprob.errors import InvalidInputError
from quasiprob.grid import Axis, DistributionGrid, read_csv, read_grid, read_json


def _grid(rng, route="kr_direct"):
    q = Axis(-1.0, 1.0, 5)
    p = Axis(-2.0, 3.0, 4)
    vals = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    vals[0, 0] = 1e-300 + 5e-324j
    vals[1, 1] = np.pi
    return DistributionGrid(q, p, vals, {"state": "fock:1", "route": route, "dim": 64,
                                         "calibration": None})


def test_axis_validation():
    with pytest.raises(InvalidInputError):
        Axis(0, 1, 1)
    with pytest.raises(InvalidInputError):
        Axis(1, 1, 3)
    assert Axis.parse("-4,4,81").step == pytest.approx(0.1)


def test_shape_and_route_checks():
    with pytest.raises(InvalidInputError):
        DistributionGrid(Axis(0, 1, 2), Axis(0, 1, 3), np.zeros((3, 2)))
    with pytest.raises(InvalidInputError):
        DistributionGrid(Axis(0, 1, 2), Axis(0, 1, 2), np.zeros((2, 2)), {"route": "bogus"})
    with pytest.raises(InvalidInputError):
        DistributionGrid(Axis(0, 1, 2), Axis(0, 1, 2), np.array([[np.inf, 0], [0, 0]]))


def test_values_are_read_only():
    g = _grid(np.random.default_rng(0))
    with pytest.raises(ValueError):
        g.values[0, 0] = 1


def test_csv_layout():
    g = _grid(np.random.default_rng(1))
    lines = g.to_csv().splitlines()
    assert lines[0] == "q,p,re,im"
    assert len(lines) == 1 + 20
    # q-major: p varies fastest
    assert lines[1].startswith("-1,-2,") and lines[2].startswith("-1,-0.333333333333333")


def test_csv_roundtrip_bit_identical():
    g = _grid(np.random.default_rng(2))
    back = read_csv(g.to_csv())
    np.testing.assert_array_equal(back.values, g.values)
    np.testing.assert_array_equal(back.q_axis.points, g.q_axis.points)


def test_json_roundtrip_bit_identical():
    g = _grid(np.random.default_rng(3))
    text = g.to_json(timestamp=False)
    back = read_json(text)
    np.testing.assert_array_equal(back.values, g.values)
    assert back.metadata == g.metadata
    assert set(json.loads(text)) == {"metadata", "q", "p", "values"}


def test_json_timestamp_isolated():
    g = _grid(np.random.default_rng(4))
    g.metadata["timestamp"] = "2026-01-01T00:00:00+00:00"
    assert "timestamp" in g.to_json(timestamp=True)
    assert "timestamp" not in g.to_json(timestamp=False)


def test_read_grid_dispatch(tmp_path):
    g = _grid(np.random.default_rng(5))
    g.write(tmp_path / "a.csv", "csv")
    g.write(tmp_path / "a.json", "json", timestamp=False)
    np.testing.assert_array_equal(read_grid(tmp_path / "a.csv").values, g.values)
    np.testing.assert_array_equal(read_grid(tmp_path / "a.json").values, g.values)


def test_marginals_and_total():
    q = Axis(0, 1, 3)
    p = Axis(0, 2, 5)
    g = DistributionGrid(q, p, np.ones((3, 5)))
    assert g.total() == pytest.approx(15 * 0.5 * 0.5)
    np.testing.assert_allclose(g.q_marginal(), [2.5] * 3)
    np.testing.assert_allclose(g.p_marginal(), [1.5] * 5)
    assert g.nearest(0.9, 1.1) == 1
