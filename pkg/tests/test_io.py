import numpy as np
import pytest

from binghamq.dynamics import FlowParams, SpectralGrid
from binghamq.dynamics.coupled import energy_report, perturbed_equilibrium
from binghamq.dynamics.io import (
    TIME_SERIES_COLUMNS,
    TimeSeriesWriter,
    config_hash,
    header_lines,
    load_checkpoint,
    read_csv,
    save_checkpoint,
    write_csv,
)


@pytest.fixture
def state(rng):
    return perturbed_equilibrium(SpectralGrid(6, 4, 2.0, 3.0), 0.5, rng)


def test_config_hash_canonical():
    assert config_hash({"a": 1, "b": 2.5}) == config_hash({"b": 2.5, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 16


def test_header_and_roundtrip(tmp_path):
    cfg = {"alpha": 7.0}
    path = tmp_path / "x.csv"
    text = write_csv(path, ("a", "b"), [(1, 0.1), (2, 1 / 3)], cfg)
    assert path.read_text() == text
    comments, cols, rows = read_csv(path)
    assert comments == header_lines(cfg)
    assert cols == ["a", "b"]
    assert float(rows[1][1]) == 1 / 3
    assert rows[0][0] == "1"


@pytest.mark.parametrize("fmt_", ["npz", "csv"])
def test_checkpoint_roundtrip(tmp_path, state, fmt_):
    p = FlowParams(alpha_ms=8.0, gamma_par=0.2)
    state.t, state.steps = 0.75, 3
    path = save_checkpoint(tmp_path / f"ck.{fmt_}", state, p, fmt_=fmt_, config={"x": 1})
    back, p2 = load_checkpoint(path)
    assert p2 == p
    assert back.t == 0.75 and back.steps == 3
    assert back.grid.shape == state.grid.shape and back.grid.ly == 3.0
    assert np.abs(back.q - state.q).max() < 1e-15
    assert np.array_equal(back.v, state.v)


def test_checkpoint_bad_format(tmp_path, state):
    with pytest.raises(ValueError):
        save_checkpoint(tmp_path / "ck.h5", state, FlowParams(), fmt_="h5")


def test_time_series_writer(tmp_path, state):
    p = FlowParams()
    w = TimeSeriesWriter(tmp_path / "ts.csv", {"run": 1})
    w.append(energy_report(state, p))
    w.write()
    _, cols, rows = read_csv(tmp_path / "ts.csv")
    assert tuple(cols) == TIME_SERIES_COLUMNS
    assert len(rows) == 1 and len(rows[0]) == len(cols)
