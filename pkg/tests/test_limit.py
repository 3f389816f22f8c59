import numpy as np
import pytest
from hypothesis import given

from binghamq.dynamics import FlowParams, SpectralGrid
from binghamq.dynamics.limit import (
    biaxiality,
    extract_director,
    limit_study,
    splay_reference,
    splay_state,
)
from binghamq.equilibria import nematic_order
from binghamq.tensors import uniaxial

from conftest import traceless_sym, unit_vectors

P = FlowParams(alpha_ms=7.0)


@given(unit_vectors)
def test_biaxiality_uniaxial_zero(n):
    assert abs(biaxiality(uniaxial(0.4, n))) < 1e-12
    assert abs(biaxiality(uniaxial(-0.2, n))) < 1e-12


def test_biaxiality_maximal():
    assert abs(biaxiality(np.diag([0.3, 0.0, -0.3])) - 1.0) < 1e-14
    assert biaxiality(np.zeros((3, 3))) == 0.0


@given(traceless_sym())
def test_biaxiality_range(q):
    b = biaxiality(q)
    assert -1e-9 <= b <= 1 + 1e-9


def test_extract_director_sign():
    n = np.array([0.0, 0.6, 0.8])
    ref = -n
    d = extract_director(uniaxial(0.5, n), ref)
    assert np.allclose(d, -n)


def test_homogeneous_shear_orders():
    table = limit_study([0.1, 0.05], "homogeneous-shear", P, t_end=1.0)
    assert table.rows[1].error < table.rows[0].error
    assert 0.7 <= table.orders[0] <= 1.3
    assert table.manifold_constant < 1.0
    assert len(table.as_records()) == 2


def test_splay_state_matches_reference():
    grid = SpectralGrid(16, 1)
    x, _ = grid.coordinates()
    _, s2, _ = nematic_order(7.0)
    th = splay_reference(x, 0.0, P, amp=0.2)
    st = splay_state(grid, s2, th)
    n = extract_director(st.q, np.array([1.0, 0.0, 0.0]))
    assert np.abs(np.arctan2(n[..., 1], n[..., 0]) - th).max() < 1e-12
    assert st.freeze_velocity
    # decay is monotone in time
    assert np.abs(splay_reference(x, 1.0, P, amp=0.2)).max() < 0.2


@pytest.mark.parametrize(
    "de_list,scenario",
    [([0.1, 0.2], "homogeneous-shear"), ([], "homogeneous-shear"), ([0.1], "shear"), ([-1.0], "homogeneous-shear")],
)
def test_invalid_inputs(de_list, scenario):
    with pytest.raises(ValueError):
        limit_study(de_list, scenario, P)
