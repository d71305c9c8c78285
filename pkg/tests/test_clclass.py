import json

import numpy as np
import pytest

from cameronliebler.clclass import (
    build_bundle,
    build_IX,
    build_X,
    bundle_from_dict,
    extend_to_complementary,
    projective_key,
    split_xbar,
)
from cameronliebler.errors import BadBeta, BadResidue, BadTangent, DecompositionFailure
from cameronliebler.geometry import Tower, conic_index_set, on_quadric


def test_q5_frozen_values(bundle5):
    b = bundle5
    assert b.IQ == [4, 6, 7, 20, 26, 30]
    assert b.d0 == 4
    assert b.Xbar == [24, 42, 47, 49, 58, 59]
    assert len(b.A) + len(b.B) == 6
    assert len(b.IX) == 12
    assert (b.D.size, b.M.size, b.L.size, b.x_param) == (1488, 372, 372, 12)


def test_q9_sizes(bundle9):
    assert (bundle9.D.size, bundle9.M.size, bundle9.L.size) == (29120, 3640, 3640)
    assert len(bundle9.Xbar) == 10 and len(bundle9.IX) == 20


def test_residue_and_choice_errors():
    with pytest.raises(BadResidue):
        build_bundle(7)
    t = Tower(5)
    with pytest.raises(BadTangent):
        build_X(t, 5, 1)
    with pytest.raises(BadBeta):
        build_X(t, 4, 2)  # F code 2 is the generator, a nonsquare
    with pytest.raises(BadBeta):
        build_X(t, 4, 0)


def test_split_rejects_impossible_residue():
    with pytest.raises(DecompositionFailure):
        split_xbar([1], 4)  # even N is never used; guard still fires


def test_alternate_tangent_shifts_by_zero_or_n(bundle5):
    t, N = bundle5.tower, bundle5.N
    base = set(bundle5.Xbar)
    shifted = {(r + N) % (2 * N) for r in base}
    for d0 in conic_index_set(t):
        _, xb = build_X(t, d0, 1)
        assert set(xb) in (base, shifted)
    _, xb = build_X(t, (5 * bundle5.d0) % N, 1)
    assert xb == bundle5.Xbar


def test_ix_shift_relation(bundle5):
    t, N = bundle5.tower, bundle5.N
    shifted = sorted((r + N) % (2 * N) for r in bundle5.Xbar)
    _, _, ix_shift = build_IX(t, shifted)
    assert sorted((l + 2 * N) % (4 * N) for l in bundle5.IX) == ix_shift
    assert all(t.trace_w(l) == 0 for l in bundle5.IX)


def test_d_avoids_axes_and_lies_on_quadric(bundle5):
    x, y = bundle5.D_xy()
    assert not np.any(x == 0) and not np.any(y == 0)
    assert np.all(on_quadric(bundle5.tower, x, y))
    mx, my = bundle5.M_xy()
    assert np.all(on_quadric(bundle5.tower, mx, my))


def test_projective_multiplicity(bundle5):
    x, y = bundle5.D_xy()
    _, counts = np.unique(projective_key(bundle5.tower, x, y), return_counts=True)
    assert set(counts.tolist()) == {4}


def test_q_invariance_of_xbar(bundle9):
    two_n = 2 * bundle9.N
    assert sorted((9 * r) % two_n for r in bundle9.Xbar) == bundle9.Xbar


def test_extension(bundle5):
    ext = extend_to_complementary(bundle5)
    assert ext.x_param == 13 and ext.M.size == 403 and ext.L.size == 403


def test_json_round_trip(bundle5):
    data = json.loads(bundle5.to_json())
    assert data["schema"] == "lineclass/1"
    again = bundle_from_dict(data)
    assert np.array_equal(again.D, bundle5.D)
    assert np.array_equal(again.M, bundle5.M)
    assert np.array_equal(again.L, bundle5.L)
    assert again.to_json() == bundle5.to_json()
    with pytest.raises(ValueError):
        bundle_from_dict(dict(data, schema="other/0"))


def test_alternate_modulus_bundle():
    b = build_bundle(5, modulus=(2, 0, 1, 1))
    assert b.D.size == 1488 and b.M.size == 372
