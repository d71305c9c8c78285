from collections import Counter

import numpy as np
import pytest

from cameronliebler.errors import NotOnQuadric, SpreadViolation
from cameronliebler.geometry import (
    PluckerLine,
    QuadricPoint,
    Spread,
    Tower,
    check_spread,
    classify_line,
    conic_index_set,
    f_inverse,
    klein_inverse,
    klein_keys,
    line_conic_points,
    lines_meet,
    on_quadric,
    polar_count,
    polar_counts,
    projective_key,
    projective_points,
    random_invertible,
    regular_spread,
    transform_spread,
)


@pytest.fixture(scope="module")
def t5():
    return Tower(5)


@pytest.fixture(scope="module")
def quadric5(t5):
    x, y = projective_points(t5)
    keep = on_quadric(t5, x, y)
    return x[keep], y[keep]


def test_tower_parameters(t5):
    assert (t5.N, t5.n, t5.w1_log) == (31, 124, 4)
    assert t5.F.order == 5
    assert t5.F.embed(t5.F.restrict(t5.w0)) == t5.w0


def test_dual_basis(t5):
    E = t5.E
    for i, e in enumerate(t5.basis):
        for j, f in enumerate(t5.dual_basis):
            assert t5.trace(E.mul(e, f)) == (1 if i == j else 0)


def test_coordinates_round_trip(t5):
    for a in range(t5.E.order):
        assert t5.from_xcoords(t5.xcoords[a]) == a
        assert t5.from_ycoords(t5.ycoords[a]) == a


def test_f_inverse(t5):
    F = t5.F
    m = [[1, 2, 0], [0, 3, 4], [2, 0, 1]]
    inv = f_inverse(F, m)
    for i in range(3):
        for j in range(3):
            total = 0
            for k in range(3):
                total = F.add(total, F.mul(m[i][k], inv[k][j]))
            assert total == (F.from_int(1) if i == j else 0)


@pytest.mark.parametrize("q,size", [(5, 6), (9, 10)])
def test_conic_size_and_q_closure(q, size):
    t = Tower(q)
    iq = conic_index_set(t)
    assert len(iq) == size and iq == sorted(iq)
    assert {(q * d) % t.N for d in iq} == set(iq)


@pytest.mark.parametrize("q", [5, 9])
def test_line_classification(q):
    t = Tower(q)
    iq = conic_index_set(t)
    kinds = Counter()
    expect = {"tangent": 1, "secant": 2, "passant": 0}
    for u in range(t.N):
        kind = classify_line(t, u)
        kinds[kind] += 1
        assert line_conic_points(t, u, iq) == expect[kind]
    assert kinds == {"tangent": q + 1, "secant": q * (q + 1) // 2, "passant": q * (q - 1) // 2}
    # the tangent at <w_1^d> is L_u with w^u = w_1^d
    assert all(classify_line(t, (q - 1) * d) == "tangent" for d in iq)


def test_one_tangent_per_conic_point(t5):
    iq = conic_index_set(t5)
    pts = t5.w1(np.asarray(iq))
    tangents = [u for u in range(t5.N) if classify_line(t5, u) == "tangent"]
    for pt in pts:
        on = [u for u in tangents if t5.trace(t5.E.mul(t5.E.elem(u), int(pt))) == 0]
        assert len(on) == 1


def test_projective_points(t5, quadric5):
    x, y = projective_points(t5)
    assert x.size == 3906
    assert np.unique(projective_key(t5, x, y)).size == 3906
    assert quadric5[0].size == 806


def test_klein_injective_and_round_trip(t5, quadric5):
    qx, qy = quadric5
    keys = klein_keys(t5, qx, qy)
    assert np.unique(keys).size == 806
    for k in range(0, 806, 37):
        x, y = int(qx[k]), int(qy[k])
        line = klein_inverse(t5, x, y)
        a, b = line.span(t5.F)
        assert PluckerLine.through(t5.F, a, b) == line
        pt = QuadricPoint.normalize(t5, x, y)
        assert klein_inverse(t5, pt.x, pt.y) == line


def test_isotropic_plane(t5):
    lines = [klein_inverse(t5, int(x), 0) for x in t5.E.nonzero()[:40]]
    for l1 in lines[:8]:
        for l2 in lines[:8]:
            assert lines_meet(t5.F, l1, l2)


def test_perpendicular_iff_meet(t5, quadric5):
    qx, qy = quadric5
    rng = np.random.default_rng(5)
    E = t5.E
    for i, j in rng.integers(0, qx.size, size=(150, 2)):
        x, y, x2, y2 = int(qx[i]), int(qy[i]), int(qx[j]), int(qy[j])
        perp = t5.trace(E.add(E.mul(x, y2), E.mul(x2, y))) == 0
        assert perp == lines_meet(t5.F, klein_inverse(t5, x, y), klein_inverse(t5, x2, y2))


def test_not_on_quadric(t5):
    with pytest.raises(NotOnQuadric):
        klein_inverse(t5, 1, 1) if t5.trace(1) else klein_inverse(t5, 1, 2)


@pytest.mark.parametrize("q", [5, 9])
def test_regular_spread(q):
    F = Tower(q).F
    s = regular_spread(F)
    assert len(s.lines) == q * q + 1
    check_spread(F, s)
    img = transform_spread(F, s, random_invertible(F, np.random.default_rng(q)))
    check_spread(F, img)


def test_broken_spread_detected(t5):
    s = regular_spread(t5.F)
    bad = Spread(s.lines[:-1] + (s.lines[0],), s.spans[:-1] + (s.spans[0],))
    with pytest.raises(SpreadViolation):
        check_spread(t5.F, bad)


def test_polar_count_edge_cases(t5, quadric5):
    qx, qy = quadric5
    P = (int(qx[3]), int(qy[3]))
    assert polar_count(t5, P, [], []) == 0
    assert polar_count(t5, P, [P[0]], [P[1]]) == 1


def test_polar_counts_match_scalar(t5, quadric5):
    qx, qy = quadric5
    x, y = projective_points(t5)
    rng = np.random.default_rng(2)
    idx = rng.choice(x.size, 200, replace=False)
    bulk = polar_counts(t5, x[idx], y[idx], qx, qy, chunk=64)
    for k, i in enumerate(idx):
        assert bulk[k] == polar_count(t5, (int(x[i]), int(y[i])), qx, qy)


def test_polar_of_quadric_is_constant(t5, quadric5):
    qx, qy = quadric5
    counts = polar_counts(t5, qx, qy, qx, qy)
    assert set(counts.tolist()) == {1 + 5 * 6 + 5 * 5 * 6}  # 1 + q(q+1) + q^2(q+1)


def test_alternate_modulus_tower():
    t = Tower(5, modulus=(2, 0, 1, 1))  # x^3 + x^2 + 2
    assert t.E.modulus != Tower(5).E.modulus
    assert len(conic_index_set(t)) == 6
    x, y = projective_points(t)
    assert np.count_nonzero(on_quadric(t, x, y)) == 806
