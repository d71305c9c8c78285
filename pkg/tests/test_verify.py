import json

import numpy as np
import pytest

from cameronliebler.clclass import LineClassBundle, build_bundle, extend_to_complementary
from cameronliebler.errors import SpectrumViolation, SpreadViolation
from cameronliebler.geometry import polar_count, projective_points
from cameronliebler.numbers import CycInt
from cameronliebler.report import CertReport
from cameronliebler.verify import (
    certify_automorphisms,
    certify_spectrum,
    certify_T_u,
    certify_tight_set,
    certify_two_intersection,
    classify_u,
    expected_t_values,
    run_checks,
    sampled_spread_check,
    spectrum_grid,
)


def test_spectrum_q5(bundle5):
    r = certify_spectrum(bundle5)
    assert r.passed, r.witness
    assert r.observed_histogram == [[-12, 14136], [113, 1488], [1488, 1]]
    assert 1488 + 1488 * 113 - 14136 * 12 == 0


def test_spectrum_value_at_a_zero(bundle5):
    grid = spectrum_grid(bundle5)
    assert set(grid[0, 1:].tolist()) == {-12}


def test_spectrum_direct_oracle(bundle5):
    """psi_{a,b}(D) by summing zeta^absTr(a x + b y) over D for a few (a,b)."""
    E = bundle5.E
    dx, dy = bundle5.D_xy()
    grid = spectrum_grid(bundle5)
    rng = np.random.default_rng(11)
    for a, b in rng.integers(0, E.order, size=(25, 2)):
        tr = E.abs_trace[E.add(E.mul(int(a), dx), E.mul(int(b), dy))]
        assert CycInt.from_exponents(5, tr) == int(grid[a, b])


def test_tight_set_q5(bundle5):
    r = certify_tight_set(bundle5)
    assert r.passed, r.witness
    totals = {}
    for (label, value), count in r.observed_histogram:
        totals[(label, value)] = count
    assert totals == {("M", 97): 372, ("quadric-M", 72): 434, ("off-quadric", 72): 3100}


def test_spectrum_and_polar_counts_agree(bundle5):
    X, Y = projective_points(bundle5.tower)
    grid = spectrum_grid(bundle5)
    mx, my = bundle5.M_xy()
    for i in range(0, X.size, 97):
        P = (int(X[i]), int(Y[i]))
        # the dual vector of the polar of P=(x,y) is (y,x)
        assert grid[P[1], P[0]] == -mx.size + 5 * polar_count(bundle5.tower, P, mx, my)


def test_two_intersection_q5(bundle5):
    r = certify_two_intersection(bundle5)
    assert r.passed, r.witness
    assert r.observed_histogram == [[72, 3534], [97, 372]]


def test_two_intersection_empty_guard(bundle5):
    b = LineClassBundle(bundle5.tower, bundle5.d0, 1, bundle5.IQ, bundle5.X, bundle5.Xbar,
                        bundle5.A, bundle5.B, bundle5.IX, bundle5.D[:0], bundle5.M[:0],
                        bundle5.L[:0], 0)
    r = certify_two_intersection(b)
    assert not r.passed and r.witness == {"reason": "empty point set"}


def test_t_u_q5(bundle5):
    r = certify_T_u(bundle5)
    assert r.passed, r.witness
    exp = expected_t_values(bundle5)
    assert exp["passant"] == -3 and exp["secant"] == 2
    labels = classify_u(bundle5)
    assert labels.count("passant") == 2 * 10 and labels.count("secant") == 2 * 15
    assert "tangent-unmatched" not in labels
    # 2 is a nonsquare mod 5, so u in Xbar takes (q-1)/2 + q n
    for u in bundle5.Xbar:
        assert labels[u] == "tangent-n"


def test_t_u_q9(bundle9):
    assert certify_T_u(bundle9).passed


def test_spreads_q5(bundle5):
    r = sampled_spread_check(bundle5, trials=10, seed=1)
    assert r.passed and r.observed_histogram == [[12, 11]]
    again = sampled_spread_check(bundle5, trials=10, seed=1)
    assert again.comparable() == r.comparable()


def test_automorphisms(bundle5, bundle9):
    assert certify_automorphisms(bundle5).passed
    assert certify_automorphisms(bundle9).passed


def test_extension_certificates(bundle5):
    ext = extend_to_complementary(bundle5)
    r = certify_spectrum(ext)
    assert r.passed
    assert [v for v, _ in r.observed_histogram] == [-13, 112, 1612]
    assert certify_tight_set(ext).passed
    assert sampled_spread_check(ext, trials=2).passed


def test_corrupted_bundle_fails(bundle5):
    D = bundle5.D[1:]
    b = LineClassBundle(bundle5.tower, bundle5.d0, 1, bundle5.IQ, bundle5.X, bundle5.Xbar,
                        bundle5.A, bundle5.B, bundle5.IX, D, bundle5.M, bundle5.L, 12)
    r = certify_spectrum(b)
    assert not r.passed and r.witness is not None
    with pytest.raises(SpectrumViolation):
        r.raise_for_failure()
    L = bundle5.L[10:]
    b2 = LineClassBundle(bundle5.tower, bundle5.d0, 1, bundle5.IQ, bundle5.X, bundle5.Xbar,
                         bundle5.A, bundle5.B, bundle5.IX, bundle5.D, bundle5.M, L, 12)
    r2 = sampled_spread_check(b2, trials=3)
    assert not r2.passed
    with pytest.raises(SpreadViolation):
        r2.raise_for_failure()


@pytest.mark.parametrize("d0", [4, 6, 7, 20, 26, 30])
@pytest.mark.parametrize("beta", [1, 3])  # F codes of the nonzero squares 1, 4 of GF(5)
def test_choice_independence_q5(d0, beta):
    b = build_bundle(5, d0=d0, beta=beta)
    assert certify_spectrum(b).passed
    assert certify_tight_set(b).passed


def test_report_round_trip(bundle5):
    reports = run_checks(bundle5, ["spectrum", "tu", "auto", "spread"], trials=2)
    for r in reports:
        again = CertReport.from_dict(json.loads(r.to_json()))
        assert json.dumps(again.to_dict(), sort_keys=True) == r.to_json()
    rerun = run_checks(bundle5, ["spectrum", "tu", "auto", "spread"], trials=2)
    assert [r.comparable() for r in rerun] == [r.comparable() for r in reports]


def test_tight_and_two_intersection_q9(bundle9):
    r = certify_tight_set(bundle9)
    assert r.passed, r.witness
    assert {v for (_, v), _ in r.observed_histogram} == {481, 400}
    r = certify_two_intersection(bundle9)
    assert r.passed, r.witness
    assert [v for v, _ in r.observed_histogram] == [400, 481]
