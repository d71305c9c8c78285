import cmath

import numpy as np
import pytest

from cameronliebler.affine import (
    A_COEF,
    C_COEF,
    affine_plane,
    association_scheme_check,
    build_K,
    complement_profile,
    f_gamma_sum,
    f_gamma_values,
    h_sum,
    hilbert90_square_check,
    kloosterman_parameter,
    kloosterman_relation_check,
    lemma_suite,
    line_counts,
    line_profile,
    non_subfield_elements,
    reduce_count,
)
from cameronliebler.errors import CapExceeded, GammaInSubfield, ProfileViolation, TraceZero
from cameronliebler.numbers import GaussianRat


@pytest.fixture(scope="module")
def model1():
    return affine_plane(1)


@pytest.fixture(scope="module")
def K1(model1):
    return build_K(1, model1)


def test_model_invariants(model1):
    assert model1.N == 91 and model1.J.size == 10 and model1.points.size == 81
    sizes = [model1.line(i).size for i in range(1, model1.N)]
    assert set(sizes) == {9}
    assert model1.line(0).size == 0


def test_chi4_normalization(model1):
    E, N = model1.E, model1.N
    assert model1.chi4(E.elem(N)) == 1  # chi_4(w^N) = i
    assert model1.chi4(1) == 0


def test_type_3_6(K1):
    r = line_profile(K1)
    assert r.passed, r.witness
    assert (K1.m, K1.n) == (3, 6)
    assert r.observed_histogram == [[3, 30], [6, 60]]
    assert not np.isin(K1.K, K1.model.J).any()


def test_size_counting_identities(K1):
    q = 9
    counts = line_counts(K1.model, K1.K)[1:]
    a = int(np.count_nonzero(counts == K1.m))
    b = int(np.count_nonzero(counts == K1.n))
    assert a + b == q * q + q
    assert K1.K.size * (q + 1) == K1.m * a + K1.n * b


def test_line_counts_match_enumeration(K1):
    fast = line_counts(K1.model, K1.K)
    ks = set(K1.K.tolist())
    for i in range(1, K1.model.N, 7):
        assert fast[i] == len(ks & set(K1.model.line(i).tolist()))


def test_complement(K1):
    r = complement_profile(K1)
    assert r.passed and r.expected == [3, 6]


def test_profile_violation(K1):
    broken = K1.K[1:]
    r = line_profile(K1, broken)
    assert not r.passed and "line" in r.witness
    with pytest.raises(ProfileViolation):
        r.raise_for_failure()


def test_h_sum_oracle(model1):
    E = model1.E
    rng = np.random.default_rng(4)
    gammas = non_subfield_elements(model1)
    F = model1.F.embed(model1.F.elements())
    for g in rng.choice(gammas, 20):
        g = int(g)
        direct = sum(1j ** int(model1.chi4(E.add(1, E.mul(g, int(x))))) for x in F)
        h = h_sum(model1, g, 1)
        assert abs(complex(float(h.real), float(h.imag)) - direct) < 1e-9
        assert h.conj() == h_sum(model1, g, 3)
    with pytest.raises(GammaInSubfield):
        h_sum(model1, model1.tower.w0, 1)


def test_reduce_identity_one_gamma(model1, K1):
    g = int(non_subfield_elements(model1)[5])
    predicted = A_COEF * h_sum(model1, g, 1) + C_COEF * h_sum(model1, g, 3) + GaussianRat(9, 0, 2)
    assert predicted == reduce_count(model1, g, K1.K)


def test_f_gamma_is_a_norm(model1):
    E, F = model1.E, model1.F
    g = int(non_subfield_elements(model1)[11])
    vals = f_gamma_values(model1, g)
    xs = F.embed(F.elements())
    expect = E.norm(E.add(E.inv(g), xs), F.f)
    assert np.array_equal(vals, expect)
    assert not np.any(vals == 0)


def test_f_gamma_moduli_split_by_trace(model1):
    E = model1.E
    zero, nonzero = 0, 0
    for g in non_subfield_elements(model1):
        g = int(g)
        for j in (1, 3):
            assert f_gamma_sum(model1, g, j).norm2() == 9
        if model1.tower.trace(E.inv(g)) == 0:
            zero += 1
        else:
            nonzero += 1
    assert zero > 0 and nonzero > 0


def test_kloosterman_relation(model1):
    E = model1.E
    gammas = non_subfield_elements(model1)
    tr = model1.tower.trace(E.inv(gammas))
    for g in gammas[tr != 0][:40]:
        assert kloosterman_relation_check(model1, int(g), 1).passed
    with pytest.raises(TraceZero):
        kloosterman_parameter(model1, int(gammas[tr == 0][0]))


def test_lemma_suite_e1(model1):
    reports = lemma_suite(model1)
    assert [r.check_name for r in reports] == [
        "reduce-count", "f-gamma-modulus", "norm-cubic-identity", "kloosterman-relation"]
    for r in reports:
        assert r.passed, (r.check_name, r.witness)
    assert reports[0].parameters["gammas"] == 720


def test_trace_square(model1):
    r = hilbert90_square_check(1, model1)
    assert r.passed, r.witness
    assert r.observed_histogram == [[1, r.parameters["gammas"]]]
    assert model1.F.sgn(model1.F.neg(model1.F.from_int(1))) == 1  # -1 is a square in GF(9)


def test_association_scheme(K1):
    r = association_scheme_check(K1)
    assert r.passed, r.witness
    exp = r.expected
    assert exp["1"] == {"zero": 80, "Y": -1, "rest": -1}
    assert exp["2"]["zero"] == -K1.K.size


def test_e2_profile():
    S = build_K(2)
    r = line_profile(S)
    assert r.passed, r.witness
    assert (S.m, S.n) == (36, 45)
    assert [v for v, _ in r.observed_histogram] == [36, 45]
    assert complement_profile(S).passed


def test_cap():
    with pytest.raises(CapExceeded):
        build_K(3)
