"""Two-intersection sets in AG(2, 3^(2e)) and the character sums behind them.

The plane model: points of PG(2,q) are <w_1^i>, i in Z_N, the line at
infinity is J = {j : Tr(w_1^j) = 0}, and the affine lines are
l_i = {j not in J : Tr(w_1^(i+j)) = 0} for i = 1..N-1.

chi_4 is the quartic character of E with chi_4(w^N) = i, i.e.
chi_4(w^t) = i^(u t) with u N = 1 mod 4; on F it is chi_4(w_0^k) = i^k.
All sums are exact Gaussian integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charsum import kloosterman_q4, residue_class_sums
from .errors import (
    GammaInSubfield,
    ModulusViolation,
    ProfileViolation,
    SchemeViolation,
    SizeMismatch,
    TraceZero,
    Violation,
)
from .geometry import Tower
from .numbers import CycInt, GaussianRat
from .report import CertReport, Timer, histogram

A_COEF = GaussianRat(1, -1, 4)  # (1 - i) / 4
C_COEF = GaussianRat(1, 1, 4)  # (1 + i) / 4


@dataclass
class AffinePlaneModel:
    e: int
    tower: Tower
    J: np.ndarray
    points: np.ndarray

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def N(self) -> int:
        return self.tower.N

    @property
    def E(self):
        return self.tower.E

    @property
    def F(self):
        return self.tower.F

    @property
    def chi4_u(self) -> int:
        """u with chi_4(w^t) = i^(u t)."""
        return pow(self.N, -1, 4)

    def chi4(self, a):
        """Exponent k with chi_4(a) = i^k, for nonzero E codes."""
        return (self.chi4_u * (np.asarray(a) - 1)) % 4 if isinstance(a, np.ndarray) \
            else (self.chi4_u * (a - 1)) % 4

    def line(self, i: int) -> np.ndarray:
        j = self.points
        return j[self.tower.trace(self.tower.w1(i + j)) == 0]


def affine_plane(e: int, modulus=None) -> AffinePlaneModel:
    if e < 1:
        raise ValueError("e must be at least 1")
    tower = Tower(3 ** (2 * e), modulus)
    idx = np.arange(tower.N, dtype=np.int64)
    onJ = tower.trace(tower.w1(idx)) == 0
    model = AffinePlaneModel(e, tower, idx[onJ], idx[~onJ])
    q = tower.q
    if model.J.size != q + 1 or model.points.size != q * q:
        raise SizeMismatch(f"|J| = {model.J.size}, |points| = {model.points.size}")
    sizes = line_counts(model, model.points)[1:]
    if np.any(sizes != q):
        raise SizeMismatch("an affine line does not have q points")
    return model


@dataclass
class TwoIntersectionSet:
    model: AffinePlaneModel
    K: np.ndarray
    m: int
    n: int

    def to_dict(self) -> dict:
        return {
            "schema": "affine-set/1",
            "e": self.model.e,
            "q": self.model.q,
            "m": self.m,
            "n": self.n,
            "size": int(self.K.size),
            "K": [int(k) for k in self.K],
            "field": self.model.E.descriptor(),
        }


def build_K(e: int, model: AffinePlaneModel | None = None) -> TwoIntersectionSet:
    """K = {k : Tr(w_1^k) in C_0 u C_1}, quartic classes taken w.r.t. w_0 = w^N."""
    model = affine_plane(e) if model is None else model
    tower, F = model.tower, model.F
    idx = np.arange(tower.N, dtype=np.int64)
    tr = tower.trace(tower.w1(idx))
    cls = np.where(tr == 0, -1, (tr - 1) % 4)
    K = idx[(cls == 0) | (cls == 1)]
    q, r = model.q, 3**e
    return TwoIntersectionSet(model, K, (q - r) // 2, (q + r) // 2)


def line_counts(model: AffinePlaneModel, K) -> np.ndarray:
    """|K meet l_i| for i = 0..N-1 (entry 0 is the empty line at infinity)."""
    N = model.N
    ind = np.zeros(N, dtype=np.int64)
    ind[np.asarray(K, dtype=np.int64)] = 1
    i = np.arange(N, dtype=np.int64)
    # j in l_i iff j = t - i with t in J, and j itself is not in J
    onJ = np.zeros(N, dtype=bool)
    onJ[model.J] = True
    j = (model.J[None, :] - i[:, None]) % N
    return (ind[j] * ~onJ[j]).sum(axis=1)


def line_profile(S: TwoIntersectionSet, K=None, m: int | None = None,
                 n: int | None = None) -> CertReport:
    """Every affine line meets K in m or n points, and both occur."""
    model = S.model
    K = S.K if K is None else np.asarray(K)
    m = S.m if m is None else m
    n = S.n if n is None else n
    with Timer() as t:
        counts = line_counts(model, K)[1:]
        witness = None
        bad = np.flatnonzero(~np.isin(counts, [m, n]))
        if bad.size:
            witness = {"line": int(bad[0] + 1), "count": int(counts[bad[0]])}
        elif not (np.any(counts == m) and np.any(counts == n)):
            witness = {"reason": "only one intersection size occurs"}
        if np.any(np.isin(K, model.J)):
            witness = {"reason": "K meets the line at infinity"}
        # every affine point lies on q+1 affine lines
        if witness is None and counts.sum() != K.size * (model.q + 1):
            witness = {"reason": "double count fails", "sum": int(counts.sum())}
    return CertReport(
        "affine-profile",
        {"e": model.e, "q": model.q, "K": int(K.size), "lines": int(counts.size)},
        [m, n],
        histogram(counts.tolist()),
        witness is None,
        t.ms,
        witness,
        ProfileViolation,
    )


def complement_profile(S: TwoIntersectionSet) -> CertReport:
    comp = np.setdiff1d(S.model.points, S.K)
    q = S.model.q
    return line_profile(S, comp, q - S.n, q - S.m)


# -- sums attached to gamma in E \ F ------------------------------------------------------

def _check_gamma(model: AffinePlaneModel, gamma: int):
    if gamma == 0 or model.F.contains(gamma):
        raise GammaInSubfield("gamma must lie in E \\ F")


def _gauss_from_exponents(k) -> GaussianRat:
    counts = np.bincount(np.asarray(k, dtype=np.int64) % 4, minlength=4)
    return GaussianRat.from_ipow_counts(counts)


def f_elements(model: AffinePlaneModel) -> np.ndarray:
    """All elements of F as E codes."""
    return model.F.embed(model.F.elements())


def h_sum(model: AffinePlaneModel, gamma: int, j: int) -> GaussianRat:
    """H_{gamma,j} = sum_{x in F} chi_4^j(1 + gamma x)."""
    _check_gamma(model, gamma)
    E = model.E
    vals = E.add(1, E.mul(gamma, f_elements(model)))
    return _gauss_from_exponents(j * model.chi4(vals))


def reduce_count(model: AffinePlaneModel, gamma: int, K=None) -> int:
    """|{i : Tr(w_1^i) in C_0 u C_1, Tr(gamma w_1^i) = 0}| by enumeration."""
    K = build_K(model.e, model).K if K is None else K
    tower = model.tower
    return int(np.count_nonzero(tower.trace(tower.E.mul(gamma, tower.w1(K))) == 0))


def gamma_coefficients(model: AffinePlaneModel, gamma: int) -> tuple[int, int, int]:
    """(Tr(g^-1), Tr(g^(-1-q)), Norm(g^-1)) as E codes lying in F."""
    E, F, q = model.E, model.F, model.q
    ginv = E.inv(gamma)
    c2 = F.embed(model.tower.trace(ginv))
    c1 = F.embed(model.tower.trace(E.pow(gamma, -1 - q)))
    c0 = E.norm(ginv, F.f)
    return c2, c1, c0


def f_gamma_values(model: AffinePlaneModel, gamma: int) -> np.ndarray:
    """f_gamma(x) = x^3 + Tr(g^-1) x^2 + Tr(g^(-1-q)) x + Norm(g^-1) over x in F."""
    E = model.E
    c2, c1, c0 = gamma_coefficients(model, gamma)
    x = f_elements(model)
    val = E.pow(x, 3)
    val = E.add(val, E.mul(c2, E.pow(x, 2)))
    val = E.add(val, E.mul(c1, x))
    return E.add(val, c0)


def f_gamma_sum(model: AffinePlaneModel, gamma: int, j: int) -> GaussianRat:
    """sum_{x in F} chi_4^(-j)(f_gamma(x)); its squared modulus must be 3^(2e)."""
    _check_gamma(model, gamma)
    vals = f_gamma_values(model, gamma)
    if np.any(vals == 0):
        raise ModulusViolation("f_gamma vanishes on F", {"gamma": gamma})
    return _gauss_from_exponents(-j * model.chi4(vals))


def cube_root(model: AffinePlaneModel, t: int) -> int:
    """t^(1/3) in F as t^(3^(2e-1)) (inverse Frobenius)."""
    return model.E.pow(t, model.q // 3)


def kloosterman_parameter(model: AffinePlaneModel, gamma: int) -> int:
    """z with |sum chi_4^-j(f_gamma)| = |K_{j,z}|, as an F code."""
    E, F = model.E, model.F
    c2, c1, c0 = gamma_coefficients(model, gamma)
    if c2 == 0:
        raise TraceZero("Tr(gamma^-1) = 0; use the direct modulus check instead")
    a0 = cube_root(model, c0)
    a1 = c1
    a2 = E.inv(c2)
    y = E.add(E.sub(a0, cube_root(model, E.mul(E.pow(a1, 2), a2))), E.mul(a1, a2))
    z = E.neg(E.mul(y, a2))
    return F.restrict(z)


def kloosterman_relation_check(model: AffinePlaneModel, gamma: int, j: int) -> CertReport:
    with Timer() as t:
        z = kloosterman_parameter(model, gamma)
        lhs = f_gamma_sum(model, gamma, j)
        k = kloosterman_q4(j, z, model.F)
        ok = lhs.norm2() == k.norm2()
    return CertReport(
        "kloosterman-relation",
        {"e": model.e, "gamma": int(gamma), "j": j, "z": int(z)},
        str(lhs.norm2()),
        [[str(k.norm2()), 1]],
        ok,
        t.ms,
        None if ok else {"f_sum": lhs.to_json(), "kloosterman": k.to_json()},
        Violation,
    )


def non_subfield_elements(model: AffinePlaneModel) -> np.ndarray:
    allE = model.E.nonzero()
    return allE[~model.F.contains(allE)]


def lemma_suite(model: AffinePlaneModel) -> list[CertReport]:
    """Exhaustive checks over every gamma in E \\ F and j in {1, 3}."""
    K = build_K(model.e, model).K
    gammas = non_subfield_elements(model)
    q, target = model.q, 3 ** (2 * model.e)
    E = model.E
    reduce_fail = modulus_fail = cube_fail = kloo_fail = None
    moduli = []
    kloo_zero = 0
    with Timer() as t_all:
        for g in gammas:
            g = int(g)
            h1, h3 = h_sum(model, g, 1), h_sum(model, g, 3)
            predicted = A_COEF * h1 + C_COEF * h3 + GaussianRat(q, 0, 2)
            count = reduce_count(model, g, K)
            if reduce_fail is None and (predicted != count or h1.conj() != h3):
                reduce_fail = {"gamma": g, "count": count, "predicted": predicted.to_json()}
            for j in (1, 3):
                s = f_gamma_sum(model, g, j)
                moduli.append(int(s.norm2()))
                if modulus_fail is None and s.norm2() != target:
                    modulus_fail = {"gamma": g, "j": j, "sum": s.to_json()}
                hj = h1 if j == 1 else h3
                chi_g = GaussianRat.ipow(j * model.chi4(g))
                if cube_fail is None and hj != chi_g * s:
                    cube_fail = {"gamma": g, "j": j}
                if model.tower.trace(E.inv(g)) != 0:
                    z = kloosterman_parameter(model, g)
                    kloo_zero += z == 0
                    k = kloosterman_q4(j, z, model.F)
                    if kloo_fail is None and k.norm2() != s.norm2():
                        kloo_fail = {"gamma": g, "j": j, "z": int(z)}
    params = {"e": model.e, "gammas": int(gammas.size)}
    ms = t_all.ms
    return [
        CertReport("reduce-count", params, "q/2 + a H1 + c H3", [[True, int(gammas.size)]],
                   reduce_fail is None, ms, reduce_fail, Violation),
        CertReport("f-gamma-modulus", params, target, histogram(moduli),
                   modulus_fail is None, ms, modulus_fail, ModulusViolation),
        CertReport("norm-cubic-identity", params, "H = chi_4^j(gamma) * sum", [],
                   cube_fail is None, ms, cube_fail, Violation),
        CertReport("kloosterman-relation", dict(params, z_zero=int(kloo_zero)), "equal moduli",
                   [], kloo_fail is None, ms, kloo_fail, Violation),
    ]


def hilbert90_square_check(e: int, model: AffinePlaneModel | None = None,
                           samples: int = 100, seed: int = 7) -> CertReport:
    """Tr(g^(1+q)) is a nonzero square whenever Tr(g) = 0, g not in F."""
    model = affine_plane(e) if model is None else model
    E, F, q, tower = model.E, model.F, model.q, model.tower
    with Timer() as t:
        gammas = non_subfield_elements(model)
        gammas = gammas[tower.trace(gammas) == 0]
        vals = tower.trace(E.pow(gammas, 1 + q))
        signs = F.sgn(vals)
        witness = None
        bad = np.flatnonzero(signs != 1)
        if bad.size:
            witness = {"gamma": int(gammas[bad[0]]), "value": int(vals[bad[0]])}
        rng = np.random.default_rng(seed)
        for y in rng.integers(1, E.order, size=samples):
            y = int(y)
            g = E.sub(y, E.pow(y, q))
            lhs = tower.trace(E.pow(g, 1 + q))
            rhs = F.neg(F.pow(tower.trace(y), 2))
            if lhs != rhs and witness is None:
                witness = {"y": y, "lhs": lhs, "rhs": rhs}
    return CertReport(
        "trace-square",
        {"e": e, "gammas": int(gammas.size), "samples": samples, "seed": seed},
        1,
        histogram(signs.tolist()),
        witness is None,
        t.ms,
        witness,
        Violation,
    )


# -- association scheme -------------------------------------------------------------------

def association_scheme_check(S: TwoIntersectionSet) -> CertReport:
    """psi(w^a D_i) is constant on {0}, Y and the rest, for i = 1, 2, 3.

    The classes live in the w-indexed model, where k in Z_N stands for the
    point <w^k>; a w_1-index k maps to (q-1)k mod N.
    """
    model = S.model
    E, N, q = model.E, model.N, model.q
    with Timer() as t:
        shift = model.tower.w1_log
        Jw = np.sort((model.J * shift) % N)
        Xw = np.sort((S.K * shift) % N)
        rest = np.setdiff1d(np.arange(N), np.union1d(Jw, Xw))
        P = residue_class_sums(E, N)  # psi over w^r F*, r mod N
        a = np.arange(N, dtype=np.int64)

        def psi_of(classes):
            idx = (a[:, None] + classes[None, :]) % N
            return P[idx].sum(axis=1)

        v1, v2, v3 = psi_of(Jw), psi_of(Xw), psi_of(rest)
        # Y from direct line counts in the w-indexed model
        onJ = np.zeros(N, dtype=bool)
        onJ[Jw] = True
        inX = np.zeros(N, dtype=bool)
        inX[Xw] = True
        jj = (Jw[None, :] - a[:, None]) % N
        counts = (inX[jj] & ~onJ[jj]).sum(axis=1)
        Y = (a != 0) & (counts == S.m)
        parts = {"zero": a == 0, "Y": Y, "rest": (a != 0) & ~Y}
        size = Xw.size
        expected = {
            1: {"zero": q * q - 1, "Y": -1, "rest": -1},
            2: {"zero": -size, "Y": -size + q * S.m, "rest": -size + q * S.n},
        }
        expected[3] = {k: -1 - expected[1][k] - expected[2][k] for k in parts}
        witness = None
        observed = []
        for i, vals in ((1, v1), (2, v2), (3, v3)):
            for name, mask in parts.items():
                if not mask.any():
                    witness = witness or {"class": i, "part": name, "reason": "empty part"}
                    continue
                rows = np.unique(vals[mask] - vals[mask][:, -1:], axis=0)
                observed.append([[i, name], [CycInt(E.p, r).to_json() for r in rows]])
                if rows.shape[0] != 1 or CycInt(E.p, rows[0]) != expected[i][name]:
                    witness = witness or {"class": i, "part": name,
                                          "values": [CycInt(E.p, r).to_json() for r in rows]}
    return CertReport(
        "association-scheme",
        {"e": model.e, "q": q, "Y": int(Y.sum())},
        {str(i): expected[i] for i in (1, 2, 3)},
        observed,
        witness is None,
        t.ms,
        witness,
        SchemeViolation,
    )
