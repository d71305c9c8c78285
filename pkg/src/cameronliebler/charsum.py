"""Exact and numeric character sums over finite fields.

Exact sums are ``CycInt`` values in Z[zeta_p] with psi(x) = zeta_p**Tr(x),
Tr the absolute trace.  Sums involving the quartic character are collapsed
into Gaussian integers.  Only the didactic Gauss-sum identities use complex
floating point.
"""

from __future__ import annotations

import cmath
from math import gcd

import numpy as np

from .errors import (
    BadModulus,
    BadOrder,
    CapExceeded,
    DivisibleByGroupOrder,
    MixedFields,
    NotASubfield,
    PrincipalChi,
)
from .gf import FieldElem, FieldTable, field_cap
from .numbers import CycInt, GaussianRat, zi_zeta3_to_gaussian
from .report import CertReport, Timer, histogram, histogram_from_counts

NUMERIC_CAP = 3**8
NUMERIC_TOL = 1e-6


# -- plain exact sums ---------------------------------------------------------

def _as_codes(subset, field: FieldTable | None):
    items = list(subset)
    tables = {id(x.table): x.table for x in items if isinstance(x, FieldElem)}
    if len(tables) > 1:
        raise MixedFields("subset mixes elements of different fields")
    if tables:
        table = next(iter(tables.values()))
        if field is not None and field is not table:
            raise MixedFields("subset elements do not belong to the given field")
        if len(tables) and any(not isinstance(x, FieldElem) for x in items):
            raise MixedFields("subset mixes bound and raw elements")
        field = table
        codes = np.array([x.rep for x in items], dtype=np.int64)
    else:
        if field is None:
            raise ValueError("raw element codes need an explicit field")
        codes = np.asarray(items, dtype=np.int64).ravel()
        if codes.size and (codes.min() < 0 or codes.max() >= field.order):
            raise MixedFields("element code outside the field")
    return field, codes


def char_sum(subset, scale=1, field: FieldTable | None = None) -> CycInt:
    """sum over x in subset of psi(scale * x), exactly."""
    field, codes = _as_codes(subset, field)
    if isinstance(scale, FieldElem):
        if scale.table is not field:
            raise MixedFields("scale lives in a different field")
        scale = scale.rep
    scaled = field.mul(int(scale), codes)
    return CycInt.from_exponents(field.p, field.abs_trace[scaled])


def cyclotomic_class(i: int, k: int, field: FieldTable) -> np.ndarray:
    """Codes of C_i = w^i <w^k>."""
    if k <= 0 or field.n % k:
        raise BadModulus(f"{k} does not divide {field.n}")
    return np.arange(i % k, field.n, k, dtype=np.int64) + 1


def gauss_period(i: int, k: int, field: FieldTable) -> CycInt:
    return char_sum(cyclotomic_class(i, k, field), 1, field)


def quadratic_gauss_sum(field: FieldTable) -> CycInt:
    """G(eta) = sum_{x != 0} eta(x) psi(x), eta the quadratic character."""
    return gauss_period(0, 2, field) - gauss_period(1, 2, field)


def residue_class_sums(field: FieldTable, modulus: int) -> np.ndarray:
    """Row r holds the count vector of sum_{t = r mod modulus} psi(w^t)."""
    if field.n % modulus:
        raise BadModulus(f"{modulus} does not divide {field.n}")
    t = np.arange(field.n, dtype=np.int64)
    tr = field.abs_trace[t + 1]
    out = np.zeros((modulus, field.p), dtype=np.int64)
    np.add.at(out, (t % modulus, tr), 1)
    return out


# -- T_u sums -----------------------------------------------------------------

def t_sums(bundle) -> list[CycInt]:
    """T_u for every u in Z_{2N}, using that T_u only depends on u mod 2N.

    T_u = sum_{i in Xbar} sum_{s in S} psi_F(Tr(w^(u+i)) s) with S the nonzero
    squares of F.  Since psi_F(Tr(y) s) = psi_E(y s) and S = <w^(2N)>, the inner
    double sum runs over the residue class u + i mod 2N.
    """
    E = bundle.E
    two_n = 2 * bundle.N
    classes = residue_class_sums(E, two_n)
    xbar = np.asarray(sorted(bundle.Xbar), dtype=np.int64)
    u = np.arange(two_n, dtype=np.int64)
    totals = classes[(u[:, None] + xbar[None, :]) % two_n].sum(axis=1)
    return [CycInt(E.p, row) for row in totals]


def t_sum(u: int, bundle) -> CycInt:
    return t_sums(bundle)[u % (2 * bundle.N)]


def t_sum_direct(u: int, bundle) -> CycInt:
    """Unoptimized evaluation straight from the double sum (test oracle).

    Works entirely in F: psi_F(c) = zeta_p^(absTr_F(c)) with F's own trace table.
    """
    E, F = bundle.E, bundle.F
    squares = np.arange(0, F.n, 2, dtype=np.int64) + 1
    total = CycInt.from_int(E.p, 0)
    for i in sorted(bundle.Xbar):
        tr = E.rel_trace(E.elem(u + i), F)
        total = total + char_sum(squares, tr, F)
    return total


# -- multiplicative characters (numeric) ---------------------------------------

class MulChar:
    """chi(w^t) = exp(2 pi i * exponent * t / n) on the multiplicative group."""

    def __init__(self, field: FieldTable, exponent: int):
        self.field = field
        self.exponent = exponent % field.n

    @classmethod
    def of_order(cls, field: FieldTable, order: int, power: int = 1) -> MulChar:
        if order <= 0 or field.n % order:
            raise BadModulus(f"no character of order {order} on GF({field.order})")
        return cls(field, power * (field.n // order))

    @property
    def order(self) -> int:
        return self.field.n // gcd(self.exponent, self.field.n)

    @property
    def is_principal(self) -> bool:
        return self.exponent == 0

    def __mul__(self, other: MulChar) -> MulChar:
        return MulChar(self.field, self.exponent + other.exponent)

    def __pow__(self, k: int) -> MulChar:
        return MulChar(self.field, self.exponent * k)

    def restrict(self, sub: FieldTable) -> MulChar:
        if sub.parent is not self.field:
            raise NotASubfield("restriction target is not a subfield table")
        return MulChar(sub, self.exponent % sub.n)

    def __call__(self, a: int) -> complex:
        if a == 0:
            return 0j
        return cmath.exp(2j * cmath.pi * self.exponent * (a - 1) / self.field.n)

    def table(self) -> np.ndarray:
        """chi at every nonzero element, indexed by log."""
        t = np.arange(self.field.n, dtype=np.float64)
        return np.exp(2j * np.pi * (self.exponent * t % self.field.n) / self.field.n)


def _numeric_guard(field: FieldTable):
    if field.order > NUMERIC_CAP:
        raise CapExceeded(f"numeric checks are limited to fields of order <= {NUMERIC_CAP}")


def _psi_table(field: FieldTable) -> np.ndarray:
    tr = field.abs_trace[1:]
    return np.exp(2j * np.pi * tr / field.p)


def gauss_sum_of(chi: MulChar) -> complex:
    _numeric_guard(chi.field)
    if chi.is_principal:
        return complex(-1.0)
    return complex(np.sum(chi.table() * _psi_table(chi.field)))


def gauss_sum_numeric(chi_order: int, exponent: int, field: FieldTable) -> complex:
    return gauss_sum_of(MulChar.of_order(field, chi_order, exponent))


def gauss_norm_check(chi_order: int, exponent: int, field: FieldTable) -> CertReport:
    """|G(chi)|^2 = q for nonprincipal chi, G = -1 for principal chi."""
    with Timer() as t:
        chi = MulChar.of_order(field, chi_order, exponent)
        g = gauss_sum_of(chi)
        if chi.is_principal:
            expected, observed = -1.0, g.real
            ok = abs(g + 1) < NUMERIC_TOL
        else:
            expected, observed = float(field.order), abs(g) ** 2
            ok = abs(observed - expected) < NUMERIC_TOL
    return CertReport(
        "gauss-norm",
        {"field": field.order, "order": chi_order, "exponent": exponent},
        expected,
        [[round(observed, 9), 1]],
        ok,
        t.ms,
        None if ok else {"gauss_sum": [g.real, g.imag]},
    )


def eisenstein_sum(chi: MulChar, sub: FieldTable) -> complex:
    """sum of chi over {x in E : Tr_{E/F}(x) = 1}."""
    E = chi.field
    nz = E.nonzero()
    tr = E.rel_trace(nz, sub)
    chosen = nz[tr == 1]
    vals = chi.table()[chosen - 1]
    return complex(vals.sum())


def eisenstein_check(chi_order: int, exponent: int, E: FieldTable, F: FieldTable) -> CertReport:
    """Compare the trace-one character sum with its Gauss-sum expression."""
    _numeric_guard(E)
    chi = MulChar.of_order(E, chi_order, exponent)
    if chi.is_principal:
        raise PrincipalChi("the trace-one sum identity needs a nonprincipal character")
    with Timer() as t:
        lhs = eisenstein_sum(chi, F)
        chi_r = chi.restrict(F)
        if chi_r.is_principal:
            rhs = -gauss_sum_of(chi) / F.order
            branch = "restriction principal"
        else:
            rhs = gauss_sum_of(chi) / gauss_sum_of(chi_r)
            branch = "restriction nonprincipal"
        err = abs(lhs - rhs)
        ok = err < NUMERIC_TOL
    return CertReport(
        "eisenstein",
        {"E": E.order, "F": F.order, "order": chi_order, "exponent": exponent, "branch": branch},
        [round(rhs.real, 9), round(rhs.imag, 9)],
        [[[round(lhs.real, 9), round(lhs.imag, 9)], 1]],
        ok,
        t.ms,
        None if ok else {"error": err},
    )


def hasse_davenport_check(ell: int, chi_order: int, exponent: int, field: FieldTable) -> CertReport:
    """G(chi) = G(chi^l) / chi^l(l) * prod_{i=1}^{l-1} G(theta^i) / G(chi theta^i)."""
    _numeric_guard(field)
    if ell < 2 or field.n % ell:
        raise BadOrder(f"no character of order {ell} on GF({field.order})")
    if ell % field.p == 0:
        raise BadOrder(f"{ell} vanishes in characteristic {field.p}")
    chi = MulChar.of_order(field, chi_order, exponent)
    if chi.is_principal:
        raise PrincipalChi("the product formula needs a nonprincipal character")
    theta = MulChar.of_order(field, ell, 1)
    for i in range(1, ell):
        if (chi * theta**i).is_principal:
            raise BadOrder(f"chi * theta^{i} is principal")
    with Timer() as t:
        lhs = gauss_sum_of(chi)
        chi_l = chi**ell
        rhs = gauss_sum_of(chi_l) / chi_l(field.from_int(ell % field.p))
        for i in range(1, ell):
            rhs *= gauss_sum_of(theta**i) / gauss_sum_of(chi * theta**i)
        err = abs(lhs - rhs)
        ok = err < NUMERIC_TOL
    return CertReport(
        "hasse-davenport",
        {"field": field.order, "ell": ell, "order": chi_order, "exponent": exponent},
        [round(rhs.real, 9), round(rhs.imag, 9)],
        [[[round(lhs.real, 9), round(lhs.imag, 9)], 1]],
        ok,
        t.ms,
        None if ok else {"error": err},
    )


# -- digit sums -----------------------------------------------------------------

def digits(a: int, p: int, f: int) -> list[int]:
    """The f base-p digits of a, least significant first."""
    return [(a // p**i) % p for i in range(f)]


def digit_sum(a: int, p: int, f: int) -> int:
    """Sum of the p-ary digits of a mod p^f - 1."""
    m = p**f - 1
    if a % m == 0:
        raise DivisibleByGroupOrder(f"{a} is divisible by {m}")
    return sum(digits(a % m, p, f))


def _s(a: int, p: int, f: int) -> int:
    # zero residue corresponds to the principal character, whose Gauss sum is -1
    return 0 if a % (p**f - 1) == 0 else digit_sum(a, p, f)


def cyclic_carries(h: list[int], b: list[int], p: int) -> tuple[list[int], list[int]] | None:
    """Digits a and carries c with a_i + p c_i = c_{i-1} + h_i + b_i, indices cyclic.

    Returns the unique solution with a != 0, or None when the sum is zero.
    """
    f = len(h)
    solutions = []
    for c_in in (0, 1):
        carry = c_in
        a, c = [], []
        for i in range(f):
            total = carry + h[i] + b[i]
            a.append(total % p)
            carry = total // p
            c.append(carry)
        if carry == c_in and any(a):
            solutions.append((a, c))
    if not solutions:
        return None
    if len(solutions) > 1 and solutions[0][0] != solutions[1][0]:
        raise ArithmeticError("ambiguous carry sequence")
    return solutions[0]


def stickelberger_pair_check(q: int, j: int) -> CertReport:
    """Digit-sum bound behind 3^e | G(chi^-h) G(chi^-(h + (q-1)j/4)).

    For every h = 1..q-2: s(h) + s(h + (q-1)j/4) >= 2e, the carries of the
    cyclic addition reproduce the second summand's digits, and each digit
    block satisfies h_k + h_{k+1} >= c_k + c_{k+1}.
    """
    from .gf import prime_power

    p, f = prime_power(q)
    if p != 3 or f % 2:
        raise BadModulus(f"q = {q} is not an even power of 3")
    if j not in (1, 3):
        raise BadModulus("j must be 1 or 3")
    e = f // 2
    shift = (q - 1) // 4 * j
    b = digits(shift, p, f)
    start = 1 if j == 1 else 0
    failures = []
    sums = []
    with Timer() as t:
        for h in range(1, q - 1):
            total = _s(h, p, f) + _s(h + shift, p, f)
            sums.append(total)
            if total < 2 * e:
                failures.append({"h": h, "digit_sum": total})
                continue
            if (h + shift) % (q - 1) == 0:
                continue  # second character principal; bound already checked
            hd = digits(h, p, f)
            sol = cyclic_carries(hd, b, p)
            if sol is None:
                failures.append({"h": h, "carries": None})
                continue
            a, c = sol
            if a != digits((h + shift) % (q - 1), p, f):
                failures.append({"h": h, "carry_digits": a})
                continue
            if sum(hd) + sum(a) != 2 * sum(hd) - 2 * sum(c) + 2 * e:
                failures.append({"h": h, "carry_identity": c})
                continue
            for k in range(e):
                i0, i1 = (2 * k + start) % f, (2 * k + start + 1) % f
                if hd[i0] + hd[i1] < c[i0] + c[i1]:
                    failures.append({"h": h, "block": [i0, i1]})
                    break
    return CertReport(
        "stickelberger-pair",
        {"q": q, "j": j},
        {"min_digit_sum": 2 * e},
        histogram(sums),
        not failures,
        t.ms,
        failures[0] if failures else None,
    )


# -- quartic character and Kloosterman sums ----------------------------------------

def chi4(a, F: FieldTable):
    """Exponent k of chi_4(a) = i**k, with chi_4(generator of F) = i."""
    return (np.asarray(a) - 1) % 4 if isinstance(a, np.ndarray) else (a - 1) % 4


def kloosterman_q4(j: int, z: int, F: FieldTable) -> GaussianRat:
    """K_{j,z} = sum_{a != 0} chi_4^j(a) psi(z a + 1/a), exactly."""
    if F.p != 3 or F.f % 2:
        raise BadModulus("Kloosterman sums here need q = 3^(2e)")
    a = F.nonzero()
    arg = F.add(F.mul(z, a), F.inv(a))
    counts = np.zeros((4, 3), dtype=np.int64)
    np.add.at(counts, ((j * chi4(a, F)) % 4, F.abs_trace[arg]), 1)
    return zi_zeta3_to_gaussian(counts)


def kloosterman_direct(j: int, z: int, F: FieldTable) -> complex:
    """Term-by-term complex evaluation (test oracle)."""
    total = 0j
    for a in range(1, F.order):
        arg = F.add(F.mul(z, a), F.inv(a))
        total += 1j ** ((j * (a - 1)) % 4) * cmath.exp(2j * cmath.pi * int(F.abs_trace[arg]) / 3)
    return total


# -- transform over GF(p)^m ----------------------------------------------------------

class CharSpectrum:
    """Exact character values at every dual vector of GF(p)^m.

    ``values`` has one row per dual vector (flat base-p index) holding the
    normalized count vector of the value in Z[zeta_p].
    """

    def __init__(self, p: int, m: int, values: np.ndarray):
        self.p = p
        self.m = m
        self.values = values - values[:, -1:]

    def __len__(self):
        return self.values.shape[0]

    def value(self, index: int) -> CycInt:
        return CycInt(self.p, self.values[index])

    @property
    def principal(self) -> CycInt:
        return self.value(0)

    def is_rational(self) -> bool:
        return not np.any(self.values[:, 1:])

    def rational_values(self) -> np.ndarray:
        if not self.is_rational():
            raise ValueError("spectrum has irrational values")
        return self.values[:, 0]

    def histogram(self) -> list[tuple[CycInt, int]]:
        rows, counts = np.unique(self.values, axis=0, return_counts=True)
        pairs = [(CycInt(self.p, r), int(c)) for r, c in zip(rows, counts)]
        return sorted(pairs, key=lambda rc: rc[0].sort_key())

    def histogram_json(self) -> list[list]:
        return histogram_from_counts(self.histogram())

    def total(self) -> CycInt:
        return CycInt(self.p, self.values.sum(axis=0))

    def norm_sum(self) -> CycInt:
        """sum over dual vectors of |value|^2, exactly."""
        p = self.p
        c = self.values
        out = np.zeros(p, dtype=object)
        for k in range(p):
            prod = c * np.roll(c, k, axis=1)
            out[k] = int(prod.sum(dtype=np.int64))
        return CycInt(p, out)

    def parseval_holds(self, subset_size: int) -> bool:
        return self.norm_sum() == self.p**self.m * subset_size


def abelian_char_transform(indicator, p: int, cap: int | None = None) -> CharSpectrum:
    """All character sums of a subset of GF(p)^m at once.

    The subset is given by its indicator over flat base-p indices (digit k is
    coordinate k).  The value at dual vector s is sum_{v in S} zeta^(s . v).
    One radix-p stage per coordinate, each a sum of p^2 rotations of count
    vectors, so the total work is O(m p^(m+1)).
    """
    ind = np.asarray(indicator)
    size = ind.size
    m = 0
    while p**m < size:
        m += 1
    if p**m != size:
        raise ValueError(f"indicator length {size} is not a power of {p}")
    cap = field_cap() if cap is None else cap
    if size > cap:
        raise CapExceeded(f"transform over {size} cells exceeds cap {cap}")
    a = np.zeros((size, p), dtype=np.int64)
    a[:, 0] = ind.astype(np.int64)
    for axis in range(m):
        left = p ** (m - 1 - axis)
        right = p**axis
        a = a.reshape(left, p, right, p)
        out = np.zeros_like(a)
        for s in range(p):
            for x in range(p):
                shift = (s * x) % p
                src = a[:, x]
                out[:, s] += np.roll(src, shift, axis=-1) if shift else src
        a = out
    return CharSpectrum(p, m, a.reshape(size, p))
