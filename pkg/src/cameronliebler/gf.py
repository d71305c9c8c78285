"""Table-driven arithmetic in GF(p^f).

Elements are plain ints in *index form*: ``0`` is the zero element and
``k + 1`` stands for ``w**k`` where ``w`` is the canonical generator (the
residue of the indeterminate modulo the defining polynomial).  Addition goes
through a Zech-logarithm table, so every operation is a couple of table
lookups.  Most methods accept numpy arrays as well as scalars.

A subfield GF(p^d) is a separate ``FieldTable`` whose generator is
``w**step`` with ``step = (p^f - 1) / (p^d - 1)``; its index form is
therefore compatible with the parent's logs (code ``k + 1`` is
``w**(step * k)``).
"""

from __future__ import annotations

import hashlib
import os
from functools import lru_cache

import numpy as np

from .errors import (
    BadModulus,
    CapExceeded,
    EvenCharacteristic,
    MixedFields,
    NonPrime,
    NotASubfield,
    NotPrimitive,
    ZeroElement,
)

DEFAULT_CAP = 3**12
CAP_ENV = "CAMERONLIEBLER_CAP"
DESCRIPTOR_SCHEMA = "field/1"


def field_cap() -> int:
    """Largest field order (and transform size) allowed; env var overrides."""
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    cap = int(raw)
    if cap <= 0:
        raise ValueError(f"{CAP_ENV} must be positive, got {raw!r}")
    return cap


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, f) with q = p**f, or raise NonPrime."""
    for p in range(2, q + 1):
        if q % p == 0:
            f = 0
            m = q
            while m % p == 0:
                m //= p
                f += 1
            if m != 1:
                raise NonPrime(f"{q} is not a prime power")
            return p, f
    raise NonPrime(f"{q} is not a prime power")


# -- polynomials over GF(p), coefficient lists low -> high -------------------

def _poly_mulmod(a, b, g, p):
    f = len(g) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            for i in range(f + 1):
                prod[k - f + i] = (prod[k - f + i] - c * g[i]) % p
    out = prod[:f] + [0] * max(0, f - len(prod))
    return out


def _poly_powmod(e, g, p):
    """x**e modulo monic g."""
    f = len(g) - 1
    result = [1] + [0] * (f - 1)
    base = [0, 1] + [0] * (f - 2) if f > 1 else [(-g[0]) % p]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, g, p)
        base = _poly_mulmod(base, base, g, p)
        e >>= 1
    return result


def is_primitive_poly(coeffs, p: int) -> bool:
    """True iff monic ``coeffs`` (low -> high) is primitive over GF(p).

    x having multiplicative order p^f - 1 in GF(p)[x]/(g) forces the quotient
    ring to be a field, so no separate irreducibility test is needed.
    """
    g = [c % p for c in coeffs]
    f = len(g) - 1
    if f < 1 or g[-1] != 1 or g[0] == 0:
        return False
    n = p**f - 1
    one = [1] + [0] * (f - 1)
    if _poly_powmod(n, g, p) != one:
        return False
    return all(_poly_powmod(n // r, g, p) != one for r in prime_factors(n))


def least_primitive_root(p: int) -> int:
    for g in range(1, p):
        if is_primitive_poly([(-g) % p, 1], p):
            return g
    raise NonPrime(p)


def least_primitive_poly(p: int, f: int) -> tuple[int, ...]:
    """Canonical modulus: the least monic primitive polynomial of degree f.

    Candidates x^f + c_{f-1}x^{f-1} + ... + c_0 are ordered by the integer
    sum(c_i p^i).  Degree one is the exception: it uses x - g with g the least
    primitive root, so GF(p) is generated by its least primitive root.
    """
    if f == 1:
        return ((-least_primitive_root(p)) % p, 1)
    for v in range(p**f):
        coeffs = [(v // p**i) % p for i in range(f)] + [1]
        if coeffs[0] and is_primitive_poly(coeffs, p):
            return tuple(coeffs)
    raise NotPrimitive(f"no primitive polynomial of degree {f} over GF({p})")


def _matpow_mod(m, e, p):
    result = np.eye(m.shape[0], dtype=np.int64)
    while e:
        if e & 1:
            result = result @ m % p
        m = m @ m % p
        e >>= 1
    return result


class FieldTable:
    """GF(p^f) with log/antilog/Zech tables.  Immutable after construction."""

    def __init__(self, p: int, f: int, modulus, *, parent: FieldTable | None = None,
                 step: int = 1):
        self.p = p
        self.f = f
        self.order = p**f
        self.n = self.order - 1
        self.modulus = tuple(int(c) % p for c in modulus)
        self.parent = parent
        self.step = step
        self._subfields: dict[int, FieldTable] = {}
        self._abs_trace = None

        # coefficient vectors of w^k via doubling: rows [L, 2L) = rows [0, L) @ C^L
        f_ = f
        comp = np.zeros((f_, f_), dtype=np.int64)
        for i in range(f_ - 1):
            comp[i, i + 1] = 1
        comp[f_ - 1, :] = [(-c) % p for c in self.modulus[:f_]]
        vecs = np.zeros((self.n, f_), dtype=np.int64)
        vecs[0, 0] = 1
        filled = 1
        power = comp.copy()
        while filled < self.n:
            take = min(filled, self.n - filled)
            vecs[filled:filled + take] = vecs[:take] @ power % p
            power = power @ power % p
            filled += take
        weights = p ** np.arange(f_, dtype=np.int64)
        exp = vecs @ weights
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp] = np.arange(self.n, dtype=np.int64)
        if np.count_nonzero(log >= 0) != self.n or log[0] != -1:
            raise NotPrimitive(f"modulus {self.modulus} is not primitive over GF({p})")
        self.exp = exp
        self.log = log
        low = exp % p
        one_plus = exp - low + (low + 1) % p
        self.zech = log[one_plus]  # -1 where 1 + w^k == 0
        self._neg_shift = self.n // 2 if p != 2 else 0

    def __repr__(self) -> str:
        return f"FieldTable(GF({self.p}^{self.f}), modulus={self.modulus})"

    # -- element helpers ---------------------------------------------------
    def elem(self, k):
        """Index form of w**k."""
        return np.asarray(k) % self.n + 1 if isinstance(k, np.ndarray) else k % self.n + 1

    def log_of(self, a):
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise ZeroElement("log of zero")
            return a - 1
        if a == 0:
            raise ZeroElement("log of zero")
        return a - 1

    def from_int(self, v):
        """Index form of the element whose coefficient vector has base-p value v."""
        if isinstance(v, np.ndarray):
            return self.log[v] + 1
        return int(self.log[v]) + 1

    def to_int(self, a):
        if isinstance(a, np.ndarray):
            return np.where(a == 0, 0, self.exp[np.maximum(a, 1) - 1])
        return 0 if a == 0 else int(self.exp[a - 1])

    def to_coeffs(self, a) -> list[int]:
        v = self.to_int(a)
        return [(v // self.p**i) % self.p for i in range(self.f)]

    def from_coeffs(self, coeffs) -> int:
        return self.from_int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    @property
    def generator(self) -> int:
        return 1 + 1 % self.n if self.n > 1 else 1

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.order, dtype=np.int64)

    # -- arithmetic --------------------------------------------------------
    def mul(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            a = np.asarray(a)
            b = np.asarray(b)
            return np.where((a == 0) | (b == 0), 0, (a + b - 2) % self.n + 1)
        if a == 0 or b == 0:
            return 0
        return (a + b - 2) % self.n + 1

    def inv(self, a):
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise ZeroElement("inverse of zero")
            return (-(a - 1)) % self.n + 1
        if a == 0:
            raise ZeroElement("inverse of zero")
        return (-(a - 1)) % self.n + 1

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if isinstance(a, np.ndarray):
            if e == 0:
                return np.ones_like(a)
            if e < 0 and np.any(a == 0):
                raise ZeroElement("negative power of zero")
            return np.where(a == 0, 0, ((a - 1) * e) % self.n + 1)
        if a == 0:
            if e < 0:
                raise ZeroElement("negative power of zero")
            return 1 if e == 0 else 0
        return ((a - 1) * e) % self.n + 1

    def neg(self, a):
        if isinstance(a, np.ndarray):
            return np.where(a == 0, 0, (a - 1 + self._neg_shift) % self.n + 1)
        if a == 0:
            return 0
        return (a - 1 + self._neg_shift) % self.n + 1

    def add(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
            la = a - 1
            z = self.zech[(b - a) % self.n]
            s = np.where(z < 0, 0, (la + z) % self.n + 1)
            return np.where(a == 0, b, np.where(b == 0, a, s))
        if a == 0:
            return b
        if b == 0:
            return a
        z = int(self.zech[(b - a) % self.n])
        if z < 0:
            return 0
        return (a - 1 + z) % self.n + 1

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def sum(self, values):
        total = 0
        for v in values:
            total = self.add(total, int(v))
        return total

    # -- Frobenius, trace, norm --------------------------------------------
    def frobenius(self, a, k: int = 1):
        """a ** (p**k)."""
        return self.pow(a, self.p**k)

    def trace(self, a, d: int = 1):
        """Trace from this field to its subfield of degree d, in this field's index form."""
        if self.f % d:
            raise NotASubfield(f"GF({self.p}^{d}) is not a subfield of GF({self.p}^{self.f})")
        m = self.f // d
        total = a
        for k in range(1, m):
            total = self.add(total, self.pow(a, self.p ** (d * k)))
        return total

    def norm(self, a, d: int = 1):
        """Norm to the subfield of degree d, in this field's index form."""
        if self.f % d:
            raise NotASubfield(f"GF({self.p}^{d}) is not a subfield of GF({self.p}^{self.f})")
        return self.pow(a, self.n // (self.p**d - 1))

    @property
    def abs_trace(self) -> np.ndarray:
        """Absolute trace of every element as an int in 0..p-1, indexed by index form."""
        if self._abs_trace is None:
            basis_tr = np.array(
                [self.to_int(self.trace(self.elem(j), 1)) for j in range(self.f)],
                dtype=np.int64,
            )
            digits = (self.exp[:, None] // (self.p ** np.arange(self.f))) % self.p
            tr = np.zeros(self.order, dtype=np.int64)
            tr[1:] = digits @ basis_tr % self.p
            tr.setflags(write=False)
            self._abs_trace = tr
        return self._abs_trace

    # -- squares and cyclotomic classes -------------------------------------
    def sgn(self, a):
        """+1 on nonzero squares, -1 on nonsquares, 0 on zero."""
        if self.p == 2:
            raise EvenCharacteristic("sgn needs odd characteristic")
        if isinstance(a, np.ndarray):
            return np.where(a == 0, 0, np.where((a - 1) % 2 == 0, 1, -1))
        if a == 0:
            return 0
        return 1 if (a - 1) % 2 == 0 else -1

    def cyclotomic_class(self, a, k: int):
        if k <= 0 or self.n % k:
            raise BadModulus(f"{k} does not divide {self.n}")
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise ZeroElement("zero has no cyclotomic class")
            return (a - 1) % k
        if a == 0:
            raise ZeroElement("zero has no cyclotomic class")
        return (a - 1) % k

    def in_cyclotomic_class(self, a, k: int, i: int) -> bool:
        return self.cyclotomic_class(a, k) == i % k

    # -- subfields -------------------------------------------------------------
    def subfield(self, d: int) -> FieldTable:
        """GF(p^d) generated by w**step, as a log-compatible table."""
        if d <= 0 or self.f % d:
            raise NotASubfield(f"GF({self.p}^{d}) is not a subfield of GF({self.p}^{self.f})")
        if d == self.f:
            return self
        if d not in self._subfields:
            step = self.n // (self.p**d - 1)
            gamma = self.elem(step)
            # minimal polynomial prod_i (X - gamma^(p^i)), coefficients in GF(p)
            poly = [1]
            for i in range(d):
                root = self.neg(self.pow(gamma, self.p**i))
                new = [0] * (len(poly) + 1)
                for k, c in enumerate(poly):
                    new[k + 1] = self.add(new[k + 1], c)
                    new[k] = self.add(new[k], self.mul(c, root))
                poly = new
            coeffs = [self.to_int(c) for c in poly]
            if any(c >= self.p for c in coeffs):
                raise NotPrimitive("minimal polynomial left the prime field")
            self._subfields[d] = FieldTable(self.p, d, coeffs, parent=self, step=step)
        return self._subfields[d]

    def embed(self, code):
        """Map a subfield code into the parent's index form."""
        if self.parent is None:
            raise NotASubfield("table has no parent field")
        if isinstance(code, np.ndarray):
            return np.where(code == 0, 0, (code - 1) * self.step + 1)
        return 0 if code == 0 else (code - 1) * self.step + 1

    def restrict(self, a):
        """Map a parent element lying in this subfield to this table's code."""
        if self.parent is None:
            raise NotASubfield("table has no parent field")
        if isinstance(a, np.ndarray):
            lg = a - 1
            if np.any((a != 0) & (lg % self.step != 0)):
                raise NotASubfield("element is not in the subfield")
            return np.where(a == 0, 0, lg // self.step + 1)
        if a == 0:
            return 0
        if (a - 1) % self.step:
            raise NotASubfield("element is not in the subfield")
        return (a - 1) // self.step + 1

    def contains(self, a):
        """Whether parent element(s) a lie in this subfield."""
        if isinstance(a, np.ndarray):
            return (a == 0) | ((a - 1) % self.step == 0)
        return a == 0 or (a - 1) % self.step == 0

    def _check_sub(self, sub: FieldTable):
        if sub is not self and sub.parent is not self:
            raise NotASubfield(f"{sub!r} is not a subfield table of {self!r}")

    def rel_trace(self, a, sub: FieldTable):
        """Tr from this field to ``sub``, returned as a code of ``sub``."""
        self._check_sub(sub)
        if sub is self:
            return a
        return sub.restrict(self.trace(a, sub.f))

    def rel_norm(self, a, sub: FieldTable):
        self._check_sub(sub)
        if sub is self:
            return a
        return sub.restrict(self.norm(a, sub.f))

    # -- serialization -------------------------------------------------------
    def check_hash(self) -> str:
        return hashlib.sha256(self.exp.astype("<i8").tobytes()).hexdigest()

    def descriptor(self) -> dict:
        return {
            "schema": DESCRIPTOR_SCHEMA,
            "p": self.p,
            "f": self.f,
            "modulus": list(self.modulus),
            "check": self.check_hash(),
        }


class FieldElem:
    """An element bound to its table; a convenience wrapper over index form."""

    __slots__ = ("table", "rep")

    def __init__(self, table: FieldTable, rep: int):
        rep = int(rep)
        if not 0 <= rep < table.order:
            raise ValueError(f"index {rep} out of range for {table!r}")
        self.table = table
        self.rep = rep

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.table is not self.table:
                raise MixedFields("operands live in different field tables")
            return other.rep
        raise TypeError(f"cannot combine FieldElem with {type(other).__name__}")

    def __add__(self, other):
        return FieldElem(self.table, self.table.add(self.rep, self._other(other)))

    def __sub__(self, other):
        return FieldElem(self.table, self.table.sub(self.rep, self._other(other)))

    def __mul__(self, other):
        return FieldElem(self.table, self.table.mul(self.rep, self._other(other)))

    def __truediv__(self, other):
        return FieldElem(self.table, self.table.div(self.rep, self._other(other)))

    def __neg__(self):
        return FieldElem(self.table, self.table.neg(self.rep))

    def __pow__(self, e: int):
        return FieldElem(self.table, self.table.pow(self.rep, e))

    def __eq__(self, other):
        return isinstance(other, FieldElem) and other.table is self.table and other.rep == self.rep

    def __hash__(self):
        return hash((id(self.table), self.rep))

    def __repr__(self):
        if self.rep == 0:
            return "0"
        return f"w^{self.rep - 1}"


@lru_cache(maxsize=None)
def _build(p: int, f: int, modulus: tuple[int, ...]) -> FieldTable:
    return FieldTable(p, f, modulus)


def build_field(p: int, f: int, modulus=None, cap: int | None = None) -> FieldTable:
    """Build (or fetch from cache) the table for GF(p^f)."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if f < 1:
        raise ValueError("degree must be positive")
    cap = field_cap() if cap is None else cap
    if p**f > cap:
        raise CapExceeded(f"GF({p}^{f}) has {p**f} elements, cap is {cap}")
    if modulus is None:
        modulus = least_primitive_poly(p, f)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != f + 1 or not is_primitive_poly(modulus, p):
            raise NotPrimitive(f"{modulus} is not a monic primitive polynomial of degree {f}")
    return _build(p, f, tuple(modulus))


def field_from_descriptor(desc: dict, cap: int | None = None) -> FieldTable:
    if desc.get("schema") != DESCRIPTOR_SCHEMA:
        raise ValueError(f"unknown field descriptor schema {desc.get('schema')!r}")
    table = build_field(int(desc["p"]), int(desc["f"]), desc["modulus"], cap=cap)
    if "check" in desc and desc["check"] != table.check_hash():
        raise ValueError("field descriptor check hash does not match regenerated tables")
    return table
