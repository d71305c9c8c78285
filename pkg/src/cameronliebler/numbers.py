"""Exact number types: cyclotomic integers in Z[zeta_p] and Gaussian rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np


class CycInt:
    """sum_j counts[j] * zeta_p**j, kept in normal form counts[p-1] == 0.

    The normal form is unique because 1 + zeta + ... + zeta^(p-1) = 0 is the
    only relation among the p-th roots of unity.
    """

    __slots__ = ("p", "counts")

    def __init__(self, p: int, counts):
        counts = [int(c) for c in counts]
        if len(counts) != p:
            raise ValueError(f"need {p} counts, got {len(counts)}")
        top = counts[-1]
        self.p = p
        self.counts = tuple(c - top for c in counts)

    @classmethod
    def from_int(cls, p: int, m: int) -> CycInt:
        return cls(p, [m] + [0] * (p - 1))

    @classmethod
    def zeta(cls, p: int, j: int = 1) -> CycInt:
        c = [0] * p
        c[j % p] = 1
        return cls(p, c)

    @classmethod
    def from_exponents(cls, p: int, exponents) -> CycInt:
        """Sum of zeta**e over the given exponents."""
        e = np.asarray(exponents, dtype=np.int64).ravel() % p
        return cls(p, np.bincount(e, minlength=p))

    def _coerce(self, other) -> CycInt:
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("CycInts over different primes")
            return other
        if isinstance(other, (int, np.integer)):
            return CycInt.from_int(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, [a + b for a, b in zip(self.counts, other.counts)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, [-a for a in self.counts])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, [a - b for a, b in zip(self.counts, other.counts)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return CycInt(self.p, [a * int(other) for a in self.counts])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.counts):
            if a:
                for j, b in enumerate(other.counts):
                    out[(i + j) % p] += a * b
        return CycInt(p, out)

    __rmul__ = __mul__

    def conj(self) -> CycInt:
        p = self.p
        return CycInt(p, [self.counts[(-j) % p] for j in range(p)])

    def norm2(self) -> CycInt:
        """|z|^2 = z * conj(z), exact."""
        return self * self.conj()

    def exact_div(self, d: int) -> CycInt:
        if any(c % d for c in self.counts):
            raise ArithmeticError(f"{self} is not divisible by {d}")
        return CycInt(self.p, [c // d for c in self.counts])

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.counts[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational integer")
        return self.counts[0]

    def to_complex(self) -> complex:
        z = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return complex(np.dot(self.counts, z))

    def __eq__(self, other):
        if isinstance(other, CycInt):
            return self.p == other.p and self.counts == other.counts
        if isinstance(other, (int, np.integer)):
            return self.is_rational() and self.counts[0] == int(other)
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.counts[0])
        return hash((self.p, self.counts))

    def to_json(self):
        """Rational values serialize as ints, the rest as the count vector."""
        return self.counts[0] if self.is_rational() else list(self.counts)

    @classmethod
    def from_json(cls, p: int, value) -> CycInt:
        if isinstance(value, list):
            return cls(p, value)
        return cls.from_int(p, int(value))

    def sort_key(self):
        return (0, self.counts[0]) if self.is_rational() else (1, self.counts)

    def __repr__(self):
        if self.is_rational():
            return f"CycInt({self.p}, {self.counts[0]})"
        terms = [f"{c}z^{j}" for j, c in enumerate(self.counts) if c]
        return f"CycInt({self.p}, {' + '.join(terms)})"


@dataclass(frozen=True)
class GaussianRat:
    """(re_num + im_num * i) / den with den a power of two."""

    re_num: int
    im_num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        g = gcd(gcd(self.re_num, self.im_num), self.den)
        if g > 1:
            object.__setattr__(self, "re_num", self.re_num // g)
            object.__setattr__(self, "im_num", self.im_num // g)
            object.__setattr__(self, "den", self.den // g)
        if self.den & (self.den - 1):
            raise ValueError(f"denominator {self.den} is not a power of two")

    @classmethod
    def ipow(cls, k: int) -> GaussianRat:
        return (cls(1, 0), cls(0, 1), cls(-1, 0), cls(0, -1))[k % 4]

    @classmethod
    def from_ipow_counts(cls, counts) -> GaussianRat:
        """Sum of i**k weighted by counts[k], k = 0..3."""
        c = [int(x) for x in counts]
        return cls(c[0] - c[2], c[1] - c[3])

    def _coerce(self, other):
        if isinstance(other, GaussianRat):
            return other
        if isinstance(other, (int, np.integer)):
            return GaussianRat(int(other), 0)
        if isinstance(other, Fraction):
            return GaussianRat(other.numerator * 1, 0, 1) if other.denominator == 1 else \
                GaussianRat(other.numerator, 0, other.denominator)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = max(self.den, o.den)
        a, b = den // self.den, den // o.den
        return GaussianRat(self.re_num * a + o.re_num * b, self.im_num * a + o.im_num * b, den)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRat(-self.re_num, -self.im_num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRat(
            self.re_num * o.re_num - self.im_num * o.im_num,
            self.re_num * o.im_num + self.im_num * o.re_num,
            self.den * o.den,
        )

    __rmul__ = __mul__

    def conj(self) -> GaussianRat:
        return GaussianRat(self.re_num, -self.im_num, self.den)

    def norm2(self) -> Fraction:
        return Fraction(self.re_num**2 + self.im_num**2, self.den**2)

    @property
    def real(self) -> Fraction:
        return Fraction(self.re_num, self.den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.im_num, self.den)

    def is_gaussian_integer(self) -> bool:
        return self.den == 1

    def is_integer(self) -> bool:
        return self.den == 1 and self.im_num == 0

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, GaussianRat) else other
        if o is NotImplemented:
            return NotImplemented
        return (self.re_num, self.im_num, self.den) == (o.re_num, o.im_num, o.den)

    def __hash__(self):
        return hash((self.re_num, self.im_num, self.den))

    def __complex__(self):
        return complex(self.re_num / self.den, self.im_num / self.den)

    def to_json(self):
        if self.den == 1:
            return [self.re_num, self.im_num]
        return [self.re_num, self.im_num, self.den]

    def __repr__(self):
        body = f"{self.re_num}{self.im_num:+d}i"
        return f"({body})/{self.den}" if self.den != 1 else f"({body})"


def zi_zeta3_to_gaussian(counts) -> GaussianRat:
    """Collapse sum_{k,l} counts[k][l] * i^k * zeta_3^l into Z[i].

    Raises ArithmeticError when the value is not in Q(i), i.e. when the
    coefficient of zeta_3 over Z[i] is nonzero.
    """
    c = np.asarray(counts, dtype=object).reshape(4, 3)
    # zeta^2 = -1 - zeta
    rational = [int(c[k, 0] - c[k, 2]) for k in range(4)]
    zeta_part = [int(c[k, 1] - c[k, 2]) for k in range(4)]
    if zeta_part[0] != zeta_part[2] or zeta_part[1] != zeta_part[3]:
        raise ArithmeticError("value is not in Z[i]")
    return GaussianRat.from_ipow_counts(rational)
