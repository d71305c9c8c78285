"""Construction of the line class: I_Q -> X -> Xbar -> (A, B) -> I_X -> D -> M -> L.

Everything is kept as discrete logarithms base w until the end; D is
materialized as a sorted array of packed pairs ``x_code * q^3 + y_code``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadBeta,
    BadResidue,
    BadTangent,
    DecompositionFailure,
    SizeMismatch,
    TraceInvariantFailure,
)
from .geometry import Tower, conic_index_set, klein_keys, on_quadric, projective_key

BUNDLE_SCHEMA = "lineclass/1"


def check_residue(q: int) -> None:
    if q % 12 not in (5, 9):
        raise BadResidue("q mod 12 must be 5 or 9")


def build_X(tower: Tower, d0: int, beta: int, iq=None) -> tuple[list[int], list[int]]:
    """X as E codes and Xbar = log(X) mod 2N, both sorted.

    ``beta`` is an F code (index form of the subfield table).
    """
    check_residue(tower.q)
    E, F, N = tower.E, tower.F, tower.N
    iq = conic_index_set(tower) if iq is None else iq
    if d0 not in iq:
        raise BadTangent(f"{d0} is not in I_Q = {iq}")
    if beta == 0 or F.sgn(beta) != 1:
        raise BadBeta("beta must be a nonzero square of F")
    X = []
    for d in iq:
        if d == d0:
            continue
        coeff = F.embed(tower.trace(tower.w1(d0 + d)))
        X.append(E.mul(tower.w1(d), coeff))
    two = F.embed(F.from_int(2 % tower.p))
    X.append(E.mul(E.mul(two, F.embed(beta)), tower.w1(d0)))
    if any(x == 0 for x in X) or len(set(X)) != tower.q + 1:
        raise SizeMismatch("X does not have q+1 distinct nonzero elements")
    xbar = sorted({(x - 1) % (2 * N) for x in X})
    if len(xbar) != tower.q + 1:
        raise SizeMismatch(f"|Xbar| = {len(xbar)}, expected {tower.q + 1}")
    return sorted(X), xbar


def split_xbar(xbar, N: int) -> tuple[list[int], list[int]]:
    """Xbar = 2A u (2B + N) in Z_{2N}."""
    A, B = [], []
    for r in xbar:
        if r % 2 == 0:
            A.append(r // 2)
        elif (r - N) % 2 == 0:
            B.append(((r - N) // 2) % N)
        else:
            raise DecompositionFailure(f"{r} is neither even nor congruent to N mod 2")
    return sorted(A), sorted(B)


def build_IX(tower: Tower, xbar) -> tuple[list[int], list[int], list[int]]:
    """Returns (A, B, I_X) with I_X = 4A u (4A+N) u (4B+2N) u (4B+3N) mod 4N."""
    N = tower.N
    A, B = split_xbar(xbar, N)
    ix = set()
    for t in A:
        ix.update({(4 * t) % (4 * N), (4 * t + N) % (4 * N)})
    for t in B:
        ix.update({(4 * t + 2 * N) % (4 * N), (4 * t + 3 * N) % (4 * N)})
    ix = sorted(ix)
    if len(ix) != 2 * (tower.q + 1):
        raise SizeMismatch(f"|I_X| = {len(ix)}, expected {2 * (tower.q + 1)}")
    bad = [l for l in ix if tower.trace_w(l) != 0]
    if bad:
        raise TraceInvariantFailure(f"Tr(w^l) != 0 for l in {bad}")
    return A, B, ix


def build_D(tower: Tower, ix) -> np.ndarray:
    """D = {(x y, x y^-1 z w^l)} as sorted packed pairs.

    With x = w^(Na), y = w^((q-1)i), z = w^(4Nj) the pair has logs
    (Na + (q-1)i, Na - (q-1)i + 4Nj + l).
    """
    q, N, n, E = tower.q, tower.N, tower.n, tower.E
    if (q - 1) % 4:
        raise BadResidue("4 must divide q - 1")
    a = np.arange(q - 1, dtype=np.int64)[:, None, None]
    i = np.arange(N, dtype=np.int64)[None, :, None]
    j = np.arange((q - 1) // 4, dtype=np.int64)[None, None, :]
    first = (N * a + (q - 1) * i) % n
    parts = []
    for l in ix:
        second = (N * a - (q - 1) * i + 4 * N * j + l) % n
        fl = np.broadcast_to(first, second.shape)
        parts.append((fl + 1) * E.order + (second + 1))
    packed = np.unique(np.concatenate([p.ravel() for p in parts]))
    expected = (q * q - 1) // 2 * n
    if packed.size != expected:
        raise SizeMismatch(f"|D| = {packed.size}, expected {expected}")
    return packed


def unpack(tower: Tower, packed) -> tuple[np.ndarray, np.ndarray]:
    packed = np.asarray(packed, dtype=np.int64)
    return packed // tower.E.order, packed % tower.E.order


def pack(tower: Tower, x, y) -> np.ndarray:
    return np.asarray(x, dtype=np.int64) * tower.E.order + np.asarray(y, dtype=np.int64)


def build_M(tower: Tower, D) -> np.ndarray:
    """Projective points of D, as canonical packed representatives."""
    x, y = unpack(tower, D)
    keys = np.unique(projective_key(tower, x, y))
    return keys


def build_L(tower: Tower, M) -> np.ndarray:
    """Sorted Plücker keys of the lines attached to M."""
    x, y = unpack(tower, M)
    return np.sort(klein_keys(tower, x, y))


@dataclass
class LineClassBundle:
    tower: Tower
    d0: int
    beta: int
    IQ: list[int]
    X: list[int]
    Xbar: list[int]
    A: list[int]
    B: list[int]
    IX: list[int]
    D: np.ndarray
    M: np.ndarray
    L: np.ndarray
    x_param: int
    extra: dict = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False, compare=False)

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

    def D_xy(self) -> tuple[np.ndarray, np.ndarray]:
        return unpack(self.tower, self.D)

    def M_xy(self) -> tuple[np.ndarray, np.ndarray]:
        return unpack(self.tower, self.M)

    def contains(self, x, y) -> np.ndarray:
        """Membership of (x, y) pairs in D by binary search."""
        key = pack(self.tower, x, y)
        pos = np.searchsorted(self.D, key)
        pos = np.minimum(pos, self.D.size - 1)
        return self.D[pos] == key

    def to_dict(self) -> dict:
        return {
            "schema": BUNDLE_SCHEMA,
            "q": self.q,
            "x": self.x_param,
            "tower": self.tower.descriptor(),
            "d0": self.d0,
            "beta": self.beta,
            "IQ": list(self.IQ),
            "X": list(self.X),
            "Xbar": list(self.Xbar),
            "A": list(self.A),
            "B": list(self.B),
            "IX": list(self.IX),
            "D": [[int(a), int(b)] for a, b in zip(*self.D_xy())],
            "M": [[int(a), int(b)] for a, b in zip(*self.M_xy())],
            "L": [list(map(int, row)) for row in lines_as_tuples(self.q, self.L)],
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def lines_as_tuples(q: int, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    return (keys[:, None] // q ** np.arange(6, dtype=np.int64)) % q


def _assert_invariants(b: LineClassBundle) -> None:
    q, N, tower = b.q, b.N, b.tower
    x_param = b.x_param
    if len(b.Xbar) != q + 1 or len(b.A) + len(b.B) != q + 1:
        raise SizeMismatch("Xbar decomposition has the wrong size")
    if sorted({(q * r) % (2 * N) for r in b.Xbar}) != list(b.Xbar):
        raise TraceInvariantFailure("Xbar is not invariant under multiplication by q")
    dx, dy = b.D_xy()
    if not np.all(on_quadric(tower, dx, dy)):
        raise TraceInvariantFailure("D leaves the quadric")
    if np.any(dx == 0) or np.any(dy == 0):
        raise TraceInvariantFailure("D meets the coordinate planes")
    lam = tower.w0
    if not np.all(b.contains(tower.E.mul(lam, dx), tower.E.mul(lam, dy))):
        raise TraceInvariantFailure("D is not closed under F* scaling")
    if b.M.size != x_param * N or b.L.size != x_param * N or np.unique(b.L).size != b.L.size:
        raise SizeMismatch(f"|M| = {b.M.size}, |L| = {np.unique(b.L).size}, expected {x_param * N}")


def build_bundle(q: int, d0: int | None = None, beta: int = 1, modulus=None,
                 tower: Tower | None = None, check: bool = True) -> LineClassBundle:
    """Run the whole construction for q = 5 or 9 mod 12."""
    check_residue(q)
    tower = Tower(q, modulus) if tower is None else tower
    iq = conic_index_set(tower)
    d0 = iq[0] if d0 is None else d0
    X, xbar = build_X(tower, d0, beta, iq)
    A, B, ix = build_IX(tower, xbar)
    D = build_D(tower, ix)
    M = build_M(tower, D)
    L = build_L(tower, M)
    bundle = LineClassBundle(tower, d0, beta, iq, X, xbar, A, B, ix, D, M, L,
                             (q * q - 1) // 2)
    if check:
        _assert_invariants(bundle)
    return bundle


def extend_to_complementary(bundle: LineClassBundle) -> LineClassBundle:
    """Add the vectors (y, 0), y != 0, raising the parameter to (q^2+1)/2."""
    tower = bundle.tower
    ys = tower.E.nonzero()
    extra = pack(tower, ys, np.zeros_like(ys))
    D = np.union1d(bundle.D, extra)
    M = build_M(tower, D)
    L = build_L(tower, M)
    return LineClassBundle(
        tower, bundle.d0, bundle.beta, bundle.IQ, bundle.X, bundle.Xbar, bundle.A,
        bundle.B, bundle.IX, D, M, L, (bundle.q**2 + 1) // 2,
        {"extended_by": "(y,0)"},
    )


def bundle_from_dict(data: dict) -> LineClassBundle:
    """Rebuild a bundle from its JSON form; the stored sets must match a rebuild."""
    from .gf import field_from_descriptor

    if data.get("schema") != BUNDLE_SCHEMA:
        raise ValueError(f"unknown bundle schema {data.get('schema')!r}")
    q = int(data["q"])
    fdesc = data["tower"]["field"]
    field_from_descriptor(fdesc)
    tower = Tower(q, fdesc["modulus"])
    D = np.sort(pack(tower, *np.asarray(data["D"], dtype=np.int64).T))
    M = np.sort(pack(tower, *np.asarray(data["M"], dtype=np.int64).T))
    L = np.sort(np.asarray(data["L"], dtype=np.int64) @ (q ** np.arange(6, dtype=np.int64)))
    return LineClassBundle(
        tower, int(data["d0"]), int(data["beta"]), list(data["IQ"]), list(data["X"]),
        list(data["Xbar"]), list(data["A"]), list(data["B"]), list(data["IX"]),
        D, M, L, int(data["x"]), dict(data.get("extra", {})),
    )
