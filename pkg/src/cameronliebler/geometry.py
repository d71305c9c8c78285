"""PG(2,q) on E, the quadric Tr(xy) = 0 on E x E, and lines of PG(3,q).

E = GF(q^3) is viewed as a 3-dimensional space over F = GF(q).  Points of
PG(5,q) are pairs (x, y) of E up to F* scaling.  The Klein map uses the
power basis e_i = w^i of E over F and its trace-dual basis f_i: writing
x = sum x_i e_i and y = sum y_i f_i gives Tr(xy) = sum x_i y_i, and
(x1, x2, x3, y1, y2, y3) are used as Plücker coordinates
(p01, p02, p03, p23, p31, p12) of a line of PG(3,q).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotOnQuadric, SpreadViolation
from .gf import FieldTable, build_field, prime_power

PLUCKER_ORDER = ("p01", "p02", "p03", "p23", "p31", "p12")
_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


# -- linear algebra over a field table ---------------------------------------------

def f_row_reduce(F: FieldTable, rows) -> list[list[int]]:
    """Reduced row echelon form (nonzero rows only) of a matrix of F codes."""
    m = [list(map(int, r)) for r in rows]
    out = []
    ncols = len(m[0]) if m else 0
    col = 0
    while m and col < ncols:
        pivot = next((r for r in m if r[col] != 0), None)
        if pivot is None:
            col += 1
            continue
        m.remove(pivot)
        inv = F.inv(pivot[col])
        pivot = [F.mul(inv, c) for c in pivot]
        m = [[F.sub(c, F.mul(r[col], pc)) for c, pc in zip(r, pivot)] for r in m]
        out = [[F.sub(c, F.mul(r[col], pc)) for c, pc in zip(r, pivot)] for r in out]
        out.append(pivot)
        col += 1
    return out


def f_rank(F: FieldTable, rows) -> int:
    return len(f_row_reduce(F, rows))


def f_inverse(F: FieldTable, mat) -> list[list[int]]:
    k = len(mat)
    aug = [list(r) + [1 if i == j else 0 for j in range(k)] for i, r in enumerate(mat)]
    red = f_row_reduce(F, aug)
    if len(red) < k or any(red[i][i] != 1 for i in range(k)):
        raise ValueError("matrix is singular")
    return [r[k:] for r in red]


def normalize_vector(F: FieldTable, v) -> tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    v = [int(c) for c in v]
    lead = next((c for c in v if c), 0)
    if lead == 0:
        raise ValueError("zero vector has no projective point")
    inv = F.inv(lead)
    return tuple(F.mul(inv, c) for c in v)


def normalize_rows(F: FieldTable, rows: np.ndarray) -> np.ndarray:
    """Vectorized normalize_vector over the rows of an array of F codes."""
    rows = np.asarray(rows, dtype=np.int64)
    nz = rows != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero vector has no projective point")
    first = rows[np.arange(rows.shape[0]), nz.argmax(axis=1)]
    return F.mul(F.inv(first)[:, None], rows)


def vector_key(q: int, rows: np.ndarray) -> np.ndarray:
    """Pack rows of F codes into integers (base q)."""
    rows = np.asarray(rows, dtype=np.int64)
    weights = q ** np.arange(rows.shape[-1], dtype=np.int64)
    return rows @ weights


# -- the field tower -----------------------------------------------------------------------

class Tower:
    """GF(p) < F = GF(q) < E = GF(q^3) together with derived tables."""

    def __init__(self, q: int, modulus=None, cap: int | None = None):
        p, f = prime_power(q)
        self.q, self.p, self.f = q, p, f
        self.E = build_field(p, 3 * f, modulus, cap=cap)
        self.F = self.E.subfield(f)
        self.N = q * q + q + 1
        self.n = q**3 - 1
        self.w1_log = q - 1  # w_1 = w^(q-1) has order N
        self.w0 = self.E.elem(self.N)  # generator of F inside E

    def __repr__(self):
        return f"Tower(q={self.q}, modulus={self.E.modulus})"

    # traces
    @cached_property
    def tr(self) -> np.ndarray:
        """Tr_{E/F} of every E element as an F code."""
        t = self.E.rel_trace(self.E.elements(), self.F)
        t.setflags(write=False)
        return t

    def trace(self, a):
        """Tr_{E/F}(a) as an F code."""
        return self.tr[a] if isinstance(a, np.ndarray) else int(self.tr[a])

    def trace_w(self, k):
        """Tr(w^k) as an F code, for integer or array exponents."""
        return self.trace(self.E.elem(k))

    def w1(self, i):
        """w_1**i for integer or array exponents."""
        return self.E.elem(i * self.w1_log)

    # Klein coordinates
    @cached_property
    def basis(self) -> list[int]:
        return [self.E.elem(i) for i in range(3)]

    @cached_property
    def dual_basis(self) -> list[int]:
        E, F = self.E, self.F
        gram = [[self.trace(E.mul(a, b)) for b in self.basis] for a in self.basis]
        ginv = f_inverse(F, gram)
        out = []
        for j in range(3):
            total = 0
            for k in range(3):
                total = E.add(total, E.mul(F.embed(ginv[j][k]), self.basis[k]))
            out.append(total)
        return out

    @cached_property
    def xcoords(self) -> np.ndarray:
        """Row a: coordinates of a in the basis e (Tr(a f_i))."""
        allE = self.E.elements()
        cols = [self.tr[self.E.mul(allE, fi)] for fi in self.dual_basis]
        return np.stack(cols, axis=1)

    @cached_property
    def ycoords(self) -> np.ndarray:
        """Row a: coordinates of a in the dual basis f (Tr(a e_i))."""
        allE = self.E.elements()
        cols = [self.tr[self.E.mul(allE, ei)] for ei in self.basis]
        return np.stack(cols, axis=1)

    def from_xcoords(self, c) -> int:
        total = 0
        for ci, ei in zip(c, self.basis):
            total = self.E.add(total, self.E.mul(self.F.embed(int(ci)), ei))
        return total

    def from_ycoords(self, c) -> int:
        total = 0
        for ci, fi in zip(c, self.dual_basis):
            total = self.E.add(total, self.E.mul(self.F.embed(int(ci)), fi))
        return total

    # GF(p) digit vectors, used for bulk bilinear counting
    @cached_property
    def digits(self) -> np.ndarray:
        E = self.E
        vals = np.concatenate([[0], E.exp])
        return (vals[:, None] // (E.p ** np.arange(E.f))) % E.p

    @cached_property
    def trace_forms(self) -> np.ndarray:
        """T[l, i, j] = absTr(lambda_l w^(i+j)) for a GF(p)-basis lambda_l of F."""
        E = self.E
        d = E.f
        lambdas = [E.elem(self.N * k) for k in range(self.f)]
        i = np.arange(d)
        forms = []
        for lam in lambdas:
            codes = E.mul(lam, E.elem(i[:, None] + i[None, :]))
            forms.append(E.abs_trace[codes])
        return np.stack(forms)

    def descriptor(self) -> dict:
        return {
            "q": self.q,
            "field": self.E.descriptor(),
            "basis": [int(b) for b in self.basis],
            "dual_basis": [int(b) for b in self.dual_basis],
        }


# -- the conic in PG(2,q) ---------------------------------------------------------------

def conic_index_set(tower: Tower) -> list[int]:
    """I_Q = {i < N : Tr(w_1^(2i)) = 0}, ascending."""
    i = np.arange(tower.N, dtype=np.int64)
    vals = tower.trace_w(2 * tower.w1_log * i)
    return [int(k) for k in i[vals == 0]]


def classify_line(tower: Tower, u: int) -> str:
    """Type of L_u = {<x> : Tr(w^u x) = 0} with respect to the conic Tr(x^2) = 0."""
    v = tower.trace_w(2 * u)
    if v == 0:
        return "tangent"
    return "secant" if tower.F.sgn(v) == 1 else "passant"


def line_conic_points(tower: Tower, u: int, iq=None) -> int:
    """|L_u meet conic| by testing every conic point (independent oracle)."""
    iq = conic_index_set(tower) if iq is None else iq
    pts = tower.w1(np.asarray(iq, dtype=np.int64))
    return int(np.count_nonzero(tower.tr[tower.E.mul(tower.E.elem(u), pts)] == 0))


# -- points of PG(5,q) -----------------------------------------------------------------------

def projective_points(tower: Tower) -> tuple[np.ndarray, np.ndarray]:
    """One representative (x, y) of every point of PG(5,q) on E x E."""
    E, N = tower.E, tower.N
    k = np.arange(N, dtype=np.int64)
    xs0 = np.zeros(N, dtype=np.int64)
    ys0 = E.elem(k)
    xs1 = np.repeat(E.elem(k), E.order)
    ys1 = np.tile(E.elements(), N)
    return np.concatenate([xs0, xs1]), np.concatenate([ys0, ys1])


def projective_key(tower: Tower, x, y) -> np.ndarray:
    """Canonical integer key of <(x, y)>, scaling so log of the leading entry is < N."""
    E, N = tower.E, tower.N
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    lead = np.where(x != 0, x, y)
    if np.any(lead == 0):
        raise ValueError("zero vector has no projective point")
    shift = ((lead - 1) // N) * N
    scale = E.elem(-shift)
    return E.mul(scale, x) * E.order + E.mul(scale, y)


def on_quadric(tower: Tower, x, y):
    return tower.tr[tower.E.mul(x, y)] == 0


@dataclass(frozen=True)
class QuadricPoint:
    """A point <(x, y)> scaled so its first nonzero Klein coordinate is 1."""

    x: int
    y: int

    @classmethod
    def normalize(cls, tower: Tower, x: int, y: int, check: bool = True) -> QuadricPoint:
        if check and tower.trace(tower.E.mul(x, y)) != 0:
            raise NotOnQuadric(f"Tr(xy) != 0 for ({x}, {y})")
        coords = list(tower.xcoords[x]) + list(tower.ycoords[y])
        lead = next((int(c) for c in coords if c), 0)
        if lead == 0:
            raise ValueError("zero vector has no projective point")
        s = tower.F.embed(tower.F.inv(lead))
        return cls(tower.E.mul(s, x), tower.E.mul(s, y))


# -- lines of PG(3,q) ----------------------------------------------------------------------

def plucker_coords(F: FieldTable, u, v) -> np.ndarray:
    """(p01, p02, p03, p23, p31, p12) of the line through u and v (rows allowed)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    cols = [F.sub(F.mul(u[..., i], v[..., j]), F.mul(u[..., j], v[..., i])) for i, j in _PAIRS]
    return np.stack(cols, axis=-1)


def plucker_relation(F: FieldTable, c) -> int:
    c = [int(v) for v in c]
    return F.add(F.add(F.mul(c[0], c[3]), F.mul(c[1], c[4])), F.mul(c[2], c[5]))


def plucker_matrix(F: FieldTable, c) -> list[list[int]]:
    """Antisymmetric 4x4 matrix with entries p_ij; its columns span the line."""
    m = [[0] * 4 for _ in range(4)]
    for (i, j), val in zip(_PAIRS, c):
        m[i][j] = int(val)
        m[j][i] = F.neg(int(val))
    return m


@dataclass(frozen=True)
class PluckerLine:
    coords: tuple[int, ...]

    @classmethod
    def from_coords(cls, F: FieldTable, coords) -> PluckerLine:
        if plucker_relation(F, coords) != 0:
            raise NotOnQuadric(f"{tuple(coords)} violates the Plücker relation")
        return cls(normalize_vector(F, coords))

    @classmethod
    def through(cls, F: FieldTable, u, v) -> PluckerLine:
        c = plucker_coords(F, u, v)
        if not np.any(c):
            raise ValueError("points are dependent")
        return cls(normalize_vector(F, c))

    def span(self, F: FieldTable) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Two points of PG(3,q) spanning the line."""
        m = plucker_matrix(F, self.coords)
        for (i, j), val in zip(_PAIRS, self.coords):
            if val:
                a = normalize_vector(F, [m[r][i] for r in range(4)])
                b = normalize_vector(F, [m[r][j] for r in range(4)])
                return a, b
        raise ValueError("zero Plücker vector")

    def points(self, F: FieldTable) -> list[tuple[int, ...]]:
        a, b = self.span(F)
        pts = [b]
        for t in range(F.order):
            pts.append(normalize_vector(F, [F.add(ai, F.mul(t, bi)) for ai, bi in zip(a, b)]))
        return pts

    def key(self, q: int) -> int:
        return int(vector_key(q, np.asarray(self.coords)))


def line_from_points(F: FieldTable, u, v) -> PluckerLine:
    return PluckerLine.through(F, u, v)


def klein_inverse(tower: Tower, x: int, y: int) -> PluckerLine:
    """The line of PG(3,q) whose Plücker coordinates are the Klein coordinates of <(x, y)>."""
    if tower.trace(tower.E.mul(x, y)) != 0:
        raise NotOnQuadric(f"Tr(xy) != 0 for ({x}, {y})")
    coords = list(tower.xcoords[x]) + list(tower.ycoords[y])
    return PluckerLine.from_coords(tower.F, coords)


def klein_keys(tower: Tower, xs, ys) -> np.ndarray:
    """Integer keys of the lines attached to many quadric points at once."""
    coords = np.concatenate([tower.xcoords[xs], tower.ycoords[ys]], axis=1)
    return vector_key(tower.q, normalize_rows(tower.F, coords))


def line_keys(F: FieldTable, us, vs) -> np.ndarray:
    """Keys of the lines through rows of us and vs."""
    return vector_key(F.order, normalize_rows(F, plucker_coords(F, us, vs)))


def lines_meet(F: FieldTable, l1: PluckerLine, l2: PluckerLine) -> bool:
    a, b = l1.span(F)
    c, d = l2.span(F)
    return f_rank(F, [a, b, c, d]) <= 3


# -- spreads -----------------------------------------------------------------------------------

@dataclass(frozen=True)
class Spread:
    lines: tuple[PluckerLine, ...]
    spans: tuple  # pairs of spanning points, same order as lines

    def keys(self, q: int) -> np.ndarray:
        return np.array([ln.key(q) for ln in self.lines], dtype=np.int64)


def default_nonsquare(F: FieldTable) -> int:
    return F.elem(1)


def regular_spread(F: FieldTable, c: int | None = None) -> Spread:
    """Regular spread from GF(q^2) = F(sqrt c).

    The lines are span{(1, 0, a, b), (0, 1, bc, a)} for a, b in F, whose
    points (s, t, (s, t) M) use the matrix M of a + b sqrt(c) acting on
    GF(q^2) = F^2, plus the line u0 = u1 = 0.
    """
    c = default_nonsquare(F) if c is None else c
    if F.sgn(c) != -1:
        raise ValueError("c must be a nonsquare")
    spans = []
    for a in range(F.order):
        for b in range(F.order):
            spans.append(((1, 0, a, b), (0, 1, F.mul(b, c), a)))
    spans.append(((0, 0, 1, 0), (0, 0, 0, 1)))
    return _spread_from_spans(F, spans)


def _spread_from_spans(F: FieldTable, spans) -> Spread:
    arr = np.asarray(spans, dtype=np.int64)
    coords = normalize_rows(F, plucker_coords(F, arr[:, 0], arr[:, 1]))
    lines = tuple(PluckerLine(tuple(int(v) for v in row)) for row in coords)
    return Spread(lines, tuple(spans))


def random_invertible(F: FieldTable, rng: np.random.Generator, k: int = 4) -> np.ndarray:
    while True:
        m = rng.integers(0, F.order, size=(k, k))
        if f_rank(F, m.tolist()) == k:
            return m


def apply_matrix(F: FieldTable, m: np.ndarray, v) -> tuple[int, ...]:
    """Row vector v times matrix m over F."""
    out = []
    for j in range(m.shape[1]):
        total = 0
        for i, vi in enumerate(v):
            total = F.add(total, F.mul(int(vi), int(m[i, j])))
        out.append(total)
    return tuple(out)


def transform_spread(F: FieldTable, spread: Spread, m: np.ndarray) -> Spread:
    spans = [(apply_matrix(F, m, a), apply_matrix(F, m, b)) for a, b in spread.spans]
    return _spread_from_spans(F, spans)


def spread_points(F: FieldTable, spread: Spread) -> np.ndarray:
    """Keys of all points on the spread lines (with repetition if lines meet)."""
    arr = np.asarray(spread.spans, dtype=np.int64)
    a, b = arr[:, 0], arr[:, 1]
    pts = [b]
    for t in range(F.order):
        pts.append(F.add(a, F.mul(t, b)))
    allpts = np.concatenate(pts)
    return vector_key(F.order, normalize_rows(F, allpts))


def check_spread(F: FieldTable, spread: Spread) -> None:
    q = F.order
    if len(spread.lines) != q * q + 1:
        raise SpreadViolation(f"{len(spread.lines)} lines instead of {q * q + 1}")
    keys = spread_points(F, spread)
    distinct = np.unique(keys).size
    if distinct != (q + 1) * (q * q + 1) or keys.size != distinct:
        raise SpreadViolation(f"spread covers {distinct} points with overlaps", distinct)


# -- bulk polar counts --------------------------------------------------------------------------

def polar_count(tower: Tower, P: tuple[int, int], Mx, My) -> int:
    """|{m in M : Tr(x_P y_m + x_m y_P) = 0}| for one point P."""
    E = tower.E
    xP, yP = P
    z = E.add(E.mul(xP, np.asarray(My, dtype=np.int64)), E.mul(np.asarray(Mx, dtype=np.int64), yP))
    return int(np.count_nonzero(tower.tr[z] == 0))


def polar_counts(tower: Tower, Px, Py, Mx, My, chunk: int = 2048) -> np.ndarray:
    """polar_count for many points at once.

    Tr_{E/F}(z) = 0 iff absTr(lambda z) = 0 for every lambda in a GF(p)-basis
    of F, and each absTr(lambda (x_P y_m + x_m y_P)) is a GF(p)-bilinear form
    in the digit vectors, so the count reduces to matrix products mod p.
    """
    dig = tower.digits
    T = tower.trace_forms.astype(np.float32)  # (f, d, d)
    p = tower.p
    Px = np.asarray(Px, dtype=np.int64)
    Py = np.asarray(Py, dtype=np.int64)
    V = np.concatenate([dig[np.asarray(My)], dig[np.asarray(Mx)]], axis=1).astype(np.float32)
    out = np.empty(Px.size, dtype=np.int64)
    nl = T.shape[0]
    for start in range(0, Px.size, chunk):
        sl = slice(start, start + chunk)
        dx = dig[Px[sl]].astype(np.float32)
        dy = dig[Py[sl]].astype(np.float32)
        U = np.concatenate([dx @ T, dy @ T], axis=2)  # (f, c, 2d)
        U = np.mod(U, p)
        R = np.mod(U.reshape(-1, U.shape[2]) @ V.T, p)
        R = R.reshape(nl, -1, V.shape[0])
        out[sl] = np.count_nonzero(~np.any(R != 0, axis=0), axis=1)
    return out


def hyperplane_counts(tower: Tower, A, B, Mx, My, chunk: int = 2048) -> np.ndarray:
    """|{m in M : Tr(a x_m + b y_m) = 0}| for each dual vector (a, b)."""
    return polar_counts(tower, B, A, Mx, My, chunk)
