"""Certificates for a constructed line class.

Each ``certify_*`` function scans a bundle exhaustively (or with a seeded
sample, for spreads) and returns a ``CertReport``; call
``raise_for_failure()`` on it to turn a failure into the matching typed
violation.
"""

from __future__ import annotations

import numpy as np

from .charsum import CharSpectrum, abelian_char_transform, t_sums
from .clclass import LineClassBundle, pack
from .errors import (
    AutomorphismViolation,
    IntersectionViolation,
    SpectrumViolation,
    SpreadViolation,
    TightSetViolation,
    TuViolation,
)
from .geometry import (
    check_spread,
    hyperplane_counts,
    on_quadric,
    polar_counts,
    projective_key,
    projective_points,
    random_invertible,
    regular_spread,
    transform_spread,
)
from .numbers import CycInt
from .report import CertReport, Timer, histogram

DEFAULT_SEED = 20240601


# -- spectrum ------------------------------------------------------------------------------

def dual_index_map(bundle: LineClassBundle) -> np.ndarray:
    """Row a: base-p packing of (absTr(a w^j))_j, the dual coordinates of a."""
    E = bundle.E
    j = np.arange(E.f, dtype=np.int64)
    codes = E.mul(E.elements()[:, None], E.elem(j)[None, :])
    tr = E.abs_trace[codes]
    return tr @ (E.p**j)


def compute_spectrum(bundle: LineClassBundle) -> CharSpectrum:
    """psi_{a,b}(D) for every dual vector, via the radix-p transform."""
    if "spectrum" not in bundle.cache:
        E = bundle.E
        dx, dy = bundle.D_xy()
        size = E.order * E.order
        ind = np.zeros(size, dtype=bool)
        ind[E.to_int(dx) + E.order * E.to_int(dy)] = True
        bundle.cache["spectrum"] = abelian_char_transform(ind, E.p)
    return bundle.cache["spectrum"]


def spectrum_grid(bundle: LineClassBundle) -> np.ndarray:
    """values[a, b] = psi_{a,b}(D) as integers, indexed by E codes."""
    chars = compute_spectrum(bundle)
    vals = chars.rational_values()
    tmap = dual_index_map(bundle)
    Q = bundle.E.order
    return vals[tmap[:, None] + Q * tmap[None, :]]


def certify_spectrum(bundle: LineClassBundle) -> CertReport:
    q, x = bundle.q, bundle.x_param
    size = bundle.D.size
    with Timer() as t:
        chars = compute_spectrum(bundle)
        witness = None
        if not chars.is_rational():
            rows = np.flatnonzero(np.any(chars.values[:, 1:] != 0, axis=1))
            witness = {"dual_index": int(rows[0]), "value": chars.value(rows[0]).to_json()}
        hist = chars.histogram_json()
        if witness is None:
            grid = spectrum_grid(bundle)
            Q = bundle.E.order
            a = np.repeat(np.arange(Q), Q)
            b = np.tile(np.arange(Q), Q)
            vals = grid.ravel()
            principal = (a == 0) & (b == 0)
            big = q**3 - x
            in_d = bundle.contains(b, a)
            if vals[principal][0] != size:
                witness = {"a": 0, "b": 0, "value": int(vals[principal][0])}
            else:
                ok_vals = np.isin(vals, [-x, big]) | principal
                bad = np.flatnonzero(~ok_vals)
                mismatch = np.flatnonzero(~principal & ((vals == big) != in_d))
                if bad.size:
                    i = bad[0]
                    witness = {"a": int(a[i]), "b": int(b[i]), "value": int(vals[i])}
                elif mismatch.size:
                    i = mismatch[0]
                    witness = {"a": int(a[i]), "b": int(b[i]), "value": int(vals[i]),
                               "swapped_in_D": bool(in_d[i])}
                elif np.count_nonzero(vals == big) != size:
                    witness = {"multiplicity": int(np.count_nonzero(vals == big))}
        parseval = chars.parseval_holds(size)
        if witness is None and not parseval:
            witness = {"parseval": chars.norm_sum().to_json()}
    return CertReport(
        "spectrum",
        {"q": q, "x": x, "D": int(size), "cells": len(chars)},
        {"principal": int(size), "values": [-x, q**3 - x], "multiplicity": int(size)},
        hist,
        witness is None,
        t.ms,
        witness,
        SpectrumViolation,
    )


# -- tight set and hyperplanes ----------------------------------------------------------------

def _categorize(bundle: LineClassBundle, X, Y) -> np.ndarray:
    """0 for points of M, 1 for other quadric points, 2 off the quadric."""
    keys = projective_key(bundle.tower, X, Y)
    in_m = np.isin(keys, bundle.M)
    onq = on_quadric(bundle.tower, X, Y)
    return np.where(in_m, 0, np.where(onq, 1, 2))


def certify_tight_set(bundle: LineClassBundle, chunk: int = 2048) -> CertReport:
    q, x = bundle.q, bundle.x_param
    h1, h2 = x * (q + 1) + q * q, x * (q + 1)
    with Timer() as t:
        X, Y = projective_points(bundle.tower)
        mx, my = bundle.M_xy()
        counts = polar_counts(bundle.tower, X, Y, mx, my, chunk)
        cat = _categorize(bundle, X, Y)
        expected = np.where(cat == 0, h1, h2)
        bad = np.flatnonzero(counts != expected)
        labels = np.array(["M", "quadric-M", "off-quadric"])
        observed = histogram(zip(labels[cat].tolist(), counts.tolist()))
    witness = None
    if bad.size:
        i = bad[0]
        witness = {"x": int(X[i]), "y": int(Y[i]), "category": str(labels[cat[i]]),
                   "count": int(counts[i])}
    return CertReport(
        "tight-set",
        {"q": q, "x": x, "points": int(X.size), "M": int(mx.size)},
        {"M": h1, "quadric-M": h2, "off-quadric": h2},
        observed,
        witness is None,
        t.ms,
        witness,
        TightSetViolation,
    )


def certify_two_intersection(bundle: LineClassBundle, chunk: int = 2048,
                             with_spectrum: bool = True) -> CertReport:
    q, x = bundle.q, bundle.x_param
    h1, h2 = x * (q + 1) + q * q, x * (q + 1)
    mx, my = bundle.M_xy()
    if mx.size == 0:
        return CertReport("two-intersection", {"q": q, "x": x, "M": 0}, [h1, h2], [],
                          False, 0.0, {"reason": "empty point set"}, IntersectionViolation)
    with Timer() as t:
        A, B = projective_points(bundle.tower)
        counts = hyperplane_counts(bundle.tower, A, B, mx, my, chunk)
        witness = None
        bad = np.flatnonzero(~np.isin(counts, [h1, h2]))
        if bad.size:
            i = bad[0]
            witness = {"a": int(A[i]), "b": int(B[i]), "count": int(counts[i])}
        elif not (np.any(counts == h1) and np.any(counts == h2)):
            witness = {"reason": "only one intersection size occurs"}
        elif with_spectrum:
            grid = spectrum_grid(bundle)
            implied = grid[A, B]
            direct = -mx.size + q * counts
            off = np.flatnonzero(implied != direct)
            if off.size:
                i = off[0]
                witness = {"a": int(A[i]), "b": int(B[i]), "count": int(counts[i]),
                           "spectrum": int(implied[i])}
        observed = histogram(counts.tolist())
    return CertReport(
        "two-intersection",
        {"q": q, "x": x, "hyperplanes": int(A.size), "spectrum_cross_check": with_spectrum},
        [h1, h2],
        observed,
        witness is None,
        t.ms,
        witness,
        IntersectionViolation,
    )


# -- T_u ------------------------------------------------------------------------------------------

def expected_t_values(bundle: LineClassBundle) -> dict[str, CycInt]:
    """The four values (q-1)/2 + qs, (q-1)/2 + qn, (q-1)/2, -(q+1)/2."""
    from .charsum import gauss_period

    F, q = bundle.F, bundle.q
    s = gauss_period(0, 2, F)
    nn = gauss_period(1, 2, F)
    half = (q - 1) // 2
    return {
        "tangent-s": s * q + half,
        "tangent-n": nn * q + half,
        "secant": CycInt.from_int(F.p, half),
        "passant": CycInt.from_int(F.p, -(q + 1) // 2),
    }


def classify_u(bundle: LineClassBundle) -> list[str]:
    """Label each u in Z_2N by membership of 2u in T (mod N), T' (mod 2N) and u in Xbar."""
    E, N, tower = bundle.E, bundle.N, bundle.tower
    logs = np.arange(E.n, dtype=np.int64)
    tr = tower.tr[logs + 1]
    T = set((logs[tr == 0] % N).tolist())
    Tp = set((logs[tr == 1] % (2 * N)).tolist())
    xbar = set(bundle.Xbar)
    xbar_n = {(r + N) % (2 * N) for r in xbar}
    sgn2 = bundle.F.sgn(bundle.F.from_int(2 % bundle.F.p))
    labels = []
    for u in range(2 * N):
        if (2 * u) % N in T:
            if u in xbar:
                labels.append("tangent-s" if sgn2 == 1 else "tangent-n")
            elif u in xbar_n:
                labels.append("tangent-n" if sgn2 == 1 else "tangent-s")
            else:
                labels.append("tangent-unmatched")
        elif (2 * u) % (2 * N) in Tp:
            labels.append("secant")
        else:
            labels.append("passant")
    return labels


def certify_T_u(bundle: LineClassBundle) -> CertReport:
    with Timer() as t:
        values = t_sums(bundle)
        labels = classify_u(bundle)
        expected = expected_t_values(bundle)
        witness = None
        for u, (lab, val) in enumerate(zip(labels, values)):
            if expected.get(lab) != val:
                witness = {"u": u, "class": lab, "value": val.to_json()}
                break
        observed = histogram(zip(labels, [v.to_json() for v in values]))
    return CertReport(
        "T_u",
        {"q": bundle.q, "range": 2 * bundle.N},
        {k: v.to_json() for k, v in expected.items()},
        observed,
        witness is None,
        t.ms,
        witness,
        TuViolation,
    )


# -- spreads and automorphisms -----------------------------------------------------------------

def sampled_spread_check(bundle: LineClassBundle, trials: int = 10,
                         seed: int = DEFAULT_SEED) -> CertReport:
    F, q, x = bundle.F, bundle.q, bundle.x_param
    rng = np.random.default_rng(seed)
    with Timer() as t:
        base = regular_spread(F)
        spreads = [("regular", base)]
        for k in range(trials):
            m = random_invertible(F, rng)
            spreads.append((f"image-{k}", transform_spread(F, base, m)))
        counts = []
        witness = None
        for name, sp in spreads:
            try:
                check_spread(F, sp)
            except SpreadViolation as exc:
                witness = {"spread": name, "reason": str(exc)}
                break
            c = int(np.isin(sp.keys(q), bundle.L).sum())
            counts.append(c)
            if c != x and witness is None:
                witness = {"spread": name, "lines_in_class": c}
    return CertReport(
        "spread-sample",
        {"q": q, "x": x, "trials": trials, "seed": seed},
        x,
        histogram(counts),
        witness is None,
        t.ms,
        witness,
        SpreadViolation,
    )


def certify_automorphisms(bundle: LineClassBundle) -> CertReport:
    E, tower, q = bundle.E, bundle.tower, bundle.q
    dx, dy = bundle.D_xy()
    w1 = tower.w1(1)
    maps = {
        "g": (E.mul(w1, dx), E.mul(E.inv(w1), dy)),
        "frobenius": (E.pow(dx, q), E.pow(dy, q)),
        "scalar": (E.mul(tower.w0, dx), E.mul(tower.w0, dy)),
    }
    results = []
    witness = None
    with Timer() as t:
        for name, (nx, ny) in maps.items():
            image = np.unique(pack(tower, nx, ny))
            ok = np.array_equal(image, bundle.D)
            results.append([name, bool(ok)])
            if not ok and witness is None:
                witness = {"generator": name}
    return CertReport(
        "automorphisms",
        {"q": q},
        [[name, True] for name in maps],
        results,
        witness is None,
        t.ms,
        witness,
        AutomorphismViolation,
    )


CHECKS = {
    "spectrum": certify_spectrum,
    "tight": certify_tight_set,
    "two-int": certify_two_intersection,
    "tu": certify_T_u,
    "spread": sampled_spread_check,
    "auto": certify_automorphisms,
}


def run_checks(bundle: LineClassBundle, names, seed: int = DEFAULT_SEED,
               trials: int = 10) -> list[CertReport]:
    out = []
    for name in names:
        if name == "spread":
            out.append(sampled_spread_check(bundle, trials, seed))
        else:
            out.append(CHECKS[name](bundle))
    return out
