"""Quadrature backbone shared by the integration engines.

Finite smooth panels go through QUADPACK (complex wrapper) or vectorized
composite Gauss-Legendre; conditionally convergent oscillatory tails are
summed lobe by lobe between zero-phase points and accelerated, either by
repeated averaging of partial sums (the Euler transform, for cleanly
alternating lobes) or by Wynn's epsilon algorithm (for tails carrying
several oscillatory modes at once). Power-law approaches to a limit are
removed with Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DivergentIntegralError

_GL_CACHE = {}


@dataclass
class QuadResult:
    """Value with an error estimate and convergence diagnostics."""

    value: complex
    abs_error_estimate: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)


def quad_complex(fn, a, b, tol=1e-12, points=None, limit=200):
    """Adaptive quadrature of a complex-valued scalar integrand."""
    kw = dict(epsabs=tol, epsrel=1e-10, limit=limit, complex_func=True)
    if points is not None and math.isfinite(a) and math.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kw["points"] = pts
            kw["limit"] = max(limit, 10 * (len(pts) + 1))
    val, err = quad(fn, a, b, **kw)
    return complex(val), float(abs(err))


def _decade_edges(a, b):
    """Split points for a wide finite interval: powers of ten by magnitude."""
    edges = {a, b}
    if a < 0.0 < b:
        edges.add(0.0)
    for k in range(-6, 19):
        for m in (10.0 ** k, -(10.0 ** k)):
            if a < m < b:
                edges.add(m)
    return sorted(edges)


def quad_panels(fn, a, b, tol=1e-12):
    """quad_complex over decade panels; robust when b - a spans scales."""
    if b - a <= 64.0:
        return quad_complex(fn, a, b, tol=tol)
    total, errs = 0.0 + 0.0j, 0.0
    edges = _decade_edges(a, b)
    for lo, hi in zip(edges, edges[1:]):
        v, e = quad_complex(fn, lo, hi, tol=tol)
        total += v
        errs += e
    return total, errs


def gauss_panels(fn_vec, a, b, s=0.0, order=20, min_panels=8, max_panels=60000,
                 freq_hint=0.0):
    """Composite Gauss-Legendre for an array-capable integrand times e^{-ist}.

    Panel length tracks the oscillation (one period of e^{-ist} per panel),
    so the rule stays spectrally accurate for any s. freq_hint adds panel
    resolution for oscillation already baked into fn_vec. Returns
    (value, err) with the error gauged against a lower-order rule on the
    same panels.
    """
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    lo_order = max(8, order - 8)
    if lo_order not in _GL_CACHE:
        _GL_CACHE[lo_order] = np.polynomial.legendre.leggauss(lo_order)
    freq = max(abs(s), abs(freq_hint))
    n = int(min(max(min_panels, math.ceil(freq * (b - a) / (2 * math.pi))), max_panels))
    edges = np.linspace(a, b, n + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])

    def _run(ordr):
        x, w = _GL_CACHE[ordr]
        ts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        vals = np.asarray(fn_vec(ts), dtype=complex)
        if s != 0.0:
            vals = vals * np.exp(-1j * s * ts)
        vals = vals.reshape(n, ordr)
        return complex(np.sum(vals @ w * half))

    hi = _run(order)
    lo = _run(lo_order)
    return hi, abs(hi - lo)


def poly_osc_integral(coeffs, a, b, s):
    """Exact integral of a polynomial against e^{-ist} on [a, b], s != 0."""
    ea, eb = np.exp(-1j * s * a), np.exp(-1j * s * b)
    n_max = len(coeffs) - 1
    F = [(eb - ea) / (-1j * s)]
    for n in range(1, n_max + 1):
        F.append((b ** n * eb - a ** n * ea) / (-1j * s) + (n / (1j * s)) * F[n - 1])
    return sum(c * F[k] for k, c in enumerate(coeffs))


# -- sequence acceleration ----------------------------------------------


def averaged_limit(seq):
    """Repeated pairwise averaging (Euler transform) of a partial-sum sequence."""
    s = np.asarray(seq, dtype=complex)
    if s.size == 0:
        return 0.0 + 0.0j, math.inf
    diag = [s[-1]]
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
        diag.append(s[-1])
    est = diag[-1]
    err = abs(diag[-1] - diag[-2]) if len(diag) > 1 else math.inf
    return complex(est), float(err)


def wynn_epsilon(seq, max_order=None):
    """Wynn's epsilon acceleration of partial sums; kills several modes at once.

    Returns (estimate, error proxy) where the estimate is the most stable
    even-column entry of the epsilon table.
    """
    S = [complex(x) for x in seq]
    if len(S) < 3:
        return (S[-1] if S else 0.0 + 0.0j), math.inf
    prev = [0.0 + 0.0j] * (len(S) + 1)
    cur = S[:]
    candidates = [(abs(S[-1] - S[-2]), S[-1])]
    col = 0
    limit_cols = max_order if max_order is not None else len(S) - 1
    while len(cur) > 1 and col < limit_cols:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0:
                d = 1e-300
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0 and len(cur) >= 2:
            candidates.append((abs(cur[-1] - cur[-2]), cur[-1]))
    candidates = [c for c in candidates if math.isfinite(abs(c[1]))]
    if not candidates:
        return S[-1], math.inf
    err, est = min(candidates, key=lambda c: c[0])
    return est, float(err)


def richardson_limit(values, ratio=2.0, max_order=6):
    """Extrapolate v(T_j) -> L for T_j growing geometrically, error ~ sum c_k T^-k."""
    v = [complex(x) for x in values]
    diagonal = [v[-1]]
    order = 1
    while len(v) > 1 and order <= max_order:
        r = ratio ** order
        v = [(r * v[i + 1] - v[i]) / (r - 1.0) for i in range(len(v) - 1)]
        diagonal.append(v[-1])
        order += 1
    err = abs(diagonal[-1] - diagonal[-2]) if len(diagonal) > 1 else math.inf
    return diagonal[-1], err


# -- oscillatory tails ---------------------------------------------------


def lobe_series(term_fn, tol=1e-10, min_terms=8, max_terms=400, accel="avg"):
    """Sum_{k>=0} term_fn(k) for lobe integrals of an oscillatory tail.

    term_fn(k) returns (value, quad_error). Partial sums are accelerated;
    the series is accepted once the accelerated estimate stabilizes below
    tol, and reported unconverged (not raised) otherwise.
    """
    partials = []
    total = 0.0 + 0.0j
    qerr = 0.0
    best, best_err = 0.0 + 0.0j, math.inf
    prev_best = None
    stable = 0
    accel_fn = averaged_limit if accel == "avg" else wynn_epsilon
    for k in range(max_terms):
        v, e = term_fn(k)
        total += v
        qerr += e
        partials.append(total)
        if abs(v) < 1e-3 * tol and k >= 2 and abs(partials[-2] - partials[-3]) < 1e-3 * tol:
            return QuadResult(total, abs(v) + qerr, True,
                              {"terms": k + 1, "accel": "direct"})
        if k + 1 >= min_terms:
            best, best_err = accel_fn(partials)
            if prev_best is not None and best_err < 0.5 * tol \
                    and abs(best - prev_best) < 0.5 * tol:
                stable += 1
                if stable >= 2:
                    return QuadResult(best, best_err + abs(best - prev_best) + qerr, True,
                                      {"terms": k + 1, "accel": accel})
            else:
                stable = 0
            prev_best = best
    return QuadResult(best, best_err + qerr, False, {"terms": max_terms, "accel": accel})


def fourier_lobes(envelope, freq, a, tol=1e-10, max_terms=400, phase=None):
    """∫_a^inf envelope(t) e^{-i freq t} dt via half-period lobes, freq != 0.

    envelope is a scalar callable (complex ok) decaying to 0; lobes run
    between the zero-phase points a + k*pi/|freq| and the alternating
    partial sums are averaged. Wide lobes (small freq) are decade-split.
    """
    if freq == 0.0:
        raise ValueError("fourier_lobes needs a nonzero frequency")
    h = math.pi / abs(freq)

    def term(k):
        lo, hi = a + k * h, a + (k + 1) * h
        return quad_panels(lambda t: envelope(t) * np.exp(-1j * freq * t), lo, hi,
                           tol=min(tol * 1e-2, 1e-12))

    return lobe_series(term, tol=tol, max_terms=max_terms)


def decay_integral(fn, a, sign, tol=1e-11, max_doublings=60, start=1.0):
    """∫ fn over [a, sign*inf) for an absolutely integrable integrand.

    Doubles the truncation point until three consecutive chunks fall below
    tolerance and the chunk magnitudes are shrinking; raises
    DivergentIntegralError when they fail to decay.
    """
    base = max(abs(a), start)
    edges = [a] + [sign * base * (2.0 ** k) for k in range(0, max_doublings)
                   if sign * (sign * base * 2.0 ** k) > sign * a]
    total = 0.0 + 0.0j
    errs = 0.0
    small = 0
    last = math.inf
    grow = 0
    for lo, hi in zip(edges, edges[1:]):
        lo, hi = (lo, hi) if lo < hi else (hi, lo)
        v, e = quad_panels(fn, lo, hi, tol=min(tol * 1e-2, 1e-12))
        total += v
        errs += e
        mag = abs(v)
        if mag < tol * 0.25:
            small += 1
            if small >= 3:
                return QuadResult(total, errs + mag, True, {"chunks": len(edges)})
        else:
            small = 0
        if mag > last * 1.2 and mag > 16 * tol:
            grow += 1
            if grow >= 4:
                raise DivergentIntegralError(
                    f"integrand chunks grow toward {sign:+d}inf (last {mag:.3g})")
        else:
            grow = 0
        last = mag
    raise DivergentIntegralError("tail integral did not settle within the truncation budget")
