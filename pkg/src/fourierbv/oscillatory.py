"""Fourier transforms for the representable class.

A transform run splits the line into a finite core holding every
breakpoint and two tails. Integrable tails are summed directly between
zero-phase points; bounded-variation tails that merely decay to zero are
integrated by parts first, trading the integrand for its derivative plus
a boundary term, and the remaining Stieltjes tail is again summed lobe by
lobe. Odd local singularities get the symmetric principal-value formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .atoms import Polynomial
from .errors import (ClassificationError, DivergentIntegralError, HypothesisError,
                     NotOddError, SingularityError, WeightedIntegrabilityError)
from .model import PiecewiseFunction
from .quadrature import (QuadResult, decay_integral, fourier_lobes, gauss_panels,
                         lobe_series, poly_osc_integral, quad_complex, quad_panels)

_INF = math.inf
_ONE = PiecewiseFunction((), (Polynomial([1.0]),))


@dataclass(frozen=True)
class TransformPlan:
    """How a transform run will treat each region of the line."""

    core: tuple            # (A, B)
    neg_strategy: str      # 'truncate-L1' | 'ibp-dirichlet' | 'reject'
    pos_strategy: str
    pv_center: float | None = None
    pv_radius: float | None = None


def plan_transform(f):
    pair = model.classify_tails(f)
    strat = {}
    for tb in (pair.neg, pair.pos):
        if tb.kind == "L1":
            strat[tb.side] = "truncate-L1"
        elif tb.kind == "zero":
            strat[tb.side] = "ibp-dirichlet"
        else:
            strat[tb.side] = "reject"
    locs = [bp.location for bp in f.breakpoints]
    lo = min(locs) - 1.0 if locs else -1.0
    hi = max(locs) + 1.0 if locs else 1.0
    od = f.odd_symmetry
    return TransformPlan((lo, hi), strat[-1], strat[1],
                         od.center if od else None, od.radius if od else None)


def _trig_env(env, freq, kind):
    w = abs(freq)
    sign = 1.0 if freq >= 0 else -1.0
    if kind == "sin":
        return (lambda t: np.sin(w * t) * env(t)), sign
    return (lambda t: np.cos(w * t) * env(t)), 1.0


def trig_lobes(env, freq, a, kind="sin", tol=1e-10, max_terms=400):
    """∫_a^inf env(t) {sin,cos}(freq t) dt for a decaying envelope."""
    if freq == 0.0:
        if kind == "sin":
            return QuadResult(0.0 + 0.0j, 0.0, True, {"terms": 0})
        res = decay_integral(env, a, 1, tol=tol)
        return res
    fn, sgn = _trig_env(env, freq, kind)
    w = abs(freq)
    h = math.pi / w
    offset = 0.5 * h if kind == "cos" else 0.0
    k0 = max(0, math.ceil((a - offset) / h))
    z0 = offset + k0 * h
    while z0 <= a:
        k0 += 1
        z0 = offset + k0 * h
    head, herr = quad_panels(fn, a, z0, tol=min(tol * 1e-2, 1e-13))

    def term(j):
        lo = z0 + j * h
        return quad_panels(fn, lo, lo + h, tol=min(tol * 1e-2, 1e-13))

    series = lobe_series(term, tol=tol, max_terms=max_terms)
    return QuadResult(sgn * (head + series.value),
                      herr + series.abs_error_estimate,
                      series.converged, series.diagnostics)


def dirichlet_integral(p, tol=1e-9):
    """∫_0^inf sin(p x)/x dx, evaluated by accelerated lobe summation."""
    if p == 0.0:
        return QuadResult(0.0 + 0.0j, 0.0, True, {"terms": 0})

    def env(t):
        t = np.asarray(t, dtype=float)
        return np.ones_like(t)

    w = abs(p)

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.where(t == 0.0, w, np.sin(w * t) / np.where(t == 0.0, 1.0, t))

    h = math.pi / w
    head, herr = quad_complex(fn, 0.0, h, tol=1e-14)

    def term(j):
        lo = (j + 1) * h
        return quad_complex(fn, lo, lo + h, tol=1e-14)

    series = lobe_series(term, tol=tol, max_terms=200)
    val = math.copysign(1.0, p) * (head + series.value)
    return QuadResult(val, herr + series.abs_error_estimate, series.converged,
                      series.diagnostics)


def perron_kernel(p, omega, tol=1e-9):
    """(1/2 pi i) ∫ e^{ips}/(s - omega) ds over the line.

    For Im(omega) > 0 the value matches H(p) e^{i p omega}; omega = 0 is
    the principal-value mode, which reduces to the sine integral and
    returns sgn(p)/2. The integral is folded onto [0, inf): the cosine
    component decays absolutely, the sine component is summed lobewise.
    """
    omega = complex(omega)
    if omega == 0.0:
        d = dirichlet_integral(p, tol=tol * math.pi)
        return QuadResult(d.value / math.pi, d.abs_error_estimate / math.pi,
                          d.converged, d.diagnostics)
    if omega.imag <= 0.0:
        raise HypothesisError("need Im(omega) > 0 (or omega = 0 for the PV mode)")
    w2 = omega * omega
    if p == 0.0:
        res = decay_integral(lambda s: 2.0 * omega / (s * s - w2), 0.0, 1, tol=tol * 0.1)
        val = res.value / (2.0 * math.pi * 1j)
        return QuadResult(val, res.abs_error_estimate, res.converged, res.diagnostics)
    cos_part = trig_lobes(lambda s: 2.0 * omega / (s * s - w2), p, 0.0, "cos", tol=tol * 0.1)
    sin_part = trig_lobes(lambda s: 2.0 * s / (s * s - w2), p, 0.0, "sin", tol=tol * 0.1)
    val = (cos_part.value + 1j * sin_part.value) / (2.0 * math.pi * 1j)
    err = (cos_part.abs_error_estimate + sin_part.abs_error_estimate) / (2.0 * math.pi)
    return QuadResult(val, err, cos_part.converged and sin_part.converged,
                      {"cos": cos_part.diagnostics, "sin": sin_part.diagnostics})


# -- finite-interval oscillatory quadrature -------------------------------


def finite_oscillatory(f, a, b, s, tol=1e-11):
    """∫_a^b e^{-ist} f(t) dt on a compact interval, panel length ~ 1/|s|."""
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("need a compact interval [a, b]")
    if f.singular_centers(a, b):
        raise SingularityError("principal-value singularity inside [a, b]")
    total = 0.0 + 0.0j
    err = 0.0
    for lo, hi, atom in f.iter_pieces(a, b):
        cs = atom.poly_coeffs()
        if cs is not None and not any(cs):
            continue
        if cs is not None and s != 0.0 and abs(s) * max(abs(lo), abs(hi)) > 0.5:
            total += poly_osc_integral(cs, lo, hi, s)
            continue
        v, e = gauss_panels(atom, lo, hi, s=s)
        total += v
        err += e
    return QuadResult(total, err, True, {"interval": (a, b)})


# -- full-line transform ---------------------------------------------------


def _pos_tail(f, B, s, tol):
    """∫_B^inf e^{-ist} f(t) dt per the positive-tail strategy."""
    atom = f.atoms[-1]
    kind = f.tails[1].kind
    if kind == "L1":
        if s == 0.0:
            return decay_integral(atom, B, 1, tol=tol)
        return fourier_lobes(atom, s, B, tol=tol)
    if kind == "zero":
        if s == 0.0:
            raise HypothesisError("transform at s = 0 needs integrable tails")
        boundary = f.eval(B) * np.exp(-1j * s * B) / (1j * s)
        dfl = fourier_lobes(atom.deriv, s, B, tol=tol * abs(s))
        return QuadResult(boundary + dfl.value / (1j * s),
                          dfl.abs_error_estimate / abs(s),
                          dfl.converged, dfl.diagnostics)
    raise DivergentIntegralError(
        f"positive tail of kind {kind!r} has no classical transform; "
        "subtract the asymptote first")


def _neg_tail(f, A, s, tol):
    """∫_-inf^A e^{-ist} f(t) dt, by reflection onto the right tail."""
    atom = f.atoms[0]
    kind = f.tails[0].kind
    if kind == "L1":
        if s == 0.0:
            return decay_integral(atom, A, -1, tol=tol)
        return fourier_lobes(lambda u: atom(-u), -s, -A, tol=tol)
    if kind == "zero":
        if s == 0.0:
            raise HypothesisError("transform at s = 0 needs integrable tails")
        boundary = -f.eval(A) * np.exp(-1j * s * A) / (1j * s)
        dfl = fourier_lobes(lambda u: atom.deriv(-u), -s, -A, tol=tol * abs(s))
        # ∫_-inf^A e^{-ist} f' dt with t = -u
        return QuadResult(boundary + dfl.value / (1j * s),
                          dfl.abs_error_estimate / abs(s),
                          dfl.converged, dfl.diagnostics)
    raise DivergentIntegralError(
        f"negative tail of kind {kind!r} has no classical transform; "
        "subtract the asymptote first")


def transform(f, s, tol=1e-9):
    """f_hat(s) = ∫ e^{-ist} f(t) dt for integrable or decaying-BV tails."""
    plan = plan_transform(f)
    if "reject" in (plan.neg_strategy, plan.pos_strategy):
        raise DivergentIntegralError(
            "tails with limits or polynomial growth have no classical transform; "
            "use the distributional builder")
    if f.odd_symmetry is not None and f.singular_centers():
        raise SingularityError("function carries a PV singularity; use pv_transform")
    s = float(s)
    A, B = plan.core
    core = finite_oscillatory(f, A, B, s, tol=tol)
    pos = _pos_tail(f, B, s, tol=tol)
    neg = _neg_tail(f, A, s, tol=tol)
    value = core.value + pos.value + neg.value
    err = core.abs_error_estimate + pos.abs_error_estimate + neg.abs_error_estimate
    return QuadResult(value, err, pos.converged and neg.converged,
                      {"core": (A, B), "pos": pos.diagnostics, "neg": neg.diagnostics})


def stieltjes_transform(f, s, tol=1e-10):
    """∫ e^{-ist} df(t) over the whole line (the transform of the measure)."""
    from .stieltjes import hs_integral

    return hs_integral(_ONE, f, -_INF, _INF, weight=float(s), tol=tol)


# -- principal-value transforms -------------------------------------------


def _odd_check(f, center, radius):
    probe = min(radius, 1.0)
    for frac in (0.13, 0.37, 0.71):
        u = frac * probe
        try:
            lv, rv = f.eval(center - u), f.eval(center + u)
        except Exception as exc:
            raise NotOddError(f"cannot probe oddness at offset {u}: {exc}") from exc
        if abs(lv + rv) > 1e-9 * max(1.0, abs(rv)):
            raise NotOddError(
                f"f({center}+{u}) + f({center}-{u}) = {lv + rv:.3g}; not odd about {center}")


def _weighted_integrability(f, center, radius):
    probe = min(radius, 1.0)
    chunks = []
    for k in range(0, 6):
        hi = probe * 4.0 ** (-k)
        lo = probe * 4.0 ** (-k - 1)
        v, _ = quad_complex(lambda u: abs(f.sample(np.array([center + u]))[0]) * u, lo, hi,
                            tol=1e-12)
        chunks.append(abs(v))
    head = max(chunks[0], 1e-300)
    if not all(c2 <= c1 * 0.97 + 1e-14 * head for c1, c2 in zip(chunks, chunks[1:])):
        raise WeightedIntegrabilityError(
            "|f(t)| |t - c| dt chunks do not decay toward the center")


def pv_transform(f, s, tol=1e-9):
    """Principal-value transform of a function odd about its stored center.

    Evaluates e^{-isc} * (-2i) ∫_0^delta sin(su) f(c+u) du, which the
    symmetric exclusion limit equals; integrability of |f| |t-c| near the
    center is checked, and an infinite radius sends the tail through the
    lobe accelerator.
    """
    od = f.odd_symmetry
    if od is None:
        raise NotOddError("function carries no odd-symmetry record")
    _odd_check(f, od.center, od.radius)
    _weighted_integrability(f, od.center, od.radius)
    s = float(s)
    if s == 0.0:
        return QuadResult(0.0 + 0.0j, 0.0, True, {"odd": True})
    c, delta = od.center, od.radius

    def local(u):
        return f.sample(np.asarray(u, dtype=float) + c)

    w = abs(s)
    u0 = min(delta, 1.0, math.pi / w)
    head, herr = quad_complex(lambda u: math.sin(w * u) * float(local(np.array([u]))[0]),
                              0.0, u0, tol=min(tol * 1e-2, 1e-13))
    total = head
    err = herr
    conv = True
    if u0 < min(delta, 1.0):
        # oscillatory mid-range up to min(delta, 1): vectorized panels
        mid_hi = min(delta, 1.0)
        v, e = gauss_panels(lambda u: np.sin(w * u) * local(u), u0, mid_hi, freq_hint=w)
        total += v
        err += e
        u0 = mid_hi
    if delta > u0:
        if math.isinf(delta):
            tailr = trig_lobes(lambda u: local(u), w, u0, "sin", tol=tol)
            total += tailr.value
            err += tailr.abs_error_estimate
            conv = tailr.converged
        else:
            v, e = gauss_panels(lambda u: np.sin(w * u) * local(u), u0, delta, freq_hint=w)
            total += v
            err += e
    value = -2j * np.exp(-1j * s * c) * math.copysign(1.0, s) * total
    return QuadResult(value, 2.0 * err, conv, {"center": c, "radius": delta})
