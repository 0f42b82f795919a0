"""Constructive Stieltjes integration for piecewise functions.

The integral of phi against dg is computed from the decomposition of dg
into an absolutely continuous density, point masses at jumps, and scaled
Cantor components. Point masses follow the tag rule: the integrand enters
through its point value at the jump, the full mass g(c+) - g(c-) at
interior jumps, and the one-sided sub-jump at a finite endpoint (which is
forced to be a tag). Gauge sums over explicit tagged partitions are kept
as a verification device; they define the integral but do not compute it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import model
from .atoms import Cantor, Polynomial, cantor_value, split_cantor
from .errors import (CommonDiscontinuityError, DepthError, DivergentIntegralError,
                     HypothesisError, NotACError, NotBVError, NotFineError)
from .model import Breakpoint, PiecewiseFunction, pw_mul
from .quadrature import (decay_integral, fourier_lobes, quad_complex, quad_panels)

_INF = math.inf


# -- measure decomposition ----------------------------------------------


@dataclass(frozen=True)
class JumpComponent:
    location: float
    mass: float
    sub_left: float   # g(c) - g(c-)
    sub_right: float  # g(c+) - g(c)


@dataclass(frozen=True)
class SingularComponent:
    lo: float
    hi: float
    leaf: Cantor
    coeff: float

    @property
    def scale(self):
        return abs(self.coeff) * (self.leaf(self.hi) - self.leaf(self.lo))


@dataclass(frozen=True)
class StieltjesMeasure:
    """Decomposition of dg: AC density + jumps + singular components."""

    source: PiecewiseFunction
    jumps: tuple
    singular: tuple

    def ac_density(self, ts):
        return self.source.density(ts)


def measure_of(g, a=-_INF, b=_INF):
    """Decompose dg on [a, b]; raises NotBVError off the representable class."""
    if g.singular_centers(a, b):
        raise NotBVError("range contains a principal-value singularity")
    jmp = []
    for bp in g.jumps(a, b):
        jmp.append(JumpComponent(bp.location, bp.mass,
                                 bp.value - bp.left_limit, bp.right_limit - bp.value))
    sing = []
    for lo, hi, atom in g.iter_pieces(a, b):
        if not atom.singular:
            continue
        smooth, comps = split_cantor(atom)
        if smooth is None and not comps:
            raise NotBVError("Cantor component enters nonlinearly")
        for leaf, coeff in comps:
            clo, chi = max(lo, leaf.a), min(hi, leaf.b)
            if clo < chi and coeff != 0.0:
                sing.append(SingularComponent(clo, chi, leaf, coeff))
    return StieltjesMeasure(g, tuple(jmp), tuple(sing))


# -- Cantor measure quadrature -------------------------------------------

_POINT_CACHE = {}
_RULE_CAP = 22  # 2^22 sample points; midpoint rule error is far below 3^-depth


def _cantor_points(level):
    """Midpoints of the level-`level` Cantor construction intervals in [0,1]."""
    if level not in _POINT_CACHE:
        idx = np.arange(2 ** level, dtype=np.uint64)
        x = np.full(idx.shape, 0.5 * 3.0 ** (-level))
        for k in range(level):
            bit = ((idx >> np.uint64(k)) & np.uint64(1)).astype(float)
            x = x + bit * (2.0 * 3.0 ** (-(k + 1)))
        _POINT_CACHE[level] = x
    return _POINT_CACHE[level]


def _copy_rule(fn, a, h, level):
    """Mean of fn over the self-similar copy on [a, a+h] (unit mass)."""
    pts = a + h * _cantor_points(min(level, _RULE_CAP))
    vals = np.asarray(fn(pts), dtype=complex)
    return complex(np.mean(vals))


_WALK_RULE = 12  # rule depth for full cells met along a boundary digit walk


def _cantor_cdf_integral(fn, A, h, x_rel, level):
    """∫ fn dmu over the part of the copy [A, A+h] left of A + x_rel*h.

    Follows the same digit iteration as cantor_value, so masses agree with
    staircase increments to the 2^-level path truncation.
    """
    if x_rel <= 0.0:
        return 0.0 + 0.0j
    if x_rel >= 1.0:
        return _copy_rule(fn, A, h, level)
    total = 0.0 + 0.0j
    w = 1.0
    while level > 0:
        level -= 1
        w *= 0.5
        h3 = h / 3.0
        if x_rel < 1.0 / 3.0:
            x_rel *= 3.0
            h = h3
        elif x_rel > 2.0 / 3.0:
            total += w * _copy_rule(fn, A, h3, min(level, _WALK_RULE))
            A += 2.0 * h3
            x_rel = 3.0 * x_rel - 2.0
            h = h3
        else:
            total += w * _copy_rule(fn, A, h3, min(level, _WALK_RULE))
            return total
    return total


def _cantor_clipped(fn, a, h, w, lo, hi, level):
    """∫ fn dmu over [lo, hi] ∩ copy([a, a+h], mass w)."""
    if hi <= a or lo >= a + h or w == 0.0:
        return 0.0 + 0.0j
    lo_rel = (lo - a) / h
    hi_rel = (hi - a) / h
    upper = _cantor_cdf_integral(fn, a, h, hi_rel, level)
    lower = _cantor_cdf_integral(fn, a, h, lo_rel, level)
    return w * (upper - lower)


def cantor_integral(phi, depth=30, s=None, lo=None, hi=None, leaf=None):
    """Integral of phi against the Cantor measure, truncated at `depth` levels.

    phi may be a PiecewiseFunction, an array-capable callable, or a number
    (constant); pass s to multiply by exp(-i s t). The rule samples the
    measure-mean of each construction interval, so the error is bounded by
    the modulus of continuity of phi at scale 3^-depth.
    """
    if not (1 <= depth <= 60):
        raise DepthError(f"depth must be in [1, 60], got {depth}")
    leaf = leaf or Cantor(0.0, 1.0)
    if isinstance(phi, PiecewiseFunction):
        base = phi.sample
    elif callable(phi):
        base = lambda ts: np.asarray(phi(ts), dtype=complex)
    else:
        c = complex(phi)
        base = lambda ts: np.full(ts.shape, c)
    if s is not None:
        fn = lambda ts: np.asarray(base(ts), dtype=complex) * np.exp(-1j * s * ts)
    else:
        fn = base
    lo = leaf.a if lo is None else max(lo, leaf.a)
    hi = leaf.b if hi is None else min(hi, leaf.b)
    return _cantor_clipped(fn, leaf.a, leaf.b - leaf.a, 1.0, lo, hi, depth)


# -- the integral itself --------------------------------------------------


def _weight_fn(weight):
    if weight is None:
        return None
    w = complex(weight)

    def wf(t):
        return np.exp(-1j * w * t)

    return wf


def _is_zero_atom(atom):
    cs = atom.poly_coeffs()
    return cs is not None and not any(cs)


def _is_const_atom(atom):
    cs = atom.poly_coeffs()
    return cs is not None and len(cs) == 1


def _limit_value(f, sign):
    atom = f.atoms[-1] if sign > 0 else f.atoms[0]
    lim = atom.limit(sign)
    if lim is None or not math.isfinite(lim):
        raise HypothesisError(f"function has no finite limit at {sign:+d}inf")
    return lim


def hs_integral(phi, g, a=-_INF, b=_INF, weight=None, tol=1e-11):
    """∫_a^b phi(t) w(t) dg(t) with w(t) = exp(-i*weight*t) (w = 1 if None).

    Jump masses use phi's point value at the jump (the tag rule); at a
    finite endpoint only the inward sub-jump contributes. Infinite ends
    need either a decaying weight, a decaying integrand (checked), or an
    oscillatory weight with a Dirichlet-type envelope.
    """
    if a >= b:
        raise ValueError("need a < b")
    if phi.singular_centers(a, b) or g.singular_centers(a, b):
        raise NotBVError("principal-value singularity inside the integration range")
    mez = measure_of(g, a, b)
    wf = _weight_fn(weight)
    w = complex(weight) if weight is not None else 0.0 + 0.0j
    total = 0.0 + 0.0j

    # point masses
    for jc in mez.jumps:
        c = jc.location
        if c == a:
            mass = jc.sub_right
        elif c == b:
            mass = jc.sub_left
        else:
            mass = jc.mass
        if mass == 0.0:
            continue
        pv = phi.eval(c)
        if pv == 0.0:
            continue
        term = pv * mass
        if wf is not None:
            term *= complex(wf(c))
        total += term

    # absolutely continuous part
    edges = sorted(set(phi.piece_edges(a, b)) | set(g.piece_edges(a, b)))
    for lo, hi in zip(edges, edges[1:]):
        mid = 0.5 * (lo + hi)
        if not math.isfinite(mid):
            mid = lo + 1.0 if math.isfinite(lo) else (hi - 1.0 if math.isfinite(hi) else 0.0)
        pa = phi.atoms[phi._interval_index(mid)]
        ga = g.atoms[g._interval_index(mid)]
        if _is_zero_atom(pa) or _is_const_atom(ga):
            continue
        if ga.singular:
            smooth, _ = split_cantor(ga)
            if smooth is None:
                continue
            ga_d = smooth.deriv
        else:
            ga_d = ga.deriv

        if wf is None:
            fn = lambda t, pa=pa, gd=ga_d: pa(t) * gd(t)
        else:
            fn = lambda t, pa=pa, gd=ga_d: pa(t) * gd(t) * wf(t)

        if math.isfinite(lo) and math.isfinite(hi):
            v, _ = quad_panels(fn, lo, hi, tol=tol * 1e-1)
            total += v
        else:
            total += _tail_ac(fn, pa, ga_d, lo, hi, w, weight is not None, tol)

    # singular components
    if mez.singular:
        if wf is None:
            base = phi.sample
        else:
            base = lambda ts: phi.sample(ts) * wf(ts)
        for comp in mez.singular:
            clo, chi = max(comp.lo, a), min(comp.hi, b)
            if clo < chi:
                total += comp.coeff * cantor_integral(
                    base, depth=40, lo=clo, hi=chi, leaf=comp.leaf)
    return total


def _tail_ac(fn, pa, gd, lo, hi, w, weighted, tol):
    """AC contribution of an unbounded piece, with convergence checks."""
    sign = 1 if math.isinf(hi) else -1
    edge = lo if sign > 0 else hi
    if not math.isfinite(edge):
        # doubly infinite piece: split at zero
        return (_tail_ac(fn, pa, gd, 0.0, hi, w, weighted, tol)
                + _tail_ac(fn, pa, gd, lo, 0.0, w, weighted, tol))
    if weighted and w.imag != 0.0:
        decays = (w.imag > 0) if sign < 0 else (w.imag < 0)
        if not decays:
            # growing exponential: the rest of the integrand must vanish
            probe = np.abs(np.asarray(pa(np.array([edge + sign * 2.0 ** k for k in range(4, 9)])),
                                      dtype=float))
            if np.nanmax(probe) > 0.0:
                raise DivergentIntegralError(
                    "exponential weight grows toward the unbounded end")
            return 0.0 + 0.0j
        res = decay_integral(fn, edge, sign, tol=tol)
        return res.value
    if weighted and w.real != 0.0:
        # oscillatory weight: Dirichlet tail between zero-phase points
        env = (lambda t: pa(t) * gd(t))
        freq = w.real if sign > 0 else -w.real
        if sign > 0:
            res = fourier_lobes(env, w.real, edge, tol=tol)
        else:
            # reflect t -> -t to reuse the right-tail machinery
            env_m = (lambda t: pa(-t) * gd(-t))
            res = fourier_lobes(env_m, -w.real, -edge, tol=tol)
        if not res.converged and res.abs_error_estimate > 50 * tol:
            raise DivergentIntegralError("oscillatory tail failed to settle")
        return res.value
    res = decay_integral(fn, edge, sign, tol=tol)
    return res.value


# -- integration by parts and friends -------------------------------------


def _endpoint_product(phi, g, x, side):
    if math.isfinite(x):
        return phi.eval(x) * g.eval(x)
    return _limit_value(phi, side) * _limit_value(g, side)


def by_parts_rhs(phi, g, a=-_INF, b=_INF, tol=1e-11):
    """Right side of the integration-by-parts formula with jump corrections.

    phi(b)g(b) - phi(a)g(a) - ∫ g dphi
      + sum [phi(c)-phi(c-)][g(c)-g(c-)] - sum [phi(c)-phi(c+)][g(c)-g(c+)]
    over every point where either factor is discontinuous from one side.
    """
    total = _endpoint_product(phi, g, b, 1) - _endpoint_product(phi, g, a, -1)
    total -= hs_integral(g, phi, a, b, tol=tol)
    locs = sorted({bp.location for bp in phi.jumps(a, b)}
                  | {bp.location for bp in g.jumps(a, b)})
    for c in locs:
        pl, pr = phi.one_sided_limits(c)
        gl, gr = g.one_sided_limits(c)
        pc, gc = phi.eval(c), g.eval(c)
        if c == a:
            pl, gl = pc, gc  # no left limit inside [a, b]
        if c == b:
            pr, gr = pc, gc
        total += (pc - pl) * (gc - gl)
        total -= (pc - pr) * (gc - gr)
    return total


def product_rule(A, B, C, a=-_INF, b=_INF, tol=1e-11):
    """∫ A d[BC] computed as ∫ AB dC + ∫ AC dB.

    B and C must not share a discontinuity point; the corrective sums for
    that case are outside the supported class.
    """
    shared = ({bp.location for bp in B.jumps(a, b)}
              & {bp.location for bp in C.jumps(a, b)})
    if shared:
        raise CommonDiscontinuityError(
            f"B and C are both discontinuous at {sorted(shared)}")
    return (hs_integral(pw_mul(A, B), C, a, b, tol=tol)
            + hs_integral(pw_mul(A, C), B, a, b, tol=tol))


def ac_reduction(A, B, a=-_INF, b=_INF, tol=1e-11):
    """∫ A dB as the Lebesgue integral ∫ A(t) B'(t) dt for AC integrators."""
    mez = measure_of(B, a, b)
    if any(jc.mass != 0.0 or jc.sub_left != 0.0 or jc.sub_right != 0.0 for jc in mez.jumps):
        raise NotACError("integrator has a jump inside the interval")
    if mez.singular:
        raise NotACError("integrator carries a singular (Cantor) component")
    total = 0.0 + 0.0j
    edges = sorted(set(A.piece_edges(a, b)) | set(B.piece_edges(a, b)))
    for lo, hi in zip(edges, edges[1:]):
        mid = 0.5 * (lo + hi)
        if not math.isfinite(mid):
            mid = lo + 1.0 if math.isfinite(lo) else (hi - 1.0 if math.isfinite(hi) else 0.0)
        aa = A.atoms[A._interval_index(mid)]
        ba = B.atoms[B._interval_index(mid)]
        if _is_zero_atom(aa) or _is_const_atom(ba):
            continue
        fn = lambda t, aa=aa, bd=ba.deriv: aa(t) * bd(t)
        if math.isfinite(lo) and math.isfinite(hi):
            v, _ = quad_panels(fn, lo, hi, tol=tol * 1e-1)
            total += v
        else:
            sign = 1 if math.isinf(hi) else -1
            edge = lo if sign > 0 else hi
            res = decay_integral(fn, edge, sign, tol=tol)
            total += res.value
    return total


# -- the regulated representation identity --------------------------------


def _heaviside_cut(x):
    """t -> H(x - t): 1 left of x, 1/2 at x, 0 right of x."""
    return PiecewiseFunction(
        (Breakpoint(x, 1.0, 0.5, 0.0),),
        (Polynomial([1.0]), Polynomial([0.0])),
    )


def regulated_identity(f, omega, x, finite=None, tol=1e-9):
    """Evaluate the regulated-representation integral; equals the midpoint.

    Infinite form (finite=None): Im(omega) > 0 required, f integrable on
    the left. Finite form: any complex omega on [a, b] with a < x < b, plus
    the boundary term f(a) e^{i omega (x-a)}.
    """
    omega = complex(omega)
    cut = _heaviside_cut(x)
    if finite is None:
        if omega.imag <= 0:
            raise HypothesisError("infinite form needs Im(omega) > 0")
        a, b = -_INF, _INF
        boundary = 0.0 + 0.0j
    else:
        a, b = finite
        if not (a < x < b):
            raise HypothesisError("need a < x < b for the finite form")
        boundary = f.eval(a) * np.exp(1j * omega * (x - a))
    df_part = hs_integral(cut, f, a, b, weight=omega, tol=tol * 1e-2)
    f_part = _lebesgue_left(f, a, x, omega, tol=tol * 1e-2)
    return np.exp(1j * omega * x) * (df_part - 1j * omega * f_part) + boundary


def _lebesgue_left(f, a, x, omega, tol):
    """∫_a^x exp(-i omega t) f(t) dt."""
    total = 0.0 + 0.0j
    for lo, hi in zip(*(lambda e: (e, e[1:]))(f.piece_edges(a, x))):
        mid = 0.5 * (lo + hi)
        if not math.isfinite(mid):
            mid = hi - 1.0
        atom = f.atoms[f._interval_index(mid)]
        if _is_zero_atom(atom):
            continue
        fn = lambda t, atom=atom: atom(t) * np.exp(-1j * omega * t)
        if math.isfinite(lo):
            v, _ = quad_panels(fn, lo, hi, tol=tol)
            total += v
        else:
            res = decay_integral(fn, hi, -1, tol=tol)
            total += res.value
    return total


# -- gauges and tagged partitions (verification simulator) ----------------


@dataclass(frozen=True)
class GaugeSpec:
    """Radii controlling which tagged partitions are admissible.

    Breakpoints listed in `radii` get the stated radius; other finite tags
    get an interval that cannot swallow a listed breakpoint; +-inf get the
    unbounded gauge pieces beyond `cutoff`.
    """

    radii: dict = field(default_factory=dict)
    default_radius: float = _INF
    cutoff: float = 100.0

    def gamma(self, z):
        if z == _INF:
            return (self.cutoff, _INF)
        if z == -_INF:
            return (-_INF, -self.cutoff)
        if z in self.radii:
            r = self.radii[z]
            return (z - r, z + r)
        # an interval around z that cannot swallow a listed breakpoint
        lo, hi = z - self.default_radius, z + self.default_radius
        for c in self.radii:
            if c < z:
                lo = max(lo, c)
            elif c > z:
                hi = min(hi, c)
        return (lo, hi)


@dataclass(frozen=True)
class TaggedPartition:
    """Intervals [x_{n-1}, x_n] with a tag z_n inside each."""

    intervals: tuple  # of (lo, hi)
    tags: tuple

    def __post_init__(self):
        xs = [iv[0] for iv in self.intervals] + [self.intervals[-1][1]]
        if any(u >= v for u, v in zip(xs, xs[1:])):
            raise ValueError("partition nodes must increase strictly")
        for (lo, hi), z in zip(self.intervals, self.tags):
            if not (lo <= z <= hi):
                raise ValueError(f"tag {z} outside its interval [{lo}, {hi}]")

    def check_fine(self, spec):
        for (lo, hi), z in zip(self.intervals, self.tags):
            glo, ghi = spec.gamma(z)
            if not (glo <= lo and hi <= ghi):
                raise NotFineError(
                    f"interval [{lo}, {hi}] not inside gauge({z}) = ({glo}, {ghi})")
        return True


def _node_value(f, t):
    if t == _INF:
        return _limit_value(f, 1)
    if t == -_INF:
        return _limit_value(f, -1)
    return f.eval(t)


def gauge_sum(phi, g, spec, partition, weight=None):
    """Riemann-Stieltjes sum of the partition, checked gamma-fine first."""
    partition.check_fine(spec)
    wf = _weight_fn(weight)
    total = 0.0 + 0.0j
    for (lo, hi), z in zip(partition.intervals, partition.tags):
        pv = _node_value(phi, z) if math.isfinite(z) else 0.0
        if pv == 0.0:
            continue
        mass = _node_value(g, hi) - _node_value(g, lo)
        term = pv * mass
        if wf is not None and math.isfinite(z):
            term *= complex(wf(z))
        total += term
    return total


def _tag_candidates(lo, hi, specials):
    cands = []
    if math.isfinite(lo):
        cands.append(lo)
    if math.isfinite(hi):
        cands.append(hi)
    if math.isfinite(lo) and math.isfinite(hi):
        cands.append(0.5 * (lo + hi))
    cands.extend(c for c in specials if lo <= c <= hi)
    return sorted(set(cands))


def _term_value(phi, g, lo, hi, z, wf):
    pv = _node_value(phi, z) if math.isfinite(z) else 0.0
    if pv == 0.0:
        return 0.0 + 0.0j
    mass = _node_value(g, hi) - _node_value(g, lo)
    term = pv * mass
    if wf is not None and math.isfinite(z):
        term *= complex(wf(z))
    return term


def gauge_converge(phi, g, deltas, a=-_INF, b=_INF, weight=None, mesh_cells=8):
    """Shrink the gauge and compare achievable sums against the integral.

    For each delta the report carries the min/max sum over adversarial tag
    choices when the gauge forces breakpoints to be tags (the admissible
    mode) and when only the mesh size is controlled (the classical mode,
    tags free). Real parts are reported; a persistent min/max gap in the
    classical column demonstrates non-convergence.
    """
    specials = sorted({bp.location for bp in phi.breakpoints}
                      | {bp.location for bp in g.breakpoints})
    specials = [c for c in specials if (a < c < b)]
    wf = _weight_fn(weight)
    reference = hs_integral(phi, g, a, b, weight=weight)
    rows = []
    for delta in deltas:
        # admissible mode: breakpoints must be tags of the cells containing them
        hs_lo = hs_hi = 0.0
        cells = _gauge_cells(specials, delta, a, b)
        for lo, hi, forced in cells:
            if forced is not None:
                v = _term_value(phi, g, lo, hi, forced, wf).real
                hs_lo += v
                hs_hi += v
            else:
                vals = [_term_value(phi, g, lo, hi, z, wf).real
                        for z in _tag_candidates(lo, hi, [])] or [0.0]
                hs_lo += min(vals)
                hs_hi += max(vals)
        # classical mode: mesh <= delta, tags free
        rs_lo = rs_hi = 0.0
        for lo, hi in _mesh_cells(specials, delta, a, b, mesh_cells):
            vals = [_term_value(phi, g, lo, hi, z, wf).real
                    for z in _tag_candidates(lo, hi, specials)] or [0.0]
            rs_lo += min(vals)
            rs_hi += max(vals)
        rows.append({"delta": delta, "hs_min": hs_lo, "hs_max": hs_hi,
                     "rs_min": rs_lo, "rs_max": rs_hi})
    return {"reference": reference, "rows": rows}


def _gauge_cells(specials, delta, a, b):
    """Cells of a gamma-fine partition: each special point tags its cell."""
    lo = a if math.isfinite(a) else (specials[0] - 1.0 if specials else -1.0)
    hi = b if math.isfinite(b) else (specials[-1] + 1.0 if specials else 1.0)
    cells = []
    cursor = lo
    for c in specials:
        if cursor < c - 0.49 * delta:
            cells.append((cursor, c - 0.49 * delta, None))
            cursor = c - 0.49 * delta
        nxt = min(c + 0.51 * delta, hi)
        cells.append((cursor, nxt, c))
        cursor = nxt
    if cursor < hi:
        cells.append((cursor, hi, None))
    return cells


def _mesh_cells(specials, delta, a, b, n_pad):
    """Mesh-delta cells covering the active region, one straddling each special."""
    lo = a if math.isfinite(a) else (specials[0] - 1.0 if specials else -1.0)
    hi = b if math.isfinite(b) else (specials[-1] + 1.0 if specials else 1.0)
    cells = []
    cursor = lo
    for c in specials:
        left = c - 0.41 * delta
        while cursor < left - 1e-15:
            step = min(delta, left - cursor)
            cells.append((cursor, cursor + step))
            cursor += step
        straddle_hi = min(c + 0.59 * delta, hi)
        cells.append((cursor, straddle_hi))
        cursor = straddle_hi
    while cursor < hi - 1e-15:
        step = min(delta, hi - cursor)
        cells.append((cursor, cursor + step))
        cursor += step
    return cells
