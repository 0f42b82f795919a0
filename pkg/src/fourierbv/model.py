"""Piecewise function model: smooth atoms between explicit breakpoints.

A PiecewiseFunction is a list of strictly increasing breakpoints, one atom
per open interval between them (including the two unbounded ends), a tail
behavior record per side, and an optional odd-symmetry record marking a
principal-value singularity center. Breakpoints store the one-sided limits
and the point value separately, so the value at a jump is free data.

All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .atoms import Atom, Polynomial, Sum, Product, split_cantor
from .errors import ClassificationError, DomainError, NotBVError, ValidationError

_EDGE_TOL = 1e-12

TailPair = namedtuple("TailPair", ["pos", "neg"])


@dataclass(frozen=True)
class Breakpoint:
    """Location with one-sided limits and the (independent) point value.

    A PV singularity center is stored with all three entries None; it is
    only legal when the owning function carries an odd-symmetry record
    centered there.
    """

    location: float
    left_limit: float | None
    value: float | None
    right_limit: float | None

    @property
    def is_singular(self):
        return self.left_limit is None or self.right_limit is None

    @property
    def mass(self):
        return self.right_limit - self.left_limit

    def has_jump(self):
        if self.is_singular:
            return False
        return self.left_limit != self.value or self.value != self.right_limit


@dataclass(frozen=True)
class TailBehavior:
    """Behavior of the function near one infinity.

    kind: 'L1' (absolutely integrable), 'zero' (bounded variation, limit 0),
    'limit' (bounded variation with a finite limit), 'poly' (asymptotic to
    the stored polynomial), or 'unspecified' for intermediate values that
    never reach a transform.
    """

    side: int
    kind: str
    limit: float | None = None
    coeffs: tuple = ()

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ValidationError("tail side must be +1 or -1")
        if self.kind not in ("L1", "zero", "limit", "poly", "unspecified"):
            raise ValidationError(f"unknown tail kind {self.kind!r}")


def tail_L1(side):
    return TailBehavior(side, "L1")


def tail_zero(side):
    return TailBehavior(side, "zero")


def tail_limit(side, value=None):
    return TailBehavior(side, "limit", limit=value)


def tail_poly(side, coeffs):
    return TailBehavior(side, "poly", coeffs=tuple(float(c) for c in coeffs))


@dataclass(frozen=True)
class OddSymmetry:
    """f(center + u) = -f(center - u) on |u| < radius; radius may be inf."""

    center: float
    radius: float


@dataclass(frozen=True)
class AsymptoteRecord:
    """What subtract_asymptote removed: H(x) p+(x) + H(-x) p-(x)."""

    pos_coeffs: tuple = ()
    neg_coeffs: tuple = ()

    def is_empty(self):
        return not any(self.pos_coeffs) and not any(self.neg_coeffs)

    def eval(self, x):
        pp = np.polynomial.polynomial.polyval(x, self.pos_coeffs) if self.pos_coeffs else 0.0
        pm = np.polynomial.polynomial.polyval(x, self.neg_coeffs) if self.neg_coeffs else 0.0
        h = 0.5 if x == 0 else (1.0 if x > 0 else 0.0)
        return h * pp + (1.0 - h) * pm


class PiecewiseFunction:
    """Real-line function: atoms on open intervals + breakpoint triples + tails."""

    def __init__(self, breakpoints, pieces, tails=None, odd_symmetry=None):
        bps = tuple(breakpoints)
        atoms = tuple(pieces)
        if len(atoms) != len(bps) + 1:
            raise ValidationError("need exactly one atom per interval (n breakpoints, n+1 atoms)")
        locs = [b.location for b in bps]
        if any(l2 <= l1 for l1, l2 in zip(locs, locs[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if tails is None:
            tails = (TailBehavior(-1, "unspecified"), TailBehavior(1, "unspecified"))
        if tails[0].side != -1 or tails[1].side != 1:
            raise ValidationError("tails must be given as (negative side, positive side)")
        self.breakpoints = bps
        self.atoms = atoms
        self.tails = tuple(tails)
        self.odd_symmetry = odd_symmetry
        self._locations = locs
        self._validate()

    def _validate(self):
        for i, bp in enumerate(self.breakpoints):
            if bp.is_singular:
                od = self.odd_symmetry
                if od is None or od.center != bp.location:
                    raise ValidationError(
                        "singular breakpoint requires an odd-symmetry record at its center"
                    )
                continue
            for v in (bp.left_limit, bp.value, bp.right_limit):
                if v is None or not math.isfinite(v):
                    raise ValidationError(f"non-finite limit data at breakpoint {bp.location}")
            lv = self.atoms[i].edge_value(bp.location)
            rv = self.atoms[i + 1].edge_value(bp.location)
            for have, want, side in ((lv, bp.left_limit, "left"), (rv, bp.right_limit, "right")):
                if have is not None and abs(have - want) > _EDGE_TOL * max(1.0, abs(want)):
                    raise ValidationError(
                        f"{side} limit at {bp.location} disagrees with the adjacent atom: "
                        f"{want} vs {have}"
                    )

    # -- lookup helpers ------------------------------------------------

    def _interval_index(self, t):
        return bisect_left(self._locations, t)

    def breakpoint_at(self, t):
        i = self._interval_index(t)
        if i < len(self._locations) and self._locations[i] == t:
            return self.breakpoints[i]
        return None

    def atom_at(self, t):
        """Atom of the open interval containing t (t must not be a breakpoint)."""
        i = self._interval_index(t)
        if i < len(self._locations) and self._locations[i] == t:
            raise ValueError(f"{t} is a breakpoint")
        return self.atoms[i]

    def piece_edges(self, a, b):
        """Sorted [a, interior breakpoints, b]."""
        inner = [c for c in self._locations if a < c < b]
        return [a] + inner + [b]

    def iter_pieces(self, a=-math.inf, b=math.inf):
        """Yield (lo, hi, atom) for the smooth pieces meeting (a, b)."""
        edges = self.piece_edges(a, b)
        for lo, hi in zip(edges, edges[1:]):
            mid = 0.5 * (lo + hi)
            if not math.isfinite(mid):
                mid = lo + 1.0 if math.isfinite(lo) else (hi - 1.0 if math.isfinite(hi) else 0.0)
            yield lo, hi, self.atoms[self._interval_index(mid)]

    # -- evaluation ----------------------------------------------------

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t = float(t)
        bp = self.breakpoint_at(t)
        if bp is not None:
            if bp.is_singular:
                raise DomainError(f"{t} is a principal-value singularity center")
            return bp.value
        v = float(self.atom_at(t)(t))
        if not math.isfinite(v):
            raise DomainError(f"function is not evaluable at t={t}")
        return v

    def sample(self, ts):
        """Vectorized evaluation ignoring breakpoint point values (a.e. value)."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty_like(ts)
        edges = [-math.inf] + self._locations + [math.inf]
        for i, atom in enumerate(self.atoms):
            mask = (ts > edges[i]) & (ts <= edges[i + 1])
            if mask.any():
                out[mask] = atom(ts[mask])
        return out

    def density(self, ts):
        """Vectorized a.e. derivative (the absolutely continuous density)."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty_like(ts)
        edges = [-math.inf] + self._locations + [math.inf]
        for i, atom in enumerate(self.atoms):
            mask = (ts > edges[i]) & (ts <= edges[i + 1])
            if mask.any():
                out[mask] = atom.deriv(ts[mask])
        return out

    def one_sided_limits(self, x):
        bp = self.breakpoint_at(x)
        if bp is not None:
            if bp.is_singular:
                raise DomainError(f"{x} is a principal-value singularity center")
            return bp.left_limit, bp.right_limit
        v = self.eval(x)
        return v, v

    def midpoint_value(self, x):
        l, r = self.one_sided_limits(x)
        return 0.5 * (l + r)

    # -- structure -----------------------------------------------------

    def jumps(self, a=-math.inf, b=math.inf):
        return [bp for bp in self.breakpoints if a <= bp.location <= b and bp.has_jump()]

    def singular_centers(self, a=-math.inf, b=math.inf):
        return [bp.location for bp in self.breakpoints
                if bp.is_singular and a <= bp.location <= b]

    def with_tails(self, neg, pos):
        return PiecewiseFunction(self.breakpoints, self.atoms, (neg, pos), self.odd_symmetry)


# -- module-level operations (the public verbs) -------------------------


def eval_at(f, t):
    return f.eval(t)


def one_sided_limits(f, x):
    return f.one_sided_limits(x)


def midpoint_value(f, x):
    return f.midpoint_value(x)


def jumps(f, a=-math.inf, b=math.inf):
    return f.jumps(a, b)


def _atom_variation(atom, lo, hi):
    """Variation of a smooth atom on [lo, hi] by monotone segmentation."""
    smooth, cantors = split_cantor(atom)
    if atom.singular and smooth is None and not cantors:
        raise NotBVError("singular component enters nonlinearly; cannot decompose")
    total = 0.0
    for leaf, coeff in cantors:
        total += abs(coeff) * (leaf(hi) - leaf(lo))
    if smooth is None:
        return total
    n = _sample_count(smooth, lo, hi)
    ts = np.linspace(lo, hi, n)
    with np.errstate(all="ignore"):
        ds = np.asarray(smooth.deriv(ts), dtype=float)
    if not np.isfinite(ds[1:-1]).all():
        raise NotBVError("derivative is unbounded inside the interval")
    nodes = [lo]
    for i in range(n - 1):
        a_, b_ = ds[i], ds[i + 1]
        if np.isfinite(a_) and np.isfinite(b_) and a_ * b_ < 0:
            try:
                nodes.append(brentq(lambda t: float(smooth.deriv(t)), ts[i], ts[i + 1]))
            except ValueError:
                nodes.append(0.5 * (ts[i] + ts[i + 1]))
    nodes.append(hi)
    vals = [smooth.edge_value(x) for x in nodes]
    if any(v is None for v in vals):
        raise NotBVError("atom is not evaluable at a segmentation node")
    total += sum(abs(v2 - v1) for v1, v2 in zip(vals, vals[1:]))
    return total


def _sample_count(atom, lo, hi):
    # enough samples to bracket every derivative sign change; oscillatory
    # atoms get a frequency-aware bump
    freq = _osc_frequency(atom)
    n = int(64 + 8 * freq * (hi - lo))
    return min(max(n, 65), 20001)


def _osc_frequency(atom):
    from .atoms import Sin, Cos, Compose, Quotient

    if isinstance(atom, (Sin, Cos)):
        return abs(atom.scale)
    if isinstance(atom, Compose):
        return abs(atom.outer.scale) * 2.0
    if isinstance(atom, Sum) or isinstance(atom, Product):
        return sum(_osc_frequency(p) for p in atom.parts)
    if isinstance(atom, Quotient):
        return _osc_frequency(atom.num) + _osc_frequency(atom.den)
    return 0.0


def total_variation(f, a, b):
    """Total variation of f on [a, b]; endpoints may be infinite.

    Smooth pieces are segmented at the zeros of their derivative, jumps
    contribute |f(c)-f(c-)| + |f(c+)-f(c)| through the point value, and
    Cantor components contribute their staircase increments. Unbounded
    ends are resolved through the tail limit, so slowly oscillating tails
    are truncation-estimated.
    """
    if a >= b:
        raise ValueError("need a < b")
    if f.singular_centers(a, b):
        raise NotBVError("interval contains a principal-value singularity")
    total = 0.0
    for bp in f.breakpoints:
        if a <= bp.location <= b:
            if bp.location == a:
                total += abs(bp.right_limit - bp.value)
            elif bp.location == b:
                total += abs(bp.value - bp.left_limit)
            else:
                total += abs(bp.value - bp.left_limit) + abs(bp.right_limit - bp.value)
    for lo, hi, atom in f.iter_pieces(a, b):
        if math.isinf(lo) or math.isinf(hi):
            total += _tail_variation(atom, lo, hi)
        else:
            total += _atom_variation(atom, lo, hi)
    return total


def _tail_variation(atom, lo, hi):
    if math.isinf(lo) and math.isinf(hi):
        return _tail_variation(atom, lo, 0.0) + _tail_variation(atom, 0.0, hi)
    sign = 1 if math.isinf(hi) else -1
    lim = atom.limit(sign)
    if lim is None or not math.isfinite(lim):
        raise NotBVError("tail atom has no finite limit; variation is unbounded")
    edge = lo if sign > 0 else hi
    cut = max(1e6, 4.0 * abs(edge) if math.isfinite(edge) else 1e6)
    if sign > 0:
        v = _atom_variation(atom, edge, cut)
        ev = atom.edge_value(cut)
    else:
        v = _atom_variation(atom, -cut, edge)
        ev = atom.edge_value(-cut)
    if ev is None:
        raise NotBVError("tail atom not evaluable at the truncation point")
    return v + abs(lim - ev)


_DECADES = (10.0, 100.0, 1000.0)


def _tail_envelope(f, side, n_per_decade=33):
    """Max |f| over each sampled decade [10^k, 10^(k+1)] on the given side."""
    env = []
    for lo in _DECADES:
        ts = np.geomspace(lo, 10.0 * lo, n_per_decade) * side
        with np.errstate(all="ignore"):
            vals = np.abs(f.sample(ts))
        env.append(float(np.nanmax(vals)))
    return env


def _tail_atom(f, side):
    return f.atoms[-1] if side > 0 else f.atoms[0]


def classify_tails(f):
    """Check the declared tail records against the atoms and resolve limits.

    Returns TailPair(pos, neg). Numeric checks sample at t = +-10, +-100,
    +-1000 with a monotone-envelope criterion; 'limit' records get the
    analytic atom limit filled in, and 'poly' records must leave a residual
    that decays.
    """
    out = {}
    for side in (1, -1):
        declared = f.tails[1] if side > 0 else f.tails[0]
        atom = _tail_atom(f, side)
        if declared.kind == "unspecified":
            raise ClassificationError("tails were never declared for this function")
        if declared.kind == "limit":
            lim = atom.limit(side)
            if lim is None or not math.isfinite(lim):
                lim = _extrapolate_limit(f, side)
            if declared.limit is not None and abs(declared.limit - lim) > 1e-9:
                raise ClassificationError(
                    f"declared tail limit {declared.limit} differs from atom limit {lim}"
                )
            out[side] = TailBehavior(side, "limit", limit=lim)
        elif declared.kind == "zero":
            lim = atom.limit(side)
            env = _tail_envelope(f, side)
            ok = (lim == 0.0) or all(e2 <= e1 * 1.05 + 1e-300 for e1, e2 in zip(env, env[1:]))
            if not ok or (lim is not None and lim != 0.0 and math.isfinite(lim) and abs(lim) > 1e-12):
                raise ClassificationError(f"tail on side {side} does not decay to zero")
            out[side] = TailBehavior(side, "zero", limit=0.0)
        elif declared.kind == "L1":
            if not _l1_check(f, side):
                raise ClassificationError(f"tail on side {side} fails the integrability check")
            out[side] = declared
        elif declared.kind == "poly":
            res = _poly_residual_envelope(f, side, declared.coeffs)
            if not all(e2 <= e1 * 1.05 + 1e-300 for e1, e2 in zip(res, res[1:])) or res[-1] > res[0] + 1e-12:
                raise ClassificationError(
                    f"residual after removing the asymptotic polynomial does not decay (side {side})"
                )
            out[side] = declared
    return TailPair(pos=out[1], neg=out[-1])


def _extrapolate_limit(f, side):
    vals = [f.eval(side * 10.0 ** k) for k in (2, 3, 4)]
    # Aitken's delta-squared on three samples
    d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
    den = d2 - d1
    if den != 0:
        return vals[2] - d2 * d2 / den
    return vals[2]


def _l1_check(f, side):
    from scipy.integrate import quad

    vals = []
    for lo in _DECADES:
        v, _ = quad(lambda t: abs(f.sample(np.array([t]))[0]), side * lo, side * 10 * lo,
                    limit=100)
        vals.append(abs(v))
    if vals[0] == 0.0:
        return vals[-1] == 0.0
    return vals[2] <= vals[1] <= vals[0] * 1.0 + 1e-300 and vals[2] <= 0.9 * vals[1] + 1e-300


def _poly_residual_envelope(f, side, coeffs):
    env = []
    for lo in _DECADES:
        ts = np.geomspace(lo, 10.0 * lo, 17) * side
        with np.errstate(all="ignore"):
            res = f.sample(ts) - np.polynomial.polynomial.polyval(ts, list(coeffs) or [0.0])
        env.append(float(np.nanmax(np.abs(res))))
    return env


def subtract_asymptote(f):
    """Remove the Heaviside/polynomial tail terms, returning (g, record).

    g keeps f's interior structure, gains a breakpoint at 0 (where the
    Heaviside factors switch), and has decaying tails. Re-adding the
    record's evaluation reproduces f pointwise.
    """
    pair = classify_tails(f)
    pos, neg = pair.pos, pair.neg
    if pos.kind in ("L1", "zero") and neg.kind in ("L1", "zero"):
        return f, AsymptoteRecord()
    if pos.kind == "limit":
        p_pos = (pos.limit,)
    elif pos.kind == "poly":
        p_pos = pos.coeffs
    else:
        raise ClassificationError("positive tail is neither limit nor polynomial growth")
    if neg.kind == "limit":
        p_neg = (neg.limit,)
    elif neg.kind == "poly":
        p_neg = neg.coeffs
    else:
        raise ClassificationError("negative tail is neither limit nor polynomial growth")
    record = AsymptoteRecord(pos_coeffs=tuple(p_pos), neg_coeffs=tuple(p_neg))

    def _shift(atom, coeffs):
        if not any(coeffs):
            return atom
        return Sum([atom, Polynomial([-c for c in coeffs])])

    locs = list(f._locations)
    has_zero = 0.0 in locs
    new_bps = []
    new_atoms = []
    # value of H(x)p+ + H(-x)p- from each side of zero
    pp0 = np.polynomial.polynomial.polyval(0.0, list(p_pos) or [0.0])
    pm0 = np.polynomial.polynomial.polyval(0.0, list(p_neg) or [0.0])
    for i, atom in enumerate(f.atoms):
        left_edge = -math.inf if i == 0 else locs[i - 1]
        right_edge = math.inf if i == len(locs) else locs[i]
        if right_edge <= 0.0:
            new_atoms.append(_shift(atom, p_neg))
        elif left_edge >= 0.0:
            new_atoms.append(_shift(atom, p_pos))
        else:
            # interval straddles zero: split it
            new_atoms.append(_shift(atom, p_neg))
            lv = float(atom(0.0)) if atom.edge_value(0.0) is not None else None
            if lv is None:
                raise ValidationError("tail subtraction needs the atom evaluable at 0")
            new_bps.append(Breakpoint(0.0, lv - pm0, lv - 0.5 * (pp0 + pm0), lv - pp0))
            new_atoms.append(_shift(atom, p_pos))
    for bp in f.breakpoints:
        if bp.is_singular:
            new_bps.append(bp)
            continue
        if bp.location < 0.0:
            pv = np.polynomial.polynomial.polyval(bp.location, list(p_neg) or [0.0])
            new_bps.append(Breakpoint(bp.location, bp.left_limit - pv, bp.value - pv,
                                      bp.right_limit - pv))
        elif bp.location > 0.0:
            c = p_pos
            pv = np.polynomial.polynomial.polyval(bp.location, list(c) or [0.0])
            new_bps.append(Breakpoint(bp.location, bp.left_limit - pv, bp.value - pv,
                                      bp.right_limit - pv))
        else:
            new_bps.append(Breakpoint(0.0, bp.left_limit - pm0,
                                      bp.value - 0.5 * (pp0 + pm0), bp.right_limit - pp0))
    new_bps.sort(key=lambda b: b.location)
    g = PiecewiseFunction(new_bps, new_atoms,
                          (tail_zero(-1), tail_zero(1)), f.odd_symmetry)
    classify_tails(g)
    return g, record


def restrict(f, a, b):
    """f * chi_[a, b] as a new PiecewiseFunction with L1 (compact) tails."""
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("restrict needs a finite interval")
    zero = Polynomial([0.0])
    bps = [Breakpoint(a, 0.0, f.eval(a), _right_limit(f, a))]
    atoms = [zero]
    for bp in f.breakpoints:
        if a < bp.location < b:
            bps.append(bp)
    edges = f.piece_edges(a, b)
    for lo, hi in zip(edges, edges[1:]):
        mid = 0.5 * (lo + hi)
        atoms.append(f.atoms[f._interval_index(mid)])
    bps.append(Breakpoint(b, _left_limit(f, b), f.eval(b), 0.0))
    atoms.append(zero)
    odd = f.odd_symmetry
    if odd is not None and not (a < odd.center < b):
        odd = None
    return PiecewiseFunction(bps, atoms, (tail_L1(-1), tail_L1(1)), odd)


def _left_limit(f, x):
    bp = f.breakpoint_at(x)
    return bp.left_limit if bp is not None else f.eval(x)


def _right_limit(f, x):
    bp = f.breakpoint_at(x)
    return bp.right_limit if bp is not None else f.eval(x)


def pw_mul(f, g):
    """Pointwise product of two piecewise functions (merged breakpoints)."""
    locs = sorted(set(f._locations) | set(g._locations))
    bps = []
    for c in locs:
        fl, fr = f.one_sided_limits(c)
        gl, gr = g.one_sided_limits(c)
        bps.append(Breakpoint(c, fl * gl, f.eval(c) * g.eval(c), fr * gr))
    atoms = []
    edges = [-math.inf] + locs + [math.inf]
    for lo, hi in zip(edges, edges[1:]):
        mid = 0.5 * (lo + hi)
        if not math.isfinite(mid):
            mid = lo + 1.0 if math.isfinite(lo) else (hi - 1.0 if math.isfinite(hi) else 0.0)
        fa = f.atoms[f._interval_index(mid)]
        ga = g.atoms[g._interval_index(mid)]
        atoms.append(Product([fa, ga]))
    return PiecewiseFunction(bps, atoms)


def build(bounds, pieces, tails=None, values=None, limits=None, odd=None):
    """Assemble a PiecewiseFunction from breakpoint locations and atoms.

    bounds: sorted interior breakpoint locations (n entries).
    pieces: n+1 atoms covering (-inf, b1), (b1, b2), ..., (bn, inf).
    values: optional {location: point value}; default is the limit midpoint.
    limits: optional {location: (left, right)} overriding atom edge values.
    odd: optional OddSymmetry; its center may appear in bounds as a
        singular breakpoint (pass limits/values as None there).
    """
    values = values or {}
    limits = limits or {}
    bps = []
    for i, c in enumerate(bounds):
        c = float(c)
        if odd is not None and odd.center == c and c not in limits and c not in values:
            bps.append(Breakpoint(c, None, None, None))
            continue
        if c in limits:
            lv, rv = limits[c]
        else:
            lv = pieces[i].edge_value(c)
            rv = pieces[i + 1].edge_value(c)
            if lv is None or rv is None:
                raise ValidationError(
                    f"atom not evaluable at {c}; pass explicit limits for this breakpoint"
                )
        val = values.get(c, 0.5 * (lv + rv))
        bps.append(Breakpoint(c, lv, val, rv))
    return PiecewiseFunction(bps, pieces, tails, odd)
