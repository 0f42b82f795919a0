"""Smooth building blocks for piecewise function definitions.

An atom is a function that is continuously differentiable on the open
interval it gets attached to (the Cantor staircase is the one deliberate
exception: continuous, increasing, derivative zero almost everywhere).
Leaf atoms take an affine argument u = scale*t + shift; combinations are
sums, products, quotients and a restricted composition. Everything is
array-safe: atoms accept floats or numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_INF = math.inf


def _as_float(x):
    return float(x) if np.ndim(x) == 0 else np.asarray(x, dtype=float)


class Atom:
    """Base class. Subclasses implement value/derivative evaluation."""

    #: True when the atom carries a singular (Cantor) measure component.
    singular = False

    def __call__(self, t):
        raise NotImplementedError

    def deriv(self, t):
        """Pointwise derivative; the absolutely continuous density of d(atom)."""
        raise NotImplementedError

    def limit(self, sign):
        """Limit at sign*infinity: a float, +-inf, or None when no limit exists."""
        return None

    def bounded_tail(self, sign):
        """True when |atom| stays bounded as t -> sign*infinity."""
        lim = self.limit(sign)
        return lim is not None and math.isfinite(lim)

    def poly_coeffs(self):
        """Coefficients [c0, c1, ...] when the atom is exactly a polynomial."""
        return None

    def edge_value(self, c):
        """One-sided limit at a finite edge c, or None when not evaluable there."""
        with np.errstate(all="ignore"):
            try:
                v = float(self(c))
            except (DomainError, ZeroDivisionError, ValueError):
                return None
        return v if math.isfinite(v) else None

    # arithmetic sugar used by the model layer
    def __add__(self, other):
        return Sum([self, _coerce(other)])

    def __radd__(self, other):
        return Sum([_coerce(other), self])

    def __sub__(self, other):
        return Sum([self, Product([Polynomial([-1.0]), _coerce(other)])])

    def __mul__(self, other):
        return Product([self, _coerce(other)])

    def __rmul__(self, other):
        return Product([_coerce(other), self])

    def __neg__(self):
        return Product([Polynomial([-1.0]), self])


def _coerce(x):
    if isinstance(x, Atom):
        return x
    return Polynomial([float(x)])


class _AffineLeaf(Atom):
    """Leaf with affine inner argument u = scale*t + shift."""

    def __init__(self, scale=1.0, shift=0.0):
        self.scale = float(scale)
        self.shift = float(shift)

    def _u(self, t):
        return self.scale * _as_float(t) + self.shift

    def _inner_limit(self, sign):
        # limit of the affine argument at sign*inf
        if self.scale == 0.0:
            return self.shift
        return _INF * sign * math.copysign(1.0, self.scale)

    def __repr__(self):
        return f"{type(self).__name__}(scale={self.scale}, shift={self.shift})"


class Polynomial(Atom):
    """p(t) = c0 + c1 t + ... in the raw variable t."""

    def __init__(self, coeffs):
        cs = [float(c) for c in coeffs] or [0.0]
        while len(cs) > 1 and cs[-1] == 0.0:
            cs.pop()
        self.coeffs = cs

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(_as_float(t), self.coeffs)

    def deriv(self, t):
        dc = [k * c for k, c in enumerate(self.coeffs)][1:] or [0.0]
        return np.polynomial.polynomial.polyval(_as_float(t), dc)

    def limit(self, sign):
        if len(self.coeffs) == 1:
            return self.coeffs[0]
        lead = self.coeffs[-1]
        n = len(self.coeffs) - 1
        s = math.copysign(1.0, lead) * (sign ** n)
        return _INF * s

    def poly_coeffs(self):
        return list(self.coeffs)

    def degree(self):
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"Polynomial({self.coeffs})"


def Constant(c):
    return Polynomial([c])


def Identity():
    return Polynomial([0.0, 1.0])


class Exp(_AffineLeaf):
    """exp(scale*t + shift)."""

    def __call__(self, t):
        return np.exp(self._u(t))

    def deriv(self, t):
        return self.scale * np.exp(self._u(t))

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if ul == _INF:
            return _INF
        if ul == -_INF:
            return 0.0
        return math.exp(ul)


class Log(_AffineLeaf):
    """log|scale*t + shift|."""

    def __call__(self, t):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self._u(t)))

    def deriv(self, t):
        return self.scale / self._u(t)

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if not math.isfinite(ul):
            return _INF
        return math.log(abs(ul)) if ul != 0.0 else -_INF


class Power(_AffineLeaf):
    """|scale*t + shift|^alpha."""

    def __init__(self, alpha, scale=1.0, shift=0.0):
        super().__init__(scale, shift)
        self.alpha = float(alpha)

    def __call__(self, t):
        with np.errstate(divide="ignore"):
            return np.abs(self._u(t)) ** self.alpha

    def deriv(self, t):
        u = self._u(t)
        with np.errstate(divide="ignore"):
            return self.alpha * self.scale * np.sign(u) * np.abs(u) ** (self.alpha - 1.0)

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if not math.isfinite(ul):
            if self.alpha > 0:
                return _INF
            if self.alpha < 0:
                return 0.0
            return 1.0
        return abs(ul) ** self.alpha if (ul != 0.0 or self.alpha >= 0) else _INF

    def bounded_tail(self, sign):
        lim = self.limit(sign)
        return lim is not None and math.isfinite(lim)

    def __repr__(self):
        return f"Power({self.alpha}, scale={self.scale}, shift={self.shift})"


class Sin(_AffineLeaf):
    def __call__(self, t):
        return np.sin(self._u(t))

    def deriv(self, t):
        return self.scale * np.cos(self._u(t))

    def limit(self, sign):
        ul = self._inner_limit(sign)
        return math.sin(ul) if math.isfinite(ul) else None

    def bounded_tail(self, sign):
        return True


class Cos(_AffineLeaf):
    def __call__(self, t):
        return np.cos(self._u(t))

    def deriv(self, t):
        return -self.scale * np.sin(self._u(t))

    def limit(self, sign):
        ul = self._inner_limit(sign)
        return math.cos(ul) if math.isfinite(ul) else None

    def bounded_tail(self, sign):
        return True


class Arctan(_AffineLeaf):
    def __call__(self, t):
        return np.arctan(self._u(t))

    def deriv(self, t):
        u = self._u(t)
        return self.scale / (1.0 + u * u)

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if ul == _INF:
            return math.pi / 2
        if ul == -_INF:
            return -math.pi / 2
        return math.atan(ul)

    def bounded_tail(self, sign):
        return True


class Tanh(_AffineLeaf):
    def __call__(self, t):
        return np.tanh(self._u(t))

    def deriv(self, t):
        c = np.cosh(np.minimum(np.abs(self._u(t)), 350.0))
        return self.scale / (c * c)

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if ul == _INF:
            return 1.0
        if ul == -_INF:
            return -1.0
        return math.tanh(ul)

    def bounded_tail(self, sign):
        return True


class RecipLog(_AffineLeaf):
    """1 / log|scale*t + shift|.  Not evaluable where |u| = 1."""

    def __call__(self, t):
        u = self._u(t)
        with np.errstate(divide="ignore"):
            lg = np.log(np.abs(u))
            out = np.where(lg != 0.0, 1.0 / np.where(lg != 0.0, lg, 1.0), np.inf)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def deriv(self, t):
        u = self._u(t)
        with np.errstate(divide="ignore"):
            lg = np.log(np.abs(u))
            return -self.scale / (u * lg * lg)

    def limit(self, sign):
        ul = self._inner_limit(sign)
        if not math.isfinite(ul):
            return 0.0
        lg = math.log(abs(ul)) if ul != 0.0 else -_INF
        if lg == 0.0:
            return None
        return 1.0 / lg if math.isfinite(lg) else 0.0

    def bounded_tail(self, sign):
        return True


def cantor_value(u, depth=64):
    """Cantor-Lebesgue staircase on [0,1], clamped to 0/1 outside. Array-safe."""
    scalar = np.ndim(u) == 0
    x = np.atleast_1d(np.clip(np.asarray(u, dtype=float), 0.0, 1.0)).copy()
    r = np.zeros_like(x)
    active = np.ones_like(x, dtype=bool)
    w = 1.0
    for _ in range(depth):
        w *= 0.5
        lo = active & (x < 1.0 / 3.0)
        hi = active & (x > 2.0 / 3.0)
        mid = active & ~lo & ~hi
        r[mid] += w
        r[hi] += w
        active = lo | hi
        if not active.any():
            break
        x = np.where(lo, 3.0 * x, np.where(hi, 3.0 * x - 2.0, x))
    return float(r[0]) if scalar else r


class Cantor(Atom):
    """Cantor-Lebesgue function mapped onto [a, b]; 0 left of a, 1 right of b."""

    singular = True

    def __init__(self, a=0.0, b=1.0):
        if not (b > a):
            raise ValueError("Cantor atom needs a < b")
        self.a = float(a)
        self.b = float(b)

    def __call__(self, t):
        u = (np.asarray(t, dtype=float) - self.a) / (self.b - self.a)
        v = cantor_value(u)
        return float(v) if np.ndim(t) == 0 else v

    def deriv(self, t):
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0

    def limit(self, sign):
        return 1.0 if sign > 0 else 0.0

    def bounded_tail(self, sign):
        return True

    def __repr__(self):
        return f"Cantor({self.a}, {self.b})"


class Sum(Atom):
    def __init__(self, parts):
        self.parts = [_coerce(p) for p in parts]

    @property
    def singular(self):
        return any(p.singular for p in self.parts)

    def __call__(self, t):
        return sum(p(t) for p in self.parts)

    def deriv(self, t):
        return sum(p.deriv(t) for p in self.parts)

    def limit(self, sign):
        total = 0.0
        for p in self.parts:
            lim = p.limit(sign)
            if lim is None:
                return None
            total += lim
            if math.isnan(total):
                return None
        return total

    def bounded_tail(self, sign):
        return all(p.bounded_tail(sign) for p in self.parts)

    def poly_coeffs(self):
        acc = [0.0]
        for p in self.parts:
            cs = p.poly_coeffs()
            if cs is None:
                return None
            if len(cs) > len(acc):
                acc += [0.0] * (len(cs) - len(acc))
            for k, c in enumerate(cs):
                acc[k] += c
        return acc

    def __repr__(self):
        return "Sum(%r)" % (self.parts,)


class Product(Atom):
    def __init__(self, parts):
        self.parts = [_coerce(p) for p in parts]

    @property
    def singular(self):
        return any(p.singular for p in self.parts)

    def __call__(self, t):
        out = self.parts[0](t)
        for p in self.parts[1:]:
            out = out * p(t)
        return out

    def deriv(self, t):
        vals = [p(t) for p in self.parts]
        total = 0.0
        for i, p in enumerate(self.parts):
            term = p.deriv(t)
            for j, v in enumerate(vals):
                if j != i:
                    term = term * v
            total = total + term
        return total

    def limit(self, sign):
        lims = [p.limit(sign) for p in self.parts]
        # zero times a bounded factor vanishes even when the factor oscillates
        if any(l == 0.0 for l in lims):
            others_ok = all(
                l == 0.0 or self.parts[i].bounded_tail(sign)
                for i, l in enumerate(lims)
            )
            if others_ok:
                return 0.0
        if any(l is None for l in lims):
            return None
        total = 1.0
        for l in lims:
            total *= l
            if math.isnan(total):
                return None
        return total

    def bounded_tail(self, sign):
        lims = [p.limit(sign) for p in self.parts]
        if all(p.bounded_tail(sign) for p in self.parts):
            return True
        return self.limit(sign) == 0.0

    def poly_coeffs(self):
        acc = [1.0]
        for p in self.parts:
            cs = p.poly_coeffs()
            if cs is None:
                return None
            acc = list(np.polynomial.polynomial.polymul(acc, cs))
        return [float(c) for c in acc]

    def __repr__(self):
        return "Product(%r)" % (self.parts,)


class Quotient(Atom):
    """num/den; the denominator must not vanish on the attachment interval."""

    def __init__(self, num, den):
        self.num = _coerce(num)
        self.den = _coerce(den)

    @property
    def singular(self):
        return self.num.singular or self.den.singular

    def __call__(self, t):
        return self.num(t) / self.den(t)

    def deriv(self, t):
        n, d = self.num(t), self.den(t)
        return (self.num.deriv(t) * d - n * self.den.deriv(t)) / (d * d)

    def limit(self, sign):
        ln, ld = self.num.limit(sign), self.den.limit(sign)
        if ld is None:
            return None
        if ld in (_INF, -_INF):
            if ln is not None and math.isfinite(ln):
                return 0.0
            if self.num.bounded_tail(sign):
                return 0.0
            return None
        if ln is None or ld == 0.0:
            return None
        return ln / ld

    def bounded_tail(self, sign):
        lim = self.limit(sign)
        return lim is not None and math.isfinite(lim)

    def __repr__(self):
        return f"Quotient({self.num!r}, {self.den!r})"


class Compose(Atom):
    """outer(inner(t)) with smooth outer (sin/cos) and smooth monotone inner.

    The user-facing grammar restricts inner arguments to affine expressions;
    this node exists so the built-in catalog can carry functions like
    sin(sqrt(t)) that the theory covers but the grammar does not generate.
    """

    def __init__(self, outer, inner):
        if not isinstance(outer, (Sin, Cos)):
            raise ValueError("Compose supports sin/cos outer atoms only")
        self.outer = outer
        self.inner = _coerce(inner)

    def __call__(self, t):
        u = self.outer.scale * self.inner(t) + self.outer.shift
        return np.sin(u) if isinstance(self.outer, Sin) else np.cos(u)

    def deriv(self, t):
        u = self.outer.scale * self.inner(t) + self.outer.shift
        du = self.outer.scale * self.inner.deriv(t)
        return (np.cos(u) if isinstance(self.outer, Sin) else -np.sin(u)) * du

    def limit(self, sign):
        il = self.inner.limit(sign)
        if il is None or not math.isfinite(il):
            return None
        u = self.outer.scale * il + self.outer.shift
        return math.sin(u) if isinstance(self.outer, Sin) else math.cos(u)

    def bounded_tail(self, sign):
        return True

    def __repr__(self):
        return f"Compose({self.outer!r}, {self.inner!r})"


def split_cantor(atom):
    """Split an atom into (smooth part or None, [(Cantor leaf, coefficient)]).

    Cantor components must enter linearly (sums and constant multiples);
    anything else returns None in the flag position to signal failure.
    """
    if isinstance(atom, Cantor):
        return None, [(atom, 1.0)]
    if not atom.singular:
        return atom, []
    if isinstance(atom, Sum):
        smooth, sing = [], []
        for p in atom.parts:
            s, comps = split_cantor(p)
            if p.singular and s is None and not comps:
                return None, []
            if s is not None:
                smooth.append(s)
            sing.extend(comps)
        return (Sum(smooth) if smooth else None), sing
    if isinstance(atom, Product):
        cantors = [p for p in atom.parts if p.singular]
        others = [p for p in atom.parts if not p.singular]
        if len(cantors) == 1 and isinstance(cantors[0], Cantor):
            cs = Product(others).poly_coeffs() if others else [1.0]
            if cs is not None and len(cs) == 1:
                return None, [(cantors[0], cs[0])]
    # nonlinear use of a singular atom: caller raises NotBVError
    return None, []
