"""Distributional transforms: evaluable function part + symbolic terms.

Functions with limits at infinity or polynomial growth have transforms
only in a generalized sense: the transform of the decaying residual plus
delta-derivative terms and finite-part power terms. The symbolic terms
are bookkeeping records (no test-function pairing); the function part is
evaluable away from s = 0 and the power terms can optionally be folded in
as classical functions there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import model, oscillatory
from .errors import ClassificationError, HypothesisError, ZeroFrequencyError

_SUP = {0: "", 1: "¹", 2: "²", 3: "³"}


def _sup(k):
    if k in _SUP:
        return _SUP[k]
    digits = {"0": "⁰", "1": "¹", "2": "²", "3": "³",
              "4": "⁴", "5": "⁵", "6": "⁶", "7": "⁷",
              "8": "⁸", "9": "⁹"}
    return "".join(digits[d] for d in str(k))


@dataclass(frozen=True)
class DistributionalFT:
    """Transform as function part + delta terms + finite-part power terms.

    delta_terms: ((k, c), ...) meaning c * delta^(k)(s).
    power_terms: ((k, c), ...) meaning c / (i s)^(k+1).
    """

    function_part: object = None          # callable s -> complex, or None
    delta_terms: tuple = ()
    power_terms: tuple = ()
    label: str = "g^"
    residual: object = None               # the subtracted PiecewiseFunction

    def __post_init__(self):
        for terms in (self.delta_terms, self.power_terms):
            orders = [k for k, _ in terms]
            if orders != sorted(orders) or len(orders) != len(set(orders)):
                raise ValueError("terms must be sorted with one entry per order")


def transform_heaviside_monomial(n):
    """Transform of t^n restricted to the right half line (point value 1/2 at 0)."""
    if not (0 <= n <= 20):
        raise HypothesisError("monomial order must be in [0, 20]")
    delta = ((n, math.pi * (1j ** n)),)
    power = ((n, complex(math.factorial(n))),)
    return DistributionalFT(None, delta, power, label="")


def _tail_coeffs(tb):
    if tb.kind == "limit":
        return (tb.limit,)
    if tb.kind == "poly":
        return tb.coeffs
    if tb.kind in ("L1", "zero"):
        return ()
    raise ClassificationError(f"tail kind {tb.kind!r} has no distributional transform")


def build(f, function_part=None, tol=1e-9):
    """Assemble the distributional transform of a tailed function.

    The residual after subtracting H(x)p+(x) + H(-x)p-(x) supplies the
    function part (numeric transform unless one is passed in); the tail
    coefficients a_{+k}, a_{-k} feed the delta and power terms, the left
    tail entering through the reflection parity of delta derivatives.
    """
    g, record = model.subtract_asymptote(f)
    pos = list(record.pos_coeffs)
    neg = list(record.neg_coeffs)
    n = max(len(pos), len(neg))
    pos += [0.0] * (n - len(pos))
    neg += [0.0] * (n - len(neg))
    delta = []
    power = []
    for k in range(n):
        dc = math.pi * (1j ** k) * (pos[k] + neg[k])
        pc = math.factorial(k) * (pos[k] - neg[k])
        if dc != 0:
            delta.append((k, dc))
        if pc != 0:
            power.append((k, complex(pc)))
    if function_part is None:
        if record.is_empty():
            function_part = lambda s: oscillatory.transform(f, s, tol=tol).value
        else:
            function_part = lambda s: oscillatory.transform(g, s, tol=tol).value
    return DistributionalFT(function_part, tuple(delta), tuple(power),
                            label="g^", residual=g)


def eval_function_part(D, s, folded=False):
    """Function part at s != 0; folded=True adds the power terms classically."""
    s = float(s)
    if s == 0.0:
        raise ZeroFrequencyError("function part is only evaluable at s != 0")
    val = complex(D.function_part(s)) if D.function_part is not None else 0.0 + 0.0j
    if folded:
        for k, c in D.power_terms:
            val += c / (1j * s) ** (k + 1)
    return val


def _fmt_real(r):
    q = r / math.pi
    if q != 0 and abs(q - round(q)) < 1e-12 * max(1.0, abs(q)):
        n = round(q)
        if n == 1:
            return "π"
        if n == -1:
            return "-π"
        return f"{n}π"
    if abs(r - round(r)) < 1e-12 * max(1.0, abs(r)) and abs(r) < 1e15:
        return str(round(r))
    return f"({r:.10g})"


def _fmt_coeff(c):
    c = complex(c)
    if c.imag == 0.0:
        return _fmt_real(c.real)
    if c.real == 0.0:
        base = _fmt_real(c.imag)
        if base == "1":
            return "i"
        if base == "-1":
            return "-i"
        return f"{base}·i"
    return f"({c.real:.10g}{c.imag:+.10g}i)"


def render(D):
    """Canonical text form with deterministic term ordering."""
    parts = []
    if D.function_part is not None:
        parts.append(f"{D.label}(s)")
    for k, c in D.delta_terms:
        sym = "δ(s)" if k == 0 else f"δ⁽{_sup(k)}⁾(s)"
        coeff = _fmt_coeff(c)
        parts.append(sym if coeff == "1" else f"{coeff}·{sym}")
    for k, c in D.power_terms:
        denom = "(i s)" if k == 0 else f"(i s){_sup(k + 1)}"
        coeff = _fmt_coeff(c)
        parts.append(f"1/{denom}" if coeff == "1" else f"{coeff}/{denom}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


def to_json_dict(D):
    """Stable JSON form: {function_part_ref, delta_terms, power_terms}."""
    return {
        "function_part_ref": D.label if D.function_part is not None else None,
        "delta_terms": [[k, [c.real, c.imag]] for k, c in
                        ((k, complex(c)) for k, c in D.delta_terms)],
        "power_terms": [[k, [c.real, c.imag]] for k, c in
                        ((k, complex(c)) for k, c in D.power_terms)],
    }
