"""Closed interval arithmetic over IEEE-754 doubles with outward rounding.

Endpoints are extended reals (float64, +-inf allowed, NaN forbidden) and every
operation satisfies the containment property: the exact real result of the
operation, for any operands inside the input intervals, lies inside the output
interval.

Outward rounding is realized in software.  Where an error-free transformation
can prove an endpoint operation exact (2Sum for addition, the Veltkamp/Dekker
two-product for multiplication, an exact back-multiplication check for
division) the computed endpoint is kept; otherwise it is widened one ulp with
nextafter.  This keeps identities such as ``[0,0] + [a,b] == [a,b]`` and
``mul([-1,2],[3,4]) == [-4,8]`` bit-exact while never losing containment.

Endpoints may be numpy arrays, in which case an ``Interval`` is a vector of
intervals and all operations act elementwise.  That is what makes the
quadrature engine fast; scalar use works identically.

All values are immutable by convention and all operations are pure, so
intervals can be shared freely between threads.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Interval",
    "Box2",
    "add",
    "sub",
    "neg",
    "mul",
    "sqr",
    "div_extended",
    "hull",
    "intersect",
    "width",
    "contains",
    "is_bounded",
    "low",
    "high",
    "mid_interval",
    "parse_decimal",
    "format_decimal",
    "format_hex",
    "interval_to_json",
    "interval_from_json",
]

_INF = np.inf
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
_BIG = 2.0**510       # factor magnitude beyond which the two-product may overflow
_TINY = 2.0**-967     # product magnitude below which the error term may be inexact


def _as_endpoint(x):
    a = np.asarray(x, dtype=np.float64)
    return a[()] if a.ndim == 0 else a


# ---------------------------------------------------------------------------
# directed endpoint primitives (scalar or elementwise on arrays)
# ---------------------------------------------------------------------------

def _down(x):
    # nextafter(+inf, -inf) is the largest finite double: a finite result that
    # overflowed to +inf still gets a valid (finite) lower bound.
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _add_lo(a, b):
    with np.errstate(all="ignore"):
        s = a + b
        t = s - a
        err = (a - (s - t)) + (b - t)  # exact error of the addition (2Sum)
        # err >= 0: s does not exceed the true sum, keep it.  err < 0 or NaN
        # (infinite operands / overflow): step down one ulp.
        return np.where(err >= 0, s, _down(s))


def _add_hi(a, b):
    with np.errstate(all="ignore"):
        s = a + b
        t = s - a
        err = (a - (s - t)) + (b - t)
        return np.where(err <= 0, s, _up(s))


def _prod_err(a, b, p):
    # Dekker two-product; only trustworthy inside the _BIG/_TINY guard range.
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _mul_lo(a, b):
    """Directed-down product of endpoint values with the 0*(+-inf) = 0 convention."""
    with np.errstate(all="ignore"):
        p = a * b
        zero = (a == 0) | (b == 0)
        p = np.where(zero, 0.0, p)
        valid = (np.abs(a) < _BIG) & (np.abs(b) < _BIG) & (np.abs(p) > _TINY)
        err = _prod_err(a, b, p)
        exact_ok = zero | (valid & (err >= 0))
        return np.where(exact_ok, p, _down(p))


def _mul_hi(a, b):
    with np.errstate(all="ignore"):
        p = a * b
        zero = (a == 0) | (b == 0)
        p = np.where(zero, 0.0, p)
        valid = (np.abs(a) < _BIG) & (np.abs(b) < _BIG) & (np.abs(p) > _TINY)
        err = _prod_err(a, b, p)
        exact_ok = zero | (valid & (err <= 0))
        return np.where(exact_ok, p, _up(p))


def _div_lo(a, b):
    """Directed-down quotient; b must not be 0 (callers handle zero divisors)."""
    with np.errstate(all="ignore"):
        q = a / b
        zero = (a == 0) & (b != 0)
        q = np.where(zero, 0.0, q)
        # q is exact iff q*b reproduces a exactly (checked with the two-product)
        p = q * b
        valid = (np.abs(q) < _BIG) & (np.abs(b) < _BIG) & (np.abs(p) > _TINY)
        err = _prod_err(q, b, p)
        exact_ok = zero | (valid & (p == a) & (err == 0))
        return np.where(exact_ok, q, _down(q))


def _div_hi(a, b):
    with np.errstate(all="ignore"):
        q = a / b
        zero = (a == 0) & (b != 0)
        q = np.where(zero, 0.0, q)
        p = q * b
        valid = (np.abs(q) < _BIG) & (np.abs(b) < _BIG) & (np.abs(p) > _TINY)
        err = _prod_err(q, b, p)
        exact_ok = zero | (valid & (p == a) & (err == 0))
        return np.where(exact_ok, q, _up(q))


# ---------------------------------------------------------------------------
# the interval type
# ---------------------------------------------------------------------------

class Interval:
    """A closed interval [lo, hi] with outward-rounded float64 endpoints.

    Endpoints may be scalars or equally-shaped numpy arrays (a vector of
    intervals).  NaN endpoints and the degenerate [-inf,-inf] / [+inf,+inf]
    are rejected; lo <= hi always.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = _as_endpoint(lo)
        hi = _as_endpoint(hi)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("interval endpoints must not be NaN")
        if np.any(lo > hi):
            raise ValueError(f"lower endpoint exceeds upper: [{lo}, {hi}]")
        if np.any((lo == _INF) | (hi == -_INF)):
            raise ValueError("empty interval at infinity is not a value")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo, hi):
        # internal fast path: endpoints already validated by construction
        if isinstance(lo, np.ndarray) and lo.ndim == 0:
            lo = lo[()]
        if isinstance(hi, np.ndarray) and hi.ndim == 0:
            hi = hi[()]
        iv = object.__new__(cls)
        iv.lo = lo
        iv.hi = hi
        return iv

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    # -- queries ------------------------------------------------------------

    @property
    def shape(self):
        return np.shape(self.lo)

    def is_point(self):
        return self.lo == self.hi

    def __repr__(self):
        if np.ndim(self.lo) == 0:
            return f"Interval({self.lo!r}, {self.hi!r})"
        return f"Interval(<{np.shape(self.lo)} cells>)"

    def __str__(self):
        if np.ndim(self.lo) == 0:
            return format_decimal(self)
        return repr(self)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return bool(np.all(self.lo == other.lo) and np.all(self.hi == other.hi))

    def __hash__(self):
        if np.ndim(self.lo) != 0:
            raise TypeError("array intervals are unhashable")
        return hash((float(self.lo), float(self.hi)))

    def __getitem__(self, idx):
        return Interval._raw(self.lo[idx], self.hi[idx])

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return Interval._raw(_add_lo(self.lo, other.lo), _add_hi(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval._raw(-self.hi, -self.lo)

    def __sub__(self, other):
        other = _coerce(other)
        return Interval._raw(_add_lo(self.lo, -other.hi), _add_hi(self.hi, -other.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lo = np.minimum(
            np.minimum(_mul_lo(a, c), _mul_lo(a, d)),
            np.minimum(_mul_lo(b, c), _mul_lo(b, d)),
        )
        hi = np.maximum(
            np.maximum(_mul_hi(a, c), _mul_hi(a, d)),
            np.maximum(_mul_hi(b, c), _mul_hi(b, d)),
        )
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div_extended(self, _coerce(other))

    def __rtruediv__(self, other):
        return div_extended(_coerce(other), self)

    def __abs__(self):
        neg_mask = self.hi < 0
        lo_mag = np.where(
            (self.lo <= 0) & (self.hi >= 0),
            0.0,
            np.where(neg_mask, -self.hi, self.lo),
        )
        hi_mag = np.maximum(-self.lo, self.hi)
        return Interval._raw(lo_mag + 0.0, hi_mag)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        v = _as_endpoint(float(x))
        return Interval._raw(v, v)
    raise TypeError(f"cannot use {type(x).__name__} as an interval")


# ---------------------------------------------------------------------------
# spec-named operations
# ---------------------------------------------------------------------------

def add(a: Interval, b: Interval) -> Interval:
    return a + b


def sub(a: Interval, b: Interval) -> Interval:
    return a - b


def neg(a: Interval) -> Interval:
    return -a


def mul(a: Interval, b: Interval) -> Interval:
    return a * b


def sqr(a: Interval) -> Interval:
    """Tight square: contained in [0, +inf) and in mul(a, a)."""
    m = abs(a)
    return Interval._raw(_mul_lo(m.lo, m.lo), _mul_hi(m.hi, m.hi))


def div_extended(a: Interval, b: Interval) -> Interval:
    """Extended division; a divisor containing 0 yields an unbounded interval."""
    a = _coerce(a)
    b = _coerce(b)
    shape = np.broadcast_shapes(np.shape(a.lo), np.shape(b.lo))
    al, ah = np.broadcast_to(a.lo, shape), np.broadcast_to(a.hi, shape)
    bl, bh = np.broadcast_to(b.lo, shape), np.broadcast_to(b.hi, shape)
    if shape == ():
        al, ah, bl, bh = (np.float64(v) for v in (al, ah, bl, bh))

    # strictly-positive divisor branch (results for other branches overwritten below)
    bl_pos = np.where(bl > 0, bl, 1.0)
    bh_pos = np.where(bl > 0, bh, 1.0)
    lo_p = np.where(al >= 0, _div_lo(al, bh_pos), _div_lo(al, bl_pos))
    hi_p = np.where(ah >= 0, _div_hi(ah, bl_pos), _div_hi(ah, bh_pos))

    # strictly-negative divisor: a/b = -(a/(-b)), with -b = [bl_neg, bh_neg] > 0
    bl_neg = np.where(bh < 0, -bh, 1.0)
    bh_neg = np.where(bh < 0, -bl, 1.0)
    lo_n = -np.where(ah >= 0, _div_hi(ah, bl_neg), _div_hi(ah, bh_neg))
    hi_n = -np.where(al >= 0, _div_lo(al, bh_neg), _div_lo(al, bl_neg))

    lo = np.where(bl > 0, lo_p, np.where(bh < 0, lo_n, -_INF))
    hi = np.where(bl > 0, hi_p, np.where(bh < 0, hi_n, _INF))

    # divisor touching zero on one side only: one finite bound survives
    touch_hi = (bl == 0) & (bh > 0)   # b in [0, bh]
    touch_lo = (bh == 0) & (bl < 0)   # b in [bl, 0]
    bh_t = np.where(touch_hi, bh, 1.0)
    bl_t = np.where(touch_lo, bl, 1.0)
    lo = np.where(touch_hi & (al >= 0), _div_lo(al, bh_t), lo)
    hi = np.where(touch_hi & (ah <= 0), _div_hi(ah, bh_t), hi)
    hi = np.where(touch_lo & (al >= 0), _div_hi(al, bl_t), hi)
    lo = np.where(touch_lo & (ah <= 0), _div_lo(ah, bl_t), lo)
    return Interval._raw(lo + 0.0, hi + 0.0)


def hull(a: Interval, b: Interval) -> Interval:
    return Interval._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))


def intersect(a: Interval, b: Interval):
    """Intersection, or None when the intervals are disjoint (no empty value)."""
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    if np.any(lo > hi):
        return None
    return Interval._raw(lo, hi)


def width(a: Interval):
    """hi - lo rounded up (an over-approximation of the true width)."""
    return _add_hi(a.hi, -a.lo)


def contains(a: Interval, x) -> bool:
    x = np.asarray(x, dtype=np.float64)
    r = (a.lo <= x) & (x <= a.hi)
    return bool(r) if np.ndim(r) == 0 else r


def is_bounded(a: Interval):
    r = np.isfinite(a.lo) & np.isfinite(a.hi)
    return bool(r) if np.ndim(r) == 0 else r


def low(a: Interval):
    return a.lo


def high(a: Interval):
    return a.hi


def mid_interval(a: Interval) -> Interval:
    """Thin interval guaranteed to contain the exact midpoint (lo+hi)/2."""
    if not np.all(is_bounded(a)):
        raise ValueError("midpoint of an unbounded interval")
    s_lo = _add_lo(a.lo, a.hi)
    s_hi = _add_hi(a.lo, a.hi)
    return Interval._raw(_div_lo(s_lo, 2.0), _div_hi(s_hi, 2.0))


def parse_decimal(s: str) -> Interval:
    """Smallest machine interval containing the exact value of a decimal literal."""
    try:
        exact = decimal.Decimal(s)
    except decimal.InvalidOperation as e:
        raise ValueError(f"malformed decimal literal: {s!r}") from e
    if not exact.is_finite():
        raise ValueError(f"malformed decimal literal: {s!r}")
    f = float(exact)
    rounded = decimal.Decimal(f)
    if rounded == exact:
        return Interval(f, f)
    if rounded < exact:
        return Interval(f, np.nextafter(f, _INF))
    return Interval(np.nextafter(f, -_INF), f)


@dataclass(frozen=True)
class Box2:
    """A 2-D box: the product of an x-interval and a y-interval."""

    x: Interval
    y: Interval


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _decimal_str(x: float, digits: int, rounding: str) -> str:
    if x == _INF:
        return "inf"
    if x == -_INF:
        return "-inf"
    ctx = decimal.Context(prec=digits, rounding=rounding)
    return str(ctx.create_decimal(decimal.Decimal(float(x))))


def format_decimal(iv: Interval, digits: int = 17) -> str:
    """`[lo, hi]` with lo rounded toward -inf and hi toward +inf at `digits`."""
    lo = _decimal_str(float(iv.lo), digits, decimal.ROUND_FLOOR)
    hi = _decimal_str(float(iv.hi), digits, decimal.ROUND_CEILING)
    return f"[{lo}, {hi}]"


def _hex_str(x: float) -> str:
    if x == _INF:
        return "inf"
    if x == -_INF:
        return "-inf"
    return float(x).hex()


def format_hex(iv: Interval) -> str:
    return f"[{_hex_str(float(iv.lo))}, {_hex_str(float(iv.hi))}]"


def interval_to_json(iv: Interval, digits: int = 17) -> dict:
    """Dual decimal/hex-float form; the hex pair is the bit-exact audit record."""
    return {
        "dec": format_decimal(iv, digits),
        "hex": [_hex_str(float(iv.lo)), _hex_str(float(iv.hi))],
    }


def _from_hex(s: str) -> float:
    if s == "inf":
        return _INF
    if s == "-inf":
        return -_INF
    return float.fromhex(s)


def interval_from_json(obj: dict) -> Interval:
    lo, hi = obj["hex"]
    return Interval(_from_hex(lo), _from_hex(hi))
