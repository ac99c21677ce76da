"""Validated enclosures of the elementary functions and of t^2 log|t|.

The elementary enclosures wrap the platform libm (through numpy's float64
ufuncs) and widen each endpoint by ``_LIBM_ULPS`` nextafter steps.  glibc's
documented maximum errors for double sin/cos/exp/log are 1-2 ulp, so a 3-ulp
margin is strictly conservative; the containment fuzz suite checks the margin
against mpmath at 1e5 random points per function.  Exact anchor points
(sin 0 = 0, cos 0 = 1, exp 0 = 1, log 1 = 0) are returned exactly.

The special function f(t) = t^2 log|t| (continuously extended by f(0) = 0) gets
a tight piecewise-monotone extension: f is even, decreasing on [0, e^-1/2] and
increasing afterwards, with global minimum -1/(2e).  The naive composition
sqr(t) * log|t| returns unbounded intervals whenever 0 is inside the input;
the tight extension stays bounded on bounded inputs.  Its derivatives
f' = t(1 + 2 log|t|) (odd, removable singularity, tight extension as well),
f'' = 3 + 2 log|t|, f''' = 2/t and f'''' = -2/t^2 are singular at 0 and return
unbounded intervals there, never errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .interval import (
    Interval,
    _mul_lo,
    _mul_hi,
    add,
    div_extended,
    mul,
    neg,
    sqr,
)

__all__ = [
    "ipi",
    "isin",
    "icos",
    "iexp",
    "ilog",
    "x2logx",
    "f_prime",
    "f_second",
    "f_third",
    "f_fourth",
    "FminConstants",
    "fmin_constants",
]

_INF = np.inf
_LIBM_ULPS = 3  # outward widening applied to libm results


def _widen_down(x, steps=_LIBM_ULPS):
    for _ in range(steps):
        x = np.nextafter(x, -_INF)
    return x


def _widen_up(x, steps=_LIBM_ULPS):
    for _ in range(steps):
        x = np.nextafter(x, _INF)
    return x


_PI_LO = math.pi                      # round-nearest double of pi, known < pi
_PI_HI = math.nextafter(math.pi, 2)  # pi lies strictly between the two
_TWO_PI_LO = 2.0 * _PI_LO


def ipi() -> Interval:
    """1-ulp-wide interval containing pi."""
    return Interval(_PI_LO, _PI_HI)


# ---------------------------------------------------------------------------
# trigonometric enclosures
# ---------------------------------------------------------------------------

def _contains_pi_mult(lo, hi, frac):
    """Conservatively true where some pi*(2k + frac), k integer, meets [lo, hi].

    May report spurious hits in ulp-ambiguous cases (clamping to +-1 is always
    sound) but never misses a genuine critical point.  Assumes |lo|,|hi| <= 1e12
    (larger arguments are handled by the full [-1,1] fallback).
    """
    with np.errstate(all="ignore"):
        k0 = np.floor((lo / _PI_LO - frac) / 2.0) - 1.0
        hit = np.zeros(np.shape(lo), dtype=bool)
        for j in range(4):
            m = 2.0 * (k0 + j) + frac
            c_lo = np.minimum(_mul_lo(m, _PI_LO), _mul_lo(m, _PI_HI))
            c_hi = np.maximum(_mul_hi(m, _PI_LO), _mul_hi(m, _PI_HI))
            hit = hit | ((c_hi >= lo) & (c_lo <= hi))
    return hit


def _trig_enclose(a, fn, anchor, max_frac, min_frac):
    lo, hi = a.lo, a.hi
    with np.errstate(all="ignore"):
        full = (
            ~(np.isfinite(lo) & np.isfinite(hi))
            | (hi - lo >= _TWO_PI_LO)
            | (np.abs(lo) > 1e12)
            | (np.abs(hi) > 1e12)
        )
        flo = np.where(lo == 0, anchor, _widen_down(fn(lo)))
        fhi_at_lo = np.where(lo == 0, anchor, _widen_up(fn(lo)))
        flo_at_hi = np.where(hi == 0, anchor, _widen_down(fn(hi)))
        fhi = np.where(hi == 0, anchor, _widen_up(fn(hi)))
        r_lo = np.maximum(np.minimum(flo, flo_at_hi), -1.0)
        r_hi = np.minimum(np.maximum(fhi_at_lo, fhi), 1.0)
        safe_lo = np.where(full, 0.0, lo)
        safe_hi = np.where(full, 0.0, hi)
        r_lo = np.where(_contains_pi_mult(safe_lo, safe_hi, min_frac), -1.0, r_lo)
        r_hi = np.where(_contains_pi_mult(safe_lo, safe_hi, max_frac), 1.0, r_hi)
        r_lo = np.where(full, -1.0, r_lo)
        r_hi = np.where(full, 1.0, r_hi)
    return Interval._raw(r_lo, r_hi)


def isin(a: Interval) -> Interval:
    """Enclosure of sin over `a`; [-1,1] for unbounded or over-wide inputs."""
    return _trig_enclose(a, np.sin, 0.0, 0.5, 1.5)


def icos(a: Interval) -> Interval:
    return _trig_enclose(a, np.cos, 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# exp / log
# ---------------------------------------------------------------------------

def iexp(a: Interval) -> Interval:
    with np.errstate(all="ignore"):
        r_lo = np.where(a.lo == 0, 1.0, np.maximum(_widen_down(np.exp(a.lo)), 0.0))
        r_hi = np.where(a.hi == 0, 1.0, _widen_up(np.exp(a.hi)))
    return Interval._raw(r_lo, r_hi)


def ilog(a: Interval) -> Interval:
    """Enclosure of log on a (intersected with) [0, +inf); lo = -inf when 0 in a.

    Raises ValueError iff high(a) <= 0 (the input contains no point of the
    domain's closure interior).
    """
    if np.any(a.hi <= 0):
        raise ValueError("ilog requires an interval with positive upper endpoint")
    with np.errstate(all="ignore"):
        lo_cl = np.maximum(a.lo, 0.0)
        r_lo = np.where(
            lo_cl == 0, -_INF, np.where(lo_cl == 1, 0.0, _widen_down(np.log(lo_cl)))
        )
        r_hi = np.where(a.hi == 1, 0.0, _widen_up(np.log(a.hi)))
    return Interval._raw(r_lo, r_hi)


# ---------------------------------------------------------------------------
# t^2 log|t| and derivatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FminConstants:
    """Enclosures of the argmin e^-1/2 of t^2 log t on [0,inf) and of its value."""

    m: Interval
    vmin: Interval


@lru_cache(maxsize=1)
def fmin_constants() -> FminConstants:
    half = Interval(-0.5, -0.5)
    m = iexp(half)
    vmin = mul(sqr(m), ilog(m))  # contains -1/(2e)
    return FminConstants(m=m, vmin=vmin)


@lru_cache(maxsize=1)
def _fprime_constants() -> FminConstants:
    # argmin of t(1 + 2 log t) is e^-3/2, minimum value -2 e^-3/2
    m = iexp(Interval(-1.5, -1.5))
    vmin = neg(mul(Interval(2.0, 2.0), m))
    return FminConstants(m=m, vmin=vmin)


def _f_point(t):
    """Directed enclosure of t^2 log t at machine points t >= 0 (f(0) = 0)."""
    safe = np.where((t == 0) | ~np.isfinite(t), 1.0, t)
    tt = Interval._raw(safe, safe)
    v = mul(sqr(tt), ilog(tt))
    v_lo = np.where(t == 0, 0.0, np.where(np.isfinite(t), v.lo, _INF))
    v_hi = np.where(t == 0, 0.0, np.where(np.isfinite(t), v.hi, _INF))
    return v_lo, v_hi


def x2logx(a: Interval) -> Interval:
    """Tight extension of f(t) = t^2 log|t|, f(0) = 0.

    Bounded for every bounded input; contains 0 whenever 0 is in `a`; follows
    the monotonicity split at the argmin enclosure and never dips below the
    global-minimum enclosure.
    """
    u = abs(a)
    fm = fmin_constants()
    p_lo_at_hi, p_hi_at_hi = _f_point(u.hi)
    p_lo_at_lo, p_hi_at_lo = _f_point(u.lo)
    decreasing = u.hi <= fm.m.lo
    increasing = u.lo >= fm.m.hi
    r_lo = np.where(
        decreasing, p_lo_at_hi, np.where(increasing, p_lo_at_lo, fm.vmin.lo)
    )
    r_lo = np.maximum(r_lo, fm.vmin.lo)  # f >= -1/(2e) globally
    r_hi = np.maximum(p_hi_at_lo, p_hi_at_hi)
    point_zero = u.hi == 0
    r_lo = np.where(point_zero, 0.0, r_lo)
    r_hi = np.where(point_zero, 0.0, r_hi)
    return Interval._raw(r_lo, r_hi)


def _fp_point(t):
    """Directed enclosure of t(1 + 2 log t) at machine points t >= 0."""
    safe = np.where((t == 0) | ~np.isfinite(t), 1.0, t)
    tt = Interval._raw(safe, safe)
    v = mul(tt, add(Interval(1.0, 1.0), mul(Interval(2.0, 2.0), ilog(tt))))
    v_lo = np.where(t == 0, 0.0, np.where(np.isfinite(t), v.lo, _INF))
    v_hi = np.where(t == 0, 0.0, np.where(np.isfinite(t), v.hi, _INF))
    return v_lo, v_hi


def _fp_branch(lo_u, hi_u):
    # tight enclosure of f' on a subinterval of [0, inf)
    fp = _fprime_constants()
    p_lo_at_hi, p_hi_at_hi = _fp_point(hi_u)
    p_lo_at_lo, p_hi_at_lo = _fp_point(lo_u)
    decreasing = hi_u <= fp.m.lo
    increasing = lo_u >= fp.m.hi
    b_lo = np.where(
        decreasing, p_lo_at_hi, np.where(increasing, p_lo_at_lo, fp.vmin.lo)
    )
    b_lo = np.maximum(b_lo, fp.vmin.lo)
    b_hi = np.maximum(p_hi_at_lo, p_hi_at_hi)
    return b_lo, b_hi


def f_prime(a: Interval) -> Interval:
    """Tight extension of f'(t) = t(1 + 2 log|t|) (odd, f'(0) = 0)."""
    pos_lo = np.maximum(a.lo, 0.0)
    pos_hi = np.maximum(a.hi, 0.0)
    neg_mag_lo = np.maximum(-a.hi, 0.0)
    neg_mag_hi = np.maximum(-a.lo, 0.0)
    p_lo, p_hi = _fp_branch(pos_lo, pos_hi)
    n_lo, n_hi = _fp_branch(neg_mag_lo, neg_mag_hi)
    has_pos = a.hi >= 0
    has_neg = a.lo <= 0
    r_lo = np.minimum(
        np.where(has_pos, p_lo, _INF), np.where(has_neg, -n_hi, _INF)
    )
    r_hi = np.maximum(
        np.where(has_pos, p_hi, -_INF), np.where(has_neg, -n_lo, -_INF)
    )
    return Interval._raw(r_lo, r_hi)


def f_second(a: Interval) -> Interval:
    """f''(t) = 3 + 2 log|t|; unbounded (never an error) when 0 is in `a`."""
    u = abs(a)
    degenerate = u.hi == 0  # input is exactly {0}: fully unbounded fallback
    safe_hi = np.where(degenerate, 1.0, u.hi)
    val = add(
        Interval(3.0, 3.0),
        mul(Interval(2.0, 2.0), ilog(Interval._raw(u.lo, safe_hi))),
    )
    r_lo = np.where(degenerate, -_INF, val.lo)
    r_hi = np.where(degenerate, _INF, val.hi)
    return Interval._raw(r_lo, r_hi)


def f_third(a: Interval) -> Interval:
    """f'''(t) = 2/t via extended division (unbounded across 0)."""
    return div_extended(Interval(2.0, 2.0), a)


def f_fourth(a: Interval) -> Interval:
    """f''''(t) = -2/t^2 via extended division (unbounded across 0)."""
    return neg(div_extended(Interval(2.0, 2.0), sqr(a)))
