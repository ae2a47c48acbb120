"""Spherical Bessel j1 and derivatives for complex argument, overflow-safe.

j1(t) = sin t / t^2 - cos t / t.  The closed form cancels catastrophically
for small |t| and overflows doubles for large |Im t|; a Maclaurin branch
covers |t| < 0.5 and the trig factors are evaluated in log-scaled form
otherwise.
"""

from __future__ import annotations

import math

from .scaled import ScaledComplex, sc_cos, sc_sin

_SERIES_SPLIT = 0.5

# j1(t) = sum_{m>=1} (-1)^{m+1} 2m/(2m+1)! t^{2m-1}; ten terms reach ~1e-22
# relative at |t| = 0.5.
_J1_COEFFS = []
for _m in range(1, 11):
    _J1_COEFFS.append((-1.0) ** (_m + 1) * 2.0 * _m / math.factorial(2 * _m + 1))


def j1_small_complex(t: complex):
    """(j1, j1') by Maclaurin series, plain complex; intended for |t| < ~1."""
    t = complex(t)
    t2 = t * t
    j1 = 0j
    j1p = 0j
    tp = t  # t^{2m-1}
    for m, a in enumerate(_J1_COEFFS, start=1):
        j1 += a * tp
        j1p += a * (2 * m - 1) * (tp / t if t != 0 else (1.0 if m == 1 else 0j))
        tp *= t2
    if t == 0:
        return 0j, complex(_J1_COEFFS[0])
    return j1, j1p


def _j1_small_second(t: complex) -> complex:
    t = complex(t)
    if t == 0:
        return 0j
    t2 = t * t
    out = 0j
    tp = t  # t^{2m-1}; second derivative term is (2m-1)(2m-2) t^{2m-3}
    for m, a in enumerate(_J1_COEFFS, start=1):
        if m >= 2:
            out += a * (2 * m - 1) * (2 * m - 2) * tp / t2
        tp *= t2
    return out


def bessel_j1(t: complex):
    """(j1(t), j1'(t)) as ScaledComplex, stable on the whole plane."""
    t = complex(t)
    if abs(t) < _SERIES_SPLIT:
        j1, j1p = j1_small_complex(t)
        return ScaledComplex.from_complex(j1), ScaledComplex.from_complex(j1p)
    s = sc_sin(t)
    c = sc_cos(t)
    t2 = t * t
    j1 = s * (1.0 / t2) - c * (1.0 / t)
    j1p = s * (1.0 / t - 2.0 / (t2 * t)) + c * (2.0 / t2)
    return j1, j1p


def bessel_j1_second(t: complex) -> ScaledComplex:
    """j1''(t) from the Bessel recurrence j1'' = -(2/t) j1' - (1 - 2/t^2) j1."""
    t = complex(t)
    if abs(t) < _SERIES_SPLIT:
        return ScaledComplex.from_complex(_j1_small_second(t))
    j1, j1p = bessel_j1(t)
    return j1p * (-2.0 / t) - j1 * (1.0 - 2.0 / (t * t))
