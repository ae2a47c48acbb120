"""Log-scaled complex arithmetic.

Determinant values grow like exp((1+B)|Im k|) and overflow doubles long
before the zero structure is exhausted.  ``ScaledComplex`` stores a complex
mantissa with |mantissa| in [1, 2) together with an exact integer power of
two, so rescaling, negation and conjugation are exact and round-trips through
plain complex lose at most one ulp.  The natural-log exponent required by the
rest of the code is exposed as ``logscale``.
"""

from __future__ import annotations

import cmath
import math

_LN2 = math.log(2.0)
# Cody-Waite split of ln 2; keeps exp(residual) accurate for huge |Im t|.
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10


def _ldc(z: complex, e: int) -> complex:
    """Exact scaling of a complex number by 2**e."""
    if e < -2000:
        return 0j
    if e > 2000:
        raise OverflowError("mantissa rescale exponent too large")
    return complex(math.ldexp(z.real, e), math.ldexp(z.imag, e))


class ScaledComplex:
    """value = mantissa * 2**exp2, with |mantissa| in [1, 2) or exactly 0."""

    __slots__ = ("mantissa", "exp2")

    def __init__(self, mantissa: complex, exp2: int = 0):
        mantissa = complex(mantissa)
        a = abs(mantissa)
        if a == 0.0:
            self.mantissa = 0j
            self.exp2 = 0
            return
        if not (math.isfinite(mantissa.real) and math.isfinite(mantissa.imag)):
            raise ValueError("non-finite mantissa")
        _, e = math.frexp(a)  # a = f * 2**e, f in [0.5, 1)
        shift = e - 1
        self.mantissa = _ldc(mantissa, -shift)
        self.exp2 = exp2 + shift

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "ScaledComplex":
        return cls(0j, 0)

    @classmethod
    def from_complex(cls, z: complex) -> "ScaledComplex":
        return cls(complex(z), 0)

    @classmethod
    def from_mantissa_exp2(cls, mantissa: complex, exp2: int) -> "ScaledComplex":
        return cls(mantissa, exp2)

    # -- views --------------------------------------------------------------

    @property
    def logscale(self) -> float:
        """Natural-log exponent of the stored scale factor."""
        return self.exp2 * _LN2

    @property
    def logabs(self) -> float:
        """ln |value|; -inf for exact zero."""
        if self.mantissa == 0:
            return -math.inf
        return self.exp2 * _LN2 + math.log(abs(self.mantissa))

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def to_complex(self) -> complex:
        """Plain complex value; overflows to inf outside double range."""
        if self.mantissa == 0:
            return 0j
        if self.exp2 > 1100:
            m = self.mantissa / abs(self.mantissa)
            return complex(math.inf * m.real if m.real else 0.0,
                           math.inf * m.imag if m.imag else 0.0)
        if self.exp2 < -1100:
            return 0j
        return _ldc(self.mantissa, self.exp2)

    def phase(self) -> float:
        return cmath.phase(self.mantissa)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.exp2)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, ScaledComplex):
            return other
        if isinstance(other, (int, float, complex)):
            return ScaledComplex(complex(other), 0)
        return NotImplemented

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.mantissa == 0 or o.mantissa == 0:
            return ScaledComplex.zero()
        return ScaledComplex(self.mantissa * o.mantissa, self.exp2 + o.exp2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.mantissa == 0:
            raise ZeroDivisionError("ScaledComplex division by zero")
        if self.mantissa == 0:
            return ScaledComplex.zero()
        return ScaledComplex(self.mantissa / o.mantissa, self.exp2 - o.exp2)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        out = ScaledComplex.__new__(ScaledComplex)
        out.mantissa = -self.mantissa
        out.exp2 = self.exp2
        return out

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.mantissa == 0:
            return o
        if o.mantissa == 0:
            return self
        # Rescale the smaller value onto the larger exponent before adding.
        if self.exp2 >= o.exp2:
            big, small = self, o
        else:
            big, small = o, self
        m = big.mantissa + _ldc(small.mantissa, small.exp2 - big.exp2)
        if m == 0:
            return ScaledComplex.zero()
        return ScaledComplex(m, big.exp2)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __abs__(self) -> float:
        """|value| as a float; inf when it overflows the double range."""
        if self.mantissa == 0:
            return 0.0
        if self.exp2 > 1100:
            return math.inf
        if self.exp2 < -1100:
            return 0.0
        return math.ldexp(abs(self.mantissa), self.exp2)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.mantissa == o.mantissa and self.exp2 == o.exp2

    def __hash__(self):
        return hash((self.mantissa, self.exp2))

    def __repr__(self):
        return f"ScaledComplex({self.mantissa!r}, exp2={self.exp2})"


def coerce_scaled(value) -> ScaledComplex:
    """Wrap plain complex/real values; pass ScaledComplex through."""
    if isinstance(value, ScaledComplex):
        return value
    return ScaledComplex.from_complex(value)


def rel_diff(a, b) -> float:
    """|a - b| / |b| computed in scaled space; safe at any magnitude."""
    a = coerce_scaled(a)
    b = coerce_scaled(b)
    if b.is_zero():
        return 0.0 if a.is_zero() else math.inf
    d = a - b
    if d.is_zero():
        return 0.0
    t = d.logabs - b.logabs
    return math.exp(min(t, 700.0))


def _scaled_from_exp(mantissa: complex, ln_scale: float) -> ScaledComplex:
    """mantissa * exp(ln_scale) as a ScaledComplex."""
    if mantissa == 0:
        return ScaledComplex.zero()
    n2 = int(math.floor(ln_scale / _LN2))
    resid = (ln_scale - n2 * _LN2_HI) - n2 * _LN2_LO
    return ScaledComplex(mantissa * math.exp(resid), n2)


def sc_sin(t: complex) -> ScaledComplex:
    """sin(t) for complex t, stable for arbitrarily large |Im t|."""
    t = complex(t)
    y = t.imag
    if abs(y) <= 30.0:
        return ScaledComplex.from_complex(cmath.sin(t))
    ay = abs(y)
    s = 1.0 if y > 0 else -1.0
    d = math.exp(-2.0 * ay)
    x = t.real
    # sin(x+iy) = sin x cosh y + i cos x sinh y, cosh y = e^{|y|}(1+d)/2.
    m = complex(math.sin(x) * (1.0 + d) * 0.5, s * math.cos(x) * (1.0 - d) * 0.5)
    return _scaled_from_exp(m, ay)


def sc_cos(t: complex) -> ScaledComplex:
    """cos(t) for complex t, stable for arbitrarily large |Im t|."""
    t = complex(t)
    y = t.imag
    if abs(y) <= 30.0:
        return ScaledComplex.from_complex(cmath.cos(t))
    ay = abs(y)
    s = 1.0 if y > 0 else -1.0
    d = math.exp(-2.0 * ay)
    x = t.real
    # cos(x+iy) = cos x cosh y - i sin x sinh y.
    m = complex(math.cos(x) * (1.0 + d) * 0.5, -s * math.sin(x) * (1.0 - d) * 0.5)
    return _scaled_from_exp(m, ay)
