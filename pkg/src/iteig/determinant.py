"""The entire determinant D(k) whose zeros are the transmission eigenvalues.

D(k) = (-k) y(1;k) j1'(k) + y'(1;k) j1(k) - y(1;k) j1(k)

is even, conjugate-symmetric, real on the real axis, and of exponential type
1 + B.  Near the imaginary axis it is a difference of same-order
exponentially large terms, so the three terms are combined in log-scaled
arithmetic and every relative threshold is measured against the largest
term's magnitude rather than any absolute scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bessel import bessel_j1, bessel_j1_second
from .errors import DomainError, NotAnEigenvalue
from .profiles import RefractionProfile
from .radial import ATOL_DEFAULT, RTOL_DEFAULT, solve_y
from .scaled import ScaledComplex

NULL_PAIR_THRESHOLD = 1e-6


@dataclass
class DeterminantValue:
    k: complex
    value: ScaledComplex
    logabs: float               # ln |D(k)|, -inf at an exact zero
    scale_logabs: float         # ln of the largest assembled term
    dk_value: Optional[ScaledComplex] = None

    def relative(self) -> float:
        """|D| / termscale; the meaningful smallness measure under growth."""
        if self.logabs == -math.inf:
            return 0.0
        return math.exp(min(self.logabs - self.scale_logabs, 700.0))


@dataclass
class NullPair:
    a: complex
    b: complex
    residual: float


def eval_D(profile: RefractionProfile, k: complex, want_dk: bool = False,
           rtol: float = RTOL_DEFAULT, atol: float = ATOL_DEFAULT) -> DeterminantValue:
    """Assemble D(k) from the radial boundary data and j1(k).

    k = 0 is a removable limit: y vanishes like k r^2/3 there and the
    quadratic pieces cancel, so D(0) = 0 exactly (a four-fold zero).
    """
    k = complex(k)
    if k == 0:
        zero = ScaledComplex.zero()
        return DeterminantValue(k=k, value=zero, logabs=-math.inf,
                                scale_logabs=-math.inf,
                                dk_value=zero if want_dk else None)
    sol = solve_y(profile, k, want_dk=want_dk, rtol=rtol, atol=atol)
    j1, j1p = bessel_j1(k)
    t1 = (-k) * sol.y1 * j1p
    t2 = sol.dy1 * j1
    t3 = -(sol.y1 * j1)
    value = t1 + t2 + t3
    scale = max(t1.logabs, t2.logabs, t3.logabs)
    dk_value = None
    if want_dk:
        j1pp = bessel_j1_second(k)
        dk_value = (-(sol.y1 * j1p) + (-k) * (sol.dk_y1 * j1p + sol.y1 * j1pp)
                    + sol.dk_dy1 * j1 + sol.dy1 * j1p
                    - sol.dk_y1 * j1 - sol.y1 * j1p)
    return DeterminantValue(k=k, value=value, logabs=value.logabs,
                            scale_logabs=scale, dk_value=dk_value)


def eval_scriptD(profile: RefractionProfile, k: complex, want_dk: bool = False,
                 rtol: float = RTOL_DEFAULT, atol: float = ATOL_DEFAULT) -> DeterminantValue:
    """k^4 D(k) / 3; same zero set as D away from the origin."""
    k = complex(k)
    if k == 0:
        raise DomainError("the k^4 D(k)/3 normalization is undefined at k = 0")
    base = eval_D(profile, k, want_dk=False, rtol=rtol, atol=atol)
    factor = ScaledComplex.from_complex(k)
    f4 = factor * factor * factor * factor * (1.0 / 3.0)
    value = base.value * f4
    return DeterminantValue(k=k, value=value, logabs=value.logabs,
                            scale_logabs=base.scale_logabs + f4.logabs)


def null_pair(profile: RefractionProfile, k_star: complex,
              threshold: float = NULL_PAIR_THRESHOLD,
              rtol: float = RTOL_DEFAULT) -> NullPair:
    """Unit-norm (a, b) spanning the kernel of the 2x2 matching system.

    Rows are [y(1), -j1(k)] and [d/dr(y/r)|_1, -k j1'(k)]; each row is
    rescaled to its largest entry (which leaves the kernel unchanged) and the
    smallest right-singular direction is returned with the phase gauge fixed
    so that a is real and nonnegative.  The residual is the max row residual
    of the rescaled system.
    """
    k = complex(k_star)
    dval = eval_D(profile, k, rtol=rtol)
    if dval.relative() > threshold:
        raise NotAnEigenvalue(
            f"|D({k})| = {dval.relative():.3g} of term scale exceeds {threshold:g}")
    sol = solve_y(profile, k, rtol=rtol)
    j1, j1p = bessel_j1(k)
    rows_sc = [
        (sol.y1, -j1),
        (sol.dy1 - sol.y1, -(ScaledComplex.from_complex(k) * j1p)),
    ]
    m = np.zeros((2, 2), dtype=complex)
    for i, (c0, c1) in enumerate(rows_sc):
        s = max(c0.logabs, c1.logabs)
        for j, c in enumerate((c0, c1)):
            if c.is_zero():
                continue
            m[i, j] = c.mantissa * math.exp(min(c.logscale - s, 60.0))
    _, _, vh = np.linalg.svd(m)
    vec = vh[-1].conj()
    b, a = vec[0], vec[1]
    norm = math.hypot(abs(a), abs(b))
    a, b = a / norm, b / norm
    gauge = a if abs(a) > 1e-14 else b
    phase = gauge / abs(gauge)
    a, b = a / phase, b / phase
    a = complex(a.real, 0.0) if abs(a.imag) < 1e-15 else a
    residual = float(max(abs(m[i, 0] * b + m[i, 1] * a) for i in range(2)))
    return NullPair(a=a, b=b, residual=residual)
