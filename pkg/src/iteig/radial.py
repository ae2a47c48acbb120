"""Radial solutions of y'' + (k^2 n(r) - 2/r^2) y = 0 at complex k.

The regular solution behaves like r^2 near the origin (indicial exponent 2);
it is normalized so that y(r)/r matches the spherical Bessel function j1(kr)
to leading order, i.e. y ~ (k/3) r^2.  Integration starts from a Frobenius
series launch at a small radius, which removes the 2/r^2 stiffness, and runs
an embedded Dormand-Prince pair with a shared power-of-two exponent so the
boundary data survive exp(|Im k| B) growth.

The transformed problem z'' + [k^2 - p(xi)] z = 0, z(0) = 0 is solved the
same way on the xi side; z is normalized to z ~ xi^2 (unit leading
coefficient), the convention under which the large-|k| reference

    z(xi;k)  ~ 3 sin(k xi)/(k^3 xi) - 3 cos(k xi)/k^2

has prefactor exactly 1.  For a potential derived from a profile, the
boundary identity reads (k/3) n(0)^(-3/4) z(B;k) = n(1)^(1/4) y(1;k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _rk45
from .bessel import j1_small_complex
from .errors import DomainError, StepUnderflow
from .profiles import RefractionProfile
from .scaled import ScaledComplex, sc_cos, sc_sin

RTOL_DEFAULT = 1e-10
ATOL_DEFAULT = 1e-14
K_MAX_DEFAULT = 1e4
_SERIES_MAX_POWER = 24


@dataclass
class RadialSolution:
    """Boundary data y(1;k), y'(1;k) of the radial IVP, log-scaled.

    ``branch`` is "k0_limit" at k = 0, where y vanishes identically and the
    returned values are those of the k-independent regular solution r^2
    (the limit of 3 y / k), kept so that determinant limits stay finite.
    """

    k: complex
    y1: ScaledComplex
    dy1: ScaledComplex
    dk_y1: Optional[ScaledComplex] = None
    dk_dy1: Optional[ScaledComplex] = None
    steps: int = 0
    branch: str = "regular"


def launch_radius(k: complex) -> float:
    return min(1e-3, 0.1 / (1.0 + abs(k)))


def step_ceiling(k: complex, sup_sqrt_n: float) -> float:
    return min(0.05, 0.5 / (1.0 + abs(k) * sup_sqrt_n))


def _frobenius_coeffs(nu: np.ndarray, k: complex, max_power: int, want_dk: bool):
    """Series coefficients c_j (and dc_j/dk) of the regular solution.

    y = sum_{j>=2} c_j r^j with c_2 = k/3 and, for s >= 4,
        (s-2)(s+1) c_s = -k^2 sum_{j=2}^{s-2} nu_{s-2-j} c_j.
    """
    k2 = k * k
    c = {2: k / 3.0}
    dc = {2: 1.0 / 3.0 + 0j} if want_dk else None
    for s in range(3, max_power + 1):
        acc = 0j
        dacc = 0j
        for j in range(2, s - 1):
            m = s - 2 - j
            if 0 <= m < len(nu) and nu[m] != 0.0:
                acc += nu[m] * c[j]
                if want_dk:
                    dacc += nu[m] * dc[j]
        denom = (s - 2) * (s + 1)
        c[s] = -k2 * acc / denom
        if want_dk:
            dc[s] = -(2.0 * k * acc + k2 * dacc) / denom
    return c, dc


def series_init(profile: RefractionProfile, k: complex, r0: float | None = None,
                want_dk: bool = False):
    """Frobenius launch values at r0: (y, y') or (y, y', dy/dk, dy'/dk).

    Truncation is far below 1e-14 relative at the default r0 since each term
    gains a factor ~(|k| r0)^2 / 10 <= 1e-3.  Callers passing a larger r0
    keep that accuracy while |k| r0 stays below ~0.5.
    """
    k = complex(k)
    if r0 is None:
        r0 = launch_radius(k)
    if not 0 < r0 <= 0.05:
        raise DomainError(f"launch radius {r0} outside (0, 0.05]")
    if k == 0:
        # y vanishes identically; the r^2 branch is the k -> 0 limit of 3y/k.
        if want_dk:
            return 0j, 0j, r0 * r0 / 3.0 + 0j, 2.0 * r0 / 3.0 + 0j
        return 0j, 0j
    nu = profile.taylor_coeffs()
    c, dc = _frobenius_coeffs(nu, k, _SERIES_MAX_POWER, want_dk)
    y = yp = u = up = 0j
    for s in range(_SERIES_MAX_POWER, 1, -1):
        rs = r0 ** s
        y += c[s] * rs
        yp += s * c[s] * rs / r0
        if want_dk:
            u += dc[s] * rs
            up += s * dc[s] * rs / r0
    if want_dk:
        return y, yp, u, up
    return y, yp


def _prescale(*vals: complex):
    """Exact power-of-two scaling bringing the largest component to [1, 2)."""
    m = 0.0
    for v in vals:
        m = max(m, abs(v.real), abs(v.imag))
    if m == 0.0:
        return vals, 0
    _, e = math.frexp(m)
    sc = math.ldexp(1.0, 1 - e)
    return tuple(v * sc for v in vals), e - 1


def solve_y(profile: RefractionProfile, k: complex, want_dk: bool = False,
            rtol: float = RTOL_DEFAULT, atol: float = ATOL_DEFAULT,
            k_max: float = K_MAX_DEFAULT) -> RadialSolution:
    """Integrate the radial IVP from the series launch to r = 1."""
    k = complex(k)
    if abs(k) > k_max:
        raise DomainError(f"|k| = {abs(k):.3g} exceeds configured bound {k_max:g}")
    if k == 0:
        sol = RadialSolution(k=0j, y1=ScaledComplex(1.0), dy1=ScaledComplex(2.0),
                             steps=0, branch="k0_limit")
        if want_dk:
            sol.dk_y1 = ScaledComplex(1.0 / 3.0)
            sol.dk_dy1 = ScaledComplex(2.0 / 3.0)
        return sol
    r0 = launch_radius(k)
    kind, pa, coeffs = profile._rk_params()
    h_cap = step_ceiling(k, profile.sup_sqrt_n())
    h0 = min(h_cap, (1.0 - r0) / 10.0, r0)
    if want_dk:
        y0, yp0, u0, up0 = series_init(profile, k, r0, want_dk=True)
        (y0, yp0, u0, up0), e0 = _prescale(y0, yp0, u0, up0)
        y, yp, u, up, exp2, steps, ok, last_r = _rk45.radial_core4(
            kind, pa, coeffs, k, r0, 1.0, y0, yp0, u0, up0, rtol, atol, h_cap, h0)
        if not ok:
            raise StepUnderflow(f"step controller stalled at r = {last_r}", last_r)
        e = exp2 + e0
        return RadialSolution(k=k, y1=ScaledComplex(y, e), dy1=ScaledComplex(yp, e),
                              dk_y1=ScaledComplex(u, e), dk_dy1=ScaledComplex(up, e),
                              steps=steps)
    y0, yp0 = series_init(profile, k, r0)
    (y0, yp0), e0 = _prescale(y0, yp0)
    y, yp, exp2, steps, ok, last_r = _rk45.radial_core2(
        kind, pa, coeffs, k * k, r0, 1.0, y0, yp0, rtol, atol, h_cap, h0)
    if not ok:
        raise StepUnderflow(f"step controller stalled at r = {last_r}", last_r)
    e = exp2 + e0
    return RadialSolution(k=k, y1=ScaledComplex(y, e), dy1=ScaledComplex(yp, e),
                          steps=steps)


def solve_z(p_potential: Callable[[float], float], B: float, k: complex,
            leading: complex = 1.0, rtol: float = RTOL_DEFAULT,
            atol: float = ATOL_DEFAULT, xi0: float | None = None,
            xi_end: float | None = None):
    """Boundary data (z(B;k), z'(B;k)) of the transformed equation.

    ``p_potential`` must behave like q(xi) + 2/xi^2 with q bounded near 0.
    ``leading`` rescales the xi^2 normalization; ``xi_end`` evaluates at an
    interior point instead of B.  Returns a ScaledComplex pair.
    """
    if not B > 0:
        raise DomainError("B must be positive")
    k = complex(k)
    x1 = B if xi_end is None else float(xi_end)
    if not 0 < x1 <= B:
        raise DomainError(f"evaluation point {x1} outside (0, B]")
    if xi0 is None:
        xi0 = min(1e-4, 0.1 / (1.0 + abs(k)))
    q0 = p_potential(xi0) - 2.0 / (xi0 * xi0)
    # Launch on the exact q = 0 solution (3/k) xi j1(k xi) ~ xi^2 plus the
    # first q-correction xi^2 * q0 xi^2 / 10.
    if k == 0:
        a = xi0 * xi0 + 0j
        ap = 2.0 * xi0 + 0j
    else:
        t = k * xi0
        j1, j1p = j1_small_complex(t)
        a = (3.0 / k) * xi0 * j1
        ap = (3.0 / k) * (j1 + t * j1p)
    corr = 1.0 + q0 * xi0 * xi0 / 10.0
    z0 = leading * a * corr
    zp0 = leading * (ap * corr + a * q0 * xi0 / 5.0)
    (z0, zp0), e0 = _prescale(z0, zp0)
    k2 = k * k

    def g(xi: float) -> complex:
        return p_potential(xi) - k2

    h_cap = min(0.05, 0.5 / (1.0 + abs(k)))
    h0 = min(h_cap, (x1 - xi0) / 10.0, xi0)
    z, zp, exp2, steps, ok, last_x = _rk45.scalar_core(
        g, xi0, x1, z0, zp0, rtol, atol, h_cap, h0)
    if not ok:
        raise StepUnderflow(f"step controller stalled at xi = {last_x}", last_x)
    e = exp2 + e0
    return ScaledComplex(z, e), ScaledComplex(zp, e)


def asymptotic_z(k: complex, xi: float):
    """Two-term large-|k| reference for z and z_xi, in ScaledComplex.

    z_ref  = 3 sin(k xi)/(k^3 xi) - 3 cos(k xi)/k^2
    dz_ref = (3 sin(k xi)/k^2) (k - 1/(k xi^2)) + 3 cos(k xi)/(k^2 xi)
    """
    k = complex(k)
    if abs(k) <= 1.0:
        raise DomainError("asymptotic reference requires |k| > 1")
    if not xi > 0:
        raise DomainError("xi must be positive")
    s = sc_sin(k * xi)
    c = sc_cos(k * xi)
    k2 = k * k
    z_ref = s * (3.0 / (k2 * k * xi)) - c * (3.0 / k2)
    dz_ref = s * ((3.0 / k2) * (k - 1.0 / (k * xi * xi))) + c * (3.0 / (k2 * xi))
    return z_ref, dz_ref


def liouville_match_factor(profile: RefractionProfile, k: complex) -> complex:
    """Factor converting z(B;k) to n(1)^(1/4) y(1;k): (k/3) n(0)^(-3/4)."""
    n0 = profile.interior(0.0)[0]
    return (k / 3.0) * n0 ** -0.75
