"""Embedded Dormand-Prince 5(4) cores for the radial equations.

Two specializations of the same scheme:

* ``radial_core2`` / ``radial_core4``: y'' + (k^2 n(r) - 2/r^2) y = 0 with the
  profile inlined (constant / polynomial / smooth bump), optionally carrying
  the k-derivative pair driven by -2 k n y.  Compiled with numba when
  available; the plain-Python definitions are the fallback.
* ``scalar_core``: z'' = g(x) z for an arbitrary Python callable g (the
  transformed-potential side), always interpreted.

All cores keep the state in plain complex mantissas and maintain a shared
power-of-two exponent, renormalizing whenever the largest component leaves
[2^-8, 2^8].  Rescaling by powers of two is exact, so negation and conjugation
symmetries of the inputs survive to the outputs bit for bit.
"""

from __future__ import annotations

import math
import os

# Dormand-Prince 5(4) tableau.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0

_MAX_STEPS = 20_000_000


def _n_of_r(kind, pa, coeffs, r):
    if kind == 0:
        return pa
    if kind == 1:
        n = 0.0
        for i in range(len(coeffs) - 1, -1, -1):
            n = n * r + coeffs[i]
        return n
    u = 1.0 - r * r
    return 1.0 + pa * u * u * u


def radial_core2(kind, pa, coeffs, k2, r, r1, y, yp, rtol, atol, h_cap, h0):
    """Integrate (y, y') from r to r1.  Returns (y, yp, exp2, steps, ok, last_r)."""
    exp2 = 0
    steps = 0
    h = h0
    hmin = 1e-13 * (r1 - r)
    n = _n_of_r(kind, pa, coeffs, r)
    f1y = yp
    f1p = (2.0 / (r * r) - k2 * n) * y
    while r < r1:
        if h > h_cap:
            h = h_cap
        last = False
        if r + h >= r1:
            h = r1 - r
            last = True
        if h < hmin:
            return y, yp, exp2, steps, 0, r
        # stage 2
        ys = y + h * (_A21 * f1y)
        ps = yp + h * (_A21 * f1p)
        rr = r + _C2 * h
        g = 2.0 / (rr * rr) - k2 * _n_of_r(kind, pa, coeffs, rr)
        f2y = ps
        f2p = g * ys
        # stage 3
        ys = y + h * (_A31 * f1y + _A32 * f2y)
        ps = yp + h * (_A31 * f1p + _A32 * f2p)
        rr = r + _C3 * h
        g = 2.0 / (rr * rr) - k2 * _n_of_r(kind, pa, coeffs, rr)
        f3y = ps
        f3p = g * ys
        # stage 4
        ys = y + h * (_A41 * f1y + _A42 * f2y + _A43 * f3y)
        ps = yp + h * (_A41 * f1p + _A42 * f2p + _A43 * f3p)
        rr = r + _C4 * h
        g = 2.0 / (rr * rr) - k2 * _n_of_r(kind, pa, coeffs, rr)
        f4y = ps
        f4p = g * ys
        # stage 5
        ys = y + h * (_A51 * f1y + _A52 * f2y + _A53 * f3y + _A54 * f4y)
        ps = yp + h * (_A51 * f1p + _A52 * f2p + _A53 * f3p + _A54 * f4p)
        rr = r + _C5 * h
        g = 2.0 / (rr * rr) - k2 * _n_of_r(kind, pa, coeffs, rr)
        f5y = ps
        f5p = g * ys
        # stage 6
        ys = y + h * (_A61 * f1y + _A62 * f2y + _A63 * f3y + _A64 * f4y + _A65 * f5y)
        ps = yp + h * (_A61 * f1p + _A62 * f2p + _A63 * f3p + _A64 * f4p + _A65 * f5p)
        rr = r + h
        g = 2.0 / (rr * rr) - k2 * _n_of_r(kind, pa, coeffs, rr)
        f6y = ps
        f6p = g * ys
        # 5th-order solution (stage 7 = FSAL evaluation at it)
        yn = y + h * (_B1 * f1y + _B3 * f3y + _B4 * f4y + _B5 * f5y + _B6 * f6y)
        pn = yp + h * (_B1 * f1p + _B3 * f3p + _B4 * f4p + _B5 * f5p + _B6 * f6p)
        f7y = pn
        f7p = g * yn
        ey = h * (_E1 * f1y + _E3 * f3y + _E4 * f4y + _E5 * f5y + _E6 * f6y + _E7 * f7y)
        ep = h * (_E1 * f1p + _E3 * f3p + _E4 * f4p + _E5 * f5p + _E6 * f6p + _E7 * f7p)
        sy = atol + rtol * max(abs(y), abs(yn))
        sp = atol + rtol * max(abs(yp), abs(pn))
        err = math.sqrt(0.5 * ((abs(ey) / sy) ** 2 + (abs(ep) / sp) ** 2))
        steps += 1
        if steps > _MAX_STEPS:
            return y, yp, exp2, steps, 0, r
        if err <= 1.0:
            r = r1 if last else r + h
            y, yp = yn, pn
            f1y, f1p = f7y, f7p
            m = max(max(abs(y.real), abs(y.imag)), max(abs(yp.real), abs(yp.imag)))
            if m > 256.0 or (m < 0.00390625 and m > 0.0):
                _, e = math.frexp(m)
                sc = math.ldexp(1.0, 1 - e)
                y *= sc
                yp *= sc
                f1y *= sc
                f1p *= sc
                exp2 += e - 1
            if err < 1e-30:
                h = h * 5.0
            else:
                h = h * min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            h = h * max(0.1, 0.9 * err ** -0.2)
    return y, yp, exp2, steps, 1, r1


def radial_core4(kind, pa, coeffs, k, r, r1, y, yp, u, up, rtol, atol, h_cap, h0):
    """Same as radial_core2 plus the k-derivative pair (u, u')."""
    k2 = k * k
    exp2 = 0
    steps = 0
    h = h0
    hmin = 1e-13 * (r1 - r)
    n = _n_of_r(kind, pa, coeffs, r)
    g = 2.0 / (r * r) - k2 * n
    f1y, f1p = yp, g * y
    f1u, f1v = up, g * u - 2.0 * k * n * y
    while r < r1:
        if h > h_cap:
            h = h_cap
        last = False
        if r + h >= r1:
            h = r1 - r
            last = True
        if h < hmin:
            return y, yp, u, up, exp2, steps, 0, r
        ys = y + h * (_A21 * f1y)
        ps = yp + h * (_A21 * f1p)
        us = u + h * (_A21 * f1u)
        vs = up + h * (_A21 * f1v)
        rr = r + _C2 * h
        n = _n_of_r(kind, pa, coeffs, rr)
        g = 2.0 / (rr * rr) - k2 * n
        f2y, f2p = ps, g * ys
        f2u, f2v = vs, g * us - 2.0 * k * n * ys
        ys = y + h * (_A31 * f1y + _A32 * f2y)
        ps = yp + h * (_A31 * f1p + _A32 * f2p)
        us = u + h * (_A31 * f1u + _A32 * f2u)
        vs = up + h * (_A31 * f1v + _A32 * f2v)
        rr = r + _C3 * h
        n = _n_of_r(kind, pa, coeffs, rr)
        g = 2.0 / (rr * rr) - k2 * n
        f3y, f3p = ps, g * ys
        f3u, f3v = vs, g * us - 2.0 * k * n * ys
        ys = y + h * (_A41 * f1y + _A42 * f2y + _A43 * f3y)
        ps = yp + h * (_A41 * f1p + _A42 * f2p + _A43 * f3p)
        us = u + h * (_A41 * f1u + _A42 * f2u + _A43 * f3u)
        vs = up + h * (_A41 * f1v + _A42 * f2v + _A43 * f3v)
        rr = r + _C4 * h
        n = _n_of_r(kind, pa, coeffs, rr)
        g = 2.0 / (rr * rr) - k2 * n
        f4y, f4p = ps, g * ys
        f4u, f4v = vs, g * us - 2.0 * k * n * ys
        ys = y + h * (_A51 * f1y + _A52 * f2y + _A53 * f3y + _A54 * f4y)
        ps = yp + h * (_A51 * f1p + _A52 * f2p + _A53 * f3p + _A54 * f4p)
        us = u + h * (_A51 * f1u + _A52 * f2u + _A53 * f3u + _A54 * f4u)
        vs = up + h * (_A51 * f1v + _A52 * f2v + _A53 * f3v + _A54 * f4v)
        rr = r + _C5 * h
        n = _n_of_r(kind, pa, coeffs, rr)
        g = 2.0 / (rr * rr) - k2 * n
        f5y, f5p = ps, g * ys
        f5u, f5v = vs, g * us - 2.0 * k * n * ys
        ys = y + h * (_A61 * f1y + _A62 * f2y + _A63 * f3y + _A64 * f4y + _A65 * f5y)
        ps = yp + h * (_A61 * f1p + _A62 * f2p + _A63 * f3p + _A64 * f4p + _A65 * f5p)
        us = u + h * (_A61 * f1u + _A62 * f2u + _A63 * f3u + _A64 * f4u + _A65 * f5u)
        vs = up + h * (_A61 * f1v + _A62 * f2v + _A63 * f3v + _A64 * f4v + _A65 * f5v)
        rr = r + h
        n = _n_of_r(kind, pa, coeffs, rr)
        g = 2.0 / (rr * rr) - k2 * n
        f6y, f6p = ps, g * ys
        f6u, f6v = vs, g * us - 2.0 * k * n * ys
        yn = y + h * (_B1 * f1y + _B3 * f3y + _B4 * f4y + _B5 * f5y + _B6 * f6y)
        pn = yp + h * (_B1 * f1p + _B3 * f3p + _B4 * f4p + _B5 * f5p + _B6 * f6p)
        un = u + h * (_B1 * f1u + _B3 * f3u + _B4 * f4u + _B5 * f5u + _B6 * f6u)
        vn = up + h * (_B1 * f1v + _B3 * f3v + _B4 * f4v + _B5 * f5v + _B6 * f6v)
        f7y, f7p = pn, g * yn
        f7u, f7v = vn, g * un - 2.0 * k * n * yn
        ey = h * (_E1 * f1y + _E3 * f3y + _E4 * f4y + _E5 * f5y + _E6 * f6y + _E7 * f7y)
        ep = h * (_E1 * f1p + _E3 * f3p + _E4 * f4p + _E5 * f5p + _E6 * f6p + _E7 * f7p)
        eu = h * (_E1 * f1u + _E3 * f3u + _E4 * f4u + _E5 * f5u + _E6 * f6u + _E7 * f7u)
        ev = h * (_E1 * f1v + _E3 * f3v + _E4 * f4v + _E5 * f5v + _E6 * f6v + _E7 * f7v)
        sy = atol + rtol * max(abs(y), abs(yn))
        sp = atol + rtol * max(abs(yp), abs(pn))
        su = atol + rtol * max(abs(u), abs(un))
        sv = atol + rtol * max(abs(up), abs(vn))
        err = math.sqrt(0.25 * ((abs(ey) / sy) ** 2 + (abs(ep) / sp) ** 2
                                + (abs(eu) / su) ** 2 + (abs(ev) / sv) ** 2))
        steps += 1
        if steps > _MAX_STEPS:
            return y, yp, u, up, exp2, steps, 0, r
        if err <= 1.0:
            r = r1 if last else r + h
            y, yp, u, up = yn, pn, un, vn
            f1y, f1p, f1u, f1v = f7y, f7p, f7u, f7v
            m = max(max(abs(y.real), abs(y.imag)), max(abs(yp.real), abs(yp.imag)))
            m2 = max(max(abs(u.real), abs(u.imag)), max(abs(up.real), abs(up.imag)))
            if m2 > m:
                m = m2
            if m > 256.0 or (m < 0.00390625 and m > 0.0):
                _, e = math.frexp(m)
                sc = math.ldexp(1.0, 1 - e)
                y *= sc
                yp *= sc
                u *= sc
                up *= sc
                f1y *= sc
                f1p *= sc
                f1u *= sc
                f1v *= sc
                exp2 += e - 1
            if err < 1e-30:
                h = h * 5.0
            else:
                h = h * min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            h = h * max(0.1, 0.9 * err ** -0.2)
    return y, yp, u, up, exp2, steps, 1, r1


def scalar_core(g, x, x1, z, zp, rtol, atol, h_cap, h0):
    """z'' = g(x) z for a Python callable g; returns (z, zp, exp2, steps, ok, last_x)."""
    exp2 = 0
    steps = 0
    h = h0
    hmin = 1e-13 * (x1 - x)
    f1z = zp
    f1p = g(x) * z
    while x < x1:
        if h > h_cap:
            h = h_cap
        last = False
        if x + h >= x1:
            h = x1 - x
            last = True
        if h < hmin:
            return z, zp, exp2, steps, 0, x
        zs = z + h * (_A21 * f1z)
        ps = zp + h * (_A21 * f1p)
        gg = g(x + _C2 * h)
        f2z, f2p = ps, gg * zs
        zs = z + h * (_A31 * f1z + _A32 * f2z)
        ps = zp + h * (_A31 * f1p + _A32 * f2p)
        gg = g(x + _C3 * h)
        f3z, f3p = ps, gg * zs
        zs = z + h * (_A41 * f1z + _A42 * f2z + _A43 * f3z)
        ps = zp + h * (_A41 * f1p + _A42 * f2p + _A43 * f3p)
        gg = g(x + _C4 * h)
        f4z, f4p = ps, gg * zs
        zs = z + h * (_A51 * f1z + _A52 * f2z + _A53 * f3z + _A54 * f4z)
        ps = zp + h * (_A51 * f1p + _A52 * f2p + _A53 * f3p + _A54 * f4p)
        gg = g(x + _C5 * h)
        f5z, f5p = ps, gg * zs
        zs = z + h * (_A61 * f1z + _A62 * f2z + _A63 * f3z + _A64 * f4z + _A65 * f5z)
        ps = zp + h * (_A61 * f1p + _A62 * f2p + _A63 * f3p + _A64 * f4p + _A65 * f5p)
        gg = g(x + h)
        f6z, f6p = ps, gg * zs
        zn = z + h * (_B1 * f1z + _B3 * f3z + _B4 * f4z + _B5 * f5z + _B6 * f6z)
        pn = zp + h * (_B1 * f1p + _B3 * f3p + _B4 * f4p + _B5 * f5p + _B6 * f6p)
        f7z, f7p = pn, gg * zn
        ez = h * (_E1 * f1z + _E3 * f3z + _E4 * f4z + _E5 * f5z + _E6 * f6z + _E7 * f7z)
        ep = h * (_E1 * f1p + _E3 * f3p + _E4 * f4p + _E5 * f5p + _E6 * f6p + _E7 * f7p)
        sz = atol + rtol * max(abs(z), abs(zn))
        sp = atol + rtol * max(abs(zp), abs(pn))
        err = math.sqrt(0.5 * ((abs(ez) / sz) ** 2 + (abs(ep) / sp) ** 2))
        steps += 1
        if steps > _MAX_STEPS:
            return z, zp, exp2, steps, 0, x
        if err <= 1.0:
            x = x1 if last else x + h
            z, zp = zn, pn
            f1z, f1p = f7z, f7p
            m = max(max(abs(z.real), abs(z.imag)), max(abs(zp.real), abs(zp.imag)))
            if m > 256.0 or (m < 0.00390625 and m > 0.0):
                _, e = math.frexp(m)
                sc = math.ldexp(1.0, 1 - e)
                z *= sc
                zp *= sc
                f1z *= sc
                f1p *= sc
                exp2 += e - 1
            if err < 1e-30:
                h = h * 5.0
            else:
                h = h * min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            h = h * max(0.1, 0.9 * err ** -0.2)
    return z, zp, exp2, steps, 1, x1


JIT_ENABLED = False
if not os.environ.get("ITE_NO_JIT"):
    try:
        from numba import njit

        _n_of_r = njit(cache=True)(_n_of_r)
        radial_core2 = njit(cache=True)(radial_core2)
        radial_core4 = njit(cache=True)(radial_core4)
        JIT_ENABLED = True
    except ImportError:  # pragma: no cover
        pass
