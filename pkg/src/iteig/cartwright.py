"""Counting function, wedge densities, indicator function, diagram width.

For the determinant the predictions under test are: zero density
(1 + B)/pi inside each small wedge around the real axis, zero density in the
off-axis wedges, indicator h(theta) = (1 + B)|sin theta| away from the axis,
and indicator-diagram width 2 (1 + B).

The limsup in the definitions is approximated by least-squares slopes over
the largest available window; regular growth makes the slope proxy honest,
and every estimate carries its fit residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .determinant import eval_D
from .errors import (DegenerateProfile, DomainError, InsufficientData,
                     RegionTooSmall)
from .profiles import RefractionProfile
from .radial import RTOL_DEFAULT
from .zeros import BoxRegion, ZeroSet, _degenerate_probe

_TWO_PI = 2.0 * math.pi
SIGMA_EPS_DEFAULT = 0.1
AXIS_GUARD = 0.05


@dataclass(frozen=True)
class Wedge:
    """Angular wedge theta_min <= arg k <= theta_max (mod 2 pi).

    theta_max may exceed pi so that wedges straddling the negative real axis
    (the mirror of the forward wedge) stay a single interval.
    """

    theta_min: float
    theta_max: float
    label: str = "custom"

    def __post_init__(self):
        if not (-math.pi < self.theta_min < self.theta_max <= self.theta_min + _TWO_PI):
            raise DomainError(f"bad wedge angles [{self.theta_min}, {self.theta_max}]")

    @classmethod
    def sigma1(cls, eps: float = SIGMA_EPS_DEFAULT) -> "Wedge":
        return cls(-eps, eps, "sigma1")

    @classmethod
    def sigma2(cls, eps: float = SIGMA_EPS_DEFAULT) -> "Wedge":
        return cls(math.pi - eps, math.pi + eps, "sigma2")

    @classmethod
    def off_axis_upper(cls, eps: float = SIGMA_EPS_DEFAULT) -> "Wedge":
        return cls(eps, math.pi - eps, "off_axis_upper")

    @classmethod
    def off_axis_lower(cls, eps: float = SIGMA_EPS_DEFAULT) -> "Wedge":
        return cls(-math.pi + eps, -eps, "off_axis_lower")

    @property
    def opening(self) -> float:
        return self.theta_max - self.theta_min

    def contains(self, k: complex) -> bool:
        if k == 0:
            return False
        a = math.atan2(k.imag, k.real)
        return ((a - self.theta_min) % _TWO_PI) <= self.opening + 1e-15

    def angles(self) -> Iterable[float]:
        """Wedge end angles plus any axis directions inside (for bboxes)."""
        out = [self.theta_min, self.theta_max]
        a = math.ceil(self.theta_min / (0.5 * math.pi))
        while a * 0.5 * math.pi <= self.theta_max + 1e-15:
            out.append(a * 0.5 * math.pi)
            a += 1
        return out

    def to_dict(self) -> dict:
        return {"theta_min": self.theta_min, "theta_max": self.theta_max}


@dataclass
class DensityEstimate:
    delta_hat: float
    fit_window: tuple
    residual: float
    counts: list
    stderr: float = 0.0


@dataclass
class IndicatorEstimate:
    theta: float
    h_hat: float
    samples: list = field(default_factory=list)  # (r, ln|D(r e^{i theta})| / r)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def _sector_covered(region: BoxRegion, wedge: Wedge, r: float, r_min: float) -> bool:
    """True when {r_min <= |k| <= r, arg k in wedge} fits inside the region."""
    res, ims = [], []
    for a in wedge.angles():
        for rho in (r_min, r):
            res.append(rho * math.cos(a))
            ims.append(rho * math.sin(a))
    return (min(res) >= region.re_min - 1e-12 and max(res) <= region.re_max + 1e-12
            and min(ims) >= region.im_min - 1e-12 and max(ims) <= region.im_max + 1e-12)


def _axis_ray_covered(region: BoxRegion, wedge: Wedge, r: float) -> bool:
    """Real-axis specialization: the wedge's axis ray is covered to radius r.

    A thin strip around the axis counts as covering an axis wedge; zeros
    above the strip are accepted as absent per the off-axis sparsity this
    package verifies elsewhere.  Documented approximation, not an identity.
    """
    covers_zero = wedge.contains(1.0 + 0j)
    covers_pi = wedge.contains(-1.0 + 0j)
    if not (covers_zero or covers_pi):
        return False
    if not (region.im_min < 0.0 < region.im_max):
        return False
    ok = True
    if covers_zero:
        ok = ok and region.re_max >= r - 1e-12
    if covers_pi:
        ok = ok and region.re_min <= -r + 1e-12
    return ok


def counting_function(zeros: ZeroSet, wedge: Wedge, r: float,
                      r_min: float = 0.0) -> int:
    """Multiplicity-weighted number of zeros with |k| <= r and arg k in wedge.

    Raises RegionTooSmall unless the sector truncated at ``r_min`` lies in
    the computed region, or the region is an axis strip covering the wedge's
    axis ray to radius r.
    """
    if not (_sector_covered(zeros.region, wedge, r, r_min)
            or _axis_ray_covered(zeros.region, wedge, r)):
        raise RegionTooSmall(
            f"region {zeros.region} does not cover the {wedge.label} sector to r = {r}")
    total = 0
    for z in zeros.zeros:
        if abs(z.k) <= r + 1e-12 and abs(z.k) >= r_min and wedge.contains(z.k):
            total += z.multiplicity
    return total


def wedge_density(zeros: ZeroSet, wedge: Wedge, fit_window: tuple,
                  r_min: float = 0.0, n_grid: int | None = None) -> DensityEstimate:
    """Least-squares slope of N(r) against r over the window.

    The zero-counting staircase is sampled on a uniform grid and fitted by
    ordinary least squares; the residual is the RMS misfit in counts and
    ``stderr`` the standard error of the slope.
    """
    r_lo, r_hi = float(fit_window[0]), float(fit_window[1])
    if not 0 <= r_lo < r_hi:
        raise DomainError(f"bad fit window {fit_window}")
    moduli = []
    for z in zeros.zeros:
        if wedge.contains(z.k):
            moduli.extend([abs(z.k)] * z.multiplicity)
    moduli.sort()
    counting_function(zeros, wedge, r_hi, r_min=r_min)  # coverage gate
    in_window = sum(1 for m in moduli if r_lo <= m <= r_hi)
    if in_window < 10:
        raise InsufficientData(
            f"only {in_window} zeros in window [{r_lo}, {r_hi}]; need >= 10")
    if n_grid is None:
        n_grid = max(32, min(256, 2 * in_window))
    rr = np.linspace(r_lo, r_hi, n_grid)
    nn = np.searchsorted(moduli, rr, side="right").astype(float)
    slope, intercept = np.polyfit(rr, nn, 1)
    resid = nn - (slope * rr + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    denom = float(np.sum((rr - rr.mean()) ** 2))
    stderr = rms / math.sqrt(denom) if denom > 0 else math.inf
    return DensityEstimate(delta_hat=float(slope), fit_window=(r_lo, r_hi),
                           residual=rms, counts=list(zip(rr.tolist(), nn.tolist())),
                           stderr=stderr)


# ---------------------------------------------------------------------------
# indicator
# ---------------------------------------------------------------------------


def _check_guard(theta: float):
    a = math.atan2(math.sin(theta), math.cos(theta))
    if abs(a) < AXIS_GUARD or abs(abs(a) - math.pi) < AXIS_GUARD:
        raise DomainError(
            f"theta = {theta} is within the guard band {AXIS_GUARD} of the real axis,"
            " where ln|D| is oscillation- rather than growth-dominated")


def indicator_estimate(profile: RefractionProfile, theta: float,
                       r_samples: Iterable[float],
                       rtol: float = RTOL_DEFAULT) -> IndicatorEstimate:
    """Growth rate of ln|D(r e^{i theta})| along one ray.

    h_hat is the least-squares slope of ln|D| over the largest-r half of the
    samples, a finite-window stand-in for the limsup definition.
    """
    _check_guard(theta)
    rs = sorted(float(r) for r in r_samples)
    if len(rs) < 4:
        raise InsufficientData("need at least 4 radii for an indicator fit")
    phase = complex(math.cos(theta), math.sin(theta))
    samples = []
    logs = []
    for r in rs:
        d = eval_D(profile, r * phase, rtol=rtol)
        logs.append(d.logabs)
        samples.append((r, d.logabs / r))
    tail_lo = rs[0] + 0.5 * (rs[-1] - rs[0])
    tail = [(r, la) for r, la in zip(rs, logs) if r >= tail_lo]
    rr = np.array([t[0] for t in tail])
    ll = np.array([t[1] for t in tail])
    slope = float(np.polyfit(rr, ll, 1)[0])
    return IndicatorEstimate(theta=theta, h_hat=slope, samples=samples)


def indicator_width(profile: RefractionProfile, r_max: float = 200.0,
                    n_samples: int = 33, rtol: float = RTOL_DEFAULT) -> float:
    """h(pi/2) + h(-pi/2); equals 2 (1 + B) for the determinant."""
    if _degenerate_probe(profile, 1e-8):
        raise DegenerateProfile("indicator of a numerically zero determinant")
    rs = np.linspace(max(2.0, 0.2 * r_max), r_max, n_samples)
    up = indicator_estimate(profile, math.pi / 2.0, rs, rtol=rtol)
    dn = indicator_estimate(profile, -math.pi / 2.0, rs, rtol=rtol)
    return up.h_hat + dn.h_hat


# ---------------------------------------------------------------------------
# reciprocal sums
# ---------------------------------------------------------------------------


def reciprocal_sum(zeros: ZeroSet, r: float, origin_tol: float = 1e-6) -> complex:
    """Multiplicity-weighted sum of 1/k over zeros with origin_tol < |k| < r.

    Pairs (k, -k) produced by the evenness of D cancel exactly and are
    skipped before summation, so a symmetric zero set returns exactly 0.
    The determinant always vanishes to fourth order at the origin; like the
    monomial factor of a product representation, that zero is excluded here
    rather than contributing a divergent reciprocal.  Requires the region to
    cover both axis rays (or the full disk) to radius r.
    """
    region = zeros.region
    full_disk = (region.re_min <= -r and region.re_max >= r
                 and region.im_min <= -r and region.im_max >= r)
    both_rays = (region.re_max >= r - 1e-12 and region.re_min <= -r + 1e-12
                 and region.im_min < 0.0 < region.im_max)
    if not (full_disk or both_rays):
        raise RegionTooSmall(
            f"region {region} does not cover |k| <= {r} on both axis rays")
    entries = [(z.k, z.multiplicity) for z in zeros.zeros
               if origin_tol < abs(z.k) < r]
    used = [False] * len(entries)
    total = 0j
    for i, (k, mult) in enumerate(entries):
        if used[i]:
            continue
        for j in range(i + 1, len(entries)):
            if used[j]:
                continue
            kj, mj = entries[j]
            if mj == mult and abs(kj + k) <= 1e-12 * (1.0 + abs(k)):
                used[i] = used[j] = True
                break
        if not used[i]:
            used[i] = True
            total += mult / k
    return total
