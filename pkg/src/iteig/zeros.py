"""Zeros of D(k) in a box by argument-principle counting plus Newton polish.

The winding number of a box is the exact integer obtained by phase
continuation along the boundary, with adaptive bisection until every
consecutive phase step is below pi/2.  Boxes subdivide recursively until each
piece holds at most one zero; a Newton iteration on D / dD then polishes the
location and a tight confirmation box re-counts it.  All thresholds are
relative to the local term scale of the determinant, never absolute.

Subdivision keeps children as an exact tiling of the parent: when a split
line lands on a zero the line is nudged by a deterministic offset sequence
instead of dilating the children, so winding conservation is exact.  Region
boundaries (caller-facing) are dilated by 1 + 2^-5 on boundary hits, up to
eight times.
"""

from __future__ import annotations

import cmath
import hashlib
import math
import warnings
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .determinant import DeterminantValue, eval_D
from .errors import (BoundaryZero, DegenerateProfile, DomainError,
                     NoConvergence, StripMismatchWarning, Unresolved)
from .profiles import RefractionProfile
from .scaled import ScaledComplex, coerce_scaled

_HALF_PI = math.pi / 2.0
_TWO_PI = 2.0 * math.pi
_FLOOR_LOGGAP = 60.0  # e^-60 relative dip flags a boundary zero

PHASE_RTOL = 1e-8
REFINE_RTOL = 1e-12
DEGENERATE_FLOOR = 1e-8
# Fixed small-|k| box used for the identically-zero probe; off-axis growth
# would mask a near-degenerate profile at large |k|.
_DEGENERATE_BOX = (0.3, 5.0, 0.05, 1.0)


@dataclass(frozen=True)
class BoxRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError(f"degenerate box {self}")

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    def contains(self, k: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= k.real <= self.re_max + pad
                and self.im_min - pad <= k.imag <= self.im_max + pad)

    def dilated(self, factor: float) -> "BoxRegion":
        c = self.center
        hw = 0.5 * self.width * factor
        hh = 0.5 * self.height * factor
        return BoxRegion(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def corners(self) -> list[complex]:
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def to_dict(self) -> dict:
        return {"re_min": self.re_min, "re_max": self.re_max,
                "im_min": self.im_min, "im_max": self.im_max}

    @classmethod
    def from_dict(cls, d: dict) -> "BoxRegion":
        return cls(float(d["re_min"]), float(d["re_max"]),
                   float(d["im_min"]), float(d["im_max"]))


@dataclass
class ZeroEntry:
    k: complex
    multiplicity: int
    residual: float  # |D(k)| relative to the local term scale


@dataclass
class ZeroSet:
    zeros: list
    region: BoxRegion
    total_winding: int
    profile_id: str
    unresolved: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def multiplicity_total(self) -> int:
        return (sum(z.multiplicity for z in self.zeros)
                + sum(w for _, w in self.unresolved))

    def to_dict(self) -> dict:
        return {
            "profile_hash": self.profile_id,
            "region": self.region.to_dict(),
            "zeros": [{"re": z.k.real, "im": z.k.imag, "mult": z.multiplicity}
                      for z in self.zeros],
            "total_winding": self.total_winding,
            "diagnostics": dict(self.diagnostics,
                                residuals=[z.residual for z in self.zeros]),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ZeroSet":
        diags = dict(d.get("diagnostics", {}))
        residuals = diags.pop("residuals", None)
        zeros = []
        for i, z in enumerate(d["zeros"]):
            res = residuals[i] if residuals and i < len(residuals) else 0.0
            zeros.append(ZeroEntry(complex(z["re"], z["im"]), int(z["mult"]), res))
        return cls(zeros=zeros, region=BoxRegion.from_dict(d["region"]),
                   total_winding=int(d.get("total_winding",
                                           sum(z["mult"] for z in d["zeros"]))),
                   profile_id=d.get("profile_hash", "unknown"),
                   diagnostics=diags)


@dataclass
class FindOptions:
    min_box: float = 1e-6
    newton_tol: float = 1e-12
    samples0: int = 8
    max_depth: int = 24
    phase_rtol: float = PHASE_RTOL
    refine_rtol: float = REFINE_RTOL
    degenerate_floor: float = DEGENERATE_FLOOR
    cluster_radius: float = 1e-7
    max_dilations: int = 8
    degenerate_check: bool = True


# ---------------------------------------------------------------------------
# winding number
# ---------------------------------------------------------------------------


def _wrap_handle(f, cache: Optional[dict]):
    if cache is None:
        cache = {}

    def F(z: complex) -> ScaledComplex:
        w = cache.get(z)
        if w is None:
            w = coerce_scaled(f(z))
            cache[z] = w
        return w

    return F


def _dist_origin_segment(z0: complex, z1: complex) -> float:
    dz = z1 - z0
    L2 = abs(dz) ** 2
    if L2 == 0.0:
        return abs(z0)
    t = -(z0.real * dz.real + z0.imag * dz.imag) / L2
    t = min(max(t, 0.0), 1.0)
    return abs(z0 + dz * t)


def _phase_between(F, z0, dz, ta, wa, tb, wb, depth, max_depth):
    dphi = cmath.phase(wb.mantissa * wa.mantissa.conjugate())
    if abs(dphi) < _HALF_PI:
        return dphi
    if depth >= max_depth:
        raise BoundaryZero(
            f"phase step {dphi:.3f} unresolved at depth {depth} near "
            f"{z0 + dz * (0.5 * (ta + tb))}")
    tm = 0.5 * (ta + tb)
    wm = F(z0 + dz * tm)
    if wm.is_zero():
        raise BoundaryZero(f"f vanishes on the boundary at {z0 + dz * tm}")
    if wm.logabs < max(wa.logabs, wb.logabs) - _FLOOR_LOGGAP:
        raise BoundaryZero(
            f"|f| falls below the relative floor at {z0 + dz * tm}")
    return (_phase_between(F, z0, dz, ta, wa, tm, wm, depth + 1, max_depth)
            + _phase_between(F, z0, dz, tm, wm, tb, wb, depth + 1, max_depth))


def winding_number(f: Callable[[complex], object], box: BoxRegion,
                   samples0: int = 8, max_depth: int = 24,
                   cache: Optional[dict] = None,
                   min_spacing: float | None = None) -> int:
    """Exact zero count (with multiplicity) enclosed by the box boundary.

    ``f`` may return plain complex or ScaledComplex.  Raises BoundaryZero
    when |f| vanishes on (or phase continuation cannot be resolved at) the
    boundary; the caller must perturb the box.

    The initial sampling must already resolve the boundary phase: bisection
    only refines where consecutive samples disagree by pi/2 or more, so a
    monotone rotation of a full turn between samples would alias silently.
    Callers who know the phase rate of f (for the determinant it is bounded
    by the exponential type 1 + B away from the origin) should pass
    ``min_spacing`` below a quarter period; near the origin the spacing is
    tightened further to resolve the rotation of a k^4-type factor.
    ``samples0`` is the per-edge floor.
    """
    F = _wrap_handle(f, cache)
    corners = box.corners()
    total = 0.0
    for i in range(4):
        z0 = corners[i]
        z1 = corners[(i + 1) % 4]
        dz = z1 - z0
        n_init = samples0
        if min_spacing is not None:
            d = _dist_origin_segment(z0, z1)
            spacing = 1.0 / (1.0 / min_spacing + 3.32 / max(d, 1e-9))
            while n_init < 262144 and abs(dz) / n_init > spacing:
                n_init *= 2
        ts = [j / n_init for j in range(n_init + 1)]
        ws = []
        for t in ts:
            w = F(z0 + dz * t)
            if w.is_zero():
                raise BoundaryZero(f"f vanishes on the boundary at {z0 + dz * t}")
            ws.append(w)
        for j in range(len(ts) - 1):
            total += _phase_between(F, z0, dz, ts[j], ws[j], ts[j + 1], ws[j + 1],
                                    0, max_depth)
    w = total / _TWO_PI
    iw = round(w)
    if abs(w - iw) > 0.25:
        raise Unresolved(f"boundary phase sum {total:.6f} is not a multiple of 2 pi")
    return int(iw)


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------


def _muller(fun, k0: complex, tol: float, max_iter: int = 40) -> complex:
    """Muller's method on log-rescaled determinant values."""
    h = 1e-4 * (1.0 + abs(k0))
    ks = [k0 - h, k0, k0 + h]

    def val(k):
        d = fun(k)
        return d

    ds = [val(k) for k in ks]
    for _ in range(max_iter):
        ref = max(d.logabs for d in ds if d.logabs > -math.inf)
        fs = []
        for d in ds:
            if d.logabs == -math.inf:
                fs.append(0j)
            else:
                fs.append(d.mantissa * math.exp(min(d.logabs - ref, 0.0)
                                                - math.log(abs(d.mantissa))))
        q = (ks[2] - ks[1]) / (ks[1] - ks[0])
        a = q * fs[2] - q * (1 + q) * fs[1] + q * q * fs[0]
        b = (2 * q + 1) * fs[2] - (1 + q) ** 2 * fs[1] + q * q * fs[0]
        c = (1 + q) * fs[2]
        disc = cmath.sqrt(b * b - 4 * a * c)
        den1, den2 = b + disc, b - disc
        den = den1 if abs(den1) >= abs(den2) else den2
        if den == 0:
            raise NoConvergence("Muller denominator vanished")
        k_new = ks[2] - (ks[2] - ks[1]) * (2 * c / den)
        if abs(k_new - ks[2]) <= tol * (1.0 + abs(k_new)):
            return k_new
        ks = [ks[1], ks[2], k_new]
        ds = [ds[1], ds[2], val(k_new)]
    raise NoConvergence("Muller iteration did not converge")


def refine_zero(profile: RefractionProfile, k0: complex, tol: float = 1e-12,
                max_iter: int = 60, rtol: float = REFINE_RTOL,
                confirm: bool = True, confirm_halfwidth: float | None = None):
    """Polish a zero seed by Newton iteration on D / dD.

    Returns (k_star, multiplicity).  The multiplicity is checked by the
    winding of a confirmation box around the converged point when ``confirm``
    is set (1 is reported otherwise).  Falls back to Muller's method when the
    k-derivative breaks down.  Raises NoConvergence outside the basin.
    """
    k = complex(k0)
    best: tuple[complex, float] | None = None
    prev_step = math.inf
    converged = False
    for _ in range(max_iter):
        d = eval_D(profile, k, want_dk=True, rtol=rtol)
        rel = d.relative()
        if best is None or rel < best[1]:
            best = (k, rel)
        if d.value.is_zero():
            converged = True
            break
        if d.dk_value.is_zero() or (d.dk_value.logabs - d.scale_logabs) < -40.0:
            k = _muller(lambda kk: eval_D(profile, kk, rtol=rtol).value, k, tol)
            best = (k, eval_D(profile, k, rtol=rtol).relative())
            converged = True
            break
        step = (d.value / d.dk_value).to_complex()
        k = k - step
        s = abs(step)
        if s > 10.0 * (1.0 + abs(k)):
            raise NoConvergence(f"Newton step left the basin (|step| = {s:.3g})")
        if s <= tol * (1.0 + abs(k)):
            converged = True
            break
        # Quadratic convergence broken at the evaluation noise floor: accept
        # the best iterate if the determinant there is genuinely tiny.
        if s >= 0.5 * prev_step and s < 1e-6 * (1.0 + abs(k)):
            if best[1] <= 1e-8:
                k = best[0]
                converged = True
                break
        prev_step = s
    if not converged:
        raise NoConvergence(f"no convergence after {max_iter} Newton iterations from {k0}")
    mult = 1
    if confirm:
        hw = confirm_halfwidth
        if hw is None:
            hw = max(10.0 * tol, 1e-7) * (1.0 + abs(k))
        box = BoxRegion(k.real - hw, k.real + hw, k.imag - hw, k.imag + hw)
        mult = winding_number(
            lambda kk: eval_D(profile, kk, rtol=rtol).value, box, samples0=4)
        if mult < 1:
            raise NoConvergence(
                f"confirmation box around {k} encloses no zero")
    return k, mult


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def _degenerate_probe(profile: RefractionProfile, floor: float) -> bool:
    """True when D is numerically the zero function (n identically 1)."""
    seed = int.from_bytes(hashlib.sha256(
        (profile.content_hash() + ":degenerate").encode()).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    a, b, c, d = _DEGENERATE_BOX
    for _ in range(16):
        k = complex(rng.uniform(a, b), rng.uniform(c, d))
        if eval_D(profile, k, rtol=1e-10).relative() >= floor:
            return False
    return True


_NUDGES = (0, 1, -1, 2, -2, 3, -3, 4)


def _children(box: BoxRegion, attempt: int) -> list[BoxRegion]:
    off = _NUDGES[attempt] * (2.0 ** -5)
    xm = 0.5 * (box.re_min + box.re_max) + off * 0.5 * box.width
    ym = 0.5 * (box.im_min + box.im_max) + off * 0.5 * box.height
    return [BoxRegion(box.re_min, xm, box.im_min, ym),
            BoxRegion(xm, box.re_max, box.im_min, ym),
            BoxRegion(box.re_min, xm, ym, box.im_max),
            BoxRegion(xm, box.re_max, ym, box.im_max)]


def find_zeros(profile: RefractionProfile, region: BoxRegion,
               options: FindOptions | None = None) -> ZeroSet:
    """All zeros of D in the region, winding-verified, symmetry-completed.

    Raises DegenerateProfile when the identically-zero probe trips (n == 1),
    and Unresolved when a multiplicity cluster survives at the minimum box
    size without being countable.
    """
    opt = options or FindOptions()
    if opt.degenerate_check and _degenerate_probe(profile, opt.degenerate_floor):
        raise DegenerateProfile(
            "determinant is numerically identically zero on the probe box")
    cache: dict = {}
    spacing = _phase_spacing(profile)

    def F(k: complex) -> ScaledComplex:
        d = cache.get(k)
        if d is None:
            d = eval_D(profile, k, rtol=opt.phase_rtol)
            cache[k] = d
        return d.value

    def wind(box: BoxRegion) -> int:
        return winding_number(F, box, samples0=opt.samples0,
                              max_depth=opt.max_depth, min_spacing=spacing)

    box = region
    dilations = 0
    while True:
        try:
            total = wind(box)
            break
        except BoundaryZero:
            dilations += 1
            if dilations > opt.max_dilations:
                raise
            box = box.dilated(1.0 + 2.0 ** -5)

    zeros: list[ZeroEntry] = []
    unresolved: list = []
    n_boxes = 0
    stack = [(box, total)]
    while stack:
        b, w = stack.pop()
        n_boxes += 1
        if w == 0:
            continue
        small = max(b.width, b.height) <= opt.min_box
        if w == 1:
            try:
                k_star, mult = refine_zero(
                    profile, b.center, tol=opt.newton_tol, rtol=opt.refine_rtol,
                    confirm=True)
            except NoConvergence:
                k_star, mult = None, 0
            if k_star is not None and b.contains(k_star, pad=opt.cluster_radius):
                res = eval_D(profile, k_star, rtol=opt.refine_rtol).relative()
                zeros.append(ZeroEntry(k_star, mult, res))
                continue
            if small:
                unresolved.append((b, w))
                continue
            # Newton escaped or missed: shrink the box around the zero.
        elif small:
            unresolved.append((b, w))
            continue
        placed = False
        for attempt in range(len(_NUDGES)):
            kids = _children(b, attempt)
            try:
                ws = [wind(c) for c in kids]
            except BoundaryZero:
                continue
            if sum(ws) == w:
                stack.extend((c, cw) for c, cw in zip(kids, ws) if cw)
                placed = True
                break
        if not placed:
            raise Unresolved(
                f"could not split {b} (winding {w}) with admissible boundaries")
    zeros = _postprocess(zeros, box, opt)
    total_mult = sum(z.multiplicity for z in zeros) + sum(w for _, w in unresolved)
    if total_mult != total:
        raise Unresolved(
            f"multiplicity sum {total_mult} disagrees with region winding {total}")
    return ZeroSet(zeros=zeros, region=box, total_winding=total,
                   profile_id=profile.content_hash(), unresolved=unresolved,
                   diagnostics={"evaluations": len(cache), "boxes": n_boxes,
                                "dilations": dilations,
                                "options": asdict(opt)})


def _postprocess(zeros: list[ZeroEntry], region: BoxRegion,
                 opt: FindOptions) -> list[ZeroEntry]:
    """Snap near-real zeros, merge duplicates, close under k -> conj k, -k."""
    snapped = []
    for z in zeros:
        k = z.k
        if abs(k.imag) <= 1e-10 * (1.0 + abs(k.real)):
            k = complex(k.real, 0.0)
        snapped.append(ZeroEntry(k, z.multiplicity, z.residual))
    merged: list[ZeroEntry] = []
    for z in sorted(snapped, key=lambda e: (e.k.real, e.k.imag)):
        dup = None
        for m in merged:
            if abs(m.k - z.k) <= opt.cluster_radius * (1.0 + abs(z.k)):
                dup = m
                break
        if dup is None:
            merged.append(z)
        elif z.residual < dup.residual:
            dup.k, dup.residual = z.k, z.residual
    completed = list(merged)
    for z in merged:
        for mirror in (z.k.conjugate(), -z.k, -z.k.conjugate()):
            if not region.contains(mirror):
                continue
            if all(abs(m.k - mirror) > opt.cluster_radius * (1.0 + abs(mirror))
                   for m in completed):
                completed.append(ZeroEntry(mirror, z.multiplicity, z.residual))
    completed.sort(key=lambda e: (e.k.real, e.k.imag))
    return completed


# ---------------------------------------------------------------------------
# real-axis specialization
# ---------------------------------------------------------------------------


def _optical_radius(profile: RefractionProfile) -> float:
    val, _ = quad(lambda r: math.sqrt(profile.interior(r)[0]), 0.0, 1.0,
                  epsabs=1e-11, epsrel=1e-11, limit=200)
    return val


def _phase_spacing(profile: RefractionProfile) -> float:
    """Boundary sample spacing that cannot alias the determinant's phase.

    The rotation rate of arg D along any line is bounded by the exponential
    type 1 + B plus an order-one polynomial contribution; a quarter period
    of the fastest rotation with a further safety factor is used.
    """
    b = _optical_radius(profile)
    rate = 1.3 * (1.0 + b) + 0.7
    return (math.pi / 2.0) / rate / 1.3


def real_axis_zeros(profile: RefractionProfile, k_max: float, k_min: float = 0.05,
                    strip_check: bool = True, strip_halfwidth: float = 0.1,
                    rtol: float = 1e-10, polish_tol: float = 1e-12,
                    options: FindOptions | None = None) -> list[float]:
    """Real zeros of D in (k_min, k_max], ordered, polished.

    The scan grid keeps its step below pi / (2 (1+B)), half the asymptotic
    zero spacing, and every sign change is bracketed and polished.  When
    ``strip_check`` is set, the count is compared with the winding of the
    strip [k_min, k_max] x [-delta, delta]; a mismatch (a genuinely complex
    zero near the axis, or a missed tangency) emits StripMismatchWarning.

    k_min must be positive: k = 0 is always a four-fold zero of D and may not
    sit on the contour.
    """
    opt = options or FindOptions()
    if not 0 < k_min < k_max:
        raise DomainError("need 0 < k_min < k_max")
    if opt.degenerate_check and _degenerate_probe(profile, opt.degenerate_floor):
        raise DegenerateProfile(
            "determinant is numerically identically zero on the probe box")
    B = _optical_radius(profile)
    step = math.pi / (2.0 * (1.0 + B)) / 1.05
    n_pts = int(math.ceil((k_max + step / 4.0 - k_min) / step)) + 1
    grid = [k_min + i * step for i in range(n_pts)]

    cache: dict = {}

    def dval(k: float) -> DeterminantValue:
        d = cache.get(k)
        if d is None:
            d = eval_D(profile, complex(k, 0.0), rtol=rtol)
            cache[k] = d
        return d

    def signed(k: float, ref_logabs: float) -> float:
        d = dval(k)
        if d.value.is_zero():
            return 0.0
        t = min(max(d.logabs - ref_logabs, -600.0), 600.0)
        m = d.value.mantissa.real
        return math.copysign(math.exp(t), m) if m != 0.0 else 0.0

    roots: list[float] = []
    vals = [dval(k) for k in grid]
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        da, db = vals[i], vals[i + 1]
        sa = da.value.mantissa.real
        sb = db.value.mantissa.real
        if sa == 0.0:
            if not roots or abs(roots[-1] - a) > 1e-9:
                roots.append(a)
            continue
        if sa * sb < 0.0:
            ref = max(da.logabs, db.logabs)
            r = brentq(lambda k: signed(k, ref), a, b, xtol=1e-13, rtol=1e-15)
            roots.append(float(r))
        elif min(da.relative(), db.relative()) < 0.05:
            # Possible tangency or close pair hiding inside one cell.
            sub = [a + (b - a) * j / 8.0 for j in range(9)]
            dsub = [dval(k) for k in sub]
            for j in range(8):
                if dsub[j].value.mantissa.real * dsub[j + 1].value.mantissa.real < 0.0:
                    ref = max(dsub[j].logabs, dsub[j + 1].logabs)
                    r = brentq(lambda k: signed(k, ref), sub[j], sub[j + 1],
                               xtol=1e-13, rtol=1e-15)
                    roots.append(float(r))
    polished = []
    for r in roots:
        try:
            k_star, _ = refine_zero(profile, complex(r, 0.0), tol=polish_tol,
                                    rtol=opt.refine_rtol, confirm=False)
            polished.append(k_star.real if abs(k_star.imag) < 1e-9 else r)
        except NoConvergence:
            polished.append(r)
    polished.sort()

    if strip_check:
        # Put the right boundary on a local |D| maximum to keep zeros off it.
        cands = [k_max - step / 8.0, k_max, k_max + step / 8.0]
        re_hi = max(cands, key=lambda k: dval(k).relative())
        n_bis = sum(1 for r in polished if k_min < r < re_hi)
        wcache: dict = {}

        def Fw(k: complex) -> ScaledComplex:
            d = wcache.get(k)
            if d is None:
                d = eval_D(profile, k, rtol=opt.phase_rtol)
                wcache[k] = d
            return d.value

        strip = BoxRegion(k_min, re_hi, -strip_halfwidth, strip_halfwidth)
        try:
            w = winding_number(Fw, strip, samples0=opt.samples0,
                               max_depth=opt.max_depth,
                               min_spacing=_phase_spacing(profile))
        except BoundaryZero:
            w = None
        if w is not None and w != n_bis:
            warnings.warn(
                f"real-axis bisection found {n_bis} zeros in ({k_min}, {re_hi}) "
                f"but the strip winding is {w}", StripMismatchWarning)
    return [r for r in polished if r <= k_max + 1e-12]


def zero_set_from_real_axis(profile: RefractionProfile, k_max: float,
                            k_min: float = 0.05, **kwargs) -> ZeroSet:
    """Package the real-axis zeros as a ZeroSet over a thin strip region."""
    delta = kwargs.get("strip_halfwidth", 0.1)
    roots = real_axis_zeros(profile, k_max, k_min=k_min, **kwargs)
    zeros = [ZeroEntry(complex(r, 0.0), 1, 0.0) for r in roots]
    region = BoxRegion(k_min, k_max, -delta, delta)
    return ZeroSet(zeros=zeros, region=region, total_winding=len(zeros),
                   profile_id=profile.content_hash(),
                   diagnostics={"axis_specialization": True})
