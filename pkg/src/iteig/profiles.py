"""Refraction profiles n(r) and the Liouville change of variables.

The physical input is a radial index of refraction n(r) > 0 on the unit ball,
equal to 1 outside.  Only closed-form profile kinds are supported (constant,
polynomial in r, smooth bump) so that n' and n'' are exact; the transformed
potential consumes two derivatives and interpolation noise there would leak
straight into the Schroedinger-side shooting.

The Liouville transform is

    xi(r) = int_0^r sqrt(n(rho)) d rho,        B = xi(1),
    p(xi) = n''/(4 n^2) - (5/16) n'^2/n^3 + 2/(r^2 n),   q(xi) = p - 2/xi^2,

with everything evaluated at r = r(xi).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, InvalidProfile, QuadratureFailure

_POSITIVITY_GRID = 2001
_SMOOTHNESS_TOL = 1e-12

# 5-point Gauss-Legendre rule on [-1, 1].
_GL_NODES = np.array([
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
])
_GL_WEIGHTS = np.array([
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
])


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    smoothness_warning: bool
    boundary_gaps: dict
    min_n: float


class RefractionProfile:
    """Base class; subclasses provide exact (n, n', n'') for any r >= 0."""

    kind = "abstract"

    def _raw(self, r: float) -> tuple[float, float, float]:
        raise NotImplementedError

    def interior(self, r: float) -> tuple[float, float, float]:
        """Profile values extended by its own closed form (used by the IVP)."""
        return self._raw(r)

    def evaluate(self, r: float) -> tuple[float, float, float]:
        """(n, n', n'') with the vacuum convention n = 1 for r >= 1."""
        if r < 0:
            raise DomainError(f"r must be nonnegative, got {r}")
        if r >= 1.0:
            return (1.0, 0.0, 0.0)
        return self._raw(r)

    def n(self, r: float) -> float:
        return self.evaluate(r)[0]

    def taylor_coeffs(self) -> np.ndarray:
        """Power-series coefficients of n at r = 0 (exact for all kinds)."""
        raise NotImplementedError

    def sup_sqrt_n(self) -> float:
        rr = np.linspace(0.0, 1.0, 257)
        vals = [self._raw(float(r))[0] for r in rr]
        return math.sqrt(max(vals))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        raise NotImplementedError

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def _check_positivity(self):
        rr = np.linspace(0.0, 1.0, _POSITIVITY_GRID)
        vals = np.array([self._raw(float(r))[0] for r in rr])
        if not np.all(vals > 0.0):
            bad = rr[int(np.argmin(vals))]
            raise InvalidProfile(
                f"n(r) must be positive on [0,1]; n({bad:.4f}) = {vals.min():.6g}")

    def _rk_params(self) -> tuple[int, float, np.ndarray]:
        """(kind code, scalar parameter, coefficient array) for the ODE core."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(RefractionProfile):
    value: float
    kind = "constant"

    def __post_init__(self):
        if not (self.value > 0):
            raise InvalidProfile(f"constant index must be positive, got {self.value}")

    def _raw(self, r):
        return (self.value, 0.0, 0.0)

    def taylor_coeffs(self):
        return np.array([self.value])

    def sup_sqrt_n(self):
        return math.sqrt(self.value)

    def to_dict(self):
        return {"kind": "constant", "value": float(self.value)}

    def _rk_params(self):
        return 0, float(self.value), np.zeros(1)


@dataclass(frozen=True)
class PolynomialProfile(RefractionProfile):
    coeffs: tuple  # n(r) = sum coeffs[i] * r**i on [0, 1)
    kind = "poly"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise InvalidProfile("polynomial profile needs at least one coefficient")
        self._check_positivity()

    def _raw(self, r):
        n = np0 = npp = 0.0
        for c in reversed(self.coeffs):
            npp = npp * r + 2.0 * np0
            np0 = np0 * r + n
            n = n * r + c
        return (n, np0, npp)

    def taylor_coeffs(self):
        return np.array(self.coeffs, dtype=float)

    def to_dict(self):
        return {"kind": "poly", "coeffs": [float(c) for c in self.coeffs]}

    def _rk_params(self):
        return 1, 0.0, np.array(self.coeffs, dtype=float)


@dataclass(frozen=True)
class SmoothBumpProfile(RefractionProfile):
    """n(r) = 1 + c (1 - r^2)^3; matches the vacuum with two derivatives."""

    c: float
    kind = "smooth_bump"

    def __post_init__(self):
        if not (1.0 + self.c > 0):
            raise InvalidProfile(f"bump amplitude gives n(0) = {1 + self.c} <= 0")
        self._check_positivity()

    def _raw(self, r):
        u = 1.0 - r * r
        n = 1.0 + self.c * u ** 3
        np0 = -6.0 * self.c * r * u * u
        npp = -6.0 * self.c * u * (1.0 - 5.0 * r * r)
        return (n, np0, npp)

    def taylor_coeffs(self):
        c = self.c
        return np.array([1.0 + c, 0.0, -3.0 * c, 0.0, 3.0 * c, 0.0, -c])

    def to_dict(self):
        return {"kind": "smooth_bump", "c": float(self.c)}

    def _rk_params(self):
        return 2, float(self.c), np.zeros(1)


def profile_from_dict(data: dict) -> RefractionProfile:
    if not isinstance(data, dict) or "kind" not in data:
        raise InvalidProfile(f"profile spec must be an object with a 'kind': {data!r}")
    kind = data["kind"]
    try:
        if kind == "constant":
            return ConstantProfile(float(data["value"]))
        if kind == "poly":
            return PolynomialProfile(tuple(data["coeffs"]))
        if kind == "smooth_bump":
            return SmoothBumpProfile(float(data["c"]))
    except KeyError as exc:
        raise InvalidProfile(f"profile spec missing field {exc}") from exc
    raise InvalidProfile(f"unknown profile kind {kind!r}")


def validate(profile: RefractionProfile) -> ValidationReport:
    """Positivity plus boundary-smoothness flags at r = 1.

    A jump at the boundary (constant profiles) is only a warning: the radial
    IVP reads n on [0, 1] and stays well-posed, but the vacuum matching is no
    longer C^2 and transform-side identities assuming n(1)=1 degrade.
    """
    rr = np.linspace(0.0, 1.0, _POSITIVITY_GRID)
    vals = np.array([profile.interior(float(r))[0] for r in rr])
    if not np.all(vals > 0.0):
        bad = rr[int(np.argmin(vals))]
        raise InvalidProfile(
            f"n(r) must be positive on [0,1]; n({bad:.4f}) = {vals.min():.6g}")
    n1, np1, npp1 = profile.interior(1.0)
    gaps = {"n": abs(n1 - 1.0), "n_prime": abs(np1), "n_second": abs(npp1)}
    warn = any(g > _SMOOTHNESS_TOL for g in gaps.values())
    return ValidationReport(valid=True, smoothness_warning=warn,
                            boundary_gaps=gaps, min_n=float(vals.min()))


# ---------------------------------------------------------------------------
# Liouville map
# ---------------------------------------------------------------------------


def _cumulative_sqrt_n(profile: RefractionProfile, n_intervals: int):
    """xi at n_intervals+1 uniform r nodes via per-interval 5-point Gauss."""
    r_nodes = np.linspace(0.0, 1.0, n_intervals + 1)
    h = 1.0 / n_intervals
    mid = (r_nodes[:-1] + r_nodes[1:]) * 0.5
    # evaluation points, shape (n_intervals, 5)
    pts = mid[:, None] + (h * 0.5) * _GL_NODES[None, :]
    vals = np.empty_like(pts)
    flat = pts.ravel()
    out = np.empty_like(flat)
    for i, r in enumerate(flat):
        out[i] = math.sqrt(profile.interior(float(r))[0])
    vals = out.reshape(pts.shape)
    seg = (h * 0.5) * vals @ _GL_WEIGHTS
    xi = np.concatenate(([0.0], np.cumsum(seg)))
    return r_nodes, xi


class LiouvilleMap:
    """Tabulated xi(r) on [0,1] and its inverse r(xi) on [0,B].

    Monotone cubic (PCHIP) interpolants over the quadrature nodes provide the
    public map; a dense uniform Hermite table drives the hot inversion path
    used by the transformed-equation solver; ``r_of_xi`` optionally finishes
    with a Newton polish on int_0^r sqrt(n) = xi.
    """

    def __init__(self, profile: RefractionProfile, r_nodes, xi_nodes, quad_tol):
        self.profile = profile
        self.r_nodes = r_nodes
        self.xi_nodes = xi_nodes
        self.quad_tol = quad_tol
        self.B = float(xi_nodes[-1])
        self._xi_of_r = PchipInterpolator(r_nodes, xi_nodes, extrapolate=False)
        self._r_of_xi = PchipInterpolator(xi_nodes, r_nodes, extrapolate=False)
        self._build_fast_tables()

    def _build_fast_tables(self, m: int = 4096):
        xi_u = np.linspace(0.0, self.B, m + 1)
        r_seed = self._r_of_xi(xi_u)
        r_seed[0], r_seed[-1] = 0.0, 1.0
        r_u = r_seed.copy()
        # Two vectorized Newton steps: residual from the tabulated cumulative
        # integral plus a one-interval Gauss correction, slope sqrt(n).
        for _ in range(2):
            xi_at_r = self._xi_exact(r_u)
            sq = np.array([math.sqrt(self.profile.interior(float(r))[0]) for r in r_u])
            r_u = np.clip(r_u - (xi_at_r - xi_u) / sq, 0.0, 1.0)
        r_u[0], r_u[-1] = 0.0, 1.0
        sq = np.array([math.sqrt(self.profile.interior(float(r))[0]) for r in r_u])
        self._xi_u = xi_u
        self._r_u = r_u
        self._drdxi_u = 1.0 / sq
        self._h_u = self.B / m

    def _xi_exact(self, r):
        """xi(r) from the node table plus a 5-point Gauss tail; vectorized."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        idx = np.clip(np.searchsorted(self.r_nodes, r, side="right") - 1,
                      0, len(self.r_nodes) - 2)
        r0 = self.r_nodes[idx]
        base = self.xi_nodes[idx]
        half = (r - r0) * 0.5
        mid = (r + r0) * 0.5
        pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        out = np.empty(pts.shape)
        flat = pts.ravel()
        buf = np.empty_like(flat)
        for i, rv in enumerate(flat):
            buf[i] = math.sqrt(self.profile.interior(float(rv))[0])
        out = buf.reshape(pts.shape)
        return base + half * (out @ _GL_WEIGHTS)

    def xi_of_r(self, r: float) -> float:
        if not 0.0 <= r <= 1.0:
            raise DomainError(f"r = {r} outside [0, 1]")
        return float(self._xi_exact(r)[0])

    def r_of_xi(self, xi: float, polish: bool = True) -> float:
        if not 0.0 <= xi <= self.B * (1.0 + 1e-12):
            raise DomainError(f"xi = {xi} outside [0, B] with B = {self.B}")
        xi = min(xi, self.B)
        if xi == 0.0:
            return 0.0
        r = self._r_fast(xi)
        if polish:
            for _ in range(2):
                res = float(self._xi_exact(r)[0]) - xi
                sq = math.sqrt(self.profile.interior(r)[0])
                r = min(max(r - res / sq, 0.0), 1.0)
        return r

    def _r_fast(self, xi: float) -> float:
        """Hermite interpolation on the uniform table; Newton fallback near 0."""
        h = self._h_u
        if xi < h:
            # Analytic seed r = xi / sqrt(n(0)) plus two Newton polish steps.
            r = xi / math.sqrt(self.profile.interior(0.0)[0])
            for _ in range(2):
                res = float(self._xi_exact(r)[0]) - xi
                sq = math.sqrt(self.profile.interior(r)[0])
                r = min(max(r - res / sq, 0.0), 1.0)
            return r
        j = min(int(xi / h), len(self._xi_u) - 2)
        t = (xi - self._xi_u[j]) / h
        r0, r1 = self._r_u[j], self._r_u[j + 1]
        d0, d1 = self._drdxi_u[j] * h, self._drdxi_u[j + 1] * h
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        return h00 * r0 + h10 * d0 + h01 * r1 + h11 * d1


def compute_liouville(profile: RefractionProfile, quad_tol: float = 1e-12) -> LiouvilleMap:
    """Tabulate xi(r) and B = int_0^1 sqrt(n) by composite Gauss quadrature.

    The node count doubles until two successive refinements of B agree to
    quad_tol; raises QuadratureFailure if the budget is exhausted.
    """
    if not quad_tol > 0:
        raise DomainError("quad_tol must be positive")
    n_int = 512
    r_nodes, xi_nodes = _cumulative_sqrt_n(profile, n_int)
    while True:
        n2 = n_int * 2
        r2, xi2 = _cumulative_sqrt_n(profile, n2)
        if abs(xi2[-1] - xi_nodes[-1]) <= quad_tol:
            return LiouvilleMap(profile, r2, xi2, quad_tol)
        n_int, r_nodes, xi_nodes = n2, r2, xi2
        if n_int > 2 ** 17:
            raise QuadratureFailure(
                f"B did not converge to {quad_tol:g} within {n_int} intervals")


def potential(profile: RefractionProfile, lmap: LiouvilleMap, xi: float) -> tuple[float, float]:
    """(p(xi), q(xi)) of the transformed equation; xi must lie in (0, B]."""
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    if xi > lmap.B * (1.0 + 1e-12):
        raise DomainError(f"xi = {xi} exceeds B = {lmap.B}")
    r = lmap.r_of_xi(min(xi, lmap.B))
    n, np1, npp = profile.interior(r)
    p = npp / (4.0 * n * n) - (5.0 / 16.0) * np1 * np1 / n ** 3 + 2.0 / (r * r * n)
    return p, p - 2.0 / (xi * xi)


def potential_callable(profile: RefractionProfile, lmap: LiouvilleMap) -> Callable[[float], float]:
    """Fast p(xi) closure for shooting; uses the Hermite inversion table."""
    interior = profile.interior

    def p_of_xi(xi: float) -> float:
        r = lmap._r_fast(xi)
        n, np1, npp = interior(r)
        return npp / (4.0 * n * n) - 0.3125 * np1 * np1 / (n * n * n) + 2.0 / (r * r * n)

    return p_of_xi


def potential_norms(profile: RefractionProfile, lmap: LiouvilleMap,
                    n_grid: int = 2001) -> dict:
    """sup |q| and int |q| on (0, B]; both reported since the growth-bound
    norm convention is not pinned down and nothing downstream relies on it."""
    xi = np.linspace(lmap.B * 1e-4, lmap.B, n_grid)
    q = np.array([potential(profile, lmap, float(x))[1] for x in xi])
    return {
        "sup_q": float(np.max(np.abs(q))),
        "l1_q": float(np.trapezoid(np.abs(q), xi)),
    }
