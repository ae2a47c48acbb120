"""Verifiable steps of the uniqueness pipeline.

From a wedge of eigenvalues the optical radius B is recovered by inverting
the density law delta = (1 + B)/pi.  Two spectra are compared by greedy
nearest-neighbor matching plus the B estimates; the verdict is three-way
because finite spectra can witness a difference but never certify equality.
The Dirichlet / Dirichlet-Neumann eigenvalues of the transformed problem on
(0, B) come from sign-change bisection of the shooting boundary value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.optimize import brentq

from .cartwright import DensityEstimate, Wedge, wedge_density
from .errors import DomainError, InsufficientData
from .profiles import RefractionProfile
from .radial import RTOL_DEFAULT, solve_y, solve_z
from .scaled import ScaledComplex
from .zeros import BoxRegion, ZeroEntry, ZeroSet

PAIR_TOL_DEFAULT = 1e-6


@dataclass
class Spectrum:
    """Eigenvalues inside one wedge, sorted by modulus."""

    eigenvalues: list
    wedge: Wedge
    r_max: float

    def __post_init__(self):
        eigs = [complex(e) for e in self.eigenvalues]
        for e in eigs:
            if abs(e) > self.r_max * (1.0 + 1e-9):
                raise DomainError(f"eigenvalue {e} beyond r_max = {self.r_max}")
            if not self.wedge.contains(e):
                raise DomainError(f"eigenvalue {e} outside the wedge")
        self.eigenvalues = sorted(eigs, key=abs)

    @classmethod
    def from_zero_set(cls, zeros: ZeroSet, wedge: Wedge, r_max: float) -> "Spectrum":
        eigs = []
        for z in zeros.zeros:
            if wedge.contains(z.k) and abs(z.k) <= r_max:
                eigs.extend([z.k] * z.multiplicity)
        return cls(eigenvalues=eigs, wedge=wedge, r_max=r_max)

    def to_dict(self) -> dict:
        return {
            "wedge": self.wedge.to_dict(),
            "r_max": self.r_max,
            "eigenvalues": [{"re": e.real, "im": e.imag} for e in self.eigenvalues],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Spectrum":
        wedge = Wedge(float(d["wedge"]["theta_min"]), float(d["wedge"]["theta_max"]))
        eigs = [complex(e["re"], e["im"]) for e in d["eigenvalues"]]
        return cls(eigenvalues=eigs, wedge=wedge, r_max=float(d["r_max"]))

    def _as_zero_set(self) -> ZeroSet:
        pad = 1e-9 * (1.0 + self.r_max)
        region = BoxRegion(-self.r_max - pad, self.r_max + pad,
                           -self.r_max - pad, self.r_max + pad)
        return ZeroSet(zeros=[ZeroEntry(e, 1, 0.0) for e in self.eigenvalues],
                       region=region, total_winding=len(self.eigenvalues),
                       profile_id="spectrum")


@dataclass
class UniquenessVerdict:
    same_B: bool
    B1_hat: float
    B2_hat: float
    matched_pairs: int
    max_pair_distance: float
    conclusion: str  # consistent_with_equal | distinguished | inconclusive


def recover_B(spectrum: Spectrum, fit_window: tuple) -> tuple[float, dict]:
    """B_hat = pi * delta_hat - 1 from the wedge density fit.

    Requires at least 20 eigenvalues inside the fit window.
    """
    r_lo, r_hi = float(fit_window[0]), float(fit_window[1])
    n_window = sum(1 for e in spectrum.eigenvalues if r_lo <= abs(e) <= r_hi)
    if n_window < 20:
        raise InsufficientData(
            f"{n_window} eigenvalues in [{r_lo}, {r_hi}]; need >= 20")
    est: DensityEstimate = wedge_density(spectrum._as_zero_set(), spectrum.wedge,
                                         (r_lo, r_hi))
    b_hat = math.pi * est.delta_hat - 1.0
    diagnostics = {
        "delta_hat": est.delta_hat,
        "residual": est.residual,
        "stderr": est.stderr,
        "b_stderr": math.pi * est.stderr,
        "count_in_window": n_window,
        "fit_window": [r_lo, r_hi],
    }
    return b_hat, diagnostics


def compare_spectra(s1: Spectrum, s2: Spectrum,
                    pair_tol: float = PAIR_TOL_DEFAULT) -> UniquenessVerdict:
    """Greedy nearest-neighbor matching plus density-based B comparison.

    ``pair_tol`` is relative: eigenvalues pair when closer than
    pair_tol * (1 + |k|); an eigenvalue farther than ten times that from
    everything on the other side is a quantitative witness and forces the
    "distinguished" verdict.  Equality is never certified, only consistency.
    """
    if abs(s1.wedge.theta_min - s2.wedge.theta_min) > 1e-12 or \
       abs(s1.wedge.theta_max - s2.wedge.theta_max) > 1e-12:
        raise DomainError("spectra must share the same wedge")
    r_cmp = min(s1.r_max, s2.r_max)
    e1 = [e for e in s1.eigenvalues if abs(e) <= r_cmp]
    e2 = [e for e in s2.eigenvalues if abs(e) <= r_cmp]
    free2 = list(e2)
    matched = 0
    max_dist = 0.0
    witnesses = 0
    for e in e1:
        if not free2:
            witnesses += 1
            continue
        j = min(range(len(free2)), key=lambda i: abs(free2[i] - e))
        d = abs(free2[j] - e)
        if d <= pair_tol * (1.0 + abs(e)):
            matched += 1
            max_dist = max(max_dist, d)
            free2.pop(j)
        elif d > 10.0 * pair_tol * (1.0 + abs(e)):
            witnesses += 1
    witnesses += sum(1 for e in free2
                     if not e1 or min(abs(e - x) for x in e1) > 10.0 * pair_tol * (1.0 + abs(e)))
    all_matched = matched == len(e1) and not free2

    def _b(s: Spectrum) -> tuple[float, float]:
        hi = min(s.r_max, r_cmp)
        lo = 0.25 * hi
        try:
            b, diag = recover_B(s, (lo, hi))
            return b, diag["b_stderr"]
        except InsufficientData:
            return math.nan, math.inf

    b1, se1 = _b(s1)
    b2, se2 = _b(s2)
    b_known = not (math.isnan(b1) or math.isnan(b2))
    combined = 3.0 * math.hypot(se1, se2) + 1e-9 if b_known else math.inf
    same_b = b_known and abs(b1 - b2) <= combined
    if witnesses > 0 or (b_known and abs(b1 - b2) > combined):
        conclusion = "distinguished"
    elif all_matched and same_b:
        conclusion = "consistent_with_equal"
    else:
        conclusion = "inconclusive"
    return UniquenessVerdict(same_B=bool(same_b), B1_hat=b1, B2_hat=b2,
                             matched_pairs=matched, max_pair_distance=max_dist,
                             conclusion=conclusion)


def crosscheck_F(p1: RefractionProfile, p2: RefractionProfile,
                 k_list: Sequence[complex],
                 rtol: float = RTOL_DEFAULT) -> list:
    """Rows (k, F(k), scale) with F = y1(1;k) - y2(1;k).

    ``scale`` is the larger boundary-value magnitude in log form, so
    exp(F.logabs - scale) is the meaningful relative size.  F vanishes
    identically when the profiles agree; at a shared eigenvalue with common
    boundary data it vanishes by the matching conditions (report-only).
    """
    rows = []
    for k in k_list:
        a = solve_y(p1, complex(k), rtol=rtol)
        b = solve_y(p2, complex(k), rtol=rtol)
        f = a.y1 - b.y1
        scale = max(a.y1.logabs, b.y1.logabs)
        rows.append((complex(k), f, scale))
    return rows


def sl_eigenvalues(p_potential: Callable[[float], float], B: float, mode: str,
                   k_max: float, k_min: float = 1e-3,
                   rtol: float = RTOL_DEFAULT, xtol: float = 1e-10) -> list:
    """Real eigenvalues k of the transformed problem on (0, B) up to k_max.

    mode "dirichlet" roots z(B;k); mode "dirichlet_neumann" roots z'(B;k).
    Sign-change bisection on a grid finer than half the asymptotic spacing
    pi/B, then brentq polish to ``xtol``.
    """
    if mode not in ("dirichlet", "dirichlet_neumann"):
        raise DomainError(f"unknown mode {mode!r}")
    if not B > 0:
        raise DomainError("B must be positive")
    pick = 0 if mode == "dirichlet" else 1

    def shoot(k: float) -> float:
        pair = solve_z(p_potential, B, complex(k, 0.0), rtol=rtol)
        v = pair[pick]
        if v.is_zero():
            return 0.0
        return math.copysign(math.exp(min(v.logabs, 600.0)), v.mantissa.real)

    step = math.pi / (2.0 * B) / 1.05
    n = int(math.ceil((k_max - k_min) / step)) + 1
    grid = [k_min + i * (k_max - k_min) / (n - 1) for i in range(n)]
    vals = [shoot(k) for k in grid]
    roots = []
    for i in range(n - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(float(brentq(shoot, grid[i], grid[i + 1], xtol=xtol)))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return sorted(roots)
