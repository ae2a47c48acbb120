import json
import math

import numpy as np
import pytest

from iteig.errors import DomainError, InvalidProfile
from iteig.profiles import (ConstantProfile, PolynomialProfile,
                            SmoothBumpProfile, compute_liouville, potential,
                            potential_norms, profile_from_dict, validate)

from _oracles import B_BUMP3, simpson


def test_constant_evaluate():
    p = ConstantProfile(4.0)
    assert p.evaluate(0.5) == (4.0, 0.0, 0.0)
    assert p.evaluate(1.0) == (1.0, 0.0, 0.0)   # vacuum from the boundary on
    assert p.evaluate(2.3) == (1.0, 0.0, 0.0)
    assert p.interior(1.0) == (4.0, 0.0, 0.0)   # closed-form extension


def test_smooth_bump_boundary_and_origin():
    p = SmoothBumpProfile(3.0)
    assert p.evaluate(1.0) == (1.0, 0.0, 0.0)
    n, np_, npp = p.evaluate(0.0)
    assert n == pytest.approx(4.0)
    assert np_ == 0.0
    # second derivative at the origin from d^2/dr^2 [1 + 3(1 - r^2)^3] = -18
    assert npp == pytest.approx(-18.0)


def test_evaluate_rejects_negative_radius():
    with pytest.raises(DomainError):
        ConstantProfile(2.0).evaluate(-0.1)


@pytest.mark.parametrize("prof", [
    PolynomialProfile((2.0, 0.5, -0.5)),
    SmoothBumpProfile(3.0),
    PolynomialProfile((1.5, 0.0, 1.0, -0.7)),
])
def test_derivatives_match_finite_differences(prof):
    h = 1e-5
    for r in np.linspace(0.05, 0.9, 9):
        n_m, _, _ = prof.interior(r - h)
        n_p, _, _ = prof.interior(r + h)
        n, np_, npp = prof.interior(r)
        assert (n_p - n_m) / (2 * h) == pytest.approx(np_, abs=1e-7 * (1 + abs(np_)))
        assert (n_p - 2 * n + n_m) / h ** 2 == pytest.approx(npp, abs=1e-4)


def test_positivity_rejected():
    with pytest.raises(InvalidProfile):
        PolynomialProfile((1.0, 0.0, -2.2))   # n(0.7) = 1 - 2.2*0.49 < 0
    with pytest.raises(InvalidProfile):
        ConstantProfile(-1.0)
    with pytest.raises(InvalidProfile):
        SmoothBumpProfile(-1.2)


def test_validate_flags():
    rep = validate(ConstantProfile(4.0))
    assert rep.valid and rep.smoothness_warning
    assert rep.boundary_gaps["n"] == pytest.approx(3.0)
    rep = validate(SmoothBumpProfile(3.0))
    assert rep.valid and not rep.smoothness_warning


def test_liouville_constant_maps():
    m4 = compute_liouville(ConstantProfile(4.0))
    assert m4.B == pytest.approx(2.0, abs=1e-12)
    m1 = compute_liouville(ConstantProfile(1.0))
    assert m1.B == pytest.approx(1.0, abs=1e-13)
    for r in (0.0, 0.3, 0.77, 1.0):
        assert m1.xi_of_r(r) == pytest.approx(r, abs=1e-12)


def test_liouville_bump_matches_simpson_oracle():
    lmap = compute_liouville(SmoothBumpProfile(3.0), quad_tol=1e-12)
    oracle = simpson(lambda r: math.sqrt(1 + 3 * (1 - r * r) ** 3), 0.0, 1.0)
    assert oracle == pytest.approx(B_BUMP3, abs=1e-12)
    assert lmap.B == pytest.approx(oracle, abs=1e-10)


def test_map_slope_is_sqrt_n():
    prof = SmoothBumpProfile(3.0)
    lmap = compute_liouville(prof)
    h = 1e-6
    for r in (0.1, 0.45, 0.8):
        slope = (lmap.xi_of_r(r + h) - lmap.xi_of_r(r - h)) / (2 * h)
        assert slope == pytest.approx(math.sqrt(prof.interior(r)[0]), rel=1e-8)


def test_map_round_trip():
    lmap = compute_liouville(SmoothBumpProfile(3.0))
    for r in np.linspace(0.0, 1.0, 23):
        assert lmap.r_of_xi(lmap.xi_of_r(float(r))) == pytest.approx(float(r), abs=1e-11)


def test_monotone_b():
    bs = [compute_liouville(ConstantProfile(v)).B for v in (1.0, 2.0, 4.0, 9.0)]
    assert bs == sorted(bs)
    assert bs == pytest.approx([1.0, math.sqrt(2), 2.0, 3.0], abs=1e-11)


def test_potential_constant_examples():
    p4 = ConstantProfile(4.0)
    m4 = compute_liouville(p4)
    p, q = potential(p4, m4, 1.0)
    assert p == pytest.approx(2.0, abs=1e-10)
    assert q == pytest.approx(0.0, abs=1e-10)
    p1 = ConstantProfile(1.0)
    m1 = compute_liouville(p1)
    p, q = potential(p1, m1, 0.5)
    assert p == pytest.approx(8.0, abs=1e-10)
    assert q == pytest.approx(0.0, abs=1e-10)


def test_q_vanishes_for_constants_everywhere():
    p9 = ConstantProfile(9.0)
    m9 = compute_liouville(p9)
    for xi in np.linspace(0.05, m9.B, 31):
        p, q = potential(p9, m9, float(xi))
        assert abs(q) <= 1e-10 * max(1.0, p)


def test_potential_bump_against_symbolic_oracle():
    prof = SmoothBumpProfile(3.0)
    lmap = compute_liouville(prof)
    xi = lmap.B / 2
    # independent inversion: bisect Simpson xi(r) = B/2
    from scipy.optimize import brentq
    f = lambda r: simpson(lambda s: math.sqrt(1 + 3 * (1 - s * s) ** 3), 0.0, r, 2000) - xi
    r = brentq(f, 0.01, 0.999, xtol=1e-13)
    c = 3.0
    u = 1 - r * r
    n = 1 + c * u ** 3
    np_ = -6 * c * r * u * u
    npp = -6 * c * u * (1 - 5 * r * r)
    p_oracle = npp / (4 * n * n) - (5.0 / 16.0) * np_ ** 2 / n ** 3 + 2.0 / (r * r * n)
    q_oracle = p_oracle - 2.0 / (xi * xi)
    p_got, q_got = potential(prof, lmap, xi)
    assert p_got == pytest.approx(p_oracle, rel=1e-9)
    assert q_got == pytest.approx(q_oracle, rel=1e-7, abs=1e-9)
    assert abs(q_got) < 50.0


def test_potential_domain_errors():
    prof = ConstantProfile(4.0)
    lmap = compute_liouville(prof)
    with pytest.raises(DomainError):
        potential(prof, lmap, 0.0)
    with pytest.raises(DomainError):
        potential(prof, lmap, lmap.B + 0.1)


def test_potential_norms_reports_both():
    prof = SmoothBumpProfile(3.0)
    norms = potential_norms(prof, compute_liouville(prof))
    assert set(norms) == {"sup_q", "l1_q"}
    assert norms["sup_q"] > 0 and norms["l1_q"] > 0


def test_json_round_trip_and_hash():
    specs = ['{"kind":"constant","value":4.0}',
             '{"kind":"poly","coeffs":[2.0,0.0,1.0]}',
             '{"kind":"smooth_bump","c":3.0}']
    for s in specs:
        prof = profile_from_dict(json.loads(s))
        again = profile_from_dict(json.loads(prof.canonical_json()))
        assert again.to_dict() == prof.to_dict()
        assert again.content_hash() == prof.content_hash()
    assert profile_from_dict(json.loads(specs[0])).content_hash() != \
        profile_from_dict(json.loads(specs[2])).content_hash()


def test_profile_from_dict_errors():
    with pytest.raises(InvalidProfile):
        profile_from_dict({"kind": "mystery"})
    with pytest.raises(InvalidProfile):
        profile_from_dict({"value": 4.0})
    with pytest.raises(InvalidProfile):
        profile_from_dict({"kind": "constant"})
