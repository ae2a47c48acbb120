import cmath
import math
import random

import numpy as np
import pytest

from iteig.determinant import eval_D, eval_scriptD, null_pair
from iteig.errors import DomainError, NotAnEigenvalue
from iteig.profiles import ConstantProfile, SmoothBumpProfile
from iteig.scaled import rel_diff

from _oracles import constant_D


def test_vacuum_determinant_vanishes():
    # n = 1 makes interior and exterior solutions identical
    p = ConstantProfile(1.0)
    rng = random.Random(2)
    for _ in range(25):
        k = complex(rng.uniform(0.5, 30), rng.uniform(-3, 3))
        assert eval_D(p, k).relative() <= 1e-9


@pytest.mark.parametrize("n0", [2.0, 4.0, 9.0])
def test_matches_closed_form_on_real_axis(n0):
    p = ConstantProfile(n0)
    for k in np.linspace(0.5, 10.0, 12):
        got = eval_D(p, complex(k))
        assert rel_diff(got.value, constant_D(n0, complex(k))) < 1e-7


def test_matches_closed_form_off_axis():
    p = ConstantProfile(4.0)
    rng = random.Random(4)
    for _ in range(15):
        k = complex(rng.uniform(0.3, 20), rng.uniform(-3, 3))
        got = eval_D(p, k)
        assert rel_diff(got.value, constant_D(4.0, k)) < 1e-7


def test_k_zero_limit_is_finite_zero():
    d = eval_D(SmoothBumpProfile(3.0), 0.0)
    assert d.value.is_zero()
    assert d.relative() == 0.0


def test_dk_value_matches_finite_difference():
    p = ConstantProfile(4.0)
    k = 2.5 + 0.4j
    h = 1e-6
    d = eval_D(p, k, want_dk=True)
    fd = (eval_D(p, k + h).value.to_complex()
          - eval_D(p, k - h).value.to_complex()) / (2 * h)
    assert d.dk_value.to_complex() == pytest.approx(fd, rel=1e-6)


def test_scriptd_is_exact_rescale():
    p = ConstantProfile(4.0)
    d = eval_D(p, 1.0)
    s = eval_scriptD(p, 1.0)
    assert rel_diff(s.value, d.value * (1.0 / 3.0)) < 1e-12
    k = 2.0 - 1.5j
    d = eval_D(p, k)
    s = eval_scriptD(p, k)
    assert rel_diff(s.value, d.value * (k ** 4 / 3.0)) < 1e-12


def test_scriptd_rejects_origin():
    with pytest.raises(DomainError):
        eval_scriptD(ConstantProfile(4.0), 0.0)


def test_scriptd_ratio_to_factored_asymptote():
    # Large real k, constant n = 4: the closed form factors as
    # k^4 D / 3 = -(k^3/24)(sin 3k + 3 sin k) + O(k^2); the ratio approaches 1
    # away from the factor's zeros.
    p = ConstantProfile(4.0)
    for k in (30.4, 61.8, 91.1):
        lead = -(k ** 3 / 24.0) * (math.sin(3 * k) + 3 * math.sin(k))
        if abs(math.sin(3 * k) + 3 * math.sin(k)) < 0.5:
            continue
        got = eval_scriptD(p, k).value.to_complex().real
        assert got / lead == pytest.approx(1.0, abs=0.2)


def test_evenness_and_conjugation():
    p = SmoothBumpProfile(3.0)
    rng = random.Random(6)
    for _ in range(20):
        k = complex(rng.uniform(0.2, 25), rng.uniform(0.02, 2.8))
        d = eval_D(p, k).value
        dm = eval_D(p, -k).value
        dc = eval_D(p, k.conjugate()).value
        assert rel_diff(dm, d) <= 1e-9
        assert rel_diff(dc, d.conjugate()) <= 1e-9


def test_real_on_real_axis():
    p = ConstantProfile(2.0)
    for k in np.linspace(0.3, 25, 9):
        d = eval_D(p, complex(k)).value
        assert abs(d.mantissa.imag) <= 1e-9 * abs(d.mantissa)


def test_exponential_type_envelope():
    # ln|D(iy)|/y climbs monotonically to 1 + B, within 2% at y = 200
    p = ConstantProfile(4.0)
    es = [eval_D(p, complex(0.0, y)).logabs / y for y in (50.0, 100.0, 200.0)]
    assert es[0] < es[1] < es[2]
    assert abs(es[2] / 3.0 - 1.0) <= 0.02


def test_null_pair_at_eigenvalue():
    # k = pi is an exact zero of the constant-4 determinant
    p = ConstantProfile(4.0)
    npair = null_pair(p, math.pi)
    assert abs(npair.a) ** 2 + abs(npair.b) ** 2 == pytest.approx(1.0, rel=1e-12)
    assert npair.residual <= 1e-8
    assert npair.a.imag == pytest.approx(0.0, abs=1e-12)
    assert npair.a.real >= 0.0


def test_null_pair_rejects_non_eigenvalue():
    with pytest.raises(NotAnEigenvalue):
        null_pair(ConstantProfile(4.0), 2.0)


def test_null_pair_satisfies_matching_rows():
    # b y(1) - a j1(k) = 0 and b (y'(1) - y(1)) - a k j1'(k) = 0
    from _oracles import j1_closed, j1p_closed, constant_y, constant_yprime
    k = math.pi
    npair = null_pair(ConstantProfile(4.0), k)
    y1 = constant_y(4.0, k)
    dy1 = constant_yprime(4.0, k)
    r1 = npair.b * y1 - npair.a * j1_closed(k)
    r2 = npair.b * (dy1 - y1) - npair.a * k * j1p_closed(k)
    scale = max(abs(y1), abs(j1_closed(k)))
    assert abs(r1) <= 1e-8 * scale
    assert abs(r2) <= 1e-7 * scale
