import cmath
import math
import random

import pytest

from iteig.bessel import bessel_j1, bessel_j1_second, j1_small_complex
from iteig.scaled import rel_diff

from _oracles import J1_OF_2, J1P_OF_2, j1_closed, j1p_closed


def test_value_at_pi():
    j1, _ = bessel_j1(math.pi)
    assert j1.to_complex().real == pytest.approx(1.0 / math.pi, rel=1e-14)


def test_small_argument_limits():
    j1, j1p = bessel_j1(1e-9)
    assert abs(j1.to_complex()) < 1e-9
    assert j1p.to_complex().real == pytest.approx(1.0 / 3.0, rel=1e-12)
    j1, j1p = j1_small_complex(0.0)
    assert j1 == 0 and j1p == pytest.approx(1.0 / 3.0)


def test_frozen_value_at_two():
    j1, j1p = bessel_j1(2.0)
    assert j1.to_complex().real == pytest.approx(J1_OF_2, rel=1e-14)
    assert j1p.to_complex().real == pytest.approx(J1P_OF_2, rel=1e-13)


def test_series_meets_closed_form_across_the_split():
    # continuity across |t| = 0.5 where the evaluation branch changes
    for ang in (0.0, 0.7, 2.1, -1.3):
        for rad in (0.4999, 0.5001):
            t = rad * cmath.exp(1j * ang)
            a, ap = bessel_j1(t)
            assert a.to_complex() == pytest.approx(j1_closed(t), rel=1e-13)
            assert ap.to_complex() == pytest.approx(j1p_closed(t), rel=1e-12)


def test_matches_oracle_on_moderate_plane():
    rng = random.Random(3)
    for _ in range(60):
        t = complex(rng.uniform(-30, 30), rng.uniform(-20, 20))
        if abs(t) < 1e-3:
            continue
        a, ap = bessel_j1(t)
        assert rel_diff(a, j1_closed(t)) < 1e-12
        assert rel_diff(ap, j1p_closed(t)) < 1e-12


def test_large_imaginary_scaling():
    # |j1(t)| ~ e^{|Im t|} / (2 |t|) for large |Im t|
    t = 3.0 + 400.0j
    j1, _ = bessel_j1(t)
    assert j1.logabs == pytest.approx(400.0 - math.log(2 * abs(t)), abs=0.05)


def test_second_derivative_identity():
    # j1'' from the recurrence equals a central difference of j1'
    h = 1e-5
    for t in (2.0 + 0j, 5.0 - 3.0j, 0.4 + 0.1j):
        upp = bessel_j1_second(t).to_complex()
        fd = (j1p_closed(t + h) - j1p_closed(t - h)) / (2 * h)
        assert upp == pytest.approx(fd, rel=1e-7, abs=1e-9)


def test_symmetries():
    rng = random.Random(9)
    for _ in range(40):
        t = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(t) < 0.05:
            continue
        a, ap = bessel_j1(t)
        am, apm = bessel_j1(-t)
        ac, apc = bessel_j1(t.conjugate())
        assert rel_diff(am, -(a.to_complex())) < 1e-13          # j1 odd
        assert rel_diff(apm, ap.to_complex()) < 1e-13           # j1' even
        assert rel_diff(ac, a.to_complex().conjugate()) < 1e-13
