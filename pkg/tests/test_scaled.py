import cmath
import math
import random

import pytest

from iteig.scaled import ScaledComplex, coerce_scaled, rel_diff, sc_cos, sc_sin


def test_normalization_window():
    rng = random.Random(11)
    for _ in range(200):
        m = complex(rng.uniform(-50, 50), rng.uniform(-50, 50))
        if m == 0:
            continue
        s = ScaledComplex(m, rng.randrange(-900, 900))
        assert 1.0 <= abs(s.mantissa) < 2.0


def test_zero_representation():
    z = ScaledComplex.zero()
    assert z.is_zero() and z.exp2 == 0 and z.logabs == -math.inf
    assert (z + ScaledComplex(3.0)).to_complex() == 3.0
    assert (ScaledComplex(3.0) * z).is_zero()


def test_round_trip_one_ulp():
    rng = random.Random(5)
    for _ in range(500):
        mag = 10.0 ** rng.uniform(-299, 299)
        ang = rng.uniform(-math.pi, math.pi)
        v = mag * complex(math.cos(ang), math.sin(ang))
        back = ScaledComplex.from_complex(v).to_complex()
        assert back == pytest.approx(v, rel=3e-16, abs=0.0)


def test_arithmetic_matches_plain_complex():
    rng = random.Random(7)
    for _ in range(300):
        a = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        b = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        if b == 0:
            continue
        sa, sb = ScaledComplex.from_complex(a), ScaledComplex.from_complex(b)
        assert (sa * sb).to_complex() == pytest.approx(a * b, rel=1e-15)
        assert (sa / sb).to_complex() == pytest.approx(a / b, rel=1e-15)
        assert (sa + sb).to_complex() == pytest.approx(a + b, rel=1e-14, abs=1e-15)
        assert (sa - sb).to_complex() == pytest.approx(a - b, rel=1e-14, abs=1e-15)


def test_huge_scale_arithmetic():
    # (x * 2^900) * (y * 2^-300) must carry exponents exactly
    a = ScaledComplex(1.5 + 0.25j, 900)
    b = ScaledComplex(1.25 - 1j, -300)
    prod = a * b
    assert prod.exp2 * math.log(2.0) == pytest.approx(prod.logscale)
    assert prod.logabs == pytest.approx(a.logabs + b.logabs, rel=1e-14)
    tot = a + b  # b is negligible: a survives untouched
    assert tot.mantissa == a.mantissa and tot.exp2 == a.exp2


def test_addition_rescales_to_larger_exponent():
    a = ScaledComplex(1.0, 10)
    b = ScaledComplex(1.0, 8)   # value 256 vs 1024
    s = a + b
    assert s.to_complex() == pytest.approx(1024.0 + 256.0)


def test_logabs_and_phase():
    s = ScaledComplex(complex(0.0, 1.5), 40)
    assert s.logabs == pytest.approx(40 * math.log(2) + math.log(1.5))
    assert s.phase() == pytest.approx(math.pi / 2)


def test_conjugate_and_neg_are_exact():
    s = ScaledComplex(1.25 + 0.5j, 123)
    assert s.conjugate().mantissa == s.mantissa.conjugate()
    assert (-s).mantissa == -s.mantissa
    assert (-s).exp2 == s.exp2


def test_rel_diff():
    a = ScaledComplex(1.0, 500)
    b = ScaledComplex(1.0 + 1e-9, 500)
    assert rel_diff(a, b) == pytest.approx(1e-9, rel=1e-3)
    assert rel_diff(a, a) == 0.0
    assert rel_diff(coerce_scaled(1.0), coerce_scaled(0.0)) == math.inf


@pytest.mark.parametrize("t", [0.3 + 0.2j, 2.0 - 1.0j, -4.0 + 3.0j, 10.0 + 25.0j])
def test_scaled_trig_matches_cmath_in_range(t):
    assert sc_sin(t).to_complex() == pytest.approx(cmath.sin(t), rel=1e-13)
    assert sc_cos(t).to_complex() == pytest.approx(cmath.cos(t), rel=1e-13)


def test_scaled_trig_large_imag():
    # sin(x + iy) ~ e^{|y|}/2 in magnitude; check the log and the mantissa
    t = 1.0 + 500.0j
    s = sc_sin(t)
    assert s.logabs == pytest.approx(500.0 - math.log(2.0), abs=1e-6)
    # against the analytic mantissa: sin(x)cosh(y) + i cos(x)sinh(y), scaled
    expect = complex(math.sin(1.0), math.cos(1.0)) * 0.5
    got = s.mantissa * 2.0 ** (s.exp2 - 500.0 / math.log(2.0))
    ratio = got / (expect * math.exp(500.0 - (500.0 / math.log(2.0)) * math.log(2.0)))
    assert abs(ratio - 1.0) < 1e-12


def test_scaled_trig_dominant_phase_large_imag():
    # for y >> 1, sin(x + iy) ~ e^y (i/2) e^{-ix}: phase is pi/2 - x mod 2 pi
    t = -3.0 + 120.0j
    s = sc_sin(t)
    want = math.pi / 2 + 3.0
    got = s.phase() % (2 * math.pi)
    assert got == pytest.approx(want % (2 * math.pi), abs=1e-10)
    c = sc_cos(t)
    # cos(x + iy) ~ e^y (1/2) e^{-ix}
    assert c.phase() % (2 * math.pi) == pytest.approx(3.0 % (2 * math.pi), abs=1e-10)
