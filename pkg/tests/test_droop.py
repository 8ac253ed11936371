import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from islandgrid.droop import (
    CouplingImpedance, DroopParams, PowerMeasurement, droop_update, lpf_update,
    power_transfer, power_transfer_inductive,
)

# mpmath at 50 digits: 320^2/10.996 * sin(0.1) and (320^2 cos 0.1 - 320^2)/10.996
P_EXAMPLE = 929.69642275693004694595979603925932737061983749012
Q_EXAMPLE = -46.523597265383917043875268177853929477063888459028
W_EXAMPLE = 311.01766535897932384626433832795028841971693993751  # 2*pi*50 - 3.927e-4*8000

volts = st.floats(50.0, 1000.0)
angles = st.floats(-0.5, 0.5)
ohms = st.floats(0.1, 100.0)


class TestTypes:
    @pytest.mark.parametrize("mag,ang", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1), (1.0, 2.0)])
    def test_impedance_invalid(self, mag, ang):
        with pytest.raises(ValueError):
            CouplingImpedance(mag, ang)

    def test_inductor(self):
        z = CouplingImpedance.inductor(0.035, 50.0)
        assert z.magnitude == pytest.approx(10.995574287564276, rel=1e-15)
        assert z.angle == math.pi / 2

    def test_default_sizing(self):
        d = DroopParams.sized_for(320.0, 2 * math.pi * 50, 8000.0, 1000.0)
        assert d.m_coef == pytest.approx(0.01 * 2 * math.pi * 50 / 8000)
        assert d.n_coef == pytest.approx(0.05 * 320 / 1000)

    def test_filter_cutoff_positive(self):
        with pytest.raises(ValueError):
            PowerMeasurement(filter_cutoff=0.0)


class TestPowerTransfer:
    @given(volts, st.floats(0.0, math.pi / 2), ohms)
    def test_no_transfer_at_equal_voltage(self, e, theta, z):
        p, q = power_transfer(e, 0.0, e, CouplingImpedance(z, theta))
        assert abs(p) <= 1e-9 * e * e / z
        assert abs(q) <= 1e-9 * e * e / z

    def test_example(self):
        p, q = power_transfer(320.0, 0.1, 320.0, CouplingImpedance(10.996, math.pi / 2))
        assert p == pytest.approx(P_EXAMPLE, rel=1e-12)
        assert q == pytest.approx(Q_EXAMPLE, rel=1e-9)
        assert round(q, 1) == -46.5

    def test_inductive_example(self):
        p, q = power_transfer_inductive(320.0, 0.1, 320.0, 10.996)
        assert p == pytest.approx(P_EXAMPLE, rel=1e-12)
        assert q == pytest.approx(Q_EXAMPLE, rel=1e-9)

    def test_inductive_zero_angle(self):
        p, q = power_transfer_inductive(330.0, 0.0, 320.0, 11.0)
        assert p == 0.0
        assert q == pytest.approx((330.0 * 320.0 - 320.0 ** 2) / 11.0, rel=1e-14)

    @given(volts, angles, volts, ohms)
    def test_specialization(self, e, d, v, z):
        p, q = power_transfer(e, d, v, CouplingImpedance(z, math.pi / 2))
        pi, qi = power_transfer_inductive(e, d, v, z)
        assert p == pytest.approx(pi, rel=1e-12, abs=0.0)
        assert q == pytest.approx(qi, rel=1e-12, abs=0.0)

    @given(volts, st.floats(-0.05, 0.05), volts, ohms)
    def test_small_angle_bound(self, e, d, v, z):
        p, _ = power_transfer_inductive(e, d, v, z)
        a = e * v / z
        assert abs(p - a * d) <= a * abs(d) ** 3 / 6 + 1e-12 * a

    @given(volts, st.floats(1e-3, 1.0), volts, ohms)
    def test_sign_convention(self, e, d, v, z):
        p, _ = power_transfer(e, d, v, CouplingImpedance(z, math.pi / 2))
        assert p > 0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            power_transfer(0.0, 0.1, 320.0, CouplingImpedance(1.0))
        with pytest.raises(ValueError):
            power_transfer_inductive(320.0, 0.1, 320.0, 0.0)


class TestDroop:
    def test_no_load(self):
        d = DroopParams(320.0, 314.0, 0.016, 4e-4)
        assert droop_update(d, PowerMeasurement()) == (320.0, 314.0)

    def test_voltage_example(self):
        e, _ = droop_update(DroopParams(320.0, 314.0, 1e-3, 0.0), PowerMeasurement(0.0, 1000.0))
        assert e == 319.0

    def test_frequency_example(self):
        _, w = droop_update(DroopParams(320.0, 2 * math.pi * 50, 0.0, 3.927e-4), PowerMeasurement(8000.0, 0.0))
        assert w == pytest.approx(W_EXAMPLE, rel=1e-15)
        assert (2 * math.pi * 50 - w) / (2 * math.pi) == pytest.approx(0.5, abs=1e-4)

    @given(st.floats(0, 0.1), st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))
    def test_affine(self, n, q1, q2):
        d = DroopParams(320.0, 314.0, n, 1e-4)
        e1, _ = droop_update(d, PowerMeasurement(0.0, q1))
        e2, _ = droop_update(d, PowerMeasurement(0.0, q2))
        assert (e1 - e2) == pytest.approx(-n * (q1 - q2), abs=1e-12 * 320.0)


class TestFilter:
    def test_fixed_point(self):
        m = PowerMeasurement(123.0, -45.0, 10.0)
        assert lpf_update(m, 123.0, -45.0, 1e-3) == m

    def test_step_response(self):
        m = PowerMeasurement(0.0, 0.0, 10.0)
        for _ in range(1000):
            m = lpf_update(m, 1000.0, 0.0, 1e-3)
        assert m.p == pytest.approx(1000.0 * (1 - math.exp(-10.0)), rel=0.01)

    @given(st.lists(st.floats(0.0, 100.0), min_size=1, max_size=50), st.floats(0.1, 1.0))
    def test_no_overshoot(self, increments, alpha):
        raw = 0.0
        m = PowerMeasurement(0.0, 0.0, alpha / 1e-3)
        for inc in increments:
            raw += inc
            m = lpf_update(m, raw, raw, 1e-3)
            assert m.p <= raw * (1 + 1e-15)

    def test_unstable_rejected(self):
        with pytest.raises(ValueError):
            lpf_update(PowerMeasurement(filter_cutoff=2000.0), 1.0, 1.0, 1e-3)
        with pytest.raises(ValueError):
            lpf_update(PowerMeasurement(), 1.0, 1.0, 0.0)
