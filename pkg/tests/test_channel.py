import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdsim.channel import (MAX_DEVIATION, Branch, ChannelConfig, awgn_sample, deviation_offsets,
                           offset_bounds, parallel_offset, perpendicular_offset,
                           perpendicular_offset_extra_divisor, transmit, transmit_parallel,
                           transmit_perpendicular)
from qdsim.modem import ArrayGeometry, PskConstellation, joint_modulate

BPSK = PskConstellation(2)
TWO = ArrayGeometry(1.0, (0.0, 0.5))
DEG30 = math.radians(30)
DEG8 = math.radians(8)


def symbol(bx, by, c=BPSK, arr=TWO):
    return joint_modulate(bx, by, c, c, arr)


class TestOffsets:
    def test_parallel_operating_point(self):
        expected = math.pi * (math.sqrt(3) / 2 - 1)
        assert parallel_offset(0.5, DEG30) == pytest.approx(expected, rel=1e-14)
        assert parallel_offset(0.5, DEG30) == pytest.approx(-0.42089, abs=1e-5)

    def test_perpendicular_operating_point(self):
        assert perpendicular_offset(0.5, DEG8) == pytest.approx(math.pi * math.sin(DEG8), rel=1e-14)
        assert perpendicular_offset(0.5, DEG8) == pytest.approx(0.4372252, abs=1e-7)

    def test_constructed_identity(self):
        assert perpendicular_offset(0.5, math.asin(1 / math.pi)) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("fn", [parallel_offset, perpendicular_offset])
    def test_zero_cases(self, fn):
        assert fn(0.37, 0.0) == 0.0
        assert fn(0.0, 0.5) == 0.0

    def test_wavelength_scaling(self):
        assert parallel_offset(0.05, DEG30, 0.1) == pytest.approx(parallel_offset(0.5, DEG30, 1.0))
        assert perpendicular_offset(0.05, DEG8, 0.1) == pytest.approx(perpendicular_offset(0.5, DEG8, 1.0))

    def test_parallel_matches_cosine_form(self):
        x, t = np.linspace(0, 0.99, 50), np.linspace(0, MAX_DEVIATION, 50)
        np.testing.assert_allclose(parallel_offset(x, t), 2 * np.pi * x * (np.cos(t) - 1), atol=1e-15)

    @pytest.mark.parametrize("x, t", [(-0.1, 0.1), (1.0, 0.1), (0.5, -0.01), (0.5, 0.8)])
    def test_domain(self, x, t):
        with pytest.raises(ValueError):
            parallel_offset(x, t)
        with pytest.raises(ValueError):
            perpendicular_offset(x, t)

    def test_bounds_values(self):
        bx, _ = offset_bounds(0.5236)
        _, by = offset_bounds(0.13963)
        assert bx == pytest.approx(0.43064, abs=1e-5) and bx >= abs(parallel_offset(0.5, 0.5236))
        assert by == pytest.approx(0.43866, abs=1e-5) and by >= perpendicular_offset(0.5, 0.13963)
        assert offset_bounds(0.0) == (0.0, 0.0)

    def test_deviation_offsets_record(self):
        d = deviation_offsets(0.5, DEG30, DEG8)
        assert abs(d.parallel) <= d.parallel_bound
        assert abs(d.perpendicular) <= d.perpendicular_bound

    @given(st.floats(0, MAX_DEVIATION, allow_subnormal=False), st.floats(0, 0.5))
    def test_bounds_hold_up_to_half_wavelength(self, t, x):
        bx, by = offset_bounds(t)
        assert abs(parallel_offset(x, t)) <= bx * (1 + 1e-12)
        assert abs(perpendicular_offset(x, t)) <= by * (1 + 1e-12)

    @given(st.floats(0, MAX_DEVIATION, allow_subnormal=False), st.floats(0.5, 1, exclude_min=True, exclude_max=True))
    def test_scaled_bounds_beyond_half_wavelength(self, t, x):
        bx, by = offset_bounds(t)
        assert abs(parallel_offset(x, t)) <= 2 * x * bx * (1 + 1e-12)
        assert abs(perpendicular_offset(x, t)) <= 2 * x * by * (1 + 1e-12)

    @given(st.floats(1e-4, 0.2))
    def test_perpendicular_dominates_quadratically(self, t):
        # sin(t) / (1 - cos(t)) = cot(t/2) = 2/t - t/6 - ..., just under 2/t
        ratio = abs(perpendicular_offset(0.5, t)) / abs(parallel_offset(0.5, t))
        assert ratio == pytest.approx(1 / math.tan(t / 2), rel=1e-9)
        assert 2 / t * (1 - t**2 / 6) <= ratio < 2 / t

    def test_extra_divisor_variant_breaks_bound(self):
        lam = 0.125
        assert perpendicular_offset_extra_divisor(lam / 2, DEG8, lam) > offset_bounds(DEG8)[1]


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(gain=0), dict(deviation=-0.1), dict(deviation=1.0), dict(snr=0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ChannelConfig(Branch.PARALLEL, **kw)

    def test_noise_density(self):
        assert ChannelConfig("parallel", snr=4.0).noise_density() == 0.25

    def test_genie_estimate(self):
        cfg = ChannelConfig("parallel", gain=2j, initial_phase=0.5)
        assert cfg.genie_estimate == pytest.approx(2j * cmath.exp(0.5j))


class TestTransmit:
    def test_parallel_ideal(self):
        out = transmit_parallel(symbol(1, 0), ChannelConfig(Branch.PARALLEL))
        assert out == pytest.approx(-1.0)

    def test_parallel_deviated(self):
        cfg = ChannelConfig(Branch.PARALLEL, deviation=DEG30)
        expected = cmath.exp(1j * (math.pi + math.pi * (math.cos(DEG30) - 1)))
        assert transmit_parallel(symbol(1, 0), cfg) == pytest.approx(expected, abs=1e-15)

    def test_parallel_deviated_antenna_zero_unrotated(self):
        cfg = ChannelConfig(Branch.PARALLEL, deviation=DEG30)
        s = symbol(1, 1)
        assert s.antenna_index == 0
        assert transmit_parallel(s, cfg) == cmath.exp(1j * s.phi_x)

    def test_perpendicular_ideal_independent_of_antenna(self):
        cfg = ChannelConfig(Branch.PERPENDICULAR)
        a, b = transmit_perpendicular(symbol(0, 0), cfg), transmit_perpendicular(symbol(1, 0), cfg)
        assert a == b == 1.0

    def test_perpendicular_deviated(self):
        cfg = ChannelConfig(Branch.PERPENDICULAR, deviation=DEG8)
        s = symbol(1, 0)
        assert s.antenna_index == 1
        assert transmit_perpendicular(s, cfg) == pytest.approx(cmath.exp(1j * math.pi * math.sin(DEG8)))
        assert transmit_perpendicular(symbol(0, 0), cfg) == 1.0

    def test_branch_mismatch(self):
        with pytest.raises(ValueError):
            transmit_parallel(symbol(0, 0), ChannelConfig(Branch.PERPENDICULAR))
        with pytest.raises(ValueError):
            transmit_perpendicular(symbol(0, 0), ChannelConfig(Branch.PARALLEL))

    def test_noise_is_added(self):
        cfg = ChannelConfig(Branch.PARALLEL)
        assert transmit(symbol(0, 0), cfg, 0.25 - 0.5j) == pytest.approx(1.25 - 0.5j)

    def test_ideal_reduction_phases(self):
        c = PskConstellation(8)
        arr = ArrayGeometry.for_constellations(c, c)
        h, phi0 = 1.3 * cmath.exp(0.4j), 0.9
        par = ChannelConfig(Branch.PARALLEL, gain=h, initial_phase=phi0)
        per = ChannelConfig(Branch.PERPENDICULAR, gain=h, initial_phase=phi0)
        for bx in range(8):
            for by in range(8):
                s = joint_modulate(bx, by, c, c, arr)
                assert transmit(s, par) == h * cmath.exp(1j * (s.phi_x + phi0))
                assert transmit(s, per) == h * cmath.exp(1j * (s.phi_y + phi0))

    def test_perpendicular_bitwise_identical_across_antennas(self):
        c = PskConstellation(8)
        arr = ArrayGeometry.for_constellations(c, c)
        cfg = ChannelConfig(Branch.PERPENDICULAR, gain=0.3 + 0.1j, initial_phase=2.0)
        for by in range(8):
            outs = {transmit(joint_modulate(bx, by, c, c, arr), cfg) for bx in range(8)}
            assert len(outs) == 1


class TestAwgn:
    def test_moments(self):
        n0 = 0.5
        z = awgn_sample(n0, np.random.default_rng(3), size=10**6)
        tol = 4 * math.sqrt(n0 / 2 * 1e-6)
        assert abs(z.real.mean()) < tol and abs(z.imag.mean()) < tol
        assert z.real.var() == pytest.approx(n0 / 2, rel=0.01)
        assert z.imag.var() == pytest.approx(n0 / 2, rel=0.01)

    def test_zero_density_is_degenerate(self):
        assert awgn_sample(0.0, np.random.default_rng(0)) == 0

    def test_negative_density(self):
        with pytest.raises(ValueError):
            awgn_sample(-1.0, np.random.default_rng(0))

    def test_scalar_draw(self):
        assert isinstance(awgn_sample(1.0, np.random.default_rng(0)), complex)
