import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdsim.modem import (TWO_PI, ArrayGeometry, ConfigurationError, PskConstellation,
                         antenna_position, bits_of, decide, hard_demodulate, joint_modulate,
                         label_of, qd_phase, qd_phase_of_position)

BPSK = PskConstellation(2)
TWO = ArrayGeometry(1.0, (0.0, 0.5))


class TestConstellation:
    @pytest.mark.parametrize("m", [2, 4, 8, 16])
    def test_phases_and_gray_ring(self, m):
        c = PskConstellation(m)
        np.testing.assert_allclose(c.phases, TWO_PI * np.arange(m) / m)
        assert len(set(c.phases)) == m
        labels = list(c.labels)
        for a, b in zip(labels, labels[1:] + labels[:1]):
            assert bin(a ^ b).count("1") == 1

    @pytest.mark.parametrize("m", [0, 1, 3, 6])
    def test_order_must_be_power_of_two(self, m):
        with pytest.raises(ValueError):
            PskConstellation(m)

    def test_bit_labels(self):
        assert PskConstellation(4).bit_labels == [(0, 0), (0, 1), (1, 1), (1, 0)]
        assert BPSK.phase_of((1,)) == math.pi

    def test_label_conversion(self):
        assert label_of((1, 0, 1), 3) == 5
        assert bits_of(5, 3) == (1, 0, 1)
        with pytest.raises(ValueError):
            label_of((1, 0), 3)
        with pytest.raises(ValueError):
            label_of(8, 3)


class TestQdPhase:
    def test_first_case(self):
        assert qd_phase(math.pi, 0.0) == math.pi

    def test_wraparound_case(self):
        assert qd_phase(0.0, math.pi) == math.pi

    @given(st.floats(0, TWO_PI, exclude_max=True))
    def test_equal_phases(self, phi):
        assert qd_phase(phi, phi) == 0.0

    def test_inputs_reduced_modulo_two_pi(self):
        assert qd_phase(3 * math.pi, -TWO_PI) == pytest.approx(math.pi)

    @given(st.floats(-20, 20), st.floats(-20, 20))
    def test_output_range_and_identity(self, a, b):
        q = qd_phase(a, b)
        assert 0 <= q < TWO_PI
        assert abs(math.remainder(b + q - a, TWO_PI)) < 1e-12

    @pytest.mark.parametrize("m", [2, 4, 8])
    def test_closure_on_psk_grid(self, m):
        c = PskConstellation(m)
        alphabet = TWO_PI * np.arange(m) / m
        for a, b in itertools.product(c.phases, c.phases):
            q = qd_phase(a, b)
            assert np.min(np.abs(alphabet - q)) < 1e-12
            assert abs(math.remainder(b + q - a, TWO_PI)) <= np.spacing(TWO_PI)


class TestPositions:
    def test_half_wavelength(self):
        assert antenna_position(math.pi, 1.0) == 0.5
        assert qd_phase_of_position(0.5, 1.0) == math.pi

    def test_origin_and_quarter(self):
        assert antenna_position(0.0, 3.0) == 0.0
        assert qd_phase_of_position(0.0) == 0.0
        assert antenna_position(math.pi / 2, 0.1) == pytest.approx(0.025)

    def test_round_trip_random(self):
        rng = np.random.default_rng(11)
        for lam in (1.0, 0.125, 3.3):
            x = rng.uniform(0, lam, 1000)
            back = np.array([antenna_position(qd_phase_of_position(v, lam), lam) for v in x])
            np.testing.assert_allclose(back, x, rtol=0, atol=4 * np.spacing(lam))

    @given(st.floats(0, 1, exclude_max=True))
    def test_inverse_property(self, x):
        assert antenna_position(qd_phase_of_position(x)) == pytest.approx(x, abs=1e-15)

    @pytest.mark.parametrize("x", [-0.1, 1.0, 1.5])
    def test_position_out_of_range(self, x):
        with pytest.raises(ValueError):
            qd_phase_of_position(x, 1.0)


class TestArrayGeometry:
    def test_two_antenna_array(self):
        assert ArrayGeometry.for_constellations(BPSK, BPSK).positions == (0.0, 0.5)

    def test_mixed_orders_use_finest_grid(self):
        arr = ArrayGeometry.for_constellations(PskConstellation(2), PskConstellation(8), 2.0)
        assert len(arr.positions) == 8
        arr.validate_for(PskConstellation(2), PskConstellation(8))

    @pytest.mark.parametrize("pos", [(0.1, 0.5), (0.0, 0.5, 0.5), (0.0, 1.0)])
    def test_invalid_positions(self, pos):
        with pytest.raises(ValueError):
            ArrayGeometry(1.0, pos)

    def test_missing_antenna_fails_fast(self):
        c4 = PskConstellation(4)
        with pytest.raises(ConfigurationError, match="no antenna"):
            TWO.validate_for(c4, c4)


class TestJointModulate:
    def test_bpsk_one_zero(self):
        s = joint_modulate((1,), (0,), BPSK, BPSK, TWO)
        assert (s.phi_x, s.phi_y, s.phi_q, s.antenna_index) == (math.pi, 0.0, math.pi, 1)
        assert s.position == 0.5

    def test_bpsk_zero_zero(self):
        s = joint_modulate((0,), (0,), BPSK, BPSK, TWO)
        assert (s.phi_x, s.phi_y, s.phi_q, s.antenna_index) == (0.0, 0.0, 0.0, 0)

    def test_qpsk_exhaustive(self):
        c = PskConstellation(4)
        arr = ArrayGeometry(1.0, (0.0, 0.25, 0.5, 0.75))
        alphabet = [0, math.pi / 2, math.pi, 3 * math.pi / 2]
        seen = set()
        for bx, by in itertools.product(c.bit_labels, repeat=2):
            s = joint_modulate(bx, by, c, c, arr)
            assert min(abs(s.phi_q - a) for a in alphabet) < 1e-12
            assert abs(math.remainder(s.phi_y + s.phi_q - s.phi_x, TWO_PI)) <= np.spacing(TWO_PI)
            seen.add(s.antenna_index)
        assert seen == {0, 1, 2, 3}

    def test_parallel_value(self):
        s = joint_modulate((1,), (0,), BPSK, BPSK, TWO, energy=4.0)
        assert s.parallel_value == pytest.approx(-2.0)
        assert s.source_value == pytest.approx(2.0)

    def test_mismatched_array(self):
        c = PskConstellation(4)
        with pytest.raises(ConfigurationError):
            joint_modulate((0, 1), (0, 0), c, c, TWO)

    def test_wrong_bit_count(self):
        with pytest.raises(ValueError):
            joint_modulate((1, 0), (0,), BPSK, BPSK, TWO)


class TestHardDemodulate:
    h = 0.8 * cmath.exp(0.6j)

    def test_exact_match(self):
        assert hard_demodulate(self.h * cmath.exp(1j * math.pi), BPSK, self.h) == (1,)

    def test_tie_goes_to_lower_index(self):
        assert hard_demodulate(1j, BPSK, 1.0) == (0,)
        assert hard_demodulate(self.h * 1j, BPSK, self.h) == (0,)

    def test_worst_case_rotation_still_decodes(self):
        obs = self.h * cmath.exp(1j * (math.pi - 0.4209))
        assert hard_demodulate(obs, BPSK, self.h) == (1,)

    def test_zero_estimate_rejected(self):
        with pytest.raises(ValueError):
            hard_demodulate(1.0, BPSK, 0.0)

    def test_vectorized_decide(self):
        c = PskConstellation(8)
        pts = np.exp(1j * c.phases) * 3.0
        np.testing.assert_array_equal(decide(pts, c), np.arange(8))

    @pytest.mark.parametrize("m", [2, 4, 8])
    def test_noiseless_loopback(self, m):
        c = PskConstellation(m)
        for bits in c.bit_labels:
            assert hard_demodulate(self.h * cmath.exp(1j * c.phase_of(bits)), c, self.h) == bits
