import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from networks import random_lossless_network
from uwbnotch.circuit import (
    CSV_HEADER,
    AbcdMatrix,
    Cascade,
    PassivityError,
    S11Trace,
    ShuntSeriesRLC,
    SingularNetworkError,
    UniformLine,
    abcd_uniform_line,
    cascade,
    frequency_grid,
    s11_from_abcd,
    sweep,
    vswr_from_magnitude,
)


def as_array(m):
    return np.array([[m.a, m.b], [m.c, m.d]], complex)


class TestUniformLine:
    def test_zero_length_is_identity(self):
        assert np.allclose(as_array(abcd_uniform_line(50.0, 0.0)), np.eye(2), atol=0)

    def test_quarter_wave(self):
        m = as_array(abcd_uniform_line(50.0, math.pi / 2))
        assert np.allclose(m, [[0, 50j], [1j / 50, 0]], atol=1e-14)

    @given(st.floats(1.0, 500.0), st.floats(0.0, 50.0))
    def test_unit_determinant(self, z0, theta):
        assert abs(abcd_uniform_line(z0, theta).det() - 1) < 1e-9

    def test_rejects_nonpositive_impedance(self):
        with pytest.raises(ValueError):
            abcd_uniform_line(0.0, 1.0)


class TestCascade:
    def test_single_element(self):
        m = abcd_uniform_line(75.0, 0.3)
        assert cascade([m]) is m

    def test_electrical_lengths_add(self):
        got = as_array(cascade([abcd_uniform_line(50.0, 0.4), abcd_uniform_line(50.0, 1.1)]))
        assert np.allclose(got, as_array(abcd_uniform_line(50.0, 1.5)), rtol=0, atol=1e-14)

    @given(
        st.lists(st.tuples(st.floats(5.0, 300.0), st.floats(0.0, 7.0)), min_size=3, max_size=3),
    )
    def test_associative(self, params):
        a, b, c = (abcd_uniform_line(z, t) for z, t in params)
        left = as_array((a @ b) @ c)
        right = as_array(a @ (b @ c))
        scale = np.max(np.abs(left))
        assert np.max(np.abs(left - right)) <= 1e-12 * scale

    def test_empty_list(self):
        with pytest.raises(ValueError):
            cascade([])
        with pytest.raises(ValueError):
            Cascade(())


class TestS11:
    def test_matched_identity(self):
        assert s11_from_abcd(AbcdMatrix.identity(), 50.0, 50.0) == 0

    def test_quarter_wave_inverter(self):
        # Zin = 50**2 / 100 = 25 ohm -> gamma = (25 - 50) / (25 + 50)
        gamma = s11_from_abcd(abcd_uniform_line(50.0, math.pi / 2), 50.0, 100.0)
        assert abs(gamma - (-1 / 3)) < 1e-12

    def test_open_circuit_limit(self):
        assert s11_from_abcd(AbcdMatrix.identity(), 50.0, 1e15) == pytest.approx(1.0, abs=1e-12)
        assert s11_from_abcd(AbcdMatrix.identity(), 50.0, math.inf) == 1.0

    def test_singular(self):
        with pytest.raises(SingularNetworkError):
            s11_from_abcd(AbcdMatrix(1, 0, 1, -50), 50.0, 50.0)

    def test_rejects_bad_references(self):
        with pytest.raises(ValueError):
            s11_from_abcd(AbcdMatrix.identity(), 0.0, 50.0)
        with pytest.raises(ValueError):
            s11_from_abcd(AbcdMatrix.identity(), 50.0, -1.0)


def test_vswr_mapping():
    v = vswr_from_magnitude([0.0, 1 / 3, 0.5])
    assert v[0] == 1.0
    assert v[1] == pytest.approx(2.0, rel=2e-16)
    assert v[2] == 3.0
    assert math.isinf(vswr_from_magnitude(1.0))


class TestElements:
    def test_shunt_rlc_resonance(self):
        el = ShuntSeriesRLC(1.0, 2e-9, 1e-12)
        assert abs(el.reactance(el.resonant_frequency)) < 1e-9

    def test_lossless_branch_at_resonance_shorts_line(self):
        el = ShuntSeriesRLC(0.0, 1e-9, 1e-12)
        gamma = s11_from_abcd(el.abcd(np.array([el.resonant_frequency])), 50.0, 50.0)
        assert abs(gamma[0] + 1) < 1e-12

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            ShuntSeriesRLC(-1.0, 1e-9, 1e-12)
        with pytest.raises(ValueError):
            UniformLine(50.0, 0.0, 1e8)


class TestSweep:
    freqs = frequency_grid(2e9, 12e9, 1e7)

    def test_grid_point_count(self):
        assert len(self.freqs) == 1001
        assert self.freqs[0] == 2e9 and self.freqs[-1] == 12e9

    def test_matched_line(self):
        tr = sweep(UniformLine(50.0, 30.0, 1.8e8), 50.0, 50.0, self.freqs)
        assert np.max(tr.magnitude) < 1e-12

    def test_parallel_is_bit_identical(self):
        net = Cascade((UniformLine(50.0, 5.0, 1.8e8), ShuntSeriesRLC(1.0, 1e-8, 1e-13), UniformLine(80.0, 7.0, 1.8e8)))
        serial = sweep(net, 50.0, 35.0, self.freqs)
        parallel = sweep(net, 50.0, 35.0, self.freqs, workers=4)
        assert np.array_equal(serial.gamma, parallel.gamma)

    def test_requires_increasing_frequencies(self):
        with pytest.raises(ValueError):
            sweep(UniformLine(50.0, 1.0, 1e8), 50.0, 50.0, [2e9, 1e9])

    def test_passivity_violation_detected(self):
        class Active:
            def abcd(self, f):
                # negative-resistance shunt
                return AbcdMatrix(np.ones_like(f) + 0j, 0j * f, -0.05 + 0j * f, np.ones_like(f) + 0j)

        with pytest.raises(PassivityError):
            sweep(Active(), 50.0, 50.0, self.freqs)


class TestTrace:
    def test_csv_layout(self):
        tr = S11Trace(np.array([1e9, 2e9]), np.array([0.0, 0.5j]))
        text = tr.to_csv()
        lines = text.split("\n")
        assert lines[0] == ",".join(CSV_HEADER)
        assert text.endswith("\n") and len(lines) == 4
        assert lines[1] == "1000000000.0,0.0,0.0,-inf,1.0"
        assert lines[2].split(",")[-1] == "3.0"

    def test_csv_round_trip(self):
        g = np.array([0.1 + 0.2j, -0.3 + 0.01j, 0.0])
        tr = S11Trace(np.array([1e9, 1.5e9, 2e9]), g)
        back = S11Trace.from_csv(tr.to_csv())
        assert np.array_equal(back.gamma, g) and np.array_equal(back.freq_hz, tr.freq_hz)

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            S11Trace(np.array([2e9, 1e9]), np.zeros(2))

    def test_samples(self):
        tr = S11Trace(np.array([1e9]), np.array([1 / 3]))
        ((f, g, db, v),) = list(tr.samples)
        assert f == 1e9 and g == 1 / 3 and db == pytest.approx(20 * math.log10(1 / 3))
        assert v == pytest.approx(2.0)


# -- randomized lossless networks ---------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_networks_passive_and_reciprocal(seed):
    rng = np.random.default_rng(seed)
    net = random_lossless_network(rng)
    f = np.sort(rng.uniform(1e8, 2e10, 16))
    m = net.abcd(f)
    assert np.max(np.abs(m.det() - 1)) < 1e-9
    tr = sweep(net, rng.uniform(10, 200), rng.uniform(1, 1000), f)
    assert np.max(tr.magnitude) <= 1 + 1e-9
