import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldensd import decoder, fxp, model, preproc

from conftest import random_instance

F12 = fxp.FxpFormat(12, 8)


class TestFormat:
    def test_bounds(self):
        assert F12.max_raw == 2047
        assert F12.min_raw == -2048
        assert F12.int_bits == 4
        assert F12.resolution == 2.0**-8

    def test_validation(self):
        with pytest.raises(ValueError):
            fxp.FxpFormat(6, 2)  # too narrow
        with pytest.raises(ValueError):
            fxp.FxpFormat(40, 8)  # too wide
        with pytest.raises(ValueError):
            fxp.FxpFormat(12, 12)  # no sign bit left

    def test_string_round_trip(self):
        f = fxp.FxpFormat.from_string("Q5.7")
        assert (f.total_bits, f.frac_bits) == (12, 7)
        assert str(f) == "Q5.7"
        with pytest.raises(ValueError):
            fxp.FxpFormat.from_string("5.7")
        with pytest.raises(ValueError):
            fxp.FxpFormat.from_string("Qx.y")


class TestQuantize:
    def test_zero_and_exact(self):
        assert fxp.quantize(0.0, F12).raw == 0
        assert fxp.quantize(1.0, F12).raw == 256
        assert fxp.quantize(1.0, F12).value == 1.0

    def test_saturation(self):
        v = fxp.quantize(1e9, F12)
        assert v.raw == 2047 and v.saturated
        v = fxp.quantize(-1e9, F12)
        assert v.raw == -2048 and v.saturated

    def test_every_grid_point_is_a_fixed_point(self):
        fmt = fxp.FxpFormat(8, 3)
        for raw in range(fmt.min_raw, fmt.max_raw + 1):
            assert fxp.quantize(raw * fmt.resolution, fmt).raw == raw

    def test_ties_away_from_zero(self):
        fmt = fxp.FxpFormat(8, 3)
        assert fxp.quantize(0.5 * fmt.resolution, fmt).raw == 1
        assert fxp.quantize(-0.5 * fmt.resolution, fmt).raw == -1
        assert fxp.quantize(2.5 * fmt.resolution, fmt).raw == 3

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-7.9, 7.9))
    def test_nearest_within_half_lsb(self, x):
        v = fxp.quantize(x, F12)
        assert not v.saturated
        assert abs(v.value - x) <= F12.resolution / 2


class TestArithmetic:
    def test_add_identity(self):
        a = fxp.quantize(1.25, F12)
        z = fxp.quantize(0.0, F12)
        assert fxp.fxp_add(a, z).raw == a.raw

    def test_exact_product(self):
        a = fxp.quantize(1.5, F12)
        b = fxp.quantize(2.0, F12)
        assert fxp.fxp_mul(a, b).value == 3.0

    def test_sub(self):
        a = fxp.quantize(1.5, F12)
        b = fxp.quantize(2.0, F12)
        assert fxp.fxp_sub(a, b).value == -0.5

    def test_saturating_never_wraps(self):
        big = fxp.quantize(7.9, F12)
        r = fxp.fxp_add(big, big)
        assert r.raw == F12.max_raw and r.saturated
        r = fxp.fxp_mul(big, big)
        assert r.raw == F12.max_raw and r.saturated
        neg = fxp.quantize(-7.9, F12)
        assert fxp.fxp_mul(big, neg).raw == F12.min_raw

    def test_format_mismatch_rejected(self):
        a = fxp.quantize(1.0, F12)
        b = fxp.quantize(1.0, fxp.FxpFormat(12, 7))
        with pytest.raises(ValueError):
            fxp.fxp_add(a, b)

    @settings(max_examples=400, deadline=None)
    @given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.sampled_from(["add", "sub", "mul"]))
    def test_matches_float_shadow_within_one_ulp(self, x, y, op):
        a = fxp.quantize(x, F12)
        b = fxp.quantize(y, F12)
        got = getattr(fxp, f"fxp_{op}")(a, b)
        ref = {"add": a.value + b.value, "sub": a.value - b.value, "mul": a.value * b.value}[op]
        assert not got.saturated
        assert abs(got.value - ref) <= F12.resolution


class TestDecodeFxp:
    def test_high_precision_matches_float_decisions(self, rng):
        fmt = fxp.FxpFormat(32, 20)
        const = model.Constellation(4)
        for _ in range(200):
            _, _, _, y, f = random_instance("golden_2x2", 16, 17.0, rng)
            a = decoder.decode(y, f, const)
            b = fxp.decode_fxp(y, f, const, fmt)
            assert np.array_equal(a.s_hat, b.s_hat)

    def test_noiseless_16qam_12bit(self, rng):
        const = model.Constellation(4)
        h = model.draw_channel("golden_2x2", rng)
        sys_ = model.build_system("golden_2x2", h, n0=0.0)
        s = model.draw_symbols(const, rng)
        y = model.transmit(s, sys_, rng)
        res = fxp.decode_fxp(y, preproc.qr_givens(sys_.lattice), const, fxp.FxpFormat(12, 7))
        assert np.array_equal(res.s_hat, s)

    def test_visited_counter_close_to_float(self, rng):
        # quantization must not change the search effort much
        const = model.Constellation(4)
        fmt = fxp.FxpFormat(12, 7)
        vf = vx = 0
        for _ in range(500):
            _, _, _, y, f = random_instance("golden_2x2", 16, 21.0, rng)
            vf += decoder.decode(y, f, const).visited_nodes
            vx += fxp.decode_fxp(y, f, const, fmt).visited_nodes
        assert abs(vf - vx) / vf < 0.05

    def test_metric_guard_bits_accepted(self, rng):
        const = model.Constellation(4)
        _, _, _, y, f = random_instance("golden_2x2", 16, 15.0, rng)
        res = fxp.decode_fxp(y, f, const, fxp.FxpFormat(12, 7), metric_guard_bits=2)
        assert res.visited_nodes >= 8
