import numpy as np
import pytest

from goldensd import archmodel, decoder, fxp, model

F8 = fxp.FxpFormat(8, 4)
F12 = fxp.FxpFormat(12, 7)


class TestDivider:
    def test_step_count_is_log2_q(self):
        for q, steps in ((2, 1), (4, 2), (8, 3)):
            _, _, tr = archmodel.divide_to_grid_raw(100, 7, q)
            assert len(tr) == steps
            assert [st.shift for st in tr] == list(range(steps - 1, -1, -1))

    def test_exact_multiple(self):
        v = fxp.quantize(4.5, F12)  # 3 * 1.5
        r = fxp.quantize(1.5, F12)
        tr = archmodel.dichotomic_divide(v, r, 8)
        assert tr.result == 3
        assert tr.delta_sign == 0  # exact fit

    def test_divider_trace_text(self):
        tr = archmodel.dichotomic_divide(fxp.quantize(5.2, F12), fxp.quantize(2.0, F12), 4)
        lines = tr.lines()
        assert len(lines) == 3
        assert lines[0] == "step 1: shift=1 subtract=yes bit=1"
        assert lines[-1].startswith("result: s=3")

    def test_rejects_nonpositive_divisor(self):
        with pytest.raises(ValueError):
            archmodel.divide_to_grid_raw(10, 0, 4)
        with pytest.raises(ValueError):
            archmodel.divide_to_grid_raw(10, -3, 4)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            archmodel.divide_to_grid_raw(10, 3, 16)

    def test_format_mismatch(self):
        with pytest.raises(ValueError):
            archmodel.dichotomic_divide(fxp.quantize(1.0, F12), fxp.quantize(1.0, F8), 4)

    def test_matches_nearest_pam_on_reduced_grid(self):
        const = model.Constellation(4)
        for r in range(1, 1 << 7):
            for num in range(-(1 << 7), 1 << 7):
                s, _, _ = archmodel.divide_to_grid_raw(num, r, 4)
                assert s == decoder.nearest_pam(num / r, const).s

    def test_matches_nearest_pam_random_wide(self):
        rng = np.random.default_rng(1234)
        for q in (2, 4, 8):
            const = model.Constellation(q)
            nums = rng.integers(-(1 << 30), 1 << 30, size=20_000)
            rs = rng.integers(1, 1 << 30, size=20_000)
            for num, r in zip(nums.tolist(), rs.tolist()):
                s, _, _ = archmodel.divide_to_grid_raw(num, r, q)
                assert s == decoder.nearest_pam(num / r, const).s

    def test_delta_sign_reports_defect_or_excess(self):
        # ratio 2.6 -> s = 3, approximation by excess
        s, ds, _ = archmodel.divide_to_grid_raw(26, 10, 8)
        assert (s, ds) == (3, 1)
        # ratio 3.4 -> s = 3, approximation by defect
        s, ds, _ = archmodel.divide_to_grid_raw(34, 10, 8)
        assert (s, ds) == (3, -1)

    def test_tie_behavior_matches_float_rule(self):
        const = model.Constellation(8)
        for boundary in (-6, -4, -2, 0, 2, 4, 6):
            s, _, _ = archmodel.divide_to_grid_raw(boundary * 5, 5, 8)
            assert s == decoder.nearest_pam(float(boundary), const).s


class TestThroughput:
    def test_table_cross_check_point(self):
        c = model.Constellation(4)
        mbps = archmodel.estimate_throughput(24.0, 250e6, c, "uncoded_4x4")
        assert mbps == pytest.approx(166.67, abs=0.01)

    def test_greedy_floor_ceiling(self):
        c = model.Constellation(4)
        assert archmodel.estimate_throughput(8.0, 250e6, c) == pytest.approx(500.0)

    def test_4qam_halves_bits(self):
        at16 = archmodel.estimate_throughput(20.0, 250e6, model.Constellation(4))
        at4 = archmodel.estimate_throughput(20.0, 250e6, model.Constellation(2))
        assert at4 == pytest.approx(at16 / 2)

    def test_homogeneous_in_clock(self):
        c = model.Constellation(8)
        one = archmodel.estimate_throughput(31.0, 100e6, c)
        two = archmodel.estimate_throughput(31.0, 200e6, c)
        assert two == pytest.approx(2 * one)

    def test_bits_per_codeword(self):
        assert archmodel.bits_per_codeword(model.Constellation(2)) == 8
        assert archmodel.bits_per_codeword(model.Constellation(4)) == 16
        assert archmodel.bits_per_codeword(model.Constellation(8)) == 24

    def test_zero_cycles_rejected(self):
        with pytest.raises(ValueError):
            archmodel.estimate_throughput(0.0, 250e6, model.Constellation(4))
        with pytest.raises(ValueError):
            archmodel.estimate_throughput(10.0, -1.0, model.Constellation(4))
