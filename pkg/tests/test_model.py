import math

import numpy as np
import pytest

from goldensd import model


class TestConstellation:
    def test_points_are_scaled_odd_integers(self):
        c = model.Constellation(4)
        assert c.points.tolist() == [-3.0, -1.0, 1.0, 3.0]
        assert c.spacing == 2.0

    def test_points_symmetric_increasing(self):
        for q in (2, 4, 8):
            pts = model.Constellation(q).points
            assert np.array_equal(pts, -pts[::-1])
            assert np.all(np.diff(pts) == 2.0)
            assert len(pts) == q

    def test_order_must_be_supported(self):
        with pytest.raises(ValueError):
            model.Constellation(3)
        with pytest.raises(ValueError):
            model.Constellation(16)

    def test_qam_lookup(self):
        assert model.constellation_for_qam(64).q == 8
        with pytest.raises(ValueError):
            model.constellation_for_qam(32)

    def test_energy(self):
        # mean of squares of the odd points, directly
        for q in (2, 4, 8):
            pts = model.Constellation(q).points
            assert model.Constellation(q).energy_per_dim == pytest.approx(np.mean(pts**2))

    def test_gray_labels_differ_in_one_bit_between_neighbors(self):
        for q in (2, 4, 8):
            g = model.Constellation(q).gray_index(model.Constellation(q).points)
            assert len(set(g.tolist())) == q
            for a, b in zip(g, g[1:]):
                assert bin(int(a) ^ int(b)).count("1") == 1

    def test_bit_errors_counts_gray_distance(self):
        c = model.Constellation(4)
        assert c.bit_errors([-3.0], [3.0]) == 1  # gray 00 vs 10
        assert c.bit_errors([-3.0], [1.0]) == 2  # gray 00 vs 11
        assert c.bit_errors([1.0, 3.0], [1.0, 3.0]) == 0


class TestGoldenConstants:
    def test_values(self):
        g = model.GOLDEN
        root5 = math.sqrt(5.0)
        assert g.theta == pytest.approx((1 + root5) / 2, abs=1e-15)
        assert g.sigma_theta == pytest.approx(1 - g.theta, abs=1e-15)
        assert g.alpha == pytest.approx(1 + 1j * g.sigma_theta, abs=1e-15)
        assert g.sigma_alpha == pytest.approx(1 + 1j * g.theta, abs=1e-15)
        assert g.scale == pytest.approx(1 / root5, abs=1e-16)


class TestEncode:
    def test_zero_vector_encodes_to_zero_matrix(self):
        assert np.all(model.encode(np.zeros(8)) == 0)

    def test_direct_substitution_a_only(self):
        # a = 1+i, b = c = d = 0
        x = model.encode([1.0, 1.0, 0, 0, 0, 0, 0, 0])
        g = model.GOLDEN
        assert x[0, 0] == pytest.approx(g.scale * g.alpha * (1 + 1j), abs=1e-15)
        assert x[1, 1] == pytest.approx(g.scale * g.sigma_alpha * (1 + 1j), abs=1e-15)
        assert x[0, 1] == 0 and x[1, 0] == 0

    def test_linear_over_reals(self, rng):
        s1 = rng.standard_normal(8)
        s2 = rng.standard_normal(8)
        lhs = model.encode(s1 + s2)
        rhs = model.encode(s1) + model.encode(s2)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_alphabet_enforced_when_requested(self):
        c = model.Constellation(2)
        with pytest.raises(ValueError):
            model.encode([0.5] * 8, constellation=c)
        model.encode([1.0, -1.0] * 4, constellation=c)  # fine

    def test_matches_generator_columns(self, rng):
        g = model.build_golden_generator()
        e1 = np.zeros(8)
        e1[0] = 1.0
        assert np.abs(model.vectorize(model.encode(e1)) - g[:, 0]).max() < 1e-12
        s = rng.standard_normal(8)
        assert np.abs(model.vectorize(model.encode(s)) - g @ s).max() < 1e-12


class TestVectorize:
    def test_zero_and_unit_conventions(self):
        assert np.all(model.vectorize(np.zeros((2, 2), dtype=complex)) == 0)
        x = np.zeros((2, 2), dtype=complex)
        x[0, 0] = 1.0
        v = model.vectorize(x)
        assert v[0] == 1.0 and np.all(v[1:] == 0)

    def test_round_trip(self, rng):
        x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.abs(model.devectorize(model.vectorize(x)) - x).max() == 0
        xv = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        back = model.devectorize(model.vectorize(xv), mode="uncoded_4x4")
        assert np.abs(back - xv).max() == 0


class TestGenerator:
    def test_orthogonal(self):
        g = model.build_golden_generator()
        assert np.abs(g.T @ g - np.eye(8)).max() <= 1e-12

    def test_uncoded_generator_is_identity(self, rng):
        sys_ = model.build_system("uncoded_4x4", model.draw_channel("uncoded_4x4", rng))
        assert np.array_equal(sys_.generator, np.eye(8))

    def test_min_determinant_small_box(self):
        # the worst pair already lives in a tiny box; 1/5 must show up there
        assert model.min_codeword_det(box=1) == pytest.approx(0.2, abs=1e-12)


class TestRealExpansion:
    def test_scalar_block(self):
        b = model.complex_to_real_block(3 - 2j)
        assert b.tolist() == [[3.0, 2.0], [-2.0, 3.0]]

    def test_complex_multiplication_commutes_with_expansion(self, rng):
        for _ in range(20):
            h = model.draw_channel("golden_2x2", rng)
            hr = model.real_expansion(h, "golden_2x2")
            x = model.encode(rng.standard_normal(8))
            lhs = model.vectorize(h @ x)
            rhs = hr @ model.vectorize(x)
            assert np.abs(lhs - rhs).max() <= 1e-12

    def test_golden_expansion_is_block_diagonal(self, rng):
        hr = model.real_expansion(model.draw_channel("golden_2x2", rng), "golden_2x2")
        assert np.all(hr[:4, 4:] == 0) and np.all(hr[4:, :4] == 0)
        assert np.array_equal(hr[:4, :4], hr[4:, 4:])

    def test_uncoded_expansion(self, rng):
        h = model.draw_channel("uncoded_4x4", rng)
        hr = model.real_expansion(h, "uncoded_4x4")
        xv = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        lhs = model.vectorize(h @ xv)
        assert np.abs(lhs - hr @ model.vectorize(xv)).max() <= 1e-12

    def test_lattice_is_product(self, rng):
        h = model.draw_channel("golden_2x2", rng)
        sys_ = model.build_system("golden_2x2", h)
        assert np.abs(sys_.lattice - sys_.h_real @ sys_.generator).max() == 0


class TestTransmit:
    def test_noiseless(self, rng):
        const = model.Constellation(4)
        sys_ = model.build_system("golden_2x2", model.draw_channel("golden_2x2", rng), n0=0.0)
        s = model.draw_symbols(const, rng)
        assert np.array_equal(model.transmit(s, sys_, rng), sys_.lattice @ s)

    def test_seed_reproducible(self, rng):
        const = model.Constellation(4)
        sys_ = model.build_system("golden_2x2", model.draw_channel("golden_2x2", rng), n0=0.5)
        s = model.draw_symbols(const, rng)
        y1 = model.transmit(s, sys_, 123)
        y2 = model.transmit(s, sys_, 123)
        assert np.array_equal(y1, y2)

    def test_noise_variance(self, rng):
        n0 = 0.8
        sys_ = model.build_system("golden_2x2", model.draw_channel("golden_2x2", rng), n0=n0)
        s = model.draw_symbols(model.Constellation(4), rng)
        base = sys_.lattice @ s
        draws = np.stack([model.transmit(s, sys_, rng) - base for _ in range(100_000)])
        var = draws.var(axis=0)
        assert np.all(np.abs(var - n0 / 2) / (n0 / 2) < 0.03)


class TestSnrToN0:
    def test_halves_every_3dB(self):
        c = model.Constellation(4)
        n0_a = model.snr_to_n0(10.0, c)
        n0_b = model.snr_to_n0(10.0 + 10 * math.log10(2.0), c)
        assert n0_b == pytest.approx(n0_a / 2, rel=1e-12)

    def test_infinite_snr_capped_to_zero(self):
        c = model.Constellation(4)
        assert model.snr_to_n0(math.inf, c) == 0.0
        assert model.snr_to_n0(300.0, c) == 0.0

    def test_closed_form_matches_measured_energy_ratio(self, rng):
        # 16-QAM, Golden 2x2, SNR 20 dB
        const = model.Constellation(4)
        n0 = model.snr_to_n0(20.0, const, "golden_2x2")
        assert n0 == pytest.approx(0.2)  # E_s * 16 / (4 * 100)
        sig = noise = 0.0
        trials = 20_000
        for _ in range(trials):
            sys_ = model.build_system("golden_2x2", model.draw_channel("golden_2x2", rng), n0=n0)
            s = model.draw_symbols(const, rng)
            clean = sys_.lattice @ s
            sig += float(clean @ clean)
            z = model.transmit(s, sys_, rng) - clean
            noise += float(z @ z)
        assert sig / noise == pytest.approx(100.0, rel=0.02)
