import math

import numpy as np
import pytest

from admasim.channel import ChannelMatrix, channel_matrix
from admasim.exceptions import SingularChannelError
from admasim.precoding import (
    PrecoderMethod,
    geometric_series_sum,
    mmse,
    mrt,
    pair_gram_inverse,
    pair_zf,
    zf,
    zf_neighbor_approx,
)

from conftest import los_channel, los_matrix, max_column_sine, spaced_cosines


def random_los_matrix(rng, k, n, min_gap=1.5):
    cosv = spaced_cosines(rng, k, n, min_gap)
    thetas = np.arccos(cosv)
    gains = rng.uniform(0.5, 2.0, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
    return los_matrix(thetas, gains, n)


class TestMrt:
    def test_single_user_conjugate_direction(self):
        n = 16
        ch = los_channel(1.1, gain=0.7 * np.exp(0.3j), n=n)
        p = mrt(channel_matrix([ch]))
        expected = ch.vector.conj() / np.linalg.norm(ch.vector)
        np.testing.assert_allclose(p.matrix[:, 0], expected, atol=1e-12)
        # single-beam closed form: conj(gain)/(sqrt(N)|gain|) times the
        # conjugate steering vector
        xi = 0.5 * math.cos(ch.los.doa)
        a = np.exp(-2j * np.pi * xi * np.arange(n))
        closed = np.conj(ch.los.gain) / (math.sqrt(n) * abs(ch.los.gain)) * a
        np.testing.assert_allclose(p.matrix[:, 0], closed, atol=1e-12)

    def test_unit_frobenius_norm(self, rng):
        h = random_los_matrix(rng, 5, 32)
        assert np.linalg.norm(mrt(h).matrix) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_users_no_cross_talk(self):
        # spatial frequencies spaced by 1/N make the Gram exactly diagonal
        n = 16
        thetas = [math.acos(0.0), math.acos(2.0 / n)]
        h = los_matrix(thetas, n=n)
        p = mrt(h)
        assert abs(h.matrix[0] @ p.matrix[:, 1]) < 1e-9 * n
        assert abs(h.matrix[1] @ p.matrix[:, 0]) < 1e-9 * n

    def test_rejects_zero_matrix(self):
        with pytest.raises(ValueError):
            mrt(ChannelMatrix(matrix=np.zeros((2, 8), dtype=complex)))


class TestZf:
    def test_single_user_equals_mrt_direction(self, rng):
        h = random_los_matrix(rng, 1, 16)
        assert max_column_sine(zf(h), mrt(h)) < 1e-10

    def test_pair_matches_closed_form(self, rng):
        for _ in range(25):
            h = random_los_matrix(rng, 2, 128)
            dec = pair_zf(h.users[0], h.users[1])
            generic = zf(h)
            amp = abs(h.matrix[0] @ generic.matrix[:, 0])
            assert dec.received_amplitude == pytest.approx(amp, rel=1e-9)
            np.testing.assert_allclose(dec.column, generic.matrix[:, 0], rtol=0,
                                       atol=1e-9 * np.linalg.norm(generic.matrix[:, 0]))

    def test_off_diagonal_suppression(self, rng):
        h = random_los_matrix(rng, 6, 64)
        hp = np.abs(h.matrix @ zf(h).matrix)
        diag = np.diag(hp).min()
        off = hp - np.diag(np.diag(hp))
        assert off.max() <= 1e-8 * diag

    def test_duplicated_rows_raise(self):
        ch = los_channel(1.2, n=16)
        h = channel_matrix([ch, ch])
        with pytest.raises(SingularChannelError) as exc:
            zf(h)
        assert exc.value.pair == (0, 1)

    def test_rejects_more_users_than_antennas(self, rng):
        h = ChannelMatrix(matrix=rng.normal(size=(5, 4))
                          + 1j * rng.normal(size=(5, 4)))
        with pytest.raises(ValueError):
            zf(h)


class TestMmse:
    def test_zero_noise_limit_is_zf(self, rng):
        h = random_los_matrix(rng, 5, 64)
        scale = np.linalg.norm(h.matrix @ h.matrix.conj().T, 2)
        assert max_column_sine(mmse(h, 1e-12 * scale), zf(h)) <= 1e-6

    def test_large_noise_limit_is_mrt(self, rng):
        h = random_los_matrix(rng, 5, 64)
        scale = np.linalg.norm(h.matrix @ h.matrix.conj().T, 2)
        assert max_column_sine(mmse(h, 1e12 * scale), mrt(h)) <= 1e-6

    def test_slnr_beats_zf_and_mrt(self, rng):
        # with unit beam powers the SLNR-optimal direction is exactly the
        # regularized-inverse column, so it wins user by user
        h = random_los_matrix(rng, 4, 32, min_gap=0.6)
        noise = 0.5

        def slnr(p):
            cols = p.matrix / np.linalg.norm(p.matrix, axis=0)
            g = np.abs(h.matrix @ cols) ** 2
            return np.array([g[k, k] / (g[:, k].sum() - g[k, k] + noise)
                             for k in range(h.k)])

        s_mmse = slnr(mmse(h, noise))
        assert np.all(s_mmse >= slnr(zf(h)) - 1e-12)
        assert np.all(s_mmse >= slnr(mrt(h)) - 1e-12)

    def test_rejects_negative_noise(self, rng):
        with pytest.raises(ValueError):
            mmse(random_los_matrix(rng, 2, 8), -1.0)


class TestPairZf:
    def test_zero_cost_spacing_amplitude(self):
        # cos spacing 2/N sits on an interference-cost zero
        n = 128
        thetas = [math.acos(0.0), math.acos(2.0 / n)]
        dec = pair_zf(los_channel(thetas[0], n=n), los_channel(thetas[1], n=n))
        assert dec.received_amplitude == pytest.approx(math.sqrt(n / 2), rel=1e-12)

    def test_zeroes_partner(self, rng):
        for _ in range(10):
            h = random_los_matrix(rng, 2, 64)
            dec = pair_zf(h.users[0], h.users[1])
            assert abs(h.matrix[1] @ dec.column) < 1e-9

    def test_amplitude_matches_generic_pipeline(self, rng):
        for _ in range(10):
            h = random_los_matrix(rng, 2, 64)
            dec = pair_zf(h.users[0], h.users[1])
            amp = abs(h.matrix[0] @ zf(h).matrix[:, 0])
            assert dec.received_amplitude == pytest.approx(amp, rel=1e-9)

    def test_equal_direction_raises(self):
        ch = los_channel(0.9, n=16)
        with pytest.raises(SingularChannelError):
            pair_zf(ch, ch)

    def test_closed_form_gram_inverse(self, rng):
        for _ in range(20):
            h = random_los_matrix(rng, 2, 32)
            gram = h.matrix @ h.matrix.conj().T
            expected = np.linalg.inv(gram)
            got = pair_gram_inverse(h.users[0], h.users[1])
            np.testing.assert_allclose(got, expected, rtol=0,
                                       atol=1e-10 * np.linalg.norm(expected))


class TestZfNeighborApprox:
    def sorted_channels(self, rng, k=6, n=128, min_gap=2.0):
        cosv = spaced_cosines(rng, k, n, min_gap)
        thetas = np.sort(np.arccos(cosv))
        gains = rng.uniform(0.5, 2.0, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
        return los_matrix(thetas, gains, n)

    def test_amplitudes_near_exact_zf(self, rng):
        for _ in range(10):
            h = self.sorted_channels(rng)
            approx = zf_neighbor_approx(h)
            exact_cols = zf(h).matrix
            exact_cols = exact_cols / np.linalg.norm(exact_cols, axis=0)
            for k in range(h.k):
                a_exact = abs(h.matrix[k] @ exact_cols[:, k])
                a_approx = abs(h.matrix[k] @ approx.matrix[:, k])
                assert a_approx == pytest.approx(a_exact, rel=0.05)

    def test_unit_column_norms(self, rng):
        h = self.sorted_channels(rng)
        norms = np.linalg.norm(zf_neighbor_approx(h).matrix, axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_middle_user_residual_bound_order(self):
        # residual leakage at the far neighbor tracks omega(t_far)/N^2; the
        # grid avoids the cost zeros where both sides vanish
        from admasim.beams import omega
        n = 128
        for t_adj in np.linspace(1.1 / n, 1.9 / n, 9):
            cosv = np.array([0.1 + t_adj, 0.1, 0.1 - t_adj])
            h = los_matrix(np.arccos(cosv), n=n)
            p = zf_neighbor_approx(h)
            residual = abs(h.matrix[0] @ p.matrix[:, 1])
            signal = abs(h.matrix[1] @ p.matrix[:, 1])
            bound = omega(2 * t_adj, n) / n ** 2
            assert residual / signal <= 25 * bound

    def test_rejects_unsorted(self, rng):
        h = self.sorted_channels(rng)
        shuffled = h.submatrix([2, 0, 1, 3, 4, 5])
        with pytest.raises(ValueError):
            zf_neighbor_approx(shuffled)

    def test_rejects_small_groups(self, rng):
        h = self.sorted_channels(rng).submatrix([0, 1])
        with pytest.raises(ValueError):
            zf_neighbor_approx(h)


class TestInvariants:
    def test_scale_covariance(self, rng):
        h = random_los_matrix(rng, 4, 32)
        c = 3.7
        scaled = ChannelMatrix(matrix=c * h.matrix, users=None)
        assert max_column_sine(mrt(h), mrt(scaled)) <= 1e-10
        assert max_column_sine(zf(h), zf(scaled)) <= 1e-10
        noise = 0.2
        assert max_column_sine(mmse(h, noise), mmse(scaled, c * c * noise)) <= 1e-10

    def test_mmse_sigma_zero_equals_zf(self, rng):
        h = random_los_matrix(rng, 4, 32)
        assert max_column_sine(mmse(h, 0.0), zf(h)) <= 1e-10

    def test_geometric_series_sum_degenerate(self):
        assert geometric_series_sum(1.0 + 0.0j, 7) == 7
        d = np.exp(0.3j)
        expected = sum(d ** m for m in range(7))
        assert geometric_series_sum(d, 7) == pytest.approx(expected, rel=1e-12)

    def test_method_tags(self, rng):
        h = random_los_matrix(rng, 3, 16)
        assert mrt(h).method is PrecoderMethod.MRT
        assert zf(h).method is PrecoderMethod.ZF
        assert mmse(h, 0.1).method is PrecoderMethod.MMSE
