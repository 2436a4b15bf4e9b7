"""Linear precoders for downlink MU-MIMO: MRT, ZF, MMSE.

Also provides the closed-form two-user ZF decomposition (a signal beam plus
an interference-cancellation beam) and the adjacent-neighbor approximation of
multiuser ZF, both valid for single-path (LOS-only) channels.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import ChannelMatrix, UserChannel, steering_vector, spatial_frequency
from .exceptions import SingularChannelError

# Gram condition estimate beyond this declares the user set singular.
COND_LIMIT = 1e12

# |1 - D| below this treats the geometric series sum (1-D^N)/(1-D) as N.
_DEGENERATE_RATIO = 1e-12


class PrecoderMethod(str, Enum):
    MRT = "MRT"
    ZF = "ZF"
    MMSE = "MMSE"
    ZF_NEIGHBOR_APPROX = "ZF_NEIGHBOR_APPROX"


@dataclass(frozen=True, eq=False)
class PrecodingMatrix:
    """N x K precoder.  MRT/ZF/MMSE are Frobenius-normalized to 1; the
    neighbor approximation normalizes each column to unit 2-norm instead."""

    matrix: np.ndarray
    method: PrecoderMethod

    def __post_init__(self):
        if self.method is PrecoderMethod.ZF_NEIGHBOR_APPROX:
            norms = np.linalg.norm(self.matrix, axis=0)
            if np.any(np.abs(norms - 1.0) > 1e-10):
                raise ValueError("neighbor-approx columns must have unit norm")
        else:
            fro = np.linalg.norm(self.matrix)
            if abs(fro - 1.0) > 1e-10:
                raise ValueError("precoder must have unit Frobenius norm")

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.matrix[:, k]

    def to_debug_dict(self) -> dict:
        """Column-major complex pairs for JSON dumps."""
        cols = [[[float(z.real), float(z.imag)] for z in self.matrix[:, j]]
                for j in range(self.matrix.shape[1])]
        return {"method": self.method.value, "columns": cols}


def _as_matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, ChannelMatrix) else np.asarray(h)


def _most_correlated_pair(h: np.ndarray) -> tuple[int, int]:
    norms = np.linalg.norm(h, axis=1)
    norms[norms == 0.0] = 1.0
    hn = h / norms[:, None]
    corr = np.abs(hn @ hn.conj().T)
    np.fill_diagonal(corr, 0.0)
    i, j = np.unravel_index(int(np.argmax(corr)), corr.shape)
    return (int(i), int(j)) if i < j else (int(j), int(i))


def _check_gram_condition(gram: np.ndarray, h: np.ndarray) -> None:
    w = np.linalg.eigvalsh(gram)
    if w[0] <= 0.0 or w[-1] > COND_LIMIT * w[0]:
        pair = _most_correlated_pair(h)
        raise SingularChannelError(
            f"channel Gram is numerically singular (condition estimate beyond "
            f"{COND_LIMIT:.0e}); most correlated user pair: {pair}", pair=pair)


def _hermitian_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a is Hermitian positive definite up to roundoff; Cholesky may still
    # fail near the condition limit, in which case pivoted LU takes over.
    try:
        return cho_solve(cho_factor(a), b)
    except np.linalg.LinAlgError:
        return np.linalg.solve(a, b)


def _frobenius_normalized(p: np.ndarray, method: PrecoderMethod) -> PrecodingMatrix:
    fro = np.linalg.norm(p)
    if fro == 0.0:
        raise ValueError("degenerate (all-zero) channel matrix")
    return PrecodingMatrix(matrix=p / fro, method=method)


def mrt(h) -> PrecodingMatrix:
    """Maximum ratio transmission: conjugate channel, Frobenius-normalized."""
    hm = _as_matrix(h)
    return _frobenius_normalized(hm.conj().T, PrecoderMethod.MRT)


def zf(h) -> PrecodingMatrix:
    """Zero forcing: H^H (H H^H)^-1, Frobenius-normalized.

    Requires K <= N and a numerically invertible Gram; otherwise raises
    SingularChannelError naming the most correlated user pair.
    """
    hm = _as_matrix(h)
    k, n = hm.shape
    if k > n:
        raise ValueError(f"cannot zero-force {k} users with {n} antennas")
    gram = hm @ hm.conj().T
    _check_gram_condition(gram, hm)
    y = _hermitian_solve(gram, hm)  # y = gram^-1 H, so y^H = H^H gram^-1
    return _frobenius_normalized(y.conj().T, PrecoderMethod.ZF)


def mmse(h, noise_power: float) -> PrecodingMatrix:
    """SLNR-balancing precoder: H^H (H H^H + noise * I)^-1, normalized."""
    if noise_power < 0.0:
        raise ValueError("noise power must be nonnegative")
    hm = _as_matrix(h)
    k = hm.shape[0]
    gram = hm @ hm.conj().T + noise_power * np.eye(k)
    y = _hermitian_solve(gram, hm)
    return _frobenius_normalized(y.conj().T, PrecoderMethod.MMSE)


def geometric_series_sum(ratio: complex, n: int) -> complex:
    """Sum of ratio**m for m = 0..n-1, continuous at ratio = 1."""
    if abs(1.0 - ratio) < _DEGENERATE_RATIO:
        return complex(n)
    return (1.0 - ratio ** n) / (1.0 - ratio)


def _los_beam(ch: UserChannel) -> tuple[complex, float, np.ndarray]:
    """(gain, spatial frequency, steering row) of the user's LOS path."""
    xi = spatial_frequency(ch.los.doa, ch.spacing_ratio)
    return ch.los.gain, xi, steering_vector(xi, ch.n_antennas)


@dataclass(frozen=True, eq=False)
class PairZfDecomposition:
    """Two-user ZF column for the served user, split into its two MRT beams.

    The precoding column is proportional to signal_beam - cancel_beam: an
    aligned beam of weight N minus a cancellation beam steered at the other
    user, scaled so the stacked two-user precoder has unit Frobenius norm.
    """

    signal_beam: np.ndarray
    cancel_beam: np.ndarray
    received_amplitude: float
    inv_coeff: float
    column: np.ndarray

    def __post_init__(self):
        if self.received_amplitude < 0.0:
            raise ValueError("received amplitude must be nonnegative")
        if self.inv_coeff <= 0.0:
            raise ValueError("inverse coefficient must be positive")


def pair_zf(ch_j: UserChannel, ch_k: UserChannel) -> PairZfDecomposition:
    """Closed-form ZF column of user j when exactly users {j, k} are served.

    Both channels must be single-path (their LOS component is used) and must
    point in distinct directions.  The received amplitude equals
    |b_j||b_k| * sqrt(N^2 - W) / sqrt(N (|b_j|^2 + |b_k|^2)) where W is the
    squared magnitude of the inter-beam geometric sum.
    """
    if ch_j.spacing_ratio != ch_k.spacing_ratio:
        raise ValueError("mismatched antenna spacing between users")
    n = ch_j.n_antennas
    if ch_k.n_antennas != n:
        raise ValueError("mismatched antenna counts")
    beta_j, xi_j, a_j = _los_beam(ch_j)
    beta_k, xi_k, a_k = _los_beam(ch_k)
    d_kj = np.exp(2j * np.pi * (xi_k - xi_j))
    if abs(1.0 - d_kj) < _DEGENERATE_RATIO:
        raise SingularChannelError("users share the same beam direction",
                                   pair=(0, 1))
    s_kj = geometric_series_sum(d_kj, n)  # equals a_k . a_j^H
    cost = abs(s_kj) ** 2
    bj2 = abs(beta_j) ** 2
    bk2 = abs(beta_k) ** 2
    inv_coeff = bj2 * bk2 * (n * n - cost)
    signal_beam = n * a_j.conj()
    cancel_beam = s_kj * a_k.conj()
    denom = np.sqrt(n * inv_coeff * (bj2 + bk2))
    column = bk2 * np.conj(beta_j) * (signal_beam - cancel_beam) / denom
    amplitude = (abs(beta_j) * abs(beta_k) * np.sqrt(n * n - cost)
                 / np.sqrt(n * (bj2 + bk2)))
    return PairZfDecomposition(signal_beam=signal_beam, cancel_beam=cancel_beam,
                               received_amplitude=float(amplitude),
                               inv_coeff=float(inv_coeff), column=column)


def pair_gram_inverse(ch_j: UserChannel, ch_k: UserChannel) -> np.ndarray:
    """Closed-form inverse of the 2x2 Gram of two single-path channels."""
    n = ch_j.n_antennas
    beta_j, xi_j, _ = _los_beam(ch_j)
    beta_k, xi_k, _ = _los_beam(ch_k)
    d_jk = np.exp(2j * np.pi * (xi_j - xi_k))
    s_jk = geometric_series_sum(d_jk, n)
    s_kj = geometric_series_sum(np.conj(d_jk), n)
    bj2 = abs(beta_j) ** 2
    bk2 = abs(beta_k) ** 2
    inv_coeff = bj2 * bk2 * (n * n - abs(s_jk) ** 2)
    adj = np.array([
        [bk2 * n, -beta_j * np.conj(beta_k) * s_jk],
        [-np.conj(beta_j) * beta_k * s_kj, bj2 * n],
    ])
    return adj / inv_coeff


def _neighbor_brackets(sorted_channels: ChannelMatrix) -> np.ndarray:
    """Unnormalized neighbor-cancellation beams, one column per user.

    Column j is N a_j^H minus the geometric-sum-weighted conjugate steering
    vectors of the (at most two) adjacent users; boundary users cancel only
    their single existing neighbor.
    """
    users = sorted_channels.users
    if users is None:
        raise ValueError("neighbor approximation needs per-user path data")
    k = len(users)
    if k < 3:
        raise ValueError("neighbor approximation needs at least 3 users")
    thetas = np.array([u.los.doa for u in users])
    if np.any(np.diff(thetas) <= 0.0):
        raise ValueError("users must be sorted strictly increasing in angle")
    n = users[0].n_antennas
    beams = [_los_beam(u) for u in users]
    cols = np.empty((n, k), dtype=complex)
    for j in range(k):
        _, xi_j, a_j = beams[j]
        bracket = n * a_j.conj()
        for u in (j - 1, j + 1):
            if 0 <= u < k:
                _, xi_u, a_u = beams[u]
                d_uj = np.exp(2j * np.pi * (xi_u - xi_j))
                bracket -= geometric_series_sum(d_uj, n) * a_u.conj()
        cols[:, j] = bracket
    return cols


def zf_neighbor_approx(sorted_channels: ChannelMatrix) -> PrecodingMatrix:
    """Approximate multiuser ZF by cancelling only the adjacent users.

    Valid when adjacent spacings are at least 1/N in |cos theta| units; each
    column is normalized to unit 2-norm.
    """
    cols = _neighbor_brackets(sorted_channels)
    cols = cols / np.linalg.norm(cols, axis=0)
    return PrecodingMatrix(matrix=cols, method=PrecoderMethod.ZF_NEIGHBOR_APPROX)


def neighbor_zetas(sorted_channels: ChannelMatrix) -> np.ndarray:
    """Power-control norms of the neighbor-cancellation beams."""
    return np.linalg.norm(_neighbor_brackets(sorted_channels), axis=0)
