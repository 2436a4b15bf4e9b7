"""SINR / sum-rate evaluation and the spacing-based grouping objectives.

Within a group, each user's beam is the corresponding precoder column scaled
to unit norm and driven with an explicit per-beam power; the per-beam powers
sum to the group's total budget (equal split by default).  Groups on separate
time/frequency resources do not interfere; the system rate weights group sums
by their resource shares.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix
from .exceptions import ConfigError, SingularChannelError
from .beams import omega
from .precoding import (
    COND_LIMIT,
    PrecoderMethod,
    PrecodingMatrix,
    mmse,
    mrt,
    neighbor_zetas,
    zf,
)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class PowerBudget:
    """Linear power bookkeeping for one group.

    per_beam is the list of beam powers; None means an equal split of the
    total over the group at evaluation time.
    """

    total_power: float
    noise_power: float
    per_beam: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.total_power < 0.0 or self.noise_power < 0.0:
            raise ValueError("powers must be nonnegative")
        if self.per_beam is not None:
            if any(p < 0.0 for p in self.per_beam):
                raise ValueError("per-beam powers must be nonnegative")
            if sum(self.per_beam) > self.total_power + 1e-12:
                raise ValueError("per-beam powers exceed the total budget")

    def shares_for(self, m: int) -> np.ndarray:
        if self.per_beam is None:
            return np.full(m, self.total_power / m)
        if len(self.per_beam) != m:
            raise ValueError(f"expected {m} per-beam powers, got {len(self.per_beam)}")
        return np.asarray(self.per_beam, dtype=float)


@dataclass(frozen=True, eq=False)
class RateReport:
    """Per-user, per-group and system rates in bits/s/Hz."""

    per_user: np.ndarray
    per_group: np.ndarray
    system: float


def _beam_gains(h, precoder: PrecodingMatrix) -> np.ndarray:
    """h_k . p_i for unit-norm beam directions; shape (users, beams)."""
    hm = h.matrix if isinstance(h, ChannelMatrix) else np.asarray(h)
    cols = precoder.matrix
    norms = np.linalg.norm(cols, axis=0)
    return hm @ (cols / norms)


def _group_rates(h, precoder: PrecodingMatrix, budget: PowerBudget) -> np.ndarray:
    gains = np.abs(_beam_gains(h, precoder)) ** 2
    m = gains.shape[0]
    if gains.shape[1] != m:
        raise ValueError("precoder column count must match the group size")
    powers = budget.shares_for(m)
    weighted = gains * powers[None, :]
    signal = np.diag(weighted)
    interference = weighted.sum(axis=1) - signal
    return np.log2(1.0 + signal / (interference + budget.noise_power))


def user_rate(h_group, p_group: PrecodingMatrix, k: int, budget: PowerBudget) -> float:
    """Rate of user k in its group, counting only intra-group interference."""
    return float(_group_rates(h_group, p_group, budget)[k])


def group_sum_rate(h_group, p_group: PrecodingMatrix, budget: PowerBudget) -> float:
    return float(_group_rates(h_group, p_group, budget).sum())


def group_interference(h_group, p_group: PrecodingMatrix, budget: PowerBudget) -> np.ndarray:
    """Received intra-group interference power per user, in watts."""
    gains = np.abs(_beam_gains(h_group, p_group)) ** 2
    m = gains.shape[0]
    powers = budget.shares_for(m)
    weighted = gains * powers[None, :]
    # sum the off-diagonal terms directly: subtracting the diagonal from the
    # row sum would absorb interference smaller than the signal's ulp
    np.fill_diagonal(weighted, 0.0)
    return weighted.sum(axis=1)


def zf_group_rates_fast(h_group, budget: PowerBudget) -> np.ndarray:
    """ZF group rates without forming the precoder.

    Zero forcing makes H P' = I, so the unit-norm beam gain of user k is
    1/||p'_k|| with ||p'_k||^2 = (G^-1)_kk, and interference vanishes in the
    algebra rather than to roundoff.  Equals the generic pipeline to float
    precision at a fraction of the cost; used for greedy / genetic scoring.

    Raises numpy.linalg.LinAlgError on singular groups and
    SingularChannelError when the Cholesky pivot spread crosses the
    condition limit.
    """
    hm = h_group.matrix if isinstance(h_group, ChannelMatrix) else np.asarray(h_group)
    m = hm.shape[0]
    gram = hm @ hm.conj().T
    chol = np.linalg.cholesky(gram)  # LinAlgError when not numerically PD
    pivots = np.abs(np.diag(chol))
    if (pivots.max() / pivots.min()) ** 2 > COND_LIMIT:
        raise SingularChannelError("group Gram beyond the condition limit")
    inv_diag = np.linalg.solve(gram, np.eye(m, dtype=complex)).diagonal().real
    powers = budget.shares_for(m)
    return np.log2(1.0 + powers / (inv_diag * budget.noise_power))


def zf_system_rate_fast(channel: ChannelMatrix, groups, budget: PowerBudget) -> float:
    """Even-share system sum-rate under ZF via the fast group evaluator."""
    total = 0.0
    for members in groups:
        if len(members) == 0:
            continue
        total += float(zf_group_rates_fast(channel.matrix[list(members)], budget).sum())
    return total / len(groups)


def build_precoder(h_group, method, noise_power: float) -> PrecodingMatrix:
    method = PrecoderMethod(method)
    if method is PrecoderMethod.MRT:
        return mrt(h_group)
    if method is PrecoderMethod.ZF:
        return zf(h_group)
    if method is PrecoderMethod.MMSE:
        return mmse(h_group, noise_power)
    raise ValueError(f"unsupported campaign precoder: {method}")


def system_sum_rate(
    channel: ChannelMatrix,
    grouping,
    method,
    total_power: float,
    noise_power: float,
    shares=None,
) -> RateReport:
    """Evaluate a grouping end to end: per-group precoding, rates, and the
    share-weighted system sum-rate.

    shares defaults to the even split 1/G and must sum to 1.
    """
    groups = grouping.groups
    g_count = len(groups)
    if shares is None:
        shares = np.full(g_count, 1.0 / g_count)
    else:
        shares = np.asarray(shares, dtype=float)
        if shares.shape[0] != g_count:
            raise ConfigError("one resource share per group required")
        if np.any(shares <= 0.0) or abs(shares.sum() - 1.0) > 1e-9:
            raise ConfigError("resource shares must be positive and sum to 1")
    per_user = np.zeros(channel.k)
    per_group = np.zeros(g_count)
    for gi, members in enumerate(groups):
        if len(members) == 0:
            warnings.warn(f"group {gi} is empty; it contributes zero rate")
            continue
        sub = channel.submatrix(members)
        precoder = build_precoder(sub, method, noise_power)
        budget = PowerBudget(total_power, noise_power)
        rates = _group_rates(sub, precoder, budget)
        per_user[list(members)] = rates
        per_group[gi] = rates.sum()
    system = float(np.dot(shares, per_group))
    return RateReport(per_user=per_user, per_group=per_group, system=system)


def beam_gamma(
    sorted_channels: ChannelMatrix, k: int, beam_power: float, noise_power: float
) -> float:
    """Effective SNR coefficient of user k under the neighbor approximation:
    beam_power * |gain|^2 / (zeta^2 * noise)."""
    zeta = neighbor_zetas(sorted_channels)[k]
    beta = sorted_channels.users[k].los.gain
    return beam_power * abs(beta) ** 2 / (zeta * zeta * noise_power)


def approx_user_rate(sorted_group_angles, k: int, gamma_k: float, n: int) -> float:
    """High-SNR rate approximation from the neighbor spacings alone.

    log2(gamma * N^4) minus 2/N^2 times the interference costs to the (at
    most two) adjacent users; boundary users drop the missing neighbor term.
    """
    angles = np.asarray(sorted_group_angles, dtype=float)
    if np.any(np.diff(angles) <= 0.0):
        raise ValueError("group angles must be sorted strictly increasing")
    rate = math.log2(gamma_k * float(n) ** 4)
    if k > 0:
        t = math.cos(angles[k - 1]) - math.cos(angles[k])
        rate -= (2.0 / n ** 2) * omega(t, n)
    if k < angles.size - 1:
        t = math.cos(angles[k]) - math.cos(angles[k + 1])
        rate -= (2.0 / n ** 2) * omega(t, n)
    return rate


def _sorted_member_angles(grouping, angles: np.ndarray) -> list[np.ndarray]:
    out = []
    for gi, members in enumerate(grouping.groups):
        if len(members) == 0:
            warnings.warn(f"group {gi} is empty; it contributes no spacing terms")
            out.append(np.empty(0))
            continue
        member_angles = angles[list(members)]
        out.append(np.sort(member_angles))
    return out


def sqrt_spacing(x: float) -> float:
    """Default concave, even payoff for an angular spacing."""
    return math.sqrt(abs(x))


def p2_objective(grouping, angles, g_fn=sqrt_spacing) -> float:
    """Mean over groups of the summed payoff of adjacent in-group spacings.

    g_fn must be even, increasing, and strictly concave on x > 0 for the
    exchange arguments to hold; the default sqrt satisfies this globally.
    """
    angles = np.asarray(angles, dtype=float)
    total = 0.0
    for member_angles in _sorted_member_angles(grouping, angles):
        for a, b in zip(member_angles[:-1], member_angles[1:]):
            total += g_fn(b - a)
    return total / len(grouping.groups)


def p1_objective(grouping, angles, n: int) -> float:
    """Spacing objective with payoff -omega(t) in cos(theta) units.

    Zero (the maximum) exactly when every adjacent in-group spacing sits on
    an interference-cost zero.
    """
    angles = np.asarray(angles, dtype=float)
    total = 0.0
    for member_angles in _sorted_member_angles(grouping, angles):
        for a, b in zip(member_angles[:-1], member_angles[1:]):
            total -= omega(math.cos(a) - math.cos(b), n)
    return total / len(grouping.groups)
