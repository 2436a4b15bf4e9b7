"""User grouping algorithms for multiplexed downlink service.

Five strategies produce a partition of the user set into G disjoint groups:
angle-stride equalization (ASEG), uniform random chunking, rate-greedy
filling, semiorthogonal user selection (SUS), and an elitist genetic search
over valid partitions (SEGA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelMatrix
from .exceptions import ConfigError, SingularChannelError
from .rates import (
    PowerBudget,
    group_sum_rate,
    system_sum_rate,
    zf_group_rates_fast,
    zf_system_rate_fast,
    build_precoder,
)


class GroupingOrigin(str, Enum):
    ASEG = "ASEG"
    RANDOM = "RANDOM"
    GREEDY = "GREEDY"
    SUS = "SUS"
    SEGA = "SEGA"


@dataclass(frozen=True)
class Grouping:
    """A partition of user indices (0-based) into disjoint groups."""

    groups: tuple[tuple[int, ...], ...]
    origin: GroupingOrigin

    @property
    def g(self) -> int:
        return len(self.groups)

    def membership(self) -> dict[int, int]:
        return {u: gi for gi, grp in enumerate(self.groups) for u in grp}

    def to_json_dict(self) -> dict:
        """1-based index lists for external tooling."""
        return {
            "origin": self.origin.value,
            "groups": [[u + 1 for u in grp] for grp in self.groups],
        }


@dataclass(frozen=True)
class SegaParams:
    """Genetic-search budget: population size, elite count, iterations."""

    population: int = 16
    elites: int = 8
    iterations: int = 20
    crossover_swaps: int = 1
    mutation_rate: float = 0.05

    def __post_init__(self):
        if self.population < 1 or self.elites < 1 or self.iterations < 0:
            raise ValueError("population and elites must be positive")
        if self.elites > self.population:
            raise ValueError("elites cannot exceed the population")
        if self.crossover_swaps < 1:
            raise ValueError("crossover_swaps must be positive")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be a probability")

    @classmethod
    def for_user_count(cls, k: int) -> "SegaParams":
        # Search budget on the same order of magnitude as the user count.
        elites = max(1, k // 2)
        return cls(population=2 * elites, elites=elites, iterations=k,
                   crossover_swaps=1, mutation_rate=0.05)


def _ordered_group(members, angles) -> tuple[int, ...]:
    members = [int(u) for u in members]
    if angles is None:
        return tuple(sorted(members))
    return tuple(sorted(members, key=lambda u: (angles[u], u)))


def validate(grouping: Grouping, k: int, angles=None) -> str | None:
    """Return None when the partition is valid, else the first violation."""
    seen: set[int] = set()
    for gi, grp in enumerate(grouping.groups):
        for u in grp:
            if u in seen:
                return f"disjointness violation: user {u} appears in multiple groups"
            seen.add(u)
        expected = _ordered_group(grp, angles)
        if tuple(grp) != expected:
            return f"ordering violation: group {gi} is not stored sorted"
    missing = set(range(k)) - seen
    if missing:
        return f"coverage violation: users {sorted(missing)} are unassigned"
    extra = seen - set(range(k))
    if extra:
        return f"coverage violation: unknown user indices {sorted(extra)}"
    return None


def aseg(angles, g_count: int) -> Grouping:
    """Angle-stride grouping: sort users by angle, deal them out with stride G.

    Group i takes the sorted positions i, i+G, i+2G, ...; ties on equal
    angles break by original index.  The adjacent in-group spacings are the
    most even achievable, which maximizes any concave spacing payoff.
    """
    angles = np.asarray(angles, dtype=float)
    k = angles.shape[0]
    if not 1 <= g_count <= k:
        raise ValueError("need 1 <= group count <= user count")
    order = np.argsort(angles, kind="stable")
    groups = tuple(tuple(int(u) for u in order[i::g_count]) for i in range(g_count))
    return Grouping(groups=groups, origin=GroupingOrigin.ASEG)


def _chunk_sizes(k: int, g_count: int) -> list[int]:
    base, extra = divmod(k, g_count)
    return [base + 1] * extra + [base] * (g_count - extra)


def random_grouping(k: int, g_count: int, rng: np.random.Generator) -> Grouping:
    """Uniform random near-equal partition: shuffle, then chunk."""
    if not 1 <= g_count <= k:
        raise ValueError("need 1 <= group count <= user count")
    perm = rng.permutation(k)
    groups = []
    start = 0
    for size in _chunk_sizes(k, g_count):
        groups.append(tuple(sorted(int(u) for u in perm[start:start + size])))
        start += size
    return Grouping(groups=tuple(groups), origin=GroupingOrigin.RANDOM)


def greedy(h: ChannelMatrix, g_count: int, precoder, budget: PowerBudget) -> Grouping:
    """Rate-greedy filling: visit groups round-robin and commit, at every
    step, the unassigned user whose tentative join maximizes the group
    sum-rate under the chosen precoder.

    A candidate whose join makes the group numerically singular scores -inf
    and is skipped rather than crashing the search.
    """
    k = h.k
    if not 1 <= g_count <= k:
        raise ValueError("need 1 <= group count <= user count")
    fast_zf = str(precoder).upper().endswith("ZF")
    sizes = _chunk_sizes(k, g_count)
    groups: list[list[int]] = [[] for _ in range(g_count)]
    unassigned = list(range(k))
    gi = 0
    while unassigned:
        while len(groups[gi]) >= sizes[gi]:
            gi = (gi + 1) % g_count
        best_user = None
        best_rate = -math.inf
        for u in unassigned:
            trial = groups[gi] + [u]
            try:
                if fast_zf:
                    rate = float(zf_group_rates_fast(h.matrix[trial], budget).sum())
                else:
                    sub = h.submatrix(trial)
                    p = build_precoder(sub, precoder, budget.noise_power)
                    rate = group_sum_rate(sub, p, budget)
            except (SingularChannelError, np.linalg.LinAlgError):
                rate = -math.inf
            if rate > best_rate:
                best_rate = rate
                best_user = u
        if best_user is None:  # every remaining candidate is singular
            best_user = unassigned[0]
        groups[gi].append(best_user)
        unassigned.remove(best_user)
        gi = (gi + 1) % g_count
    angles = h.angles
    ordered = tuple(_ordered_group(grp, angles) for grp in groups)
    return Grouping(groups=ordered, origin=GroupingOrigin.GREEDY)


def sus(h: ChannelMatrix, g_count: int, alpha: float) -> Grouping:
    """Semiorthogonal user selection, repeated until every user is placed.

    Each group grows by the unselected user with the largest channel
    component orthogonal to the span of the group's current members, and
    admits only users whose normalized projection onto that span stays below
    alpha.  A group closes at the size cap ceil(K/G) or when nobody is
    admissible; leftovers after the last group join it regardless.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie strictly between 0 and 1")
    k = h.k
    if not 1 <= g_count <= k:
        raise ValueError("need 1 <= group count <= user count")
    hm = h.matrix
    norms_sq = np.sum(np.abs(hm) ** 2, axis=1)
    cap = math.ceil(k / g_count)
    unselected = list(range(k))
    groups: list[list[int]] = []
    for _ in range(g_count):
        group: list[int] = []
        basis: list[np.ndarray] = []
        while unselected and len(group) < cap:
            cand = np.array(unselected)
            if basis:
                q = np.vstack(basis)
                proj_sq = np.sum(np.abs(hm[cand] @ q.conj().T) ** 2, axis=1)
            else:
                proj_sq = np.zeros(cand.shape[0])
            admissible = proj_sq < (alpha * alpha) * norms_sq[cand]
            if not np.any(admissible):
                break
            orth_sq = np.where(admissible, norms_sq[cand] - proj_sq, -np.inf)
            u = int(cand[int(np.argmax(orth_sq))])
            group.append(u)
            unselected.remove(u)
            residual = hm[u].copy()
            for q_vec in basis:
                residual -= (q_vec.conj() @ hm[u]) * q_vec
            r_norm = np.linalg.norm(residual)
            if r_norm > 0.0:
                basis.append(residual / r_norm)
        groups.append(group)
    if unselected:
        groups[-1].extend(unselected)
    angles = h.angles
    ordered = tuple(_ordered_group(grp, angles) for grp in groups)
    return Grouping(groups=ordered, origin=GroupingOrigin.SUS)


def _canonical_key(groups: list[list[int]]) -> tuple:
    return tuple(sorted(tuple(sorted(grp)) for grp in groups))


def sega(
    h: ChannelMatrix,
    g_count: int,
    params: SegaParams,
    rng: np.random.Generator,
    budget: PowerBudget,
    precoder="ZF",
) -> Grouping:
    """Elitist genetic search over valid partitions, fitness = system sum-rate.

    Crossover keeps partitions valid by exchanging users between groups
    instead of splicing chromosomes: a child of two elites relocates users to
    the group their second parent keeps them in, via swaps.  Mutation swaps a
    random user pair across groups.  Parents and children are ranked jointly
    and the best individuals survive; the best partition ever evaluated is
    returned.
    """
    k = h.k
    if not 1 <= g_count <= k:
        raise ValueError("need 1 <= group count <= user count")
    fast_zf = str(precoder).upper().endswith("ZF")
    cache: dict[tuple, float] = {}

    def fitness(groups: list[list[int]]) -> float:
        key = _canonical_key(groups)
        if key not in cache:
            try:
                if fast_zf:
                    cache[key] = zf_system_rate_fast(h, groups, budget)
                else:
                    candidate = Grouping(
                        groups=tuple(tuple(sorted(grp)) for grp in groups),
                        origin=GroupingOrigin.SEGA)
                    report = system_sum_rate(h, candidate, precoder,
                                             budget.total_power, budget.noise_power)
                    cache[key] = report.system
            except (SingularChannelError, np.linalg.LinAlgError):
                cache[key] = -math.inf
        return cache[key]

    def crossover(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
        child = [list(grp) for grp in a]
        where = {u: gi for gi, grp in enumerate(child) for u in grp}
        for _ in range(params.crossover_swaps):
            gi = int(rng.integers(g_count))
            if not b[gi]:
                continue
            u = b[gi][int(rng.integers(len(b[gi])))]
            src = where[u]
            if src == gi:
                continue
            v = child[gi][int(rng.integers(len(child[gi])))]
            child[src][child[src].index(u)] = v
            child[gi][child[gi].index(v)] = u
            where[u], where[v] = gi, src
        return child

    def mutate(groups: list[list[int]]) -> None:
        if g_count < 2:
            return
        g1, g2 = rng.choice(g_count, size=2, replace=False)
        if not groups[g1] or not groups[g2]:
            return
        i1 = int(rng.integers(len(groups[g1])))
        i2 = int(rng.integers(len(groups[g2])))
        groups[g1][i1], groups[g2][i2] = groups[g2][i2], groups[g1][i1]

    population = [
        [list(grp) for grp in random_grouping(k, g_count, rng).groups]
        for _ in range(params.population)
    ]
    scored = [(fitness(ind), ind) for ind in population]
    best_fit, best = max(scored, key=lambda s: s[0])
    for _ in range(params.iterations):
        scored.sort(key=lambda s: s[0], reverse=True)
        elites = scored[: params.elites]
        children = []
        for _ in range(params.population - params.elites):
            ia = int(rng.integers(len(elites)))
            ib = int(rng.integers(len(elites)))
            child = crossover(elites[ia][1], elites[ib][1])
            if rng.random() < params.mutation_rate:
                mutate(child)
            children.append((fitness(child), child))
        scored = list(elites) + children
        top_fit, top = max(scored, key=lambda s: s[0])
        if top_fit > best_fit:
            best_fit, best = top_fit, top
    angles = h.angles
    ordered = tuple(_ordered_group(grp, angles) for grp in best)
    return Grouping(groups=ordered, origin=GroupingOrigin.SEGA)


def _angle_ranks(angles) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    order = np.argsort(angles, kind="stable")
    ranks = np.empty(angles.shape[0], dtype=int)
    ranks[order] = np.arange(angles.shape[0])
    return ranks


def proposition_exchange(grouping: Grouping, angles, which: int) -> Grouping | None:
    """Detect one spacing violation and apply the improving exchange.

    which=1 finds an interleaving violation (a whole adjacent pair of one
    group strictly inside an adjacent gap of another) and swaps the group
    prefixes.  which=2 finds a boundary overrun (two users of one group both
    beyond another group's largest member) and transfers the outer one.
    Returns the improved grouping, or None when no violation exists; both
    exchanges strictly increase any concave spacing payoff.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    ranks = _angle_ranks(angles)
    by_rank = [sorted((int(ranks[u]), int(u)) for u in grp)
               for grp in grouping.groups]
    g_count = len(by_rank)
    angles = np.asarray(angles, dtype=float)

    def rebuilt(groups_ranked: list[list[tuple[int, int]]]) -> Grouping:
        groups = tuple(
            _ordered_group([u for _, u in grp], angles) for grp in groups_ranked
        )
        return Grouping(groups=groups, origin=grouping.origin)

    if which == 1:
        for i in range(g_count):
            gi = by_rank[i]
            for j in range(g_count):
                if i == j:
                    continue
                gj = by_rank[j]
                for l in range(len(gi) - 1):
                    lo, hi = gi[l][0], gi[l + 1][0]
                    for kk in range(len(gj) - 1):
                        if lo < gj[kk][0] and gj[kk + 1][0] < hi:
                            new_i = gj[: kk + 1] + gi[l + 1:]
                            new_j = gi[: l + 1] + gj[kk + 1:]
                            out = [list(grp) for grp in by_rank]
                            out[i], out[j] = new_i, new_j
                            return rebuilt(out)
        return None

    for i in range(g_count):
        gi = by_rank[i]
        for j in range(g_count):
            if i == j or not by_rank[j]:
                continue
            boundary = by_rank[j][-1][0]
            for kk in range(len(gi) - 1):
                if gi[kk][0] > boundary:
                    out = [list(grp) for grp in by_rank]
                    moved = out[i].pop(kk + 1)
                    out[j].append(moved)
                    out[j].sort()
                    return rebuilt(out)
    return None
