"""Deterministic Monte-Carlo campaign execution and CSV emission.

Every trial derives its own random stream from (master seed, K, G, algorithm,
precoder, trial index), so results are bit-identical regardless of worker
count or scheduling order.  Grouping cost is timed separately from the full
trial because precoding dominates totals.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .channel import SimParams, channel_matrix, draw_user_channel, place_users
from .exceptions import ConfigError, SingularChannelError
from .grouping import (
    Grouping,
    SegaParams,
    aseg,
    greedy,
    random_grouping,
    sega,
    sus,
)
from .rates import PowerBudget, dbm_to_watts, system_sum_rate

ALGORITHMS = ("ASEG", "RANDOM", "GREEDY", "SUS", "SEGA")
PRECODERS = ("MRT", "ZF", "MMSE")

CSV_HEADER = "trial,k,g,algorithm,precoder,system_rate_bpshz,grouping_time_us,total_time_us,failed"

THREADS_ENV_VAR = "ADMASIM_THREADS"

DEFAULT_SUS_ALPHA = 0.3


@dataclass(frozen=True)
class CampaignConfig:
    """One sweep specification: sizes, algorithms, precoders, trial budget."""

    sim: SimParams = field(default_factory=SimParams)
    k_sweep: tuple[int, ...] = (32, 64)
    g_sweep: tuple[int, ...] = (1, 2, 4)
    precoders: tuple[str, ...] = ("ZF",)
    algorithms: tuple[str, ...] = ("ASEG", "RANDOM")
    trials: int = 60
    master_seed: int = 0
    output_path: str = "campaign.csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.k_sweep or not self.g_sweep:
            raise ConfigError("k_sweep and g_sweep must be nonempty")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")
        for p in self.precoders:
            if p not in PRECODERS:
                raise ConfigError(f"unknown precoder {p!r}")
        if not self.algorithms or not self.precoders:
            raise ConfigError("need at least one algorithm and one precoder")
        for k in self.k_sweep:
            for g in self.g_sweep:
                if k < g:
                    raise ConfigError(f"K={k} is smaller than G={g}")


def config_from_dict(raw: dict) -> CampaignConfig:
    """Build a config from parsed JSON; keys must match the field names."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {"sim", "k_sweep", "g_sweep", "precoders", "algorithms",
             "trials", "master_seed", "output_path"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(raw)
    if "sim" in kwargs:
        sim_raw = kwargs.pop("sim")
        sim_known = {f for f in SimParams.__dataclass_fields__}
        sim_unknown = set(sim_raw) - sim_known
        if sim_unknown:
            raise ConfigError(f"unknown sim keys: {sorted(sim_unknown)}")
        kwargs["sim"] = SimParams(**sim_raw)
    for name in ("k_sweep", "g_sweep", "precoders", "algorithms"):
        if name in kwargs:
            kwargs[name] = tuple(kwargs[name])
    try:
        return CampaignConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str) -> CampaignConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    k: int
    g: int
    algorithm: str
    precoder: str
    system_rate: float
    grouping_time_us: float
    total_time_us: float
    failed: bool

    @property
    def sort_key(self):
        return (self.k, self.g, self.algorithm, self.precoder, self.trial_index)

    def csv_row(self) -> str:
        rate = "nan" if math.isnan(self.system_rate) else repr(self.system_rate)
        return (f"{self.trial_index},{self.k},{self.g},{self.algorithm},"
                f"{self.precoder},{rate},{self.grouping_time_us:.3f},"
                f"{self.total_time_us:.3f},{int(self.failed)}")


def trial_streams(config: CampaignConfig, k: int, g: int, algorithm: str,
                  precoder: str, trial_index: int):
    """Independent (channel, grouping) random streams for one trial cell."""
    entropy = (config.master_seed, k, g,
               ALGORITHMS.index(algorithm), PRECODERS.index(precoder),
               trial_index)
    ch_seq, grp_seq = np.random.SeedSequence(entropy).spawn(2)
    return np.random.default_rng(ch_seq), np.random.default_rng(grp_seq)


def _dispatch_grouping(algorithm: str, channel, g: int,
                       precoder: str, budget: PowerBudget,
                       rng: np.random.Generator) -> Grouping:
    if algorithm == "ASEG":
        return aseg(channel.angles, g)
    if algorithm == "RANDOM":
        return random_grouping(channel.k, g, rng)
    if algorithm == "GREEDY":
        return greedy(channel, g, precoder, budget)
    if algorithm == "SUS":
        return sus(channel, g, DEFAULT_SUS_ALPHA)
    if algorithm == "SEGA":
        return sega(channel, g, SegaParams.for_user_count(channel.k),
                    rng, budget, precoder=precoder)
    raise ConfigError(f"unknown algorithm {algorithm!r}")


def trial_instance(config: CampaignConfig, k: int, g: int, algorithm: str,
                   precoder: str, trial_index: int):
    """Channels, grouping and budget of one trial, for diagnostics and dumps."""
    rng_ch, rng_grp = trial_streams(config, k, g, algorithm, precoder, trial_index)
    geoms = place_users(config.sim, k, rng_ch)
    users = [draw_user_channel(config.sim, geom, rng_ch) for geom in geoms]
    channel = channel_matrix(users)
    budget = PowerBudget(dbm_to_watts(config.sim.tx_power_dbm),
                         dbm_to_watts(config.sim.noise_power_dbm))
    grouping = _dispatch_grouping(algorithm, channel, g, precoder, budget, rng_grp)
    return channel, grouping, budget


def run_trial(config: CampaignConfig, k: int, g: int, algorithm: str,
              precoder: str, trial_index: int) -> TrialRecord:
    """Generate one drop, group it, precode per group, and record Eq-style
    system sum-rate with even resource shares.

    A numerically singular group marks the trial failed (rate NaN) so sweep
    averages can exclude it; the failure count is reported per cell.
    """
    t_start = time.perf_counter_ns()
    rng_ch, rng_grp = trial_streams(config, k, g, algorithm, precoder, trial_index)
    geoms = place_users(config.sim, k, rng_ch)
    users = [draw_user_channel(config.sim, geom, rng_ch) for geom in geoms]
    channel = channel_matrix(users)
    budget = PowerBudget(dbm_to_watts(config.sim.tx_power_dbm),
                         dbm_to_watts(config.sim.noise_power_dbm))
    t_grp0 = time.perf_counter_ns()
    grouping = _dispatch_grouping(algorithm, channel, g, precoder, budget, rng_grp)
    t_grp1 = time.perf_counter_ns()
    failed = False
    try:
        report = system_sum_rate(channel, grouping, precoder,
                                 budget.total_power, budget.noise_power)
        rate = report.system
    except (SingularChannelError, np.linalg.LinAlgError):
        rate = math.nan
        failed = True
    t_end = time.perf_counter_ns()
    return TrialRecord(
        trial_index=trial_index, k=k, g=g, algorithm=algorithm,
        precoder=precoder, system_rate=rate,
        grouping_time_us=(t_grp1 - t_grp0) / 1000.0,
        total_time_us=(t_end - t_start) / 1000.0,
        failed=failed,
    )


def _run_task(args) -> TrialRecord:
    config, k, g, algorithm, precoder, trial = args
    return run_trial(config, k, g, algorithm, precoder, trial)


def default_thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer") from None
    return 1


def run_campaign(config: CampaignConfig, threads: int | None = None) -> list[TrialRecord]:
    """Run the full sweep cross-product and write the CSV.

    Rows are emitted in sorted (k, g, algorithm, precoder, trial) order no
    matter how trials were scheduled.  On write failure the partial file is
    removed.
    """
    threads = threads if threads is not None else default_thread_count()
    tasks = [
        (config, k, g, a, p, t)
        for k in config.k_sweep
        for g in config.g_sweep
        for a in config.algorithms
        for p in config.precoders
        for t in range(config.trials)
    ]
    if threads <= 1:
        records = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunk = max(1, len(tasks) // (4 * threads))
            records = list(pool.map(_run_task, tasks, chunksize=chunk))
    records.sort(key=lambda r: r.sort_key)
    write_campaign_csv(records, config.output_path, config.master_seed)
    return records


def write_campaign_csv(records: list[TrialRecord], path: str, master_seed: int) -> None:
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w") as fh:
            fh.write(f"# master_seed={master_seed}\n")
            fh.write(CSV_HEADER + "\n")
            for rec in records:
                fh.write(rec.csv_row() + "\n")
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def demo_config(seed: int = 1234, output_path: str = "demo_campaign.csv") -> CampaignConfig:
    """Small built-in campaign: finishes in seconds on a laptop."""
    sim = SimParams(n_antennas=32, cell_radius_m=300.0, n_nlos_paths=2)
    return CampaignConfig(
        sim=sim,
        k_sweep=(8, 16, 24),
        g_sweep=(1, 2, 4),
        precoders=("ZF",),
        algorithms=("ASEG", "RANDOM"),
        trials=5,
        master_seed=seed,
        output_path=output_path,
    )


def config_to_json_dict(config: CampaignConfig) -> dict:
    out = asdict(config)
    out["sim"] = asdict(config.sim)
    for name in ("k_sweep", "g_sweep", "precoders", "algorithms"):
        out[name] = list(out[name])
    return out
