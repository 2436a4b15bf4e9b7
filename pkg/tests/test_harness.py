import json
import math
import time

import numpy as np
import pytest

from admasim.channel import SimParams
from admasim.exceptions import ConfigError
from admasim.grouping import aseg, random_grouping
from admasim.harness import (
    CSV_HEADER,
    CampaignConfig,
    config_from_dict,
    config_to_json_dict,
    demo_config,
    load_config,
    run_campaign,
    run_trial,
)


def small_config(**overrides):
    base = dict(
        sim=SimParams(n_antennas=16, n_nlos_paths=1),
        k_sweep=(6,),
        g_sweep=(2,),
        precoders=("ZF",),
        algorithms=("ASEG",),
        trials=1,
        master_seed=42,
        output_path="out.csv",
    )
    base.update(overrides)
    return CampaignConfig(**base)


def read_rows(path):
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh]
    assert lines[0].startswith("# master_seed=")
    assert lines[1] == CSV_HEADER
    return lines[2:]


def strip_times(rows):
    out = []
    for row in rows:
        f = row.split(",")
        out.append(",".join(f[:6] + [f[8]]))
    return out


class TestConfig:
    def test_rejects_bad_sweeps(self):
        with pytest.raises(ConfigError):
            small_config(k_sweep=())
        with pytest.raises(ConfigError):
            small_config(trials=0)
        with pytest.raises(ConfigError):
            small_config(k_sweep=(2,), g_sweep=(4,))  # K < G
        with pytest.raises(ConfigError):
            small_config(algorithms=("MAGIC",))
        with pytest.raises(ConfigError):
            small_config(precoders=("DPC",))

    def test_round_trip_through_json(self, tmp_path):
        cfg = small_config()
        raw = config_to_json_dict(cfg)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(raw))
        loaded = load_config(str(path))
        assert loaded == cfg

    def test_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            config_from_dict({"sim": {}, "bogus": 1})
        with pytest.raises(ConfigError):
            config_from_dict({"sim": {"bogus": 1}})

    def test_rejects_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestRunTrial:
    def test_bit_identical_records_modulo_times(self):
        cfg = small_config()
        a = run_trial(cfg, 6, 2, "ASEG", "ZF", 0)
        b = run_trial(cfg, 6, 2, "ASEG", "ZF", 0)
        assert a.system_rate == b.system_rate
        assert a.failed == b.failed
        assert (a.trial_index, a.k, a.g, a.algorithm, a.precoder) == \
               (b.trial_index, b.k, b.g, b.algorithm, b.precoder)

    def test_single_group_algorithms_coincide(self):
        cfg = small_config(algorithms=("ASEG", "RANDOM"), g_sweep=(1,))
        a = run_trial(cfg, 6, 1, "ASEG", "ZF", 3)
        b = run_trial(cfg, 6, 1, "RANDOM", "ZF", 3)
        # both serve the full set in one group; the channel streams differ
        # by algorithm, so compare against a re-run of the same cell instead
        assert a.system_rate > 0 and b.system_rate > 0
        a2 = run_trial(cfg, 6, 1, "ASEG", "ZF", 3)
        assert a.system_rate == a2.system_rate

    def test_single_group_rate_is_grouping_independent(self):
        # with G=1 every algorithm returns the same (full) group, so rates
        # agree when evaluated on the same channel instance
        from admasim.harness import trial_instance
        from admasim.rates import system_sum_rate

        cfg = small_config(g_sweep=(1,))
        channel, grouping, budget = trial_instance(cfg, 6, 1, "ASEG", "ZF", 0)
        rng = np.random.default_rng(0)
        rnd = random_grouping(6, 1, rng)
        r1 = system_sum_rate(channel, grouping, "ZF",
                             budget.total_power, budget.noise_power).system
        r2 = system_sum_rate(channel, rnd, "ZF",
                             budget.total_power, budget.noise_power).system
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_all_algorithms_produce_records(self):
        cfg = small_config(algorithms=("ASEG", "RANDOM", "GREEDY", "SUS", "SEGA"),
                           k_sweep=(6,), g_sweep=(2,))
        for alg in cfg.algorithms:
            rec = run_trial(cfg, 6, 2, alg, "ZF", 0)
            assert rec.algorithm == alg
            assert not rec.failed
            assert rec.system_rate > 0
            assert rec.grouping_time_us >= 0
            assert rec.total_time_us >= rec.grouping_time_us


class TestRunCampaign:
    def test_minimal_campaign_row_count(self, tmp_path):
        out = tmp_path / "one.csv"
        cfg = small_config(output_path=str(out))
        records = run_campaign(cfg)
        assert len(records) == 1
        assert len(read_rows(str(out))) == 1

    def test_cross_product_row_count(self, tmp_path):
        out = tmp_path / "grid.csv"
        cfg = small_config(k_sweep=(6, 8), algorithms=("ASEG", "RANDOM"),
                           trials=3, output_path=str(out))
        records = run_campaign(cfg)
        assert len(records) == 12
        assert len(read_rows(str(out))) == 12

    def test_rows_deterministic_across_runs(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        cfg1 = small_config(k_sweep=(6, 8), algorithms=("ASEG", "RANDOM"),
                            trials=2, output_path=str(out1))
        cfg2 = small_config(k_sweep=(6, 8), algorithms=("ASEG", "RANDOM"),
                            trials=2, output_path=str(out2))
        run_campaign(cfg1)
        run_campaign(cfg2)
        assert strip_times(read_rows(str(out1))) == strip_times(read_rows(str(out2)))

    def test_rows_identical_across_worker_counts(self, tmp_path):
        out1 = tmp_path / "t1.csv"
        out2 = tmp_path / "t4.csv"
        cfg1 = small_config(k_sweep=(6,), algorithms=("ASEG", "RANDOM"),
                            trials=4, output_path=str(out1))
        cfg2 = small_config(k_sweep=(6,), algorithms=("ASEG", "RANDOM"),
                            trials=4, output_path=str(out2))
        run_campaign(cfg1, threads=1)
        run_campaign(cfg2, threads=4)
        assert strip_times(read_rows(str(out1))) == strip_times(read_rows(str(out2)))

    def test_write_failure_leaves_no_partial_file(self, tmp_path):
        cfg = small_config(output_path=str(tmp_path / "missing" / "out.csv"))
        with pytest.raises(OSError):
            run_campaign(cfg)
        assert not (tmp_path / "missing").exists()


class TestDemoConfig:
    def test_demo_runs_clean(self, tmp_path):
        out = tmp_path / "demo.csv"
        cfg = demo_config(seed=7, output_path=str(out))
        records = run_campaign(cfg)
        assert len(records) == 3 * 3 * 1 * 2 * 5
        assert all(math.isfinite(r.system_rate) for r in records if not r.failed)
        rows = read_rows(str(out))
        assert len(rows) == len(records)


class TestAsegScaling:
    def test_near_linear_scaling(self):
        # sorting dominates; doubling K must not much more than double cost.
        # measurements interleave the two sizes so clock drift and background
        # load hit both batches equally
        rng = np.random.default_rng(0)
        angles_small = rng.uniform(0.6, 2.5, 2 ** 10)
        angles_big = rng.uniform(0.6, 2.5, 2 ** 11)

        def timed(angles):
            t0 = time.perf_counter_ns()
            aseg(angles, 4)
            return time.perf_counter_ns() - t0

        timed(angles_small), timed(angles_big)  # warm-up
        small_times, big_times = [], []
        for _ in range(101):
            small_times.append(timed(angles_small))
            big_times.append(timed(angles_big))
        assert np.median(big_times) <= 2.5 * np.median(small_times)
