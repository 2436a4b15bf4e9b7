"""Command line entry point: campaigns and figure-data CSV emission."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .beams import GridSpec, omega, omega_prime, omega_second_numeric, \
    beam_pattern, phi_relative, radiation_map
from .channel import (
    SimParams,
    UserChannel,
    PathComponent,
    channel_debug_dump,
    channel_matrix,
    path_loss_db,
    place_users,
)
from .exceptions import ConfigError
from .harness import (
    config_from_dict,
    config_to_json_dict,
    demo_config,
    load_config,
    run_campaign,
    trial_instance,
)
from .precoding import pair_zf
from .rates import build_precoder


def _write_rows(path: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _cmd_campaign(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = config_from_overrides(config, master_seed=args.seed)
    if args.output is not None:
        config = config_from_overrides(config, output_path=args.output)
    records = run_campaign(config, threads=args.threads)
    failed = sum(r.failed for r in records)
    print(f"wrote {len(records)} rows to {config.output_path}"
          f" ({failed} failed trials)")
    return 0


def config_from_overrides(config, **overrides):
    raw = config_to_json_dict(config)
    raw.update(overrides)
    return config_from_dict(raw)


def _cmd_demo(args) -> int:
    config = demo_config(seed=args.seed, output_path=args.output)
    records = run_campaign(config, threads=args.threads)
    failed = sum(r.failed for r in records)
    print(f"wrote {len(records)} rows to {config.output_path}"
          f" ({failed} failed trials)")
    return 0


def _pair_channels(n: int, theta_a: float, theta_b: float):
    mk = lambda th: UserChannel.from_paths(
        PathComponent(doa=th, gain=1.0 + 0.0j), (), n)
    return mk(theta_a), mk(theta_b)


def _cmd_beam_pattern(args) -> int:
    n = args.n
    os.makedirs(args.out, exist_ok=True)
    thetas = np.linspace(math.pi / 6.0, 5.0 * math.pi / 6.0, args.samples)
    target = math.pi / 2.0

    amp = [abs(phi_relative(th, target, n)) for th in thetas]
    _write_rows(os.path.join(args.out, "aligned_beam_amplitude.csv"),
                "theta,amplitude", zip(thetas, amp))

    for label, spacing in (("close", 0.5 / n), ("far", 6.0 / n)):
        theta_b = math.acos(math.cos(target) - spacing)
        ch_a, ch_b = _pair_channels(n, target, theta_b)
        dec = pair_zf(ch_a, ch_b)
        scale = np.linalg.norm(dec.column) / np.linalg.norm(
            dec.signal_beam - dec.cancel_beam)
        sig = beam_pattern(scale * dec.signal_beam, thetas)
        canc = beam_pattern(scale * dec.cancel_beam, thetas)
        comb = beam_pattern(dec.column, thetas)
        _write_rows(os.path.join(args.out, f"zf_pair_beams_{label}.csv"),
                    "theta,signal,cancel,combined", zip(thetas, sig, canc, comb))

    rows = []
    for th in thetas:
        if th == target:
            continue
        ch_a, ch_b = _pair_channels(n, target, th)
        rows.append((th, pair_zf(ch_a, ch_b).received_amplitude))
    _write_rows(os.path.join(args.out, "zf_received_amplitude.csv"),
                "theta,amplitude", rows)
    print(f"wrote 4 beam-pattern CSVs to {args.out}")
    return 0


def _cmd_omega(args) -> int:
    n = args.n
    h = 1.0 / (1000.0 * n)
    rows = []
    for i in range(1, 301):
        t = i / (100.0 * n)
        w = omega(t, n)
        wp = omega_prime(t, n) if 0.0 < t <= 2.0 / n else ""
        ws = (omega_second_numeric(t, n, h)
              if (1.0 / n + h) < t < (2.0 / n - h) else "")
        rows.append((t, w, wp, ws))
    _write_rows(args.out, "t,omega,omega_prime,omega_second", rows)
    print(f"wrote interference-cost curves to {args.out}")
    return 0


def _cmd_radiation_map(args) -> int:
    params = SimParams(n_antennas=args.n)
    rng = np.random.default_rng(args.seed)
    geoms = place_users(params, args.k, rng)
    # Ideal environment: pure LOS with deterministic path-loss amplitudes.
    users = []
    for geom in geoms:
        pl = path_loss_db("LOS", geom.distance_m, params.carrier_freq_mhz)
        users.append(UserChannel.from_paths(
            PathComponent(doa=geom.theta, gain=10.0 ** (-pl / 20.0)),
            (), params.n_antennas, params.antenna_spacing_ratio, geometry=geom))
    channel = channel_matrix(users)
    noise_w = 10.0 ** ((params.noise_power_dbm - 30.0) / 10.0)
    precoder = build_precoder(channel, args.precoder, noise_w)
    grid = GridSpec.sector_box(params, n_cells=args.grid)
    rmap = radiation_map(precoder, grid, params)
    _write_rows(args.out, "x,y,intensity", rmap.iter_rows())
    print(f"wrote radiation map ({args.grid}x{args.grid}) to {args.out}")
    return 0


def _cmd_dump_trial(args) -> int:
    config = demo_config(seed=args.seed)
    channel, grouping, budget = trial_instance(
        config, args.k, args.g, args.algorithm, args.precoder, args.trial)
    precoders = []
    for members in grouping.groups:
        sub = channel.submatrix(members)
        precoders.append(
            build_precoder(sub, args.precoder, budget.noise_power).to_debug_dict())
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "channels.json"), "w") as fh:
        json.dump(channel_debug_dump(channel.users), fh, indent=1)
    with open(os.path.join(args.out, "grouping.json"), "w") as fh:
        json.dump(grouping.to_json_dict(), fh, indent=1)
    with open(os.path.join(args.out, "precoders.json"), "w") as fh:
        json.dump(precoders, fh, indent=1)
    print(f"wrote trial dumps to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="admasim",
        description="Downlink mmWave massive-MIMO grouping simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("campaign", help="run a campaign from a JSON config")
    p.add_argument("config", help="path to a JSON campaign config")
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.add_argument("--threads", type=int, default=None, help="worker cap")
    p.add_argument("--output", default=None, help="override output CSV path")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("demo", help="run the small built-in campaign")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--output", default="demo_campaign.csv")
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("beam-pattern", help="emit beam pattern CSVs")
    p.add_argument("--n", type=int, default=16, help="antenna count")
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--out", default="beam_patterns")
    p.set_defaults(func=_cmd_beam_pattern)

    p = sub.add_parser("omega", help="emit interference-cost curve CSV")
    p.add_argument("--n", type=int, default=16, help="antenna count")
    p.add_argument("--out", default="omega.csv")
    p.set_defaults(func=_cmd_omega)

    p = sub.add_parser("radiation-map", help="emit a radiation intensity CSV")
    p.add_argument("--precoder", default="ZF", choices=("MRT", "ZF", "MMSE"))
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="radiation_map.csv")
    p.set_defaults(func=_cmd_radiation_map)

    p = sub.add_parser("dump-trial", help="write JSON debug dumps for one trial")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--algorithm", default="ASEG")
    p.add_argument("--precoder", default="ZF")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", default="trial_dump")
    p.set_defaults(func=_cmd_dump_trial)
    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
