"""Command-line front end: ``qdsim {ber-sweep,snr-loss,qd-spectrum,validate}``.

Exit status: 0 on success, 1 when a computation or check fails, 2 for bad
arguments or configuration.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, analytics, kernels, montecarlo, validation, wavefield
from .channel import Branch
from .config import ConfigError, dump_config, load_config, require
from .modem import ArrayGeometry

SNR_LOSS_DEFAULTS = {
    "target_ber": 1e-8,
    "theta_x": math.radians(30),
    "theta_y": math.radians(8),
    "averaging": "worst_case_antenna",
}

SWEEP_DEFAULTS = {
    "mx": 2,
    "my": 2,
    "theta_x": 0.0,
    "theta_y": 0.0,
    "snr_grid_db": (0.0, 2.0, 4.0, 6.0, 8.0),
    "min_errors": 100,
    "max_trials_per_point": 10**8,
    "gain": 1 + 0j,
    "initial_phase": 0.0,
    "wavelength": 1.0,
}

SPECTRUM_DEFAULTS = {
    "antennas": 8,
    "wavelength": 1.0,
    "source_speed": 100.0,
    "sample_rate": 8000.0,
    "duration": 1.0,
    "initial_phase": 0.0,
}

VALIDATE_DEFAULTS = {
    "seed": 1,
    "wavelength": 0.125,
    "perpendicular_offset_model": "standard",
    "bound_cases": 1000,
}


def _resolve(args, defaults: dict, required=()) -> dict:
    cfg = dict(defaults)
    if args.config:
        cfg.update(load_config(args.config))
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    require(cfg, required, args.config or "<defaults>")
    return cfg


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
           else _dt.datetime.now(_dt.timezone.utc))
    return now.isoformat(timespec="seconds")


def write_manifest(out: Path, subcommand: str, cfg: dict) -> Path:
    """Write ``<out>.manifest.json`` next to a result file."""
    manifest = {
        "tool": "qdsim",
        "version": __version__,
        "subcommand": subcommand,
        "output": out.name,
        "timestamp": _timestamp(),
        "kernel_backend": kernels.BACKEND,
        "config": dump_config(cfg),
    }
    path = out.with_name(out.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def sim_config(cfg: dict) -> montecarlo.SimConfig:
    return montecarlo.SimConfig(
        seed=cfg["seed"],
        snr_grid_db=cfg["snr_grid_db"],
        orders=(cfg["mx"], cfg["my"]),
        theta_x=cfg["theta_x"],
        theta_y=cfg["theta_y"],
        min_errors=cfg["min_errors"],
        max_trials_per_point=cfg["max_trials_per_point"],
        gain=cfg["gain"],
        initial_phase=cfg["initial_phase"],
        wavelength=cfg["wavelength"],
    )


def cmd_ber_sweep(args) -> int:
    cfg = _resolve(args, SWEEP_DEFAULTS, required=("seed",))
    try:
        sim = sim_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc), args.config or "<defaults>") from None
    rows = montecarlo.run_sweep(sim)
    text = montecarlo.format_csv(rows)
    out = Path(args.out)
    out.write_text(text)
    write_manifest(out, "ber-sweep", cfg)
    for branch, pt in rows:
        flag = "  (upper bound)" if pt.upper_bound_only else ""
        print(f"{branch.value:13s} {pt.snr_db:6.2f} dB  BER {pt.ber:.3e} "
              f"+/- {pt.ci95_halfwidth:.1e}  ({pt.errors}/{pt.trials}){flag}")
    return 0


def cmd_snr_loss(args) -> int:
    cfg = _resolve(args, SNR_LOSS_DEFAULTS)
    try:
        queries = [analytics.LossQuery(cfg["target_ber"], Branch.PARALLEL, cfg["theta_x"], cfg["averaging"]),
                   analytics.LossQuery(cfg["target_ber"], Branch.PERPENDICULAR, cfg["theta_y"], cfg["averaging"])]
    except ValueError as exc:
        raise ConfigError(str(exc), args.config or "<defaults>") from None
    rows = []
    for q in queries:
        try:
            loss = analytics.snr_loss_at_ber(q)
        except ValueError as exc:
            print(f"error: {q.branch.value}: {exc}", file=sys.stderr)
            return 1
        rows.append((q.branch.value, math.degrees(q.theta), loss))
    print(f"target BER {cfg['target_ber']:g}, {cfg['averaging']}")
    print(f"{'branch':13s} {'theta_deg':>9s} {'loss_db':>8s}")
    for b, t, loss in rows:
        print(f"{b:13s} {t:9.3f} {loss:8.2f}")
    if args.out:
        out = Path(args.out)
        with out.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["branch", "theta_deg", "loss_db"])
            for b, t, loss in rows:
                w.writerow([b, f"{t:.6g}", f"{loss:.6f}"])
        write_manifest(out, "snr-loss", cfg)
    return 0


def cmd_qd_spectrum(args) -> int:
    cfg = _resolve(args, SPECTRUM_DEFAULTS)
    src = args.config or "<defaults>"
    lam = cfg["wavelength"]
    q = cfg["antennas"]
    spacing = cfg.get("spacing", lam / q)
    speed, fs = cfg["source_speed"], cfg["sample_rate"]
    expected = speed / lam
    try:
        if not math.isclose(q * spacing, lam, rel_tol=1e-9):
            raise ValueError(f"Qd = lambda violated: {q} x {spacing:g} != {lam:g}")
        if speed < 0:
            raise ValueError("source_speed must be >= 0")
        if expected > 0 and fs <= 2 * expected:
            raise ValueError(f"undersampled: sample_rate {fs:g} Hz <= 2 x shift {expected:g} Hz")
        array = ArrayGeometry(lam, tuple((i / q) * lam for i in range(q)))
        model = wavefield.WaveModel(wavelength=lam, source_speed=speed)
        if speed == 0:
            # static source: the signal never leaves antenna 0
            n = int(round(cfg["duration"] * fs))
            samples = wavefield.baseband_rx(model, [0.0] * n, cfg["initial_phase"])
        else:
            emu = wavefield.QdEmulationConfig.for_speed(array, speed, fs, cfg["initial_phase"])
            samples = wavefield.qd_stepped_signal(emu, model, cfg["duration"])
        estimate = wavefield.estimate_shift(samples, fs)
    except ValueError as exc:
        raise ConfigError(str(exc), src) from None
    freqs, mag = wavefield.spectrum(samples, fs)
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_hz", "magnitude"])
        for f, m in zip(freqs, mag):
            w.writerow([f"{f:.6f}", f"{m:.9e}"])
    write_manifest(out, "qd-spectrum", cfg)
    resolution = fs / len(samples)
    print(f"estimated shift {estimate:g} Hz, expected v_x/lambda = {expected:g} Hz "
          f"(bin {resolution:g} Hz)")
    return 0 if abs(estimate - expected) <= resolution else 1


def cmd_validate(args) -> int:
    cfg = _resolve(args, VALIDATE_DEFAULTS)
    failed = []
    for name, ok, detail in validation.run_all(
            seed=cfg["seed"], wavelength=cfg["wavelength"],
            model=cfg["perpendicular_offset_model"], bound_cases=cfg["bound_cases"]):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qdsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help, out_required=False, config_required=False):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", required=config_required, help="key = value config file")
        sp.add_argument("--out", required=out_required, help="output CSV path")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.set_defaults(func=fn)

    add("ber-sweep", cmd_ber_sweep, "Monte-Carlo BER sweep for both receivers",
        out_required=True, config_required=True)
    add("snr-loss", cmd_snr_loss, "closed-form SNR loss from deviation angles")
    add("qd-spectrum", cmd_qd_spectrum, "spectrum of the switched-antenna signal", out_required=True)
    add("validate", cmd_validate, "run the built-in consistency checks")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
