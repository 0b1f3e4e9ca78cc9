"""Self-checks run by ``qdsim validate``.

Each check returns ``(passed, detail)``.  Monte-Carlo comparisons use a
4-sigma band so the verdict is stable across seeds.
"""
from __future__ import annotations

import math

import numpy as np

from . import analytics, channel, modem, montecarlo, wavefield
from .channel import Branch

MC_Z_LIMIT = 4.0


def check_joint_closure(orders=(2, 4, 8), wavelength: float = 1.0):
    eps_phase = np.spacing(modem.TWO_PI)
    eps_pos = 2 * np.spacing(wavelength)
    for mx in orders:
        for my in orders:
            cx, cy = modem.PskConstellation(mx), modem.PskConstellation(my)
            arr = modem.ArrayGeometry.for_constellations(cx, cy, wavelength)
            par = channel.ChannelConfig(Branch.PARALLEL)
            per = channel.ChannelConfig(Branch.PERPENDICULAR)
            for bx in cx.bit_labels:
                for by in cy.bit_labels:
                    s = modem.joint_modulate(bx, by, cx, cy, arr)
                    err = abs(math.remainder(s.phi_y + s.phi_q - s.phi_x, modem.TWO_PI))
                    if err > eps_phase:
                        return False, f"M=({mx},{my}) bits {bx},{by}: identity off by {err:.3g}"
                    if abs(s.position - modem.antenna_position(s.phi_q, wavelength)) > eps_pos:
                        return False, f"M=({mx},{my}) bits {bx},{by}: antenna position mismatch"
                    if modem.hard_demodulate(channel.transmit_parallel(s, par), cx) != bx:
                        return False, f"M=({mx},{my}) bits {bx},{by}: parallel loopback failed"
                    if modem.hard_demodulate(channel.transmit_perpendicular(s, per), cy) != by:
                        return False, f"M=({mx},{my}) bits {bx},{by}: perpendicular loopback failed"
    return True, f"all bit pairs for M in {list(orders)}^2"


def check_perpendicular_independence():
    c = modem.PskConstellation(4)
    arr = modem.ArrayGeometry.for_constellations(c, c)
    cfg = channel.ChannelConfig(Branch.PERPENDICULAR, gain=0.7 - 0.2j, initial_phase=0.3)
    for by in range(4):
        seen = {channel.transmit_perpendicular(modem.joint_modulate(bx, by, c, c, arr), cfg)
                for bx in range(4)}
        if len(seen) != 1:
            return False, f"source label {by}: output depends on the antenna"
    return True, "noiseless perpendicular output identical across antennas"


def check_offset_bounds(seed: int, cases: int = 1000, wavelength: float = 0.125,
                        model: str = "standard"):
    perp = channel.PERPENDICULAR_OFFSET_MODELS[model]
    rng = np.random.default_rng([seed, 5])
    theta = rng.uniform(0.0, channel.MAX_DEVIATION, cases)
    x = rng.uniform(0.0, wavelength / 2, cases)
    bx = math.pi * theta**2 / 2
    by = math.pi * theta
    dx = np.abs(channel.parallel_offset(x, theta, wavelength))
    dy = np.abs(perp(x, theta, wavelength))
    viol = int(np.sum(dx > bx) + np.sum(dy > by))
    return viol == 0, f"{viol} violations in {cases} cases (lambda = {wavelength:g} m, {model} model)"


def check_calibration(target_ber: float = 1e-8):
    lx = analytics.snr_loss_at_ber(analytics.LossQuery(target_ber, Branch.PARALLEL, math.radians(30)))
    ly = analytics.snr_loss_at_ber(analytics.LossQuery(target_ber, Branch.PERPENDICULAR, math.radians(8)))
    ok = all(0.6 <= v <= 1.0 for v in (lx, ly))
    return ok, f"loss at BER {target_ber:g}: parallel 30 deg {lx:.3f} dB, perpendicular 8 deg {ly:.3f} dB"


def check_sensitivity(degrees=(2, 4, 8, 16), target_ber: float = 1e-6):
    rows = []
    for d in degrees:
        t = math.radians(d)
        lx = analytics.snr_loss_at_ber(analytics.LossQuery(target_ber, Branch.PARALLEL, t))
        ly = analytics.snr_loss_at_ber(analytics.LossQuery(target_ber, Branch.PERPENDICULAR, t))
        if not ly > lx:
            return False, f"{d} deg: perpendicular {ly:.4g} dB <= parallel {lx:.4g} dB"
        rows.append(f"{d}:{lx:.3g}/{ly:.3g}")
    return True, "parallel/perpendicular dB " + " ".join(rows)


def check_qd_spectrum(orders=(2, 4, 8, 16), shift_hz: float = 100.0, sample_rate: float = 8000.0):
    for q in orders:
        arr = modem.ArrayGeometry.uniform(q)
        emu = wavefield.QdEmulationConfig.for_speed(arr, shift_hz * arr.wavelength, sample_rate)
        sig = wavefield.qd_stepped_signal(emu, wavefield.WaveModel(), 1.0)
        est = wavefield.estimate_shift(sig, emu.sample_rate)
        if abs(est - shift_hz) > 1.0:
            return False, f"Q={q}: estimated {est:g} Hz, expected {shift_hz:g} Hz"
    return True, f"Q in {list(orders)} recover {shift_hz:g} Hz within one bin"


def binomial_z(point: montecarlo.BerPoint, p: float) -> float:
    return abs(point.ber - p) / math.sqrt(p * (1 - p) / point.trials)


def check_mc_agreement(seed: int, min_errors: int = 200):
    worst = 0.0
    ideal = montecarlo.SimConfig(seed=seed, snr_grid_db=(0, 2, 4, 6, 8), min_errors=min_errors)
    for branch, pt in montecarlo.run_sweep(ideal):
        worst = max(worst, binomial_z(pt, analytics.bpsk_ber_ideal(10 ** (pt.snr_db / 10))))
    dev = montecarlo.SimConfig(seed=seed, snr_grid_db=(2, 4, 6), min_errors=min_errors,
                               theta_x=math.radians(30), theta_y=math.radians(8))
    for branch, pt in montecarlo.run_sweep(dev):
        theta = dev.theta_x if branch is Branch.PARALLEL else dev.theta_y
        p = analytics.ber_deviated(10 ** (pt.snr_db / 10), theta, branch,
                                   averaging=analytics.Averaging.UNIFORM)
        worst = max(worst, binomial_z(pt, p))
    return worst <= MC_Z_LIMIT, f"largest |z| = {worst:.2f} (limit {MC_Z_LIMIT:g})"


def run_all(seed: int = 1, wavelength: float = 0.125, model: str = "standard",
            bound_cases: int = 1000):
    """Run every check in order; yields ``(name, passed, detail)``."""
    checks = [
        ("joint-modulation closure and loopback", check_joint_closure),
        ("perpendicular antenna independence", check_perpendicular_independence),
        ("deviation offset bounds", lambda: check_offset_bounds(seed, bound_cases, wavelength, model)),
        ("0.8 dB calibration", check_calibration),
        ("perpendicular more sensitive", check_sensitivity),
        ("QD spectrum shift", check_qd_spectrum),
        ("Monte Carlo vs closed form", lambda: check_mc_agreement(seed)),
    ]
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, ok, detail
