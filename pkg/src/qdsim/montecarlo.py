"""Seeded Monte-Carlo BER sweeps for both receivers.

Every trial's symbol pair and noise are counter-based functions of
``(seed, snr index, branch, trial index)``.  Trials are evaluated in blocks
whose sizes follow a fixed schedule; workers may finish blocks in any order,
but the stopping rule is applied to blocks in index order, so the result
never depends on the worker count.

Both receivers see the same transmitted symbols (trial ``t`` carries the
same bit pair on either branch) with independent noise.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _rng, kernels
from .channel import Branch, ChannelConfig, transmit
from .modem import ArrayGeometry, PskConstellation, hard_demodulate, joint_modulate, label_of

CSV_HEADER = ("branch", "snr_db", "trials", "errors", "ber", "ci95")
BRANCH_ORDER = (Branch.PARALLEL, Branch.PERPENDICULAR)

_FIRST_BLOCK = 1 << 12
_MAX_BLOCK = 1 << 20
_Z95 = 1.959963984540054

_NOISE_STREAM = {
    Branch.PARALLEL: _rng.STREAM_NOISE_PARALLEL,
    Branch.PERPENDICULAR: _rng.STREAM_NOISE_PERPENDICULAR,
}


@dataclass(frozen=True)
class SimConfig:
    seed: int
    snr_grid_db: tuple[float, ...]
    orders: tuple[int, int] = (2, 2)
    theta_x: float = 0.0
    theta_y: float = 0.0
    min_errors: int = 100
    max_trials_per_point: int = 10**8
    gain: complex = 1.0
    initial_phase: float = 0.0
    wavelength: float = 1.0
    energy: float = 1.0

    def __post_init__(self):
        grid = tuple(float(s) for s in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if not grid:
            raise ValueError("snr_grid_db must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_grid_db must be strictly increasing")
        if self.min_errors < 10:
            raise ValueError(f"min_errors must be >= 10, got {self.min_errors}")
        if self.max_trials_per_point < 1:
            raise ValueError("max_trials_per_point must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        # validate through the channel config
        for branch, theta in ((Branch.PARALLEL, self.theta_x), (Branch.PERPENDICULAR, self.theta_y)):
            ChannelConfig(branch, self.gain, self.initial_phase, theta)

    @property
    def constellations(self) -> tuple[PskConstellation, PskConstellation]:
        return PskConstellation(self.orders[0]), PskConstellation(self.orders[1])

    @property
    def array(self) -> ArrayGeometry:
        return ArrayGeometry.for_constellations(*self.constellations, self.wavelength)

    def channel(self, branch, snr_db: float) -> ChannelConfig:
        branch = Branch(branch)
        theta = self.theta_x if branch is Branch.PARALLEL else self.theta_y
        return ChannelConfig(branch, self.gain, self.initial_phase, theta,
                             snr=10.0 ** (snr_db / 10.0))


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    trials: int
    errors: int
    ber: float = field(init=False)
    ci95_halfwidth: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.errors <= self.trials or self.trials <= 0:
            raise ValueError(f"inconsistent counts: {self.errors} errors in {self.trials} trials")
        p = self.errors / self.trials
        object.__setattr__(self, "ber", p)
        if self.errors == 0:
            # rule of three: one-sided 95% upper bound
            half = 3.0 / self.trials
        else:
            half = _Z95 * math.sqrt(p * (1 - p) / self.trials)
        object.__setattr__(self, "ci95_halfwidth", half)

    @property
    def upper_bound_only(self) -> bool:
        """No errors observed; ``ci95_halfwidth`` is then an upper bound on the BER."""
        return self.errors == 0


def worker_count() -> int:
    raw = os.environ.get("QD_SIM_THREADS", "")
    if raw.strip():
        n = int(raw)
        if n < 1:
            raise ValueError(f"QD_SIM_THREADS must be >= 1, got {raw!r}")
        return n
    return os.cpu_count() or 1


def block_schedule(total: int):
    """Yield ``(start, count)`` blocks covering ``[0, total)``; sizes double up to a cap."""
    start, size = 0, _FIRST_BLOCK
    while start < total:
        count = min(size, total - start)
        yield start, count
        start += count
        size = min(2 * size, _MAX_BLOCK)


class _PointKernel:
    """Precomputed tables for one (branch, SNR) point."""

    def __init__(self, cfg: SimConfig, snr_index: int, branch: Branch):
        cx, cy = cfg.constellations
        array = cfg.array
        array.validate_for(cx, cy)
        snr_db = cfg.snr_grid_db[snr_index]
        ch = cfg.channel(branch, snr_db)
        tx = np.empty(cx.order * cy.order, dtype=complex)
        for lx in range(cx.order):
            for ly in range(cy.order):
                sym = joint_modulate(lx, ly, cx, cy, array, cfg.energy)
                tx[lx * cy.order + ly] = transmit(sym, ch)
        ref = cx if branch is Branch.PARALLEL else cy
        eq = 1.0 / ch.genie_estimate
        self.bits_per_symbol = ref.bits_per_symbol
        self.args = dict(
            symbol_key=_rng.stream_key(cfg.seed, _rng.STREAM_SYMBOLS, snr_index),
            noise_key=_rng.stream_key(cfg.seed, _NOISE_STREAM[branch], snr_index),
            tx_re=np.ascontiguousarray(tx.real), tx_im=np.ascontiguousarray(tx.imag),
            mx=cx.order, my=cy.order, branch_x=branch is Branch.PARALLEL,
            eq_re=eq.real, eq_im=eq.imag,
            sigma=math.sqrt(ch.noise_density(cfg.energy) / 2),
            ref_re=np.ascontiguousarray(ref.points.real),
            ref_im=np.ascontiguousarray(ref.points.imag),
            ref_labels=np.ascontiguousarray(ref.labels, dtype=np.int64),
        )

    def __call__(self, block, backend=None):
        start, count = block
        fn = backend.count_errors if backend is not None else kernels.count_errors
        return fn(start=start, count=count, **self.args)


def snr_index(cfg: SimConfig, snr_db: float) -> int:
    try:
        return cfg.snr_grid_db.index(float(snr_db))
    except ValueError:
        raise ValueError(f"{snr_db} dB is not on the configured grid {cfg.snr_grid_db}") from None


def run_ber_point(cfg: SimConfig, snr_db: float, branch, workers: int | None = None,
                  backend=None) -> BerPoint:
    """Simulate one grid point until ``min_errors`` bit errors or the trial cap.

    ``snr_db`` must be on ``cfg.snr_grid_db``; its grid index feeds the
    random-stream key.  ``trials`` counts bits on the branch's stream, so
    ``ber = errors / trials`` holds for any order.  With zero errors the
    point reports ``ber = 0`` and ``ci95_halfwidth`` becomes an upper bound.
    """
    branch = Branch(branch)
    i = snr_index(cfg, snr_db)
    kernel = _PointKernel(cfg, i, branch)
    bps = kernel.bits_per_symbol
    max_symbols = max(1, cfg.max_trials_per_point // bps)
    workers = workers or worker_count()
    blocks = list(block_schedule(max_symbols))
    symbols = errors = 0

    def consume(results, wave):
        nonlocal symbols, errors
        for (start, count), e in zip(wave, results):
            symbols += count
            errors += e
            if errors >= cfg.min_errors:
                return True
        return False

    if workers == 1:
        for blk in blocks:
            if consume([kernel(blk, backend)], [blk]):
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for first in range(0, len(blocks), workers):
                wave = blocks[first:first + workers]
                results = list(pool.map(lambda b: kernel(b, backend), wave))
                if consume(results, wave):
                    break
    return BerPoint(cfg.snr_grid_db[i], symbols * bps, errors)


def run_sweep(cfg: SimConfig, workers: int | None = None, backend=None) -> list[tuple[Branch, BerPoint]]:
    """Both branches over the whole grid, ordered (branch, SNR ascending)."""
    return [(branch, run_ber_point(cfg, snr, branch, workers, backend))
            for branch in BRANCH_ORDER
            for snr in cfg.snr_grid_db]


def reference_trials(cfg: SimConfig, snr_db: float, branch, trials: int) -> int:
    """Per-trial composition of the modem and channel functions.

    Slow; draws the same random numbers as the kernels and exists to check them.
    Returns the bit error count over trials ``0 .. trials - 1``.
    """
    branch = Branch(branch)
    i = snr_index(cfg, snr_db)
    cx, cy = cfg.constellations
    array = cfg.array
    ch = cfg.channel(branch, snr_db)
    symbols = _rng.CounterStream(cfg.seed, _rng.STREAM_SYMBOLS, i)
    noise = _rng.CounterStream(cfg.seed, _NOISE_STREAM[branch], i)
    sigma = math.sqrt(ch.noise_density(cfg.energy) / 2)
    ref = cx if branch is Branch.PARALLEL else cy
    errors = 0
    for t in range(trials):
        w = symbols.bits(t)
        lx, ly = w & (cx.order - 1), (w >> 32) & (cy.order - 1)
        sym = joint_modulate(lx, ly, cx, cy, array, cfg.energy)
        n_re, n_im = noise.normal_pair(t)
        rx = transmit(sym, ch, sigma * complex(n_re, n_im))
        got = label_of(hard_demodulate(rx, ref, ch.genie_estimate), ref.bits_per_symbol)
        errors += bin(got ^ (lx if branch is Branch.PARALLEL else ly)).count("1")
    return errors


def delivered_bits_per_symbol(rows, orders=(2, 2)) -> dict[float, float]:
    """Correct bits per transmitted symbol summed over both receivers, per SNR."""
    bps = {Branch.PARALLEL: int(orders[0]).bit_length() - 1,
           Branch.PERPENDICULAR: int(orders[1]).bit_length() - 1}
    out: dict[float, float] = {}
    for branch, pt in rows:
        out[pt.snr_db] = out.get(pt.snr_db, 0.0) + bps[Branch(branch)] * (1 - pt.ber)
    return out


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for branch, pt in rows:
        w.writerow([Branch(branch).value, f"{pt.snr_db:g}", pt.trials, pt.errors,
                    f"{pt.ber:.6e}", f"{pt.ci95_halfwidth:.6e}"])
    return buf.getvalue()


def read_csv(text: str) -> list[tuple[Branch, BerPoint]]:
    lines = text.splitlines()
    if not lines or tuple(lines[0].split(",")) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append((Branch(rec["branch"]),
                     BerPoint(float(rec["snr_db"]), int(rec["trials"]), int(rec["errors"]))))
    return rows
