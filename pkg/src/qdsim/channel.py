"""Ideal and angle-deviated line-of-sight channels for the two receivers, plus AWGN.

The parallel receiver sits on the array axis and sees the QD phase; the
perpendicular receiver sits on the orthogonal axis and does not.  A small
deviation angle leaves a residual, antenna-dependent rotation on each:
``2 pi x_q (cos(theta) - 1) / lambda`` on the parallel side and
``2 pi x_q sin(theta) / lambda`` on the perpendicular side.

Channel application is deterministic given a noise draw; randomness is
supplied by the caller.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .modem import JointSymbol

MAX_DEVIATION = math.pi / 4


class Branch(str, enum.Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class ChannelConfig:
    """Static channel seen by one receiver.

    ``snr`` is the linear ``Es/N0``; the noise density follows as
    ``N0 = Es / snr``.
    """

    branch: Branch
    gain: complex = 1.0
    initial_phase: float = 0.0
    deviation: float = 0.0
    snr: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        object.__setattr__(self, "gain", complex(self.gain))
        if abs(self.gain) == 0:
            raise ValueError("channel gain must be nonzero")
        _check_deviation(self.deviation)
        if not self.snr > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")

    def noise_density(self, energy: float = 1.0) -> float:
        return energy / self.snr

    @property
    def genie_estimate(self) -> complex:
        """What a noiseless pilot from antenna 0 measures: ``h exp(j phi0)``."""
        return self.gain * complex(np.exp(1j * self.initial_phase))


@dataclass(frozen=True)
class DeviationOffsets:
    parallel: float
    perpendicular: float
    parallel_bound: float
    perpendicular_bound: float


def _check_deviation(theta):
    if np.any(np.asarray(theta) < 0) or np.any(np.asarray(theta) > MAX_DEVIATION):
        raise ValueError(f"deviation angle must lie in [0, pi/4], got {theta}")


def _check_position(x_q, wavelength):
    x = np.asarray(x_q)
    if np.any(x < 0) or np.any(x >= wavelength):
        raise ValueError(f"antenna position must lie in [0, {wavelength}), got {x_q}")


def parallel_offset(x_q, theta, wavelength: float = 1.0):
    """Phase offset on the parallel receiver, ``2 pi x_q (cos(theta) - 1) / lambda`` (never positive)."""
    _check_position(x_q, wavelength)
    _check_deviation(theta)
    # 1 - cos(t) = 2 sin^2(t/2) avoids cancellation at small angles
    return -4.0 * math.pi * np.asarray(x_q) * np.sin(np.asarray(theta) / 2) ** 2 / wavelength


def perpendicular_offset(x_q, theta, wavelength: float = 1.0):
    """Phase offset on the perpendicular receiver, ``2 pi x_q sin(theta) / lambda``."""
    _check_position(x_q, wavelength)
    _check_deviation(theta)
    return 2.0 * math.pi * np.asarray(x_q) * np.sin(theta) / wavelength


def perpendicular_offset_extra_divisor(x_q, theta, wavelength: float = 1.0):
    """``k x_q sin(theta) / lambda``: the perpendicular offset with one extra 1/lambda.

    Dimensionally inconsistent; kept only so ``validate`` can demonstrate
    that the bound check rejects it.
    """
    return perpendicular_offset(x_q, theta, wavelength) / wavelength


PERPENDICULAR_OFFSET_MODELS = {
    "standard": perpendicular_offset,
    "extra_divisor": perpendicular_offset_extra_divisor,
}


def offset_bounds(theta) -> tuple[float, float]:
    """Small-angle bounds ``(pi theta^2 / 2, pi theta)`` on the two offsets for ``x_q <= lambda / 2``."""
    _check_deviation(theta)
    return math.pi * theta**2 / 2, math.pi * theta


def deviation_offsets(x_q, theta_x, theta_y, wavelength: float = 1.0) -> DeviationOffsets:
    bx, _ = offset_bounds(theta_x)
    _, by = offset_bounds(theta_y)
    return DeviationOffsets(
        parallel=float(parallel_offset(x_q, theta_x, wavelength)),
        perpendicular=float(perpendicular_offset(x_q, theta_y, wavelength)),
        parallel_bound=bx,
        perpendicular_bound=by,
    )


def _rotated(symbol: JointSymbol, cfg: ChannelConfig, phase: float, noise_draw) -> complex:
    return cfg.gain * math.sqrt(symbol.energy) * complex(np.exp(1j * (phase + cfg.initial_phase))) + complex(noise_draw)


def transmit_parallel(symbol: JointSymbol, cfg: ChannelConfig, noise_draw=0j) -> complex:
    """Received sample at the parallel receiver."""
    if cfg.branch is not Branch.PARALLEL:
        raise ValueError(f"transmit_parallel called with a {cfg.branch.value} channel")
    offset = 0.0
    if cfg.deviation:
        offset = float(parallel_offset(symbol.position, cfg.deviation, symbol.wavelength))
    return _rotated(symbol, cfg, symbol.phi_x + offset, noise_draw)


def transmit_perpendicular(symbol: JointSymbol, cfg: ChannelConfig, noise_draw=0j) -> complex:
    """Received sample at the perpendicular receiver; the QD phase does not reach it."""
    if cfg.branch is not Branch.PERPENDICULAR:
        raise ValueError(f"transmit_perpendicular called with a {cfg.branch.value} channel")
    offset = 0.0
    if cfg.deviation:
        offset = float(perpendicular_offset(symbol.position, cfg.deviation, symbol.wavelength))
    return _rotated(symbol, cfg, symbol.phi_y + offset, noise_draw)


def transmit(symbol: JointSymbol, cfg: ChannelConfig, noise_draw=0j) -> complex:
    if cfg.branch is Branch.PARALLEL:
        return transmit_parallel(symbol, cfg, noise_draw)
    return transmit_perpendicular(symbol, cfg, noise_draw)


def awgn_sample(noise_density: float, rng: np.random.Generator, size=None):
    """Circularly-symmetric complex Gaussian noise, variance ``N0 / 2`` per component."""
    if noise_density < 0:
        raise ValueError(f"noise density must be >= 0, got {noise_density}")
    sigma = math.sqrt(noise_density / 2)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    out = sigma * (re + 1j * im)
    return complex(out) if size is None else out
