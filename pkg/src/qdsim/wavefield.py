"""Continuous Doppler wave model and its switched-antenna (quasi-Doppler) emulation.

Sign convention: carrier term ``+j 2 pi f t``, receiver offset ``-j k x0``,
and the emulation's initial phase enters as ``+j phi0`` everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modem import ArrayGeometry

_SPACING_RTOL = 1e-9


@dataclass(frozen=True)
class WaveModel:
    """Harmonic plane wave from a source moving along the x-axis.

    Parameters
    ----------
    carrier_frequency : float
        Emission frequency in Hz.
    wavelength : float
        Carrier wavelength in meters.
    source_speed : float
        Source speed ``v_x`` along +x in m/s.
    amplitude : float
        Received amplitude.
    """

    carrier_frequency: float = 0.0
    wavelength: float = 1.0
    source_speed: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.source_speed < 0:
            raise ValueError(f"source_speed must be >= 0, got {self.source_speed}")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class QdEmulationConfig:
    """Switching schedule that emulates a moving source on a uniform array.

    The source dwells ``dwell_time`` seconds on each antenna in turn, so the
    emulated speed is ``spacing / dwell_time``.
    """

    array: ArrayGeometry
    dwell_time: float
    samples_per_dwell: int = 4
    initial_phase: float = 0.0

    def __post_init__(self):
        if not self.dwell_time > 0 or math.isinf(self.dwell_time):
            raise ValueError(f"dwell_time must be positive and finite, got {self.dwell_time}")
        if self.samples_per_dwell < 4 or int(self.samples_per_dwell) != self.samples_per_dwell:
            raise ValueError(f"samples_per_dwell must be an integer >= 4, got {self.samples_per_dwell}")
        check_uniform(self.array)

    @classmethod
    def for_speed(cls, array: ArrayGeometry, speed: float, sample_rate: float,
                  initial_phase: float = 0.0) -> "QdEmulationConfig":
        """Build the schedule for a target emulated speed and sample rate.

        Raises ``ValueError`` when a dwell does not span a whole number of at
        least four samples.
        """
        if not speed > 0:
            raise ValueError("emulated speed must be positive")
        spacing = check_uniform(array)
        dwell = spacing / speed
        spd = dwell * sample_rate
        n = round(spd)
        if n < 4 or not math.isclose(spd, n, rel_tol=1e-9):
            raise ValueError(
                f"undersampled: a dwell of {dwell:g} s holds {spd:g} samples at "
                f"{sample_rate:g} Hz; need an integer >= 4"
            )
        return cls(array=array, dwell_time=dwell, samples_per_dwell=n, initial_phase=initial_phase)

    @property
    def spacing(self) -> float:
        return check_uniform(self.array)

    @property
    def speed(self) -> float:
        return self.spacing / self.dwell_time

    @property
    def sample_rate(self) -> float:
        return self.samples_per_dwell / self.dwell_time

    @property
    def sweep_time(self) -> float:
        return len(self.array.positions) * self.dwell_time


def check_uniform(array: ArrayGeometry) -> float:
    """Return the spacing of a uniform array with ``Q * d == wavelength``.

    Raises ``ValueError`` naming the violated constraint otherwise.
    """
    pos = np.asarray(array.positions, dtype=float)
    q = len(pos)
    if q < 2:
        raise ValueError("quasi-Doppler emulation needs at least two antennas")
    d = np.diff(pos)
    spacing = float(d[0])
    if not np.allclose(d, spacing, rtol=_SPACING_RTOL, atol=0.0):
        raise ValueError("array is not uniformly spaced")
    if not math.isclose(q * spacing, array.wavelength, rel_tol=_SPACING_RTOL):
        raise ValueError(
            f"Qd = lambda violated: {q} antennas x spacing {spacing:g} = "
            f"{q * spacing:g}, wavelength {array.wavelength:g}"
        )
    return spacing


def doppler_shift(model: WaveModel, angle):
    """Doppler shift ``(v_x / lambda) cos(angle)`` in Hz."""
    shift = model.source_speed / model.wavelength * np.cos(angle)
    if np.ndim(shift) == 0:
        # cos(pi/2) is 6e-17 in floating point; the shift at a right angle is zero
        if abs(math.remainder(float(angle), math.pi)) == math.pi / 2:
            return 0.0
        return float(shift)
    return shift


def plane_wave_rx(model: WaveModel, t, receiver_position: float = 0.0):
    """Received passband wave at time ``t`` for a receiver at ``x0`` on the x-axis."""
    k = model.wavenumber
    phase = (2.0 * math.pi * model.carrier_frequency * np.asarray(t)
             - k * receiver_position + k * model.source_speed * np.asarray(t))
    return model.amplitude * np.exp(1j * phase)


def baseband_rx(model: WaveModel, x, initial_phase: float = 0.0):
    """Baseband sample for a source at position ``x``: ``A exp(j(k x + phi0))``."""
    return model.amplitude * np.exp(1j * (model.wavenumber * np.asarray(x) + initial_phase))


def qd_stepped_signal(cfg: QdEmulationConfig, model: WaveModel, duration: float) -> np.ndarray:
    """Noiseless baseband signal seen on the parallel axis during emulation.

    Samples sit on a uniform grid with ``cfg.samples_per_dwell`` samples per
    dwell, the first at t = 0.  The phase of sample ``n`` is
    ``k * d * floor(n / samples_per_dwell) + phi0``.
    """
    if model.wavelength != cfg.array.wavelength:
        raise ValueError("wave model and array disagree on the wavelength")
    if duration < cfg.sweep_time * (1 - 1e-12):
        raise ValueError(
            f"duration {duration:g} s is shorter than one full sweep ({cfg.sweep_time:g} s)"
        )
    n_samples = int(round(duration * cfg.sample_rate))
    dwell_index = np.arange(n_samples) // cfg.samples_per_dwell
    phase = model.wavenumber * cfg.spacing * dwell_index + cfg.initial_phase
    return model.amplitude * np.exp(1j * phase)


def spectrum(samples, sample_rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Bin frequencies (Hz, fftshift order) and normalized magnitudes."""
    x = np.asarray(samples, dtype=complex)
    mag = np.abs(np.fft.fftshift(np.fft.fft(x))) / len(x)
    freqs = np.fft.fftshift(np.fft.fftfreq(len(x), d=1.0 / sample_rate))
    return freqs, mag


def estimate_shift(samples, sample_rate: float, min_samples: int = 2) -> float:
    """Frequency (Hz) of the strongest bin in the discrete spectrum.

    Bins within a relative 1e-9 of the peak are treated as tied and the
    highest frequency among them wins, so the ``+f`` / ``-f`` pair produced
    by a real two-level sequence resolves to ``+f``.
    """
    x = np.asarray(samples, dtype=complex)
    if x.ndim != 1 or len(x) < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {x.size}")
    freqs, mag = spectrum(x, sample_rate)
    peak = mag.max()
    if peak == 0:
        return 0.0
    tied = np.flatnonzero(mag >= peak * (1 - 1e-9))
    return float(freqs[tied].max())
