"""PSK constellations, the QD phase <-> antenna position map, and joint modulation.

Bit strings are tuples of 0/1 ints, most significant bit first.  Anywhere a
bit string is accepted, the equivalent integer label is accepted too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# angular distances closer than this are a decision tie
_TIE_TOL = 1e-12
# relative tolerance when matching a requested position to an antenna
_POSITION_RTOL = 1e-9


class ConfigurationError(ValueError):
    """Array and constellations are inconsistent."""


def gray(m: int) -> int:
    return m ^ (m >> 1)


def bits_of(label: int, nbits: int) -> tuple[int, ...]:
    return tuple((label >> (nbits - 1 - i)) & 1 for i in range(nbits))


def label_of(bits, nbits: int) -> int:
    if isinstance(bits, (int, np.integer)):
        label = int(bits)
        if not 0 <= label < (1 << nbits):
            raise ValueError(f"label {label} does not fit in {nbits} bits")
        return label
    bits = tuple(int(b) for b in bits)
    if len(bits) != nbits or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected {nbits} bits, got {bits}")
    label = 0
    for b in bits:
        label = (label << 1) | b
    return label


def wrap_phase(phi):
    """Reduce an angle to [0, 2 pi)."""
    r = np.mod(phi, TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    r = np.where(r >= TWO_PI, 0.0, r)
    return float(r) if np.ndim(r) == 0 else r


@dataclass(frozen=True)
class PskConstellation:
    """Gray-labelled M-PSK with zero phase offset.

    ``phases[m] = 2 pi m / M`` and ``labels[m] = m ^ (m >> 1)``.
    """

    order: int
    phases: np.ndarray = field(init=False, repr=False, compare=False)
    labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.order
        if m < 2 or m & (m - 1):
            raise ValueError(f"order must be a power of two >= 2, got {m}")
        idx = np.arange(m)
        phases = TWO_PI * idx / m
        labels = idx ^ (idx >> 1)
        phases.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "labels", labels)
        inverse = np.empty(m, dtype=int)
        inverse[labels] = idx
        inverse.setflags(write=False)
        object.__setattr__(self, "_index_of_label", inverse)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @property
    def bit_labels(self) -> list[tuple[int, ...]]:
        return [bits_of(int(lab), self.bits_per_symbol) for lab in self.labels]

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def index_of_label(self, label: int) -> int:
        return int(self._index_of_label[label])

    def phase_of(self, bits) -> float:
        """Phase carrying the given bit string."""
        return float(self.phases[self.index_of_label(label_of(bits, self.bits_per_symbol))])


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna positions on the x-axis, in meters, starting at 0 and below one wavelength."""

    wavelength: float
    positions: tuple[float, ...]

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        pos = tuple(float(x) for x in self.positions)
        object.__setattr__(self, "positions", pos)
        if not pos or pos[0] != 0.0:
            raise ValueError("the first antenna must sit at x = 0")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("antenna positions must be strictly increasing")
        if pos[-1] >= self.wavelength:
            raise ValueError("antenna positions must lie in [0, wavelength)")

    @classmethod
    def uniform(cls, count: int, wavelength: float = 1.0) -> "ArrayGeometry":
        """``count`` antennas at spacing ``wavelength / count``."""
        return cls(wavelength, tuple((q / count) * wavelength for q in range(count)))

    @classmethod
    def from_phases(cls, qd_phases: Sequence[float], wavelength: float = 1.0) -> "ArrayGeometry":
        pos = sorted({antenna_position(p, wavelength) for p in qd_phases})
        return cls(wavelength, tuple(pos))

    @classmethod
    def for_constellations(cls, cx: PskConstellation, cy: PskConstellation,
                           wavelength: float = 1.0) -> "ArrayGeometry":
        """Smallest array covering every QD phase the pair can request.

        For power-of-two PSK orders that alphabet is the multiples of
        ``2 pi / max(Mx, My)``, i.e. a uniform array.
        """
        return cls.uniform(max(cx.order, cy.order), wavelength)

    def index_of(self, position: float) -> int:
        """Index of the antenna at ``position``; raises ``ConfigurationError`` if absent."""
        pos = np.asarray(self.positions)
        hit = np.flatnonzero(np.abs(pos - position) <= _POSITION_RTOL * self.wavelength)
        if hit.size == 0:
            raise ConfigurationError(
                f"no antenna at x = {position:.12g} m (QD phase "
                f"{qd_phase_of_position(position % self.wavelength, self.wavelength):.6g} rad); "
                f"array has {list(self.positions)}"
            )
        return int(hit[0])

    def validate_for(self, cx: PskConstellation, cy: PskConstellation) -> None:
        """Check that every QD phase the constellation pair can request has an antenna."""
        for a in cx.phases:
            for b in cy.phases:
                self.index_of(antenna_position(qd_phase(a, b), self.wavelength))


@dataclass(frozen=True)
class JointSymbol:
    """One transmission: source phase ``phi_y`` radiated from the antenna adding ``phi_q``."""

    phi_x: float
    phi_y: float
    phi_q: float
    antenna_index: int
    position: float
    wavelength: float = 1.0
    energy: float = 1.0

    @property
    def parallel_value(self) -> complex:
        """Noiseless value seen along the array axis, ``sqrt(Es) exp(j(phi_y + phi_q))``."""
        return math.sqrt(self.energy) * complex(np.exp(1j * (self.phi_y + self.phi_q)))

    @property
    def source_value(self) -> complex:
        return math.sqrt(self.energy) * complex(np.exp(1j * self.phi_y))


def qd_phase(phi_x: float, phi_y: float) -> float:
    """QD phase that turns source phase ``phi_y`` into ``phi_x`` along the array axis."""
    phi_x = wrap_phase(phi_x)
    phi_y = wrap_phase(phi_y)
    if phi_x >= phi_y:
        return phi_x - phi_y
    r = phi_x + TWO_PI - phi_y
    return 0.0 if r >= TWO_PI else r


def antenna_position(phi_q: float, wavelength: float = 1.0) -> float:
    """Antenna position ``phi_q * lambda / 2 pi`` that contributes QD phase ``phi_q``."""
    return wrap_phase(phi_q) / TWO_PI * wavelength


def qd_phase_of_position(position: float, wavelength: float = 1.0) -> float:
    """QD phase ``2 pi x / lambda`` contributed by an antenna at ``position``."""
    if not 0.0 <= position < wavelength:
        raise ValueError(f"position {position} outside [0, {wavelength})")
    return TWO_PI * position / wavelength


def joint_modulate(bits_x, bits_y, cx: PskConstellation, cy: PskConstellation,
                   array: ArrayGeometry, energy: float = 1.0) -> JointSymbol:
    """Map one bit string per receiver onto a single transmission.

    The source emits ``phi_y`` (perpendicular receiver's phase) and the
    antenna is picked so the parallel receiver sees ``phi_x``.
    """
    phi_x = cx.phase_of(bits_x)
    phi_y = cy.phase_of(bits_y)
    phi_q = qd_phase(phi_x, phi_y)
    x_q = antenna_position(phi_q, array.wavelength)
    q = array.index_of(x_q)
    return JointSymbol(phi_x=phi_x, phi_y=phi_y, phi_q=phi_q, antenna_index=q,
                       position=array.positions[q], wavelength=array.wavelength,
                       energy=energy)


def decide(observations, c: PskConstellation, h_estimate=1.0) -> np.ndarray:
    """Constellation indices at minimum angular distance from each equalized observation.

    Ties go to the lower index.
    """
    h = complex(h_estimate)
    if h == 0:
        raise ValueError("channel estimate must be nonzero")
    z = np.atleast_1d(np.asarray(observations, dtype=complex)) / h
    ang = np.angle(z)[:, None]
    d = np.abs(np.mod(ang - c.phases[None, :] + math.pi, TWO_PI) - math.pi)
    best = d.min(axis=1, keepdims=True)
    return np.argmax(d <= best + _TIE_TOL, axis=1)


def hard_demodulate(observation, c: PskConstellation, h_estimate=1.0) -> tuple[int, ...]:
    """Hard-decision bits for one observation."""
    m = int(decide(observation, c, h_estimate)[0])
    return bits_of(int(c.labels[m]), c.bits_per_symbol)
