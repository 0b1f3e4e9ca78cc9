"""Closed-form BPSK error rates under residual phase rotation, and the SNR-loss solver.

With genie gain estimation a constellation rotated by ``dphi`` keeps its
noise but its projection onto the decision axis shrinks by ``cos(dphi)``,
so BPSK errs with probability ``Q(sqrt(2 Es/N0) cos(dphi))``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import MAX_DEVIATION, Branch, parallel_offset, perpendicular_offset
from .modem import ArrayGeometry, PskConstellation, antenna_position, qd_phase

BRACKET_DB = (-10.0, 40.0)


class Averaging(str, enum.Enum):
    WORST_CASE = "worst_case_antenna"
    UNIFORM = "uniform_antenna"


class NoSolutionError(ValueError):
    """Target BER is not crossed inside the SNR search bracket."""


@dataclass(frozen=True)
class LossQuery:
    target_ber: float
    branch: Branch
    theta: float
    averaging: Averaging = Averaging.WORST_CASE

    def __post_init__(self):
        if not 0 < self.target_ber < 0.5:
            raise ValueError(f"target_ber must lie in (0, 0.5), got {self.target_ber}")
        if not 0 <= self.theta <= MAX_DEVIATION:
            raise ValueError(f"theta must lie in [0, pi/4], got {self.theta}")
        object.__setattr__(self, "branch", Branch(self.branch))
        object.__setattr__(self, "averaging", Averaging(self.averaging))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def q_function(x):
    """Gaussian tail probability ``P(N(0,1) > x)``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def bpsk_ber_ideal(snr):
    """BPSK bit error rate at linear ``Es/N0``."""
    return q_function(np.sqrt(2.0 * np.asarray(snr, dtype=float)))


def bpsk_ber_offset(snr, dphi):
    """BPSK bit error rate when the constellation is rotated by ``dphi``."""
    if np.any(np.abs(dphi) >= math.pi / 2):
        raise ValueError(f"|dphi| must be below pi/2, got {dphi}")
    return q_function(np.sqrt(2.0 * np.asarray(snr, dtype=float)) * np.cos(dphi))


def branch_offset(branch, position, theta, wavelength=1.0):
    if Branch(branch) is Branch.PARALLEL:
        return parallel_offset(position, theta, wavelength)
    return perpendicular_offset(position, theta, wavelength)


def antenna_usage(cx: PskConstellation, cy: PskConstellation, array: ArrayGeometry) -> np.ndarray:
    """Probability of each antenna under uniformly distributed symbol pairs."""
    counts = np.zeros(len(array.positions))
    for a in cx.phases:
        for b in cy.phases:
            counts[array.index_of(antenna_position(qd_phase(a, b), array.wavelength))] += 1
    return counts / counts.sum()


def ber_deviated(snr, theta, branch, constellation: PskConstellation | None = None,
                 array: ArrayGeometry | None = None,
                 averaging=Averaging.WORST_CASE):
    """Closed-form BER of one branch under deviation angle ``theta``.

    ``worst_case_antenna`` applies the rotation of the farthest antenna to
    every symbol; ``uniform_antenna`` averages over the antenna usage induced
    by uniform symbols.  The default array is the two-antenna BPSK array at
    ``{0, lambda/2}`` with a BPSK source.
    """
    c = constellation or PskConstellation(2)
    if c.order != 2:
        raise ValueError("closed form covers BPSK only; use the Monte-Carlo harness for M > 2")
    arr = array or ArrayGeometry.for_constellations(c, c)
    pos = np.asarray(arr.positions)
    if Averaging(averaging) is Averaging.WORST_CASE:
        return bpsk_ber_offset(snr, branch_offset(branch, pos[-1], theta, arr.wavelength))
    usage = antenna_usage(c, c, arr)
    return sum(w * bpsk_ber_offset(snr, branch_offset(branch, x, theta, arr.wavelength))
               for w, x in zip(usage, pos) if w > 0)


def _solve_snr_db(ber_of_db, target: float, tol_db: float) -> float:
    lo, hi = BRACKET_DB
    f_lo, f_hi = ber_of_db(lo) - target, ber_of_db(hi) - target
    if f_lo < 0 or f_hi > 0:
        raise NoSolutionError(
            f"BER {target:g} not reached in [{lo:g}, {hi:g}] dB "
            f"(BER ranges {f_hi + target:.3g} .. {f_lo + target:.3g})"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if ber_of_db(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def required_snr_db(target_ber: float, ber_of_snr, tol_db: float = 1e-9) -> float:
    """SNR in dB at which the monotone BER curve ``ber_of_snr`` (linear SNR) hits ``target_ber``."""
    return _solve_snr_db(lambda db: float(ber_of_snr(db_to_linear(db))), target_ber, tol_db)


def snr_loss_at_ber(query: LossQuery, constellation=None, array=None, tol_db: float = 1e-9) -> float:
    """Extra SNR (dB) the deviated branch needs to match the ideal BER at ``query.target_ber``.

    Both operating points are found by bisection over ``BRACKET_DB`` until
    the bracket is narrower than ``tol_db``.
    """
    ideal = required_snr_db(query.target_ber, bpsk_ber_ideal, tol_db)
    deviated = required_snr_db(
        query.target_ber,
        lambda g: ber_deviated(g, query.theta, query.branch, constellation, array, query.averaging),
        tol_db,
    )
    return deviated - ideal
