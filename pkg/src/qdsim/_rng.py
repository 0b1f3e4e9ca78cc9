"""Counter-based random streams.

Every random word is a pure function of ``(key, counter)``: the key is
derived by hashing the run seed together with stream identifiers, and the
counter indexes the trial.  Nothing is carried between calls, so blocks of
trials can be evaluated in any order, on any number of workers, and still
produce the same numbers.

The mixer is the SplitMix64 finalizer.  A SplitMix64 stream is directly
indexable (state ``n`` is ``key + n * GOLDEN``), which is exactly the
property needed here.  The compiled kernel reimplements these few lines in C
and must stay bit-compatible with them.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# counter lanes per trial
LANES = 4
LANE_SYMBOL = 0
LANE_NOISE_RADIUS = 0
LANE_NOISE_ANGLE = 1

STREAM_SYMBOLS = 0
STREAM_NOISE_PARALLEL = 1
STREAM_NOISE_PERPENDICULAR = 2

_TWO_POW_M53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, *ids: int) -> int:
    """Fold a seed and any number of stream identifiers into a 64-bit key."""
    key = mix64(seed + GOLDEN)
    for i in ids:
        key = mix64(key ^ mix64((i + 1) * GOLDEN))
    return key


def mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2**64 without warnings
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def words(key: int, trials: np.ndarray, lane: int) -> np.ndarray:
    """Random 64-bit words for ``trials`` (array of trial indices) on ``lane``."""
    ctr = np.asarray(trials, dtype=np.uint64) * np.uint64(LANES) + np.uint64(lane + 1)
    return mix64_array(np.uint64(key) + ctr * np.uint64(GOLDEN))


def word(key: int, trial: int, lane: int) -> int:
    """Scalar version of :func:`words`."""
    return mix64(key + ((trial * LANES + lane + 1) * GOLDEN & MASK64))


def unit_open_closed(w):
    """Map 64-bit words to doubles in (0, 1]."""
    return ((np.asarray(w, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_POW_M53


def unit_closed_open(w):
    """Map 64-bit words to doubles in [0, 1)."""
    return (np.asarray(w, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53


def gaussian_pairs(key: int, trials: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two independent standard normals per trial (Box-Muller)."""
    u1 = unit_open_closed(words(key, trials, LANE_NOISE_RADIUS))
    u2 = unit_closed_open(words(key, trials, LANE_NOISE_ANGLE))
    r = np.sqrt(-2.0 * np.log(u1))
    a = 2.0 * np.pi * u2
    return r * np.cos(a), r * np.sin(a)


class CounterStream:
    """Scalar view of one keyed stream, for the per-trial reference path.

    ``normal_pair(trial)`` returns the same two normals that the vectorized
    and compiled kernels draw for that trial.
    """

    def __init__(self, seed: int, *ids: int):
        self.key = stream_key(seed, *ids)

    def bits(self, trial: int) -> int:
        return word(self.key, trial, LANE_SYMBOL)

    def normal_pair(self, trial: int) -> tuple[float, float]:
        re, im = gaussian_pairs(self.key, np.array([trial]))
        return float(re[0]), float(im[0])
