"""Vectorized numpy implementation of the Monte-Carlo error-counting kernel.

Bit-compatible (same random words, same decision rule) with ``_kernels_c``.
"""
from __future__ import annotations

import numpy as np

from . import _rng

_CHUNK = 1 << 16


def count_errors(symbol_key, noise_key, start, count, tx_re, tx_im, mx, my,
                 branch_x, eq_re, eq_im, sigma, ref_re, ref_im, ref_labels):
    """Bit errors over trials ``start .. start + count - 1`` on one branch.

    ``tx_re + j tx_im`` holds the noiseless received value for every label
    pair (row-major, ``label_x * my + label_y``); ``eq`` is the reciprocal of
    the receiver's channel estimate; ``ref`` is the branch constellation.
    """
    tx = np.asarray(tx_re) + 1j * np.asarray(tx_im)
    eq = complex(eq_re, eq_im)
    ref_conj = (np.asarray(ref_re) - 1j * np.asarray(ref_im))[None, :]
    labels = np.asarray(ref_labels, dtype=np.int64)
    errors = 0
    for lo in range(start, start + count, _CHUNK):
        trials = np.arange(lo, min(lo + _CHUNK, start + count), dtype=np.uint64)
        w = _rng.words(symbol_key, trials, _rng.LANE_SYMBOL)
        lx = (w & np.uint64(mx - 1)).astype(np.int64)
        ly = ((w >> np.uint64(32)) & np.uint64(my - 1)).astype(np.int64)
        n_re, n_im = _rng.gaussian_pairs(noise_key, trials)
        y = tx[lx * my + ly] + sigma * (n_re + 1j * n_im)
        z = (y * eq)[:, None]
        # first maximum wins, matching the strict '>' scan in the compiled kernel
        m = np.argmax((z * ref_conj).real, axis=1)
        truth = lx if branch_x else ly
        diff = (labels[m] ^ truth).astype(np.uint64)
        errors += int(np.bitwise_count(diff).sum()) if hasattr(np, "bitwise_count") else \
            int(np.unpackbits(diff.view(np.uint8)).sum())
    return errors
