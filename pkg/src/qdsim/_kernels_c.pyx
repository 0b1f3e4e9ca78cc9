# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte-Carlo error-counting kernel; mirrors ``_kernels_py`` exactly."""
from libc.math cimport log, sqrt, cos, sin, M_PI
from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline uint64_t word(uint64_t key, uint64_t trial, uint64_t lane) noexcept nogil:
    return mix64(key + (trial * 4 + lane + 1) * GOLDEN)


def count_errors(uint64_t symbol_key, uint64_t noise_key, int64_t start, int64_t count,
                 const double[::1] tx_re, const double[::1] tx_im, int mx, int my,
                 bint branch_x, double eq_re, double eq_im, double sigma,
                 const double[::1] ref_re, const double[::1] ref_im,
                 const long long[::1] ref_labels):
    cdef int64_t t
    cdef uint64_t w, trial
    cdef int lx, ly, idx, m, best, truth, nref = ref_re.shape[0]
    cdef double u1, u2, r, a, yr, yi, zr, zi, metric, best_metric
    cdef long long errors = 0
    with nogil:
        for t in range(start, start + count):
            trial = <uint64_t>t
            w = word(symbol_key, trial, 0)
            lx = <int>(w & <uint64_t>(mx - 1))
            ly = <int>((w >> 32) & <uint64_t>(my - 1))
            u1 = (<double>(word(noise_key, trial, 0) >> 11) + 1.0) * TWO_POW_M53
            u2 = <double>(word(noise_key, trial, 1) >> 11) * TWO_POW_M53
            r = sqrt(-2.0 * log(u1))
            a = 2.0 * M_PI * u2
            idx = lx * my + ly
            yr = tx_re[idx] + sigma * (r * cos(a))
            yi = tx_im[idx] + sigma * (r * sin(a))
            zr = yr * eq_re - yi * eq_im
            zi = yr * eq_im + yi * eq_re
            best = 0
            best_metric = zr * ref_re[0] + zi * ref_im[0]
            for m in range(1, nref):
                metric = zr * ref_re[m] + zi * ref_im[m]
                if metric > best_metric:
                    best_metric = metric
                    best = m
            truth = lx if branch_x else ly
            errors += __builtin_popcountll(<unsigned long long>(ref_labels[best] ^ truth))
    return errors
