# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Gray-code cost diagonal, phase and mixer gates, overlap binning."""

import numpy as np

from libc.math cimport cos, sin
from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    """
    static inline int sq_ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    static inline int sq_popcount64(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int sq_ctz64(unsigned long long x) nogil
    int sq_popcount64(unsigned long long x) nogil


def cost_diagonal(int n, const int64_t[::1] ptr, const uint64_t[::1] others,
                  const double[::1] coef, double start, const double[::1] signal,
                  uint64_t ubits):
    """Walk all 2^n bitstrings in Gray order, updating the noise polynomial per flip.

    ``ptr[i]:ptr[i+1]`` slices the monomials that contain bit ``i``; ``others`` holds
    each monomial's mask with bit ``i`` removed.  ``signal[m]`` is added for the
    agreement count ``m`` with the planted vector.
    """
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    out_arr = np.empty(size, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef uint64_t g = 0, k, mask
    cdef int i, agree
    cdef Py_ssize_t e
    cdef double value = start, acc

    agree = n - sq_popcount64(ubits)
    with nogil:
        out[0] = value + signal[agree]
        for k in range(1, <uint64_t>size):
            i = sq_ctz64(k)
            acc = 0.0
            # branch-free: the parity pattern is close to random, so a branch mispredicts
            for e in range(ptr[i], ptr[i + 1]):
                acc += coef[e] * (1 - 2 * (sq_popcount64(g & others[e]) & 1))
            mask = (<uint64_t>1) << i
            # z_i before the flip is -1 when bit i of g is set
            if g & mask:
                value += 2.0 * acc
            else:
                value -= 2.0 * acc
            g ^= mask
            if (g ^ ubits) & mask:
                agree -= 1
            else:
                agree += 1
            out[g] = value + signal[agree]
    return out_arr


def apply_phase(double complex[::1] amp, const double[::1] diag, double gamma):
    cdef Py_ssize_t i, size = amp.shape[0]
    cdef double theta, c, s, re, im
    cdef double* raw = <double*>&amp[0]
    with nogil:
        for i in range(size):
            theta = gamma * diag[i]
            c = cos(theta)
            s = sin(theta)
            re = raw[2 * i]
            im = raw[2 * i + 1]
            raw[2 * i] = c * re + s * im
            raw[2 * i + 1] = c * im - s * re


def apply_mixer(double complex[::1] amp, int n, double beta):
    """``exp(-i beta X)`` on every qubit, as stride-``2^j`` butterflies on interleaved doubles."""
    cdef Py_ssize_t size = amp.shape[0]
    cdef Py_ssize_t stride, base, j, lo, hi
    cdef double c = cos(beta), s = sin(beta)
    cdef double are, aim, bre, bim
    cdef double* raw = <double*>&amp[0]
    cdef int qubit
    with nogil:
        for qubit in range(n):
            stride = (<Py_ssize_t>1) << qubit
            base = 0
            while base < size:
                for j in range(base, base + stride):
                    lo = 2 * j
                    hi = 2 * (j + stride)
                    are = raw[lo]
                    aim = raw[lo + 1]
                    bre = raw[hi]
                    bim = raw[hi + 1]
                    # (c a - i s b, c b - i s a)
                    raw[lo] = c * are + s * bim
                    raw[lo + 1] = c * aim - s * bre
                    raw[hi] = c * bre + s * aim
                    raw[hi + 1] = c * bim - s * are
                base += 2 * stride


def agreement_masses(const double complex[::1] amp, int n, uint64_t ubits):
    out_arr = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, size = amp.shape[0]
    cdef double complex v
    with nogil:
        for i in range(size):
            v = amp[i]
            out[n - sq_popcount64(<uint64_t>i ^ ubits)] += v.real * v.real + v.imag * v.imag
    return out_arr
