# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled occlusion kernels; mirrors ``_pykernels`` operation for operation."""
from libc.math cimport ceil, floor, log, sqrt
from libc.stdint cimport int64_t, uint64_t, uint8_t

import numpy as np

cdef double INV_2_53 = 1.0 / 9007199254740992.0
UNBOUNDED = 1 << 60


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _cell_uniform(uint64_t key, int64_t i, int64_t j) noexcept nogil:
    cdef uint64_t h = _mix(key ^ (<uint64_t>i * <uint64_t>0xD6E8FEB86659FD93))
    h = _mix(h ^ (<uint64_t>j * <uint64_t>0xCA5A826395121157))
    return (<double>(h >> 11) + 0.5) * INV_2_53


cdef inline double _cell_height(uint64_t key, int64_t i, int64_t j, double gamma) noexcept nogil:
    return gamma * sqrt(-2.0 * log(_cell_uniform(key, i, j)))


def cell_uniform(key, i, j):
    return _cell_uniform(<uint64_t>key, <int64_t>i, <int64_t>j)


def cell_height(key, i, j, double gamma):
    return _cell_height(<uint64_t>key, <int64_t>i, <int64_t>j, gamma)


cdef inline bint _slab(double a0, double da, double lo, double hi,
                       double* t0, double* t1) noexcept nogil:
    cdef double u, v
    if da == 0.0:
        if lo < a0 and a0 < hi:
            t0[0] = 0.0
            t1[0] = 1.0
            return True
        return False
    u = (lo - a0) / da
    v = (hi - a0) / da
    if u > v:
        u, v = v, u
    t0[0] = u
    t1[0] = v
    return True


cdef bint _march(double x0, double y0, double z0, double x1, double y1, double z1,
                 double pitch, double width, double off_x, double off_y,
                 int64_t i_lo, int64_t i_hi, int64_t j_lo, int64_t j_hi,
                 const double[:, ::1] heights, bint use_array,
                 uint64_t key, double gamma) noexcept nogil:
    cdef double dx = x1 - x0, dy = y1 - y0, dz = z1 - z0
    cdef double xmin, xmax, bx, by, t0, t1, s0, s1, ta, tb, ya, yb, ylo, yhi, z, za, zb, h
    cdef int64_t i, j, ia, ib, ja, jb
    if (dx == 0.0 and dy == 0.0) or width <= 0.0:
        return False
    xmin = x0 if x0 < x1 else x1
    xmax = x1 if x0 < x1 else x0
    ia = <int64_t>ceil((xmin - off_x - width) / pitch)
    ib = <int64_t>floor((xmax - off_x) / pitch)
    if ia < i_lo:
        ia = i_lo
    if ib > i_hi:
        ib = i_hi
    i = ia
    while i <= ib:
        bx = off_x + i * pitch
        if not _slab(x0, dx, bx, bx + width, &t0, &t1):
            i += 1
            continue
        if t0 < 0.0:
            t0 = 0.0
        if t1 > 1.0:
            t1 = 1.0
        if t0 >= t1:
            i += 1
            continue
        ya = y0 + t0 * dy
        yb = y0 + t1 * dy
        ylo = ya if ya < yb else yb
        yhi = yb if ya < yb else ya
        ja = <int64_t>ceil((ylo - off_y - width) / pitch)
        jb = <int64_t>floor((yhi - off_y) / pitch)
        if ja < j_lo:
            ja = j_lo
        if jb > j_hi:
            jb = j_hi
        j = ja
        while j <= jb:
            by = off_y + j * pitch
            if _slab(y0, dy, by, by + width, &s0, &s1):
                ta = t0 if t0 > s0 else s0
                tb = t1 if t1 < s1 else s1
                if ta < tb:
                    za = z0 + ta * dz
                    zb = z0 + tb * dz
                    z = za if za < zb else zb
                    if use_array:
                        h = heights[i, j]
                    else:
                        h = _cell_height(key, i, j, gamma)
                    if z <= h:
                        return True
            j += 1
        i += 1
    return False


def segment_blocked(heights, double pitch, double width, double off_x, double off_y, tx, rx):
    cdef const double[:, ::1] hv = np.ascontiguousarray(heights, dtype=np.float64)
    return bool(_march(tx[0], tx[1], tx[2], rx[0], rx[1], rx[2], pitch, width,
                       off_x, off_y, 0, hv.shape[0] - 1, 0, hv.shape[1] - 1,
                       hv, True, 0, 0.0))


def trace_batch(double tx_z, rx_x, rx_y, double rx_z, off_x, off_y, keys,
                double pitch, double width, double gamma,
                int64_t i_lo, int64_t i_hi, int64_t j_lo, int64_t j_hi):
    cdef const double[::1] xs = np.ascontiguousarray(rx_x, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(rx_y, dtype=np.float64)
    cdef const double[::1] ox = np.ascontiguousarray(off_x, dtype=np.float64)
    cdef const double[::1] oy = np.ascontiguousarray(off_y, dtype=np.float64)
    cdef const uint64_t[::1] ks = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t n = ks.shape[0], k
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] ov = out
    cdef const double[:, ::1] empty = np.zeros((1, 1))
    with nogil:
        for k in range(n):
            ov[k] = _march(0.0, 0.0, tx_z, xs[k], ys[k], rx_z, pitch, width,
                           ox[k], oy[k], i_lo, i_hi, j_lo, j_hi,
                           empty, False, ks[k], gamma)
    return out
