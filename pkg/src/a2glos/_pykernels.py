"""Pure-Python occlusion kernels.

Reference implementation and fallback for ``_kernels.pyx``.  Both must stay
arithmetically identical so the two backends agree bit for bit.
"""
import math

import numpy as np

MASK = 0xFFFFFFFFFFFFFFFF
INV_2_53 = 1.0 / 9007199254740992.0

# buildings outside these index bounds do not exist
UNBOUNDED = 1 << 60


def _mix(z):
    # splitmix64 finalizer
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def cell_uniform(key, i, j):
    """Uniform variate in (0, 1) attached to lattice cell (i, j) of city ``key``."""
    h = _mix(key ^ (((i & MASK) * 0xD6E8FEB86659FD93) & MASK))
    h = _mix(h ^ (((j & MASK) * 0xCA5A826395121157) & MASK))
    return (float(h >> 11) + 0.5) * INV_2_53


def cell_height(key, i, j, gamma):
    """Rayleigh(gamma) building height for cell (i, j), by inverse survival."""
    return gamma * math.sqrt(-2.0 * math.log(cell_uniform(key, i, j)))


def _slab(a0, da, lo, hi):
    # parameter interval of a0 + t*da inside the open slab (lo, hi), or None
    if da == 0.0:
        if lo < a0 < hi:
            return 0.0, 1.0
        return None
    t0 = (lo - a0) / da
    t1 = (hi - a0) / da
    if t0 > t1:
        t0, t1 = t1, t0
    return t0, t1


def march(x0, y0, z0, x1, y1, z1, pitch, width, off_x, off_y,
          i_lo, i_hi, j_lo, j_hi, height):
    """True if the segment passes through any building footprint below its roof.

    Building (i, j) occupies ``[off_x + i*pitch, off_x + i*pitch + width]`` by
    the analogous y range; ``height(i, j)`` returns its height.  Over the
    footprint the ray is lowest at one of its two boundary crossings, so only
    those two heights are compared.
    """
    dx = x1 - x0
    dy = y1 - y0
    if (dx == 0.0 and dy == 0.0) or width <= 0.0:
        return False
    dz = z1 - z0
    xmin = min(x0, x1)
    xmax = max(x0, x1)
    ia = max(math.ceil((xmin - off_x - width) / pitch), i_lo)
    ib = min(math.floor((xmax - off_x) / pitch), i_hi)
    for i in range(ia, ib + 1):
        bx = off_x + i * pitch
        sx = _slab(x0, dx, bx, bx + width)
        if sx is None:
            continue
        t0 = max(sx[0], 0.0)
        t1 = min(sx[1], 1.0)
        if t0 >= t1:
            continue
        ya = y0 + t0 * dy
        yb = y0 + t1 * dy
        ylo = min(ya, yb)
        yhi = max(ya, yb)
        ja = max(math.ceil((ylo - off_y - width) / pitch), j_lo)
        jb = min(math.floor((yhi - off_y) / pitch), j_hi)
        for j in range(ja, jb + 1):
            by = off_y + j * pitch
            sy = _slab(y0, dy, by, by + width)
            if sy is None:
                continue
            ta = max(t0, sy[0])
            tb = min(t1, sy[1])
            if ta >= tb:
                continue
            z = min(z0 + ta * dz, z0 + tb * dz)
            if z <= height(i, j):
                return True
    return False


def segment_blocked(heights, pitch, width, off_x, off_y, tx, rx):
    """Occlusion test against an explicit ``heights[i, j]`` grid."""
    heights = np.asarray(heights, dtype=float)
    ni, nj = heights.shape
    return march(tx[0], tx[1], tx[2], rx[0], rx[1], rx[2], pitch, width,
                 off_x, off_y, 0, ni - 1, 0, nj - 1,
                 lambda i, j: heights[i, j])


def trace_batch(tx_z, rx_x, rx_y, rx_z, off_x, off_y, keys, pitch, width,
                gamma, i_lo, i_hi, j_lo, j_hi):
    """Blockage flags for links from (0, 0, tx_z) to (rx_x[k], rx_y[k], rx_z).

    Trial ``k`` lives in its own city: lattice phase ``(off_x[k], off_y[k])``
    and building heights hashed from ``keys[k]``.
    """
    n = len(keys)
    out = np.zeros(n, dtype=np.uint8)
    for k in range(n):
        key = int(keys[k])
        blocked = march(0.0, 0.0, tx_z, float(rx_x[k]), float(rx_y[k]), rx_z,
                        pitch, width, float(off_x[k]), float(off_y[k]),
                        i_lo, i_hi, j_lo, j_hi,
                        lambda i, j, key=key: cell_height(key, i, j, gamma))
        out[k] = blocked
    return out
