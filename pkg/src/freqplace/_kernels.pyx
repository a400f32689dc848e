# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled placement kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, floor, ceil, fmin, fmax

cnp.import_array()

BACKEND = "cython"


cdef inline Py_ssize_t _first_bin(double lo, double origin, double bsize, Py_ssize_t nbins) nogil:
    cdef Py_ssize_t b = <Py_ssize_t>floor((lo - origin) / bsize)
    if b < 0:
        return 0
    if b > nbins - 1:
        return nbins - 1
    return b


def density_map(double[:, ::1] pos, double[:, ::1] sizes, double xl, double yl,
                double bw, double bh, Py_ssize_t m, Py_ssize_t n):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((m, n))
    cdef double[:, ::1] rho = out
    cdef Py_ssize_t i, a, b, bx0, by0
    cdef double lx, hx, ly, hy, ovx, ovy, cell_l, cell_b
    cdef double inv_area = 1.0 / (bw * bh)
    with nogil:
        for i in range(pos.shape[0]):
            lx = pos[i, 0] - 0.5 * sizes[i, 0]
            hx = lx + sizes[i, 0]
            ly = pos[i, 1] - 0.5 * sizes[i, 1]
            hy = ly + sizes[i, 1]
            bx0 = _first_bin(lx, xl, bw, m)
            by0 = _first_bin(ly, yl, bh, n)
            a = bx0
            while a < m:
                cell_l = xl + a * bw
                if cell_l >= hx:
                    break
                ovx = fmin(hx, cell_l + bw) - fmax(lx, cell_l)
                if ovx > 0:
                    b = by0
                    while b < n:
                        cell_b = yl + b * bh
                        if cell_b >= hy:
                            break
                        ovy = fmin(hy, cell_b + bh) - fmax(ly, cell_b)
                        if ovy > 0:
                            rho[a, b] += ovx * ovy * inv_area
                        b += 1
                a += 1
    return out


def density_grad(double[:, ::1] pos, double[:, ::1] sizes, double xl, double yl,
                 double bw, double bh, double[:, ::1] phi):
    cdef Py_ssize_t m = phi.shape[0], n = phi.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((pos.shape[0], 2))
    cdef double[:, ::1] g = out
    cdef Py_ssize_t i, a, b, bx0, by0
    cdef double lx, hx, ly, hy, ovx, ovy, dx, dy, cell_l, cell_b, gx, gy, p
    cdef double inv_area = 1.0 / (bw * bh)
    with nogil:
        for i in range(pos.shape[0]):
            lx = pos[i, 0] - 0.5 * sizes[i, 0]
            hx = lx + sizes[i, 0]
            ly = pos[i, 1] - 0.5 * sizes[i, 1]
            hy = ly + sizes[i, 1]
            bx0 = _first_bin(lx, xl, bw, m)
            by0 = _first_bin(ly, yl, bh, n)
            gx = 0.0
            gy = 0.0
            a = bx0
            while a < m:
                cell_l = xl + a * bw
                if cell_l >= hx:
                    break
                ovx = fmin(hx, cell_l + bw) - fmax(lx, cell_l)
                if ovx > 0:
                    dx = (1.0 if hx < cell_l + bw else 0.0) - (1.0 if lx > cell_l else 0.0)
                    b = by0
                    while b < n:
                        cell_b = yl + b * bh
                        if cell_b >= hy:
                            break
                        ovy = fmin(hy, cell_b + bh) - fmax(ly, cell_b)
                        if ovy > 0:
                            dy = (1.0 if hy < cell_b + bh else 0.0) - (1.0 if ly > cell_b else 0.0)
                            p = phi[a, b]
                            gx += dx * ovy * p
                            gy += ovx * dy * p
                        b += 1
                a += 1
            g[i, 0] = gx * inv_area
            g[i, 1] = gy * inv_area
    return out


def wa_wirelength(double[:, ::1] pos, cnp.int64_t[::1] pins, cnp.int64_t[::1] net_ptr,
                  double[::1] weights, double gamma):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((pos.shape[0], 2))
    cdef double[:, ::1] grad = out
    cdef Py_ssize_t e, k, axis, s, t
    cdef double xmax, xmin, x, ep, em, sp, tp, sm, tm, mp, mm, w
    cdef double total = 0.0
    with nogil:
        for e in range(net_ptr.shape[0] - 1):
            s = net_ptr[e]
            t = net_ptr[e + 1]
            w = weights[e]
            for axis in range(2):
                xmax = pos[pins[s], axis]
                xmin = xmax
                for k in range(s + 1, t):
                    x = pos[pins[k], axis]
                    xmax = fmax(xmax, x)
                    xmin = fmin(xmin, x)
                sp = 0.0
                tp = 0.0
                sm = 0.0
                tm = 0.0
                for k in range(s, t):
                    x = pos[pins[k], axis]
                    ep = exp((x - xmax) / gamma)
                    em = exp((xmin - x) / gamma)
                    sp += ep
                    tp += x * ep
                    sm += em
                    tm += x * em
                mp = tp / sp
                mm = tm / sm
                total += w * (mp - mm)
                for k in range(s, t):
                    x = pos[pins[k], axis]
                    ep = exp((x - xmax) / gamma)
                    em = exp((xmin - x) / gamma)
                    grad[pins[k], axis] += w * (ep / sp * (1 + (x - mp) / gamma)
                                                - em / sm * (1 - (x - mm) / gamma))
    return total, out


def freq_repulsion(double[:, ::1] pos, cnp.int64_t[::1] pi, cnp.int64_t[::1] pj, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((pos.shape[0], 2))
    cdef double[:, ::1] grad = out
    cdef Py_ssize_t k, i, j
    cdef double dx, dy, d2, inv, c
    cdef double eps2 = eps * eps
    cdef double total = 0.0
    with nogil:
        for k in range(pi.shape[0]):
            i = pi[k]
            j = pj[k]
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < eps2:
                total += 1.0 / eps2
                continue
            inv = 1.0 / d2
            total += inv
            c = -2.0 * inv * inv
            grad[i, 0] += c * dx
            grad[i, 1] += c * dy
            grad[j, 0] -= c * dx
            grad[j, 1] -= c * dy
    return total, out
