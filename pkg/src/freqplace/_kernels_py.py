"""Vectorised numpy implementations of the placement kernels.

Used when the compiled extension is unavailable; also the reference the
compiled kernels are tested against.
"""
import numpy as np

BACKEND = "python"


def _axis_overlaps(lo, width, origin, bsize, nbins, k):
    first = np.floor((lo - origin) / bsize).astype(np.int64)
    np.clip(first, 0, nbins - 1, out=first)
    idx = first[:, None] + np.arange(k)[None, :]
    bl = origin + idx * bsize
    br = bl + bsize
    hi = (lo + width)[:, None]
    lo2 = lo[:, None]
    ov = np.minimum(hi, br) - np.maximum(lo2, bl)
    valid = (idx < nbins) & (ov > 0)
    ov = np.where(valid, ov, 0.0)
    dov = np.where(valid, (hi < br).astype(float) - (lo2 > bl).astype(float), 0.0)
    np.minimum(idx, nbins - 1, out=idx)
    return idx, ov, dov


def _span(sizes, bsize):
    return int(np.ceil(sizes.max() / bsize)) + 1 if len(sizes) else 1


def density_map(pos, sizes, xl, yl, bw, bh, m, n):
    """Area fraction per bin from axis-aligned footprints centred at ``pos``."""
    rho = np.zeros(m * n)
    if len(pos) == 0:
        return rho.reshape(m, n)
    ix, ovx, _ = _axis_overlaps(pos[:, 0] - sizes[:, 0] / 2, sizes[:, 0], xl, bw, m, _span(sizes[:, 0], bw))
    iy, ovy, _ = _axis_overlaps(pos[:, 1] - sizes[:, 1] / 2, sizes[:, 1], yl, bh, n, _span(sizes[:, 1], bh))
    flat = (ix[:, :, None] * n + iy[:, None, :]).ravel()
    w = (ovx[:, :, None] * ovy[:, None, :]).ravel()
    rho += np.bincount(flat, weights=w, minlength=m * n)
    return (rho / (bw * bh)).reshape(m, n)


def density_grad(pos, sizes, xl, yl, bw, bh, phi):
    """Gradient of sum_b rho_b * phi_b with respect to each footprint centre."""
    m, n = phi.shape
    out = np.zeros((len(pos), 2))
    if len(pos) == 0:
        return out
    ix, ovx, dx = _axis_overlaps(pos[:, 0] - sizes[:, 0] / 2, sizes[:, 0], xl, bw, m, _span(sizes[:, 0], bw))
    iy, ovy, dy = _axis_overlaps(pos[:, 1] - sizes[:, 1] / 2, sizes[:, 1], yl, bh, n, _span(sizes[:, 1], bh))
    p = phi[ix[:, :, None], iy[:, None, :]]
    out[:, 0] = np.einsum("ia,ib,iab->i", dx, ovy, p)
    out[:, 1] = np.einsum("ia,ib,iab->i", ovx, dy, p)
    return out / (bw * bh)


def wa_wirelength(pos, pins, net_ptr, weights, gamma):
    """Weighted-average smoothed HPWL over nets given in CSR form."""
    grad = np.zeros_like(pos)
    n_nets = len(net_ptr) - 1
    if n_nets == 0:
        return 0.0, grad
    starts = net_ptr[:-1]
    counts = np.diff(net_ptr)
    net_of_pin = np.repeat(np.arange(n_nets), counts)
    total = 0.0
    for axis in (0, 1):
        x = pos[pins, axis]
        xmax = np.maximum.reduceat(x, starts)[net_of_pin]
        xmin = np.minimum.reduceat(x, starts)[net_of_pin]
        ep = np.exp((x - xmax) / gamma)
        em = np.exp((xmin - x) / gamma)
        sp = np.add.reduceat(ep, starts)
        tp = np.add.reduceat(x * ep, starts)
        sm = np.add.reduceat(em, starts)
        tm = np.add.reduceat(x * em, starts)
        mp = tp / sp
        mm = tm / sm
        total += float(np.dot(weights, mp - mm))
        g = ep / sp[net_of_pin] * (1 + (x - mp[net_of_pin]) / gamma)
        g -= em / sm[net_of_pin] * (1 - (x - mm[net_of_pin]) / gamma)
        g *= weights[net_of_pin]
        grad[:, axis] = np.bincount(pins, weights=g, minlength=len(pos))
    return total, grad


def freq_repulsion(pos, pi, pj, eps):
    """Inverse-square pair energy and its gradient; floor-active pairs carry none."""
    grad = np.zeros_like(pos)
    if len(pi) == 0:
        return 0.0, grad
    d = pos[pi] - pos[pj]
    d2 = d[:, 0] ** 2 + d[:, 1] ** 2
    floor = d2 < eps * eps
    inv = 1.0 / np.where(floor, eps * eps, d2)
    total = float(inv.sum())
    coef = np.where(floor, 0.0, -2.0 * inv * inv)
    g = coef[:, None] * d
    for axis in (0, 1):
        grad[:, axis] = np.bincount(pi, weights=g[:, axis], minlength=len(pos))
        grad[:, axis] -= np.bincount(pj, weights=g[:, axis], minlength=len(pos))
    return total, grad
