"""Independent reference computations shared by the test modules."""
import numpy as np
from scipy.linalg import expm


def dense_neumann_laplacian(m, n, bw, bh):
    """Negative 5-point Laplacian with mirrored ghost cells, assembled entry by entry."""
    a = np.zeros((m * n, m * n))
    idx = lambda i, j: i * n + j
    for i in range(m):
        for j in range(n):
            k = idx(i, j)
            for di, dj, h in ((1, 0, bw), (-1, 0, bw), (0, 1, bh), (0, -1, bh)):
                ii, jj = i + di, j + dj
                if 0 <= ii < m and 0 <= jj < n:
                    a[k, k] += 1 / h ** 2
                    a[k, idx(ii, jj)] -= 1 / h ** 2
    return a


def dense_poisson(rho, bw, bh):
    m, n = rho.shape
    a = dense_neumann_laplacian(m, n, bw, bh)
    b = (rho - rho.mean()).ravel()
    # pin the null space: append the zero-mean constraint as an extra equation
    aa = np.vstack([a, np.ones(m * n)])
    bb = np.append(b, 0.0)
    phi, *_ = np.linalg.lstsq(aa, bb, rcond=None)
    return phi.reshape(m, n)


def exchange_transition(g, t):
    """|<10| exp(-iHt) |01>|^2 for H = g (|01><10| + |10><01|)."""
    h = np.array([[0.0, g], [g, 0.0]])
    u = expm(-1j * h * t)
    return abs(u[1, 0]) ** 2


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        xp, xm = x.copy(), x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (f(xp) - f(xm)) / (2 * h)
    return g


def max_rel_error(a, b):
    """Largest per-coordinate relative error, floored far below the gradient scale."""
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-8 * max(np.abs(b).max(), 1e-30))
    return float(np.max(np.abs(a - b) / scale))


def separable_difference(term, x, h=1e-6):
    """Central differences of a sum whose coordinate (k, c) only touches ``term(k)``.

    Differencing only the summands that involve instance k keeps the round-off
    of the unrelated summands out of the quotient.
    """
    g = np.zeros_like(x)
    for k in range(x.shape[0]):
        f = term(k)
        if f is None:
            continue
        for c in range(x.shape[1]):
            xp, xm = x.copy(), x.copy()
            xp[k, c] += h
            xm[k, c] -= h
            g[k, c] = (f(xp) - f(xm)) / (2 * h)
    return g
