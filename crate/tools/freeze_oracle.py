"""Independent dense reference values for the frozen-value tests.

Prints one row per (problem, smoother, aggregation):
||E_TG||_A, ||E_STG||_A, ||E_ITG||_A with B_c = 2 A_c, and the spectral radius
of E_TG on R(A). Norms are ||A^{1/2} E A^{+1/2}||_2, computed by SVD with numpy
pseudo-inverses; nothing is shared with the Rust implementation.

    python3 tools/freeze_oracle.py
"""

import numpy as np


def laplacian(n, edges):
    a = np.zeros((n, n))
    for i, j, w in edges:
        if i == j:
            continue
        a[i, i] += w
        a[j, j] += w
        a[i, j] -= w
        a[j, i] -= w
    return a


def neumann_1d(n):
    return laplacian(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def neumann_2d(nx, ny):
    edges = []
    for j in range(ny):
        for i in range(nx):
            k = i + nx * j
            if i + 1 < nx:
                edges.append((k, k + 1, 1.0))
            if j + 1 < ny:
                edges.append((k, k + nx, 1.0))
    return laplacian(nx * ny, edges)


def two_cycles():
    return laplacian(12, [(b + i, b + (i + 1) % 6, 1.0) for b in (0, 6) for i in range(6)])


def ladder():
    edges = []
    for i in range(6):
        edges.append((i, i + 6, 1.0))
        if i + 1 < 6:
            edges += [(i, i + 1, 2.0), (i + 6, i + 7, 2.0)]
    return laplacian(12, edges)


def wheel():
    edges = []
    for i in range(1, 10):
        edges.append((0, i, 0.5))
        edges.append((i, 1 if i == 9 else i + 1, 1.0 + 0.25 * (i % 3)))
    return laplacian(10, edges)


def aggregation(n, k):
    p = np.zeros((n, -(-n // k)))
    for i in range(n):
        p[i, i // k] = 1.0
    return p


def smoother(a, kind):
    if kind == "gs":
        return np.linalg.inv(np.tril(a))
    return kind * np.diag(1.0 / np.diag(a))


def psd_sqrt(a):
    w, v = np.linalg.eigh(a)
    cut = 1e-12 * w.max()
    w = np.where(w > cut, w, 0.0)
    s = np.sqrt(w)
    si = np.where(w > 0, 1.0 / np.where(w > 0, s, 1.0), 0.0)
    return v @ np.diag(s) @ v.T, v @ np.diag(si) @ v.T


def a_norm(a, e):
    s, si = psd_sqrt(a)
    return np.linalg.norm(s @ e @ si, 2)


def factors(a, p, m, bc_scale=2.0):
    n = a.shape[0]
    ac = p.T @ a @ p
    i = np.eye(n)
    smooth = i - m @ a
    e_tg = (i - p @ np.linalg.pinv(ac, rcond=1e-12) @ p.T @ a) @ smooth
    e_stg = (i - m.T @ a) @ e_tg
    bc = bc_scale * ac
    e_itg = (i - p @ np.linalg.pinv(bc, rcond=1e-12) @ p.T @ a) @ smooth
    sa, sai = psd_sqrt(a)
    rho = max(abs(np.linalg.eigvals(sa @ e_tg @ sai)))
    return a_norm(a, e_tg), a_norm(a, e_stg), a_norm(a, e_itg), rho


CASES = [
    ("neumann1d:8", neumann_1d(8)),
    ("neumann1d:16", neumann_1d(16)),
    ("neumann1d:32", neumann_1d(32)),
    ("neumann2d:8x8", neumann_2d(8, 8)),
    ("graph:two-cycles", two_cycles()),
    ("graph:ladder", ladder()),
    ("graph:wheel", wheel()),
]

if __name__ == "__main__":
    for name, a in CASES:
        for kind in (0.5, 2.0 / 3.0, "gs"):
            for k in (2, 4):
                tg, stg, itg, rho = factors(a, aggregation(a.shape[0], k), smoother(a, kind))
                label = "gs" if kind == "gs" else f"jacobi:{kind:.4f}"
                vals = ", ".join(repr(float(x)) for x in (tg, stg, itg, rho))
                print(f'("{name}", "{label}", {k}, {vals}),')
