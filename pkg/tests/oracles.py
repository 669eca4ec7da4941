"""Independent numerical oracles shared by the tests.

Nothing here reuses the package's series or projection machinery: finite
differences act on externally supplied scalar functions, and the curvature
oracle assembles the full curvature tensor from a closed-form metric by
differencing.  Agreement between these and the production code is therefore
a two-sided check.
"""
from __future__ import annotations

import numpy as np


def fd_apply(f, z: np.ndarray, ops: list[tuple[int, bool]], h: float) -> complex:
    """Apply a chain of Wirtinger derivatives to ``f`` by second-order
    central differences; ``ops`` lists (coordinate, is_conjugate) pairs."""
    if not ops:
        return f(z)
    (j, conj), rest = ops[0], list(ops[1:])
    e = np.zeros(len(z), dtype=complex)
    e[j] = 1.0
    dx = (fd_apply(f, z + h * e, rest, h)
          - fd_apply(f, z - h * e, rest, h)) / (2 * h)
    dy = (fd_apply(f, z + 1j * h * e, rest, h)
          - fd_apply(f, z - 1j * h * e, rest, h)) / (2 * h)
    return 0.5 * (dx + 1j * dy) if conj else 0.5 * (dx - 1j * dy)


def jet_ops(a: tuple[int, ...], b: tuple[int, ...]) -> list[tuple[int, bool]]:
    """Operation chain realising ``d^a dbar^b`` on the kernel diagonal."""
    ops: list[tuple[int, bool]] = []
    for j, k in enumerate(a):
        ops += [(j, False)] * k
    for j, k in enumerate(b):
        ops += [(j, True)] * k
    return ops


def fd_curvature(metric_fn, z, X, Y, h: float = 1e-3) -> float:
    """Bisectional curvature from a closed-form metric by differencing:
    assembles R_(i jbar k lbar) = -d_k dbar_l g_(i jbar)
    + sum g^(a bbar) d_k g_(i bbar) dbar_l g_(a jbar) and contracts."""
    z = np.asarray(z, dtype=complex)
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    n = len(z)
    g = metric_fn(z)
    ginv = np.linalg.inv(g)

    def entry(i, j):
        return lambda w: metric_fn(w)[i, j]

    dk = np.empty((n, n, n), dtype=complex)   # dk[k, i, j] = d_k g_(i jbar)
    dl = np.empty((n, n, n), dtype=complex)   # dl[l, i, j] = dbar_l g_(i jbar)
    d2 = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                dk[k, i, j] = fd_apply(entry(i, j), z, [(k, False)], h)
                dl[k, i, j] = fd_apply(entry(i, j), z, [(k, True)], h)
                for l in range(n):
                    d2[k, l, i, j] = fd_apply(entry(i, j), z,
                                              [(k, False), (l, True)], h)

    R = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    corr = sum(ginv[b, a] * dk[k, i, b] * dl[l, a, j]
                               for a in range(n) for b in range(n))
                    R[i, j, k, l] = -d2[k, l, i, j] + corr
    num = np.einsum("ijkl,i,j,k,l->", R, X, X.conj(), Y, Y.conj())
    nx = np.einsum("ij,i,j->", g, X, X.conj()).real
    ny = np.einsum("ij,i,j->", g, Y, Y.conj()).real
    return float((num / (nx * ny)).real)


def ball_metric_fn(m: int, r: float = 1.0):
    """Closed-form weighted ball metric as a function of the point."""
    def fn(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        n = len(z)
        w = r * r - np.vdot(z, z).real
        return m * (n + 1) * (np.eye(n, dtype=complex) / w
                              + np.outer(z.conj(), z) / w ** 2)
    return fn


def polydisc_metric_fn(radii):
    """Closed-form unweighted polydisc metric (diagonal product metric)."""
    def fn(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        diag = [2 * r * r / (r * r - abs(zj) ** 2) ** 2
                for zj, r in zip(z, radii)]
        return np.diag(diag).astype(complex)
    return fn


def mc_ellipsoid_volume(exponents, radii, samples: int, seed: int,
                        chunk: int = 10 ** 6) -> tuple[float, float]:
    """Monte-Carlo volume of ``{sum (|z_j|/a_j)^(2 p_j) < 1}`` in C^n with the
    standard-error of the estimate; uniform proposals on the bounding box."""
    rng = np.random.default_rng(seed)
    n = len(radii)
    box = 1.0
    for a in radii:
        box *= (2.0 * a) ** 2
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        u = rng.uniform(-1.0, 1.0, size=(k, 2 * n))
        total = np.zeros(k)
        for j in range(n):
            t2 = (radii[j] * u[:, 2 * j]) ** 2 + (radii[j] * u[:, 2 * j + 1]) ** 2
            total += (t2 / radii[j] ** 2) ** exponents[j]
        hits += int((total < 1.0).sum())
        done += k
    frac = hits / samples
    vol = box * frac
    sigma = box * np.sqrt(frac * (1.0 - frac) / samples)
    return vol, float(sigma)
