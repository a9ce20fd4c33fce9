"""Finite-difference oracles.

These exist to cross-check the jet engine and the chart constructions; the
main computational path never uses them.  All stencils are tensor-product
central differences with one Richardson extrapolation (leading error h^4).
Steps are balanced per derivative order against float64 roundoff; 1e-4 at
order 3 would drown the comparison in cancellation noise.
"""

from __future__ import annotations

import itertools

import numpy as np

from .charts import KahlerChart

STEP_ORDER1 = 1e-4
STEP_ORDER2 = 2e-3
STEP_ORDER3 = 6e-3


def _composite(fn, p, dirs, h):
    """Nested central difference in the given directions, one step size."""
    p = np.asarray(p, dtype=float)
    k = len(dirs)
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=k):
        q = p.copy()
        for s, i in zip(signs, dirs):
            q[i] += s * h
        total += float(np.prod(signs)) * np.asarray(fn(q), dtype=float)
    return total / (2.0 * h) ** k


def fd_partial(fn, p, dirs, h):
    """Mixed partial derivative with Richardson extrapolation."""
    d1 = _composite(fn, p, dirs, h)
    d2 = _composite(fn, p, dirs, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def fd_gradient(fn, p, h=STEP_ORDER1) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.array([fd_partial(fn, p, (i,), h) for i in range(p.size)])


def fd_hessian(fn, p, h=STEP_ORDER2) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    d = p.size
    H = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            H[i, j] = H[j, i] = fd_partial(fn, p, (i, j), h)
    return H


def fd_third(fn, p, h=STEP_ORDER3) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    d = p.size
    T = np.zeros((d, d, d))
    for i in range(d):
        for j in range(i, d):
            for k in range(j, d):
                v = fd_partial(fn, p, (i, j, k), h)
                for perm in set(itertools.permutations((i, j, k))):
                    T[perm] = v
    return T


def fd_matrix_d1(fn, p, h=STEP_ORDER1) -> np.ndarray:
    """d1[a, b, k] = partial_k of a matrix-valued map."""
    p = np.asarray(p, dtype=float)
    d = p.size
    probe = np.asarray(fn(p))
    out = np.zeros(probe.shape + (d,))
    for k in range(d):
        out[..., k] = fd_partial(fn, p, (k,), h)
    return out


def fd_matrix_d2(fn, p, h=STEP_ORDER2) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    d = p.size
    probe = np.asarray(fn(p))
    out = np.zeros(probe.shape + (d, d))
    for i in range(d):
        for j in range(i, d):
            v = fd_partial(fn, p, (i, j), h)
            out[..., i, j] = v
            out[..., j, i] = v
    return out


# ---------------------------------------------------------------------------
# Oracles for chart-level quantities
# ---------------------------------------------------------------------------

def christoffel_fd(chart: KahlerChart, p) -> np.ndarray:
    """Gamma^k_ij from finite differences of metric values only."""
    g0 = chart.metric(p)
    dg = fd_matrix_d1(chart.metric, p)
    ginv = np.linalg.inv(g0)
    T = dg + np.swapaxes(dg, 1, 2) - np.moveaxis(dg, (0, 1, 2), (1, 2, 0))
    return 0.5 * np.einsum("kl,lij->kij", ginv, T)


def riemann_fd(chart: KahlerChart, p) -> np.ndarray:
    """R[l, k, i, j] so that R(e_i, e_j) e_k = R[l, k, i, j] e_l (FD route)."""
    g0 = chart.metric(p)
    dg = fd_matrix_d1(chart.metric, p)
    d2g = fd_matrix_d2(chart.metric, p)
    ginv = np.linalg.inv(g0)
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    T = dg + np.swapaxes(dg, 1, 2) - np.moveaxis(dg, (0, 1, 2), (1, 2, 0))
    # dT[l, i, j, m] = partial_m (partial_j g_li + partial_i g_lj - partial_l g_ij)
    dT = (d2g
          + d2g.transpose(0, 2, 1, 3)
          - d2g.transpose(2, 0, 1, 3))
    G = 0.5 * np.einsum("kl,lij->kij", ginv, T)
    dG = 0.5 * (np.einsum("klm,lij->kijm", dginv, T)
                + np.einsum("kl,lijm->kijm", ginv, dT))
    # dG[k, i, j, m] = partial_m Gamma^k_ij
    R = (np.einsum("ljki->lkij", dG)
         - np.einsum("likj->lkij", dG)
         + np.einsum("lim,mjk->lkij", G, G)
         - np.einsum("ljm,mik->lkij", G, G))
    return R


def sectional_curvature_fd(chart: KahlerChart, p, X, Y) -> float:
    """K(X, Y) = g(R(X,Y)Y, X) / (|X|^2 |Y|^2 - g(X,Y)^2)."""
    g0 = chart.metric(p)
    R = riemann_fd(chart, p)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    RXYY = np.einsum("lkij,i,j,k->l", R, X, Y, Y)
    num = float(X @ g0 @ RXYY)
    den = (float(X @ g0 @ X) * float(Y @ g0 @ Y) - float(X @ g0 @ Y) ** 2)
    return num / den


def holomorphic_sectional_curvature_fd(chart: KahlerChart, p, X) -> float:
    Jm = chart.jstruct(p)
    return sectional_curvature_fd(chart, p, X, Jm @ np.asarray(X, float))


def laplacian_fd(chart: KahlerChart, f, p) -> float:
    """Laplacian from FD Hessian and FD Christoffel symbols only."""
    H = fd_hessian(lambda q: f(q), p)
    G = christoffel_fd(chart, p)
    grad = fd_gradient(lambda q: f(q), p)
    Hcov = H - np.einsum("kij,k->ij", G, grad)
    return float(np.einsum("ij,ij->", np.linalg.inv(chart.metric(p)), Hcov))
