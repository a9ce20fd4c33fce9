"""Coordinate charts carrying a pseudo-Kahler structure.

A chart owns three evaluable structures: the metric g_ij, the complex
structure J^i_j and (derived) the Christoffel symbols, each available as
derivative lists of any order through the jet engine.  Charts are immutable;
per-point results are cached, so evaluation across points is safe to run
concurrently.
"""

from __future__ import annotations

import numpy as np

from . import jets as J
from .errors import OutOfDomain, SingularMetric

_DET_FLOOR = 1e-12


def standard_complex_structure(dim: int) -> np.ndarray:
    """J pairing coordinates (x_1, x_2), (x_3, x_4), ...: J e_{2k} = e_{2k+1}."""
    Jm = np.zeros((dim, dim))
    for k in range(dim // 2):
        Jm[2 * k + 1, 2 * k] = 1.0
        Jm[2 * k, 2 * k + 1] = -1.0
    return Jm


def as_point(p, dim: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if dim is not None and p.size != dim:
        raise ValueError(f"point has length {p.size}, chart dimension is {dim}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    return p


class KahlerChart:
    """A single coordinate patch with evaluable g and J.

    ``metric_jets_fn(p, order)`` and ``jstruct_jets_fn(p, order)`` return
    derivative lists (see :mod:`tannolab.jets`).  Use the classmethod
    constructors rather than calling __init__ directly.
    """

    def __init__(self, dim, metric_jets_fn, jstruct_jets_fn, domain_radius, name):
        if dim % 2 != 0 or dim <= 0:
            raise ValueError("chart dimension must be a positive even integer")
        self.dim = int(dim)
        self.n = dim // 2
        self.domain_radius = float(domain_radius)
        self.name = name
        self._metric_jets_fn = metric_jets_fn
        self._jstruct_jets_fn = jstruct_jets_fn
        self._cache: dict = {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_constant(cls, g0, J0, domain_radius=10.0, name="constant chart"):
        g0 = np.asarray(g0, dtype=float)
        J0 = np.asarray(J0, dtype=float)
        dim = g0.shape[0]

        def metric_fn(p, order):
            return [g0.copy()] + [np.zeros((dim, dim) + (dim,) * m)
                                  for m in range(1, order + 1)]

        def jstruct_fn(p, order):
            return [J0.copy()] + [np.zeros((dim, dim) + (dim,) * m)
                                  for m in range(1, order + 1)]

        return cls(dim, metric_fn, jstruct_fn, domain_radius, name)

    @classmethod
    def from_potential(cls, dim, potential_fn, domain_radius, name,
                       jstruct0=None):
        """Kahler chart with constant J and metric g = 1/2 (H + J^T H J),
        H the coordinate Hessian of the potential.  Such a metric is
        automatically symmetric, J-compatible and parallel-J."""
        J0 = standard_complex_structure(dim) if jstruct0 is None \
            else np.asarray(jstruct0, dtype=float)

        def metric_fn(p, order):
            pot = J.eval_scalar_expr(potential_fn, p, order + 2)
            out = []
            for m in range(order + 1):
                P = pot[m + 2]  # first two trailing axes read as (a, b)
                G = 0.5 * (P + np.einsum("ca,db,cd...->ab...", J0, J0, P))
                out.append(G)
            return out

        def jstruct_fn(p, order):
            return [J0.copy()] + [np.zeros((dim, dim) + (dim,) * m)
                                  for m in range(1, order + 1)]

        return cls(dim, metric_fn, jstruct_fn, domain_radius, name)

    @classmethod
    def from_exprs(cls, dim, metric_expr, jstruct_expr, domain_radius, name):
        """Chart from jet-arithmetic callables returning entry grids."""

        def metric_fn(p, order):
            return J.eval_matrix_expr(metric_expr, p, order)

        def jstruct_fn(p, order):
            return J.eval_matrix_expr(jstruct_expr, p, order)

        return cls(dim, metric_fn, jstruct_fn, domain_radius, name)

    # -- derived charts -------------------------------------------------------

    def rescaled(self, c: float) -> "KahlerChart":
        """Chart with metric c*g (same Levi-Civita connection, same J)."""
        if c == 0:
            raise ValueError("rescaling constant must be nonzero")
        base = self

        def metric_fn(p, order):
            return [c * t for t in base.metric_jets(p, order)]

        return KahlerChart(self.dim, metric_fn, base._jstruct_jets_fn,
                           self.domain_radius, f"{self.name} (metric x {c:g})")

    def with_scaled_jstruct(self, s: float) -> "KahlerChart":
        """Deliberately broken chart (J scaled); for residual-detection tests."""
        base = self

        def jstruct_fn(p, order):
            return [s * t for t in base.jstruct_jets(p, order)]

        return KahlerChart(self.dim, base._metric_jets_fn, jstruct_fn,
                           self.domain_radius, f"{self.name} (J x {s:g})")

    def with_negated_metric(self) -> "KahlerChart":
        return self.rescaled(-1.0)

    # -- domain ---------------------------------------------------------------

    def inside(self, p) -> bool:
        p = as_point(p, self.dim)
        return float(np.linalg.norm(p)) <= self.domain_radius + 1e-12

    def require_inside(self, p) -> np.ndarray:
        p = as_point(p, self.dim)
        if not self.inside(p):
            raise OutOfDomain(
                f"|p| = {np.linalg.norm(p):.4g} exceeds domain radius "
                f"{self.domain_radius:g} of {self.name}")
        return p

    # -- cached jet access ----------------------------------------------------

    def _cached(self, kind: str, p: np.ndarray, order: int, builder):
        key = (kind, p.tobytes(), order)
        hit = self._cache.get(key)
        if hit is None:
            hit = builder()
            self._cache[key] = hit
        return hit

    def metric_jets(self, p, order: int) -> list[np.ndarray]:
        p = as_point(p, self.dim)
        return self._cached("g", p, order,
                            lambda: self._metric_jets_fn(p, order))

    def jstruct_jets(self, p, order: int) -> list[np.ndarray]:
        p = as_point(p, self.dim)
        return self._cached("J", p, order,
                            lambda: self._jstruct_jets_fn(p, order))

    def metric_inv_jets(self, p, order: int) -> list[np.ndarray]:
        p = as_point(p, self.dim)

        def build():
            g = self.metric_jets(p, order)
            sign, logdet = np.linalg.slogdet(g[0])
            if sign == 0 or logdet < np.log(_DET_FLOOR):
                raise SingularMetric(
                    f"|det g| below threshold at p={p} on {self.name}")
            return J.tinv(g, order)

        return self._cached("ginv", p, order, build)

    def christoffel_jets(self, p, order: int) -> list[np.ndarray]:
        """Derivative list of Gamma^k_ij (array axes [k, i, j, ...])."""
        p = as_point(p, self.dim)

        def build():
            g = self.metric_jets(p, order + 1)
            ginv = self.metric_inv_jets(p, order)
            dg = []
            for m in range(order + 1):
                A = g[m + 1]  # axes [l, i, j, extra...] with j the derivative
                term = A + np.swapaxes(A, 1, 2) - np.moveaxis(A, (0, 1, 2), (1, 2, 0))
                dg.append(0.5 * term)
            return J.tconv(ginv, dg, "kl,lij->kij", order)

        return self._cached("gamma", p, order, build)

    # -- plain values -----------------------------------------------------------

    def metric(self, p) -> np.ndarray:
        return np.array(self.metric_jets(p, 0)[0])

    def metric_inv(self, p) -> np.ndarray:
        return np.array(self.metric_inv_jets(p, 0)[0])

    def jstruct(self, p) -> np.ndarray:
        return np.array(self.jstruct_jets(p, 0)[0])

    def inner(self, p, u, v) -> float:
        g0 = self.metric_jets(p, 0)[0]
        return float(np.asarray(u) @ g0 @ np.asarray(v))

    def __repr__(self):
        return f"KahlerChart({self.name}, dim={self.dim}, R={self.domain_radius:g})"
