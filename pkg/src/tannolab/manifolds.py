"""Concrete pseudo-Kahler charts, test fields and a geodesic integrator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .charts import KahlerChart, standard_complex_structure
from .errors import NotLightlike
from .fields import ExprField, ScalarField

#: |g(v,v)| below this tags a geodesic as lightlike.
LIGHTLIKE_TOL = 1e-8


def flat_kahler_chart(p: int, q: int, domain_radius: float = 10.0) -> KahlerChart:
    """Constant metric of signature (2p, 2q) with the standard J.

    Signs come in J-invariant pairs so the complex structure is compatible.
    """
    if p < 0 or q < 0 or p + q < 1:
        raise ValueError("need p, q >= 0 with p + q >= 1")
    dim = 2 * (p + q)
    signs = np.concatenate([np.ones(2 * p), -np.ones(2 * q)])
    g0 = np.diag(signs)
    J0 = standard_complex_structure(dim)
    return KahlerChart.from_constant(
        g0, J0, domain_radius, name=f"flat ({p},{q})")


def fubini_study_chart(n: int, domain_radius: float = 2.0) -> KahlerChart:
    """One affine patch of CP(n), holomorphic sectional curvature 1.

    Real potential 2*log(1 + |z|^2); the induced metric at the origin is
    4*Id.  For n = 1 this is the unit round sphere in stereographic
    coordinates, metric 4/(1+r^2)^2 * Id.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = 2 * n

    def potential(x):
        r2 = x[0] * x[0]
        for xi in x[1:]:
            r2 = r2 + xi * xi
        return 2 * J.log(1 + r2)

    return KahlerChart.from_potential(
        dim, potential, domain_radius, name=f"Fubini-Study CP({n})")


def cpn_height_function(n: int, axis: int = 0) -> ScalarField:
    """A first-eigenvalue eigenfunction of the Laplacian on CP(n).

    In homogeneous coordinates these are 2*(|Z_axis|^2/|Z|^2 - 1/(n+1));
    the normalization makes the n=1, axis=0 member the classical height
    (1-|z|^2)/(1+|z|^2) of the round sphere.  Satisfies
    Delta f = -(n+1) f on the curvature-1 chart.
    """
    if not 0 <= axis <= n:
        raise ValueError("axis must lie in 0..n")
    dim = 2 * n
    shift = 2.0 / (n + 1)

    def fn(x):
        r2 = x[0] * x[0]
        for xi in x[1:]:
            r2 = r2 + xi * xi
        denom = 1 + r2
        if axis == 0:
            num = J.Jet.constant(2.0, dim, x[0].order)
        else:
            a, b = x[2 * (axis - 1)], x[2 * axis - 1]
            num = 2 * (a * a + b * b)
        return num / denom - shift

    return ExprField(dim, fn, name=f"CP({n}) height[{axis}]")


def sphere_second_eigenfunction() -> ScalarField:
    """h^2 - 1/3 with h the height on the unit S^2 = CP(1).

    Second-eigenvalue eigenfunction (Delta f = -6 f); satisfies the
    J-free third-order equation with c = 1 on the curvature-1 chart.
    """

    def fn(x):
        r2 = x[0] * x[0] + x[1] * x[1]
        h = (1 - r2) / (1 + r2)
        return h * h - 1.0 / 3.0

    return ExprField(2, fn, name="S^2 second eigenfunction")


def random_polynomial_field(dim: int, seed: int, degree: int = 3,
                            scale: float = 0.5) -> ScalarField:
    """Seeded random polynomial; generic smooth test input."""
    rng = np.random.default_rng(seed)
    lin = rng.normal(size=dim) * scale
    quad = rng.normal(size=(dim, dim)) * scale
    quad = 0.5 * (quad + quad.T)
    cub = rng.normal(size=(dim, dim, dim)) * (scale if degree >= 3 else 0.0)
    c0 = rng.normal() * scale

    def fn(x):
        out = J.Jet.constant(c0, dim, x[0].order)
        for i in range(dim):
            out = out + lin[i] * x[i]
            for j in range(dim):
                out = out + quad[i, j] * x[i] * x[j]
                if degree >= 3:
                    for k in range(dim):
                        out = out + cub[i, j, k] * (x[i] * x[j] * x[k])
        return out

    return ExprField(dim, fn, name=f"poly(seed={seed}, deg={degree})")


def random_quadratic_field(dim: int, seed: int, scale: float = 0.5) -> ScalarField:
    """Seeded random quadratic: a flat-chart solution of f_{,ijk} = 0."""
    return random_polynomial_field(dim, seed, degree=2, scale=scale)


def sample_points(chart: KahlerChart, count: int, seed: int,
                  radius: float | None = None) -> list[np.ndarray]:
    """Deterministic points uniform in the ball of the given radius."""
    if radius is None:
        radius = 0.75 * chart.domain_radius
    if radius > chart.domain_radius:
        raise ValueError("sampling radius exceeds the chart domain radius")
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        v = rng.normal(size=chart.dim)
        v /= np.linalg.norm(v)
        r = radius * rng.uniform() ** (1.0 / chart.dim)
        pts.append(r * v)
    return pts


# ---------------------------------------------------------------------------
# Geodesics
# ---------------------------------------------------------------------------

@dataclass
class GeodesicPath:
    """Samples (t, point, velocity) of a geodesic plus causal metadata."""

    samples: list[tuple[float, np.ndarray, np.ndarray]]
    causal_type: str                # "spacelike" | "timelike" | "lightlike"
    left_domain: bool = False
    energy: float = 0.0             # g(v0, v0)

    @property
    def points(self) -> list[np.ndarray]:
        return [s[1] for s in self.samples]


def _geodesic_rhs(chart: KahlerChart, x, v):
    G0 = chart.christoffel_jets(x, 0)[0]
    acc = -np.einsum("kij,i,j->k", G0, v, v)
    return v, acc


def integrate_geodesic(chart: KahlerChart, x0, v0, T: float,
                       steps: int = 256, conservation_tol: float = 1e-8,
                       max_steps: int = 1 << 17) -> GeodesicPath:
    """Fixed-step RK4 integration of the geodesic equation.

    The step count doubles until g(v, v) drifts by less than
    ``conservation_tol * (1 + |g(v0,v0)|)`` over the whole path.  If the
    path exits the chart domain it is truncated and flagged.
    """
    if steps < 16:
        raise ValueError("steps must be >= 16")
    x0 = chart.require_inside(x0)
    v0 = np.asarray(v0, dtype=float)
    q0 = chart.inner(x0, v0, v0)
    if abs(q0) < LIGHTLIKE_TOL:
        causal = "lightlike"
    elif q0 > 0:
        causal = "spacelike"
    else:
        causal = "timelike"

    n = int(steps)
    while True:
        path, drift = _run_rk4(chart, x0, v0, T, n, q0)
        if path.left_domain or drift <= conservation_tol * (1 + abs(q0)) \
                or 2 * n > max_steps:
            break
        n *= 2
    path.causal_type = causal
    path.energy = q0
    return path


def _run_rk4(chart, x0, v0, T, n, q0):
    dt = T / n
    x, v = x0.copy(), v0.copy()
    samples = [(0.0, x.copy(), v.copy())]
    left = False
    drift = 0.0
    for k in range(n):
        k1x, k1v = _geodesic_rhs(chart, x, v)
        k2x, k2v = _geodesic_rhs(chart, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = _geodesic_rhs(chart, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = _geodesic_rhs(chart, x + dt * k3x, v + dt * k3v)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if np.linalg.norm(x) > chart.domain_radius:
            left = True
            break
        samples.append(((k + 1) * dt, x.copy(), v.copy()))
        drift = max(drift, abs(chart.inner(x, v, v) - q0))
    return GeodesicPath(samples, "unknown", left), drift


def geodesic_residual(chart: KahlerChart, path: GeodesicPath) -> float:
    """Max |x'' + Gamma(x', x')| over midpoints, via 4-point stencils.

    Uses the O(dt^4) midpoint derivative (v_{k-1} - 27 v_k + 27 v_{k+1}
    - v_{k+2}) / (24 dt) along with cubic midpoint interpolation of the
    stored samples, so the check is independent of the RK4 update rule.
    """
    s = path.samples
    if len(s) < 4:
        return 0.0
    worst = 0.0
    dt = s[1][0] - s[0][0]
    for k in range(1, len(s) - 2):
        vm1, v0_, v1, v2 = (s[k - 1][2], s[k][2], s[k + 1][2], s[k + 2][2])
        acc = (vm1 - 27 * v0_ + 27 * v1 - v2) / (24 * dt)
        xm = (-s[k - 1][1] + 9 * s[k][1] + 9 * s[k + 1][1] - s[k + 2][1]) / 16.0
        vm = (-vm1 + 9 * v0_ + 9 * v1 - v2) / 16.0
        G0 = chart.christoffel_jets(xm, 0)[0]
        res = acc + np.einsum("kij,i,j->k", G0, vm, vm)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def random_lightlike_directions(chart: KahlerChart, count: int, seed: int,
                                p_blocks: int, q_blocks: int) -> list[np.ndarray]:
    """Null directions of a flat (p,q) chart, unit euclidean scale."""
    if p_blocks < 1 or q_blocks < 1:
        raise NotLightlike("lightlike directions need mixed signature")
    rng = np.random.default_rng(seed)
    dirs = []
    dp, dq = 2 * p_blocks, 2 * q_blocks
    for _ in range(count):
        u = rng.normal(size=dp)
        w = rng.normal(size=dq)
        w *= np.linalg.norm(u) / np.linalg.norm(w)
        v = np.concatenate([u, w])
        dirs.append(v / np.linalg.norm(v))
    return dirs
