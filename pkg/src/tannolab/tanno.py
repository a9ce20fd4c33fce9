"""The third-order equation, its first-order reformulation, and transport.

The central objects: for a chart (g, J), a scalar field f and constant c,
the residual of

    f_{,ijk} + c (2 f_{,k} g_ij + f_{,i} g_jk + f_{,j} g_ik
                  - fbar_{,i} J_jk - fbar_{,j} J_ik) = 0

and, in the c = 1 normalization, the associated triple

    a_ij := -f_{,ij} - 2 f g_ij,   f_i := f_{,i},   mu := -2 f

which satisfies a first-order linear system in Frobenius form.  That system
is also realized as an ODE along curves (transport_bundle), which is how the
determined-by-one-point property becomes checkable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .calculus import frob, nabla_cotensor2, scalar_covariant_jets
from .charts import KahlerChart
from .errors import NotLightlike, StepTooLarge
from .fields import MatrixField, ScalarField
from .manifolds import GeodesicPath


@dataclass(frozen=True)
class TannoProblem:
    """A chart, a candidate solution field and the equation constant."""

    chart: KahlerChart
    f: ScalarField
    c: float

    def __post_init__(self):
        if not np.isfinite(self.c):
            raise ValueError("constant c must be finite")

    def rescaled(self) -> "TannoProblem":
        """Equivalent problem with c folded into the metric (c = 1)."""
        if self.c == 1.0:
            return self
        return TannoProblem(self.chart.rescaled(self.c), self.f, 1.0)


@dataclass
class SolutionBundle:
    """Value of the unknowns (a_ij, f_i, mu) at one point."""

    a: np.ndarray
    grad: np.ndarray
    mu: float

    def copy(self) -> "SolutionBundle":
        return SolutionBundle(self.a.copy(), self.grad.copy(), float(self.mu))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.a ** 2) + np.sum(self.grad ** 2)
                             + self.mu ** 2))


def f_from_mu(mu: float) -> float:
    """Inverse of mu = -2f."""
    return -0.5 * mu


def bundle_from_f(prob: TannoProblem, p) -> SolutionBundle:
    """(a, f_i, mu) built from the field; meant for c = 1 problems."""
    chart = prob.chart
    f0, f1, H = scalar_covariant_jets(chart, prob.f, p, 2)
    g0 = chart.metric_jets(p, 0)[0]
    a = -H - (2.0 * f0) * g0
    return SolutionBundle(a, f1, -2.0 * f0)


class BundleAField(MatrixField):
    """a_ij = -f_{,ij} - 2 f g_ij as a differentiable matrix field.

    Derivatives of any order propagate through the covariant Hessian
    (including the point dependence of the Christoffel symbols).
    """

    def __init__(self, prob: TannoProblem):
        super().__init__(prob.chart.dim)
        self.prob = prob

    def _jets(self, p, order):
        chart = self.prob.chart
        fj = self.prob.f.jets(p, order + 2)
        gj = chart.metric_jets(p, order)
        Gj = chart.christoffel_jets(p, order)
        grad = J.tgrad(fj)                       # lead (d,)
        hess_part = [fj[m + 2] for m in range(order + 1)]  # lead (d,d)
        corr = J.tconv(Gj, grad, "kij,k->ij", order)
        fg = J.tconv(fj, gj, ",ab->ab", order)
        return [-(hp - c) - 2.0 * f for hp, c, f in zip(hess_part, corr, fg)]


# ---------------------------------------------------------------------------
# Residual operators
# ---------------------------------------------------------------------------

def _bar(chart: KahlerChart, p, w: np.ndarray) -> np.ndarray:
    return chart.jstruct_jets(p, 0)[0].T @ w


def tanno_residual(prob: TannoProblem, p) -> np.ndarray:
    """Left side of the c-equation as a rank-3 array, [i, j, k]."""
    chart = prob.chart
    p = chart.require_inside(p)
    _, f1, _, T3 = scalar_covariant_jets(chart, prob.f, p, 3)
    g0 = chart.metric_jets(p, 0)[0]
    Jm = chart.jstruct_jets(p, 0)[0]
    fb = Jm.T @ f1
    Jf = g0 @ Jm
    c = prob.c
    res = (T3
           + c * (2.0 * np.einsum("k,ij->ijk", f1, g0)
                  + np.einsum("i,jk->ijk", f1, g0)
                  + np.einsum("j,ik->ijk", f1, g0)
                  - np.einsum("i,jk->ijk", fb, Jf)
                  - np.einsum("j,ik->ijk", fb, Jf)))
    return res


def gallot_tanno_residual(prob: TannoProblem, p) -> np.ndarray:
    """Same operator without the complex-structure terms."""
    chart = prob.chart
    p = chart.require_inside(p)
    _, f1, _, T3 = scalar_covariant_jets(chart, prob.f, p, 3)
    g0 = chart.metric_jets(p, 0)[0]
    c = prob.c
    return (T3
            + c * (2.0 * np.einsum("k,ij->ijk", f1, g0)
                   + np.einsum("i,jk->ijk", f1, g0)
                   + np.einsum("j,ik->ijk", f1, g0)))


def laplace_identity_residual(prob: TannoProblem, p) -> float:
    """|(Delta f)_{,k} + 4c(n+1) f_{,k}|; the contracted equation."""
    chart = prob.chart
    p = chart.require_inside(p)
    _, f1, _, T3 = scalar_covariant_jets(chart, prob.f, p, 3)
    ginv = chart.metric_inv_jets(p, 0)[0]
    dlap = np.einsum("ij,ijk->k", ginv, T3)
    n = chart.n
    return float(np.linalg.norm(dlap + 4.0 * prob.c * (n + 1) * f1))


def system_residual(prob: TannoProblem, p) -> tuple[float, float, float]:
    """Residuals of the three first-order equations (c = 1 convention).

    Returns (|a_{ij,k} - rhs|, |f_{i,j} - (mu g - a)|, |mu_{,i} + 2 f_i|).
    """
    chart = prob.chart
    p = chart.require_inside(p)
    f0, f1, H = scalar_covariant_jets(chart, prob.f, p, 2)
    g0 = chart.metric_jets(p, 0)[0]
    Jm = chart.jstruct_jets(p, 0)[0]
    fb = Jm.T @ f1
    Jf = g0 @ Jm

    a_field = BundleAField(prob)
    adk = nabla_cotensor2(chart, a_field, p).components
    rhs1 = (np.einsum("i,jk->ijk", f1, g0) + np.einsum("j,ik->ijk", f1, g0)
            - np.einsum("i,jk->ijk", fb, Jf) - np.einsum("j,ik->ijk", fb, Jf))
    r1 = frob(adk - rhs1)

    a0 = -H - (2.0 * f0) * g0
    mu = -2.0 * f0
    r2 = frob(H - (mu * g0 - a0))

    mu_grad = -2.0 * f1
    r3 = float(np.linalg.norm(mu_grad + 2.0 * f1))
    return r1, r2, r3


def trace_identity_residual(prob: TannoProblem, p) -> float:
    """|f_i - 1/4 (a^al_al)_{,i}| (the contracted first equation)."""
    chart = prob.chart
    p = chart.require_inside(p)
    ginv = chart.metric_inv_jets(p, 1)
    a_jets = BundleAField(prob).jets(p, 1)
    tr = J.tconv(ginv, a_jets, "ab,ab->", 1)
    f1 = prob.f.jets(p, 1)[1]
    return float(np.linalg.norm(f1 - 0.25 * tr[1]))


def mu_hessian_residual(prob: TannoProblem, p) -> float:
    """|mu_{,ij} - 2 a_ij + 2 mu g_ij| with mu = -2f.

    An algebraic identity of the bundle construction; kept as a cross-path
    consistency check between the field-Hessian route and bundle assembly.
    """
    chart = prob.chart
    p = chart.require_inside(p)
    mu_field = -2.0 * prob.f
    _, _, mu_hess = scalar_covariant_jets(chart, mu_field, p, 2)
    b = bundle_from_f(prob, p)
    g0 = chart.metric_jets(p, 0)[0]
    return frob(mu_hess - 2.0 * b.a + 2.0 * b.mu * g0)


# ---------------------------------------------------------------------------
# Transport along curves (the Frobenius property made computational)
# ---------------------------------------------------------------------------

def _transport_rhs(chart: KahlerChart, x, xdot, a, f, mu):
    """Coordinate time-derivatives of (a, f, mu) along velocity xdot."""
    g0 = chart.metric_jets(x, 0)[0]
    Jm = chart.jstruct_jets(x, 0)[0]
    G0 = chart.christoffel_jets(x, 0)[0]
    fb = Jm.T @ f
    Jf = g0 @ Jm
    # partial_k a_ij = rhs1_ijk + Gamma^l_ki a_lj + Gamma^l_kj a_il
    rhs1 = (np.einsum("i,jk->ijk", f, g0) + np.einsum("j,ik->ijk", f, g0)
            - np.einsum("i,jk->ijk", fb, Jf) - np.einsum("j,ik->ijk", fb, Jf))
    da = (np.einsum("ijk,k->ij", rhs1, xdot)
          + np.einsum("lki,k,lj->ij", G0, xdot, a)
          + np.einsum("lkj,k,il->ij", G0, xdot, a))
    # partial_j f_i = (mu g_ij - a_ij) + Gamma^l_ij f_l
    df = (mu * g0 - a) @ xdot + np.einsum("lij,j,l->i", G0, xdot, f)
    dmu = -2.0 * float(f @ xdot)
    return da, df, dmu


def transport_bundle(chart: KahlerChart, path, init: SolutionBundle,
                     max_step: float = 0.02) -> SolutionBundle:
    """Integrate the first-order system along a polyline of chart points.

    The polyline is densified so each RK4 step is at most ``max_step``;
    segments longer than a quarter of the domain radius are rejected.
    """
    pts = [np.asarray(q, dtype=float) for q in path]
    if len(pts) < 2:
        return init.copy()
    bound = 0.25 * chart.domain_radius
    a, f, mu = init.a.copy(), init.grad.copy(), float(init.mu)
    for q0, q1 in zip(pts[:-1], pts[1:]):
        seg = q1 - q0
        seglen = float(np.linalg.norm(seg))
        if seglen > bound:
            raise StepTooLarge(
                f"segment length {seglen:.3g} exceeds bound {bound:.3g}")
        if seglen == 0.0:
            continue
        nsub = max(1, int(np.ceil(seglen / max_step)))
        dt = 1.0 / nsub
        xdot = seg  # parametrize segment on [0, 1]
        for k in range(nsub):
            t = k * dt

            def rhs(tau, a_, f_, mu_):
                x = q0 + tau * seg
                return _transport_rhs(chart, x, xdot, a_, f_, mu_)

            k1 = rhs(t, a, f, mu)
            k2 = rhs(t + dt / 2, a + dt / 2 * k1[0], f + dt / 2 * k1[1],
                     mu + dt / 2 * k1[2])
            k3 = rhs(t + dt / 2, a + dt / 2 * k2[0], f + dt / 2 * k2[1],
                     mu + dt / 2 * k2[2])
            k4 = rhs(t + dt, a + dt * k3[0], f + dt * k3[1], mu + dt * k3[2])
            a = a + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            f = f + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            mu = mu + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return SolutionBundle(a, f, mu)


def lightlike_third_derivative(chart: KahlerChart, f: ScalarField,
                               geo: GeodesicPath) -> float:
    """max |d^3/dt^3 f(gamma(t))| over the stored samples.

    Computed from chain-rule jets: the curve's own Taylor coefficients come
    from the geodesic equation, the field's from its order-3 jets.
    """
    if geo.causal_type != "lightlike":
        raise NotLightlike(f"geodesic is {geo.causal_type}, not lightlike")
    worst = 0.0
    for _, x, v in geo.samples:
        fj = f.jets(x, 3)
        Gj = chart.christoffel_jets(x, 1)
        G0, dG = Gj[0], Gj[1]
        acc = -np.einsum("kij,i,j->k", G0, v, v)
        jerk = (-np.einsum("kijl,i,j,l->k", dG, v, v, v)
                - 2.0 * np.einsum("kij,i,j->k", G0, acc, v))
        d3 = (np.einsum("abc,a,b,c->", fj[3], v, v, v)
              + 3.0 * np.einsum("ab,a,b->", fj[2], acc, v)
              + float(fj[1] @ jerk))
        worst = max(worst, abs(d3))
    return worst
