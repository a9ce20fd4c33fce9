"""The extended (2n+2)-dimensional operator and its polynomial calculus.

For a c = 1 problem the triple (a_ij, f_i, mu) at a point assembles into a
block matrix on R^2 x M:

        [ mu   0   | f_1 .. f_2n    ]
        [ 0    mu  | fb_1 .. fb_2n  ]
        [ --------+---------------- ]
        [ f^1 fb^1 |                ]
        [  :    :  |     a^i_j      ]
        [ f^2n fb^2n|               ]

Products of such matrices close up on solutions; the star product
F*H = -2FH - 1/2 F_{,al} H^{,al} realizes that closure at the level of the
scalar fields, and real polynomials act through P*(f).  Spectra of the
operator are constant over the manifold, which makes Lagrange projector
polynomials well-defined; the resulting idempotent operators expose the
eigenstructure the positivity analysis needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets as J
from .calculus import frob, scalar_covariant_jets
from .charts import KahlerChart
from .errors import (DimensionMismatch, IllConditioned, NonConvergence,
                     NoRealSplit, NotProjector)
from .fields import ConstField, LinearComboField, ScalarField
from .tanno import TannoProblem


# ---------------------------------------------------------------------------
# Star product calculus
# ---------------------------------------------------------------------------

class StarField(ScalarField):
    """F*H = -2 F H - 1/2 g^{ab} F_{,a} H_{,b} as a differentiable field.

    Jets of order r need order r+1 jets of both factors, so derivative
    requirements grow along star-power chains.
    """

    def __init__(self, chart: KahlerChart, F: ScalarField, H: ScalarField):
        if F.dim != H.dim or F.dim != chart.dim:
            raise DimensionMismatch("star product factors live on different charts")
        super().__init__(chart.dim)
        self.chart = chart
        self.F = F
        self.H = H

    def _jets(self, p, order):
        Fj = self.F.jets(p, order + 1)
        Hj = self.H.jets(p, order + 1)
        ginv = self.chart.metric_inv_jets(p, order)
        prod = J.tconv(Fj, Hj, ",->", order)
        lifted = J.tconv(ginv, J.tgrad(Fj), "ab,a->b", order)
        cross = J.tconv(lifted, J.tgrad(Hj), "b,b->", order)
        return [-2.0 * a - 0.5 * b for a, b in zip(prod, cross)]


def star_product(chart: KahlerChart, F: ScalarField, H: ScalarField) -> ScalarField:
    return StarField(chart, F, H)


def star_power(chart: KahlerChart, f: ScalarField, k: int) -> ScalarField:
    """k-fold star power, nested as f * (f * (... )) to match L^k = L . L^(k-1)."""
    if k < 1:
        raise ValueError("star power needs k >= 1")
    out = f
    for _ in range(k - 1):
        out = StarField(chart, f, out)
    return out


# ---------------------------------------------------------------------------
# Real polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialReal:
    """Real polynomial with ascending coefficients c_0 ... c_k."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0.0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_roots(cls, roots) -> "PolynomialReal":
        cs = np.array([1.0])
        for r in roots:
            cs = np.convolve(cs, np.array([-float(r), 1.0]))
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: float) -> float:
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def eval_matrix(self, M: np.ndarray) -> np.ndarray:
        out = np.zeros_like(M)
        for c in reversed(self.coeffs):
            out = out @ M + c * np.eye(M.shape[0])
        return out

    def monic(self) -> "PolynomialReal":
        lead = self.coeffs[-1]
        return PolynomialReal(tuple(c / lead for c in self.coeffs))

    def __repr__(self):
        terms = [f"{c:g}*t^{k}" if k else f"{c:g}"
                 for k, c in enumerate(self.coeffs) if c != 0.0]
        return " + ".join(terms) if terms else "0"


def poly_star(chart: KahlerChart, f: ScalarField, P: PolynomialReal) -> ScalarField:
    """P*(f) = c_k f^{*k} + ... + c_1 f - 1/2 c_0."""
    cs = P.coeffs
    fields, coeffs = [], []
    for k in range(1, len(cs)):
        if cs[k] != 0.0:
            fields.append(star_power(chart, f, k))
            coeffs.append(cs[k])
    const = -0.5 * cs[0]
    if not fields:
        return ConstField(chart.dim, const)
    return LinearComboField(fields, coeffs, const)


# ---------------------------------------------------------------------------
# The extended matrix
# ---------------------------------------------------------------------------

@dataclass
class ExtendedMatrix:
    """(2n+2) x (2n+2) value of the extended operator at a base point."""

    entries: np.ndarray
    base_point: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0] - 2

    def norm(self) -> float:
        return frob(self.entries)


@dataclass
class OperatorParts:
    """Everything the block calculus needs at a point: raised and lowered."""

    mu: float
    grad: np.ndarray       # f_i
    grad_bar: np.ndarray   # fbar_i = J^a_i f_a
    grad_up: np.ndarray    # f^i
    grad_bar_up: np.ndarray
    ahat: np.ndarray       # a^i_j


def operator_parts(prob: TannoProblem, p) -> OperatorParts:
    """Raised ingredients of the extended operator.

    a^i_j is formed as g^{ia}(-f_{,aj}) - 2f delta^i_j, which keeps the
    mixed metric contraction g^{ia} g_{aj} = delta exact; in particular the
    constant solution f = -1/2 yields the identity operator bitwise.
    """
    chart = prob.chart
    f0, f1, H = scalar_covariant_jets(chart, prob.f, p, 2)
    g0 = chart.metric_jets(p, 0)[0]
    Jm = chart.jstruct_jets(p, 0)[0]
    fb = Jm.T @ f1
    fu = np.linalg.solve(g0, f1)
    fbu = np.linalg.solve(g0, fb)
    ahat = np.linalg.solve(g0, -H) - (2.0 * f0) * np.eye(chart.dim)
    return OperatorParts(-2.0 * f0, f1, fb, fu, fbu, ahat)


def assemble_L(prob: TannoProblem, p) -> ExtendedMatrix:
    """Extended operator of the bundle built from prob.f (c = 1 convention)."""
    chart = prob.chart
    p = chart.require_inside(p)
    parts = operator_parts(prob, p)
    d = chart.dim
    L = np.zeros((d + 2, d + 2))
    L[0, 0] = L[1, 1] = parts.mu
    L[0, 2:] = parts.grad
    L[1, 2:] = parts.grad_bar
    L[2:, 0] = parts.grad_up
    L[2:, 1] = parts.grad_bar_up
    L[2:, 2:] = parts.ahat
    return ExtendedMatrix(L, p)


@dataclass
class ProductBlockReport:
    """Outcome of comparing L(f) L(F) with the block product formula."""

    block_residual: float
    op_eq_linear: float       # |mu F_j + f_k A^k_j - (M f_j + a^k_j F_k)|
    op_eq_orthogonality: float  # |f^k Fbar_k|
    op_eq_holds: bool
    shape_residual: float | None   # vs the standard operator shape, if op_eq holds
    tol: float


def product_block_check(prob: TannoProblem, other: TannoProblem, p,
                        tol: float = 1e-8) -> ProductBlockReport:
    """Check the algebraic product formula and the closure conditions at p."""
    if prob.chart.dim != other.chart.dim:
        raise DimensionMismatch("problems live on charts of different dimension")
    chart = prob.chart
    p = chart.require_inside(p)
    lo = operator_parts(prob, p)
    hi = operator_parts(other, p)
    d = chart.dim

    Lf = assemble_L(prob, p).entries
    LF = assemble_L(other, p).entries
    product = Lf @ LF

    # Block formula assembled independently from the two part sets.
    blk = np.zeros((d + 2, d + 2))
    fF = float(lo.grad @ hi.grad_up)
    blk[0, 0] = blk[1, 1] = lo.mu * hi.mu + fF
    blk[0, 1] = float(lo.grad @ hi.grad_bar_up)
    blk[1, 0] = float(lo.grad_bar @ hi.grad_up)
    blk[0, 2:] = lo.mu * hi.grad + np.einsum("k,kj->j", lo.grad, hi.ahat)
    blk[1, 2:] = lo.mu * hi.grad_bar + np.einsum("k,kj->j", lo.grad_bar, hi.ahat)
    blk[2:, 0] = hi.mu * lo.grad_up + lo.ahat @ hi.grad_up
    blk[2:, 1] = hi.mu * lo.grad_bar_up + lo.ahat @ hi.grad_bar_up
    blk[2:, 2:] = (lo.ahat @ hi.ahat + np.outer(lo.grad_up, hi.grad)
                   + np.outer(lo.grad_bar_up, hi.grad_bar))
    block_residual = frob(product - blk)

    cond1 = (lo.mu * hi.grad + np.einsum("k,kj->j", lo.grad, hi.ahat)
             - hi.mu * lo.grad - np.einsum("kj,k->j", lo.ahat, hi.grad))
    op_eq_linear = float(np.linalg.norm(cond1))
    op_eq_orth = abs(float(lo.grad_up @ hi.grad_bar))
    holds = op_eq_linear < tol and op_eq_orth < tol

    shape_residual = None
    if holds:
        g0 = chart.metric_jets(p, 0)[0]
        Jm = chart.jstruct_jets(p, 0)[0]
        mu_t = lo.mu * hi.mu + fF
        f_t = lo.mu * hi.grad + np.einsum("k,kj->j", lo.grad, hi.ahat)
        fb_t = Jm.T @ f_t
        shape = np.zeros((d + 2, d + 2))
        shape[0, 0] = shape[1, 1] = mu_t
        shape[0, 2:] = f_t
        shape[1, 2:] = fb_t
        shape[2:, 0] = np.linalg.solve(g0, f_t)
        shape[2:, 1] = np.linalg.solve(g0, fb_t)
        shape[2:, 2:] = product[2:, 2:]
        a_low = g0 @ product[2:, 2:]
        shape_residual = frob(product - shape) + frob(a_low - a_low.T)
    return ProductBlockReport(block_residual, op_eq_linear, op_eq_orth,
                              holds, shape_residual, tol)


# ---------------------------------------------------------------------------
# Spectra, minimal polynomials, projectors
# ---------------------------------------------------------------------------

@dataclass
class SpectrumResult:
    """Clustered real eigenvalues plus any complex-pair clusters."""

    clusters: list[tuple[float, int]]
    complex_pairs: list[tuple[complex, int]] = field(default_factory=list)

    @property
    def real_values(self) -> list[float]:
        return [v for v, _ in self.clusters]


def _cluster(values: np.ndarray, tol: float) -> list[tuple[float, int]]:
    if values.size == 0:
        return []
    vals = np.sort(values)
    groups = [[vals[0]]]
    for v in vals[1:]:
        if v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def spectrum(m: ExtendedMatrix | np.ndarray,
             cluster_tol: float | None = None) -> SpectrumResult:
    """Eigenvalues of the extended matrix, merged into clusters."""
    M = m.entries if isinstance(m, ExtendedMatrix) else np.asarray(m, float)
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"eigenvalue iteration failed: {exc}") from exc
    radius = float(np.max(np.abs(ev))) if ev.size else 0.0
    tol = cluster_tol if cluster_tol is not None else 1e-6 * max(1.0, radius)
    real_mask = np.abs(ev.imag) <= tol
    clusters = _cluster(ev[real_mask].real, tol)
    upper = ev[~real_mask & (ev.imag > 0)]
    pairs = []
    if upper.size:
        order = np.argsort(upper.real)
        for z in upper[order]:
            if pairs and abs(z - pairs[-1][0]) <= tol:
                pairs[-1] = (pairs[-1][0], pairs[-1][1] + 1)
            else:
                pairs.append((complex(z), 1))
    return SpectrumResult(clusters, pairs)


def minimal_polynomial(m: ExtendedMatrix | np.ndarray,
                       tol: float = 1e-6) -> PolynomialReal:
    """Monic annihilating polynomial from clustered eigenvalues.

    Assumes one factor per distinct cluster (diagonalizable case) and
    verifies the annihilation bound a posteriori.
    """
    M = m.entries if isinstance(m, ExtendedMatrix) else np.asarray(m, float)
    radius = max(1.0, float(np.max(np.abs(np.linalg.eigvals(M)))))
    spec = spectrum(m, cluster_tol=tol * radius)
    reps = spec.real_values
    if len(reps) >= 2:
        gaps = np.diff(sorted(reps))
        if np.min(gaps) < 10 * tol * radius:
            raise IllConditioned("eigenvalue clusters overlap within tolerance")
    P = PolynomialReal.from_roots(reps)
    for z, _ in spec.complex_pairs:
        quad = PolynomialReal((abs(z) ** 2, -2 * z.real, 1.0))
        P = PolynomialReal(tuple(np.convolve(P.coeffs, quad.coeffs)))
    scale = max(1.0, frob(M)) ** P.degree
    if frob(P.eval_matrix(M)) >= tol * scale:
        raise IllConditioned(
            "clustered roots do not annihilate the matrix (defective or "
            "overlapping clusters)")
    for drop in range(len(reps)):
        Q = PolynomialReal.from_roots([r for i, r in enumerate(reps) if i != drop])
        for z, _ in spec.complex_pairs:
            quad = PolynomialReal((abs(z) ** 2, -2 * z.real, 1.0))
            Q = PolynomialReal(tuple(np.convolve(Q.coeffs, quad.coeffs)))
        if frob(Q.eval_matrix(M)) < tol * max(1.0, frob(M)) ** Q.degree:
            raise IllConditioned("a proper divisor already annihilates; "
                                 "clusters were merged too aggressively")
    return P


def projector_from_solution(prob: TannoProblem, sample_points,
                            tol: float = 1e-7) -> tuple[PolynomialReal, ScalarField]:
    """Lagrange polynomial sending the top real cluster to 1, rest to 0.

    Returns (P, P*(f)); the resulting operator is verified to be a
    non-trivial projector at every sample point.
    """
    pts = list(sample_points)
    if not pts:
        raise ValueError("need at least one sample point")
    L0 = assemble_L(prob, pts[0])
    spec = spectrum(L0)
    reps = spec.real_values
    if len(reps) < 2:
        raise NoRealSplit(
            f"only {len(reps)} real eigenvalue cluster(s); "
            "constant solutions admit no non-trivial projector")
    lam_max = max(reps)
    others = [r for r in reps if r != lam_max]
    denom = float(np.prod([lam_max - r for r in others]))
    P = PolynomialReal.from_roots(others)
    P = PolynomialReal(tuple(c / denom for c in P.coeffs))
    f_proj = poly_star(prob.chart, prob.f, P)
    check = TannoProblem(prob.chart, f_proj, 1.0)
    d = prob.chart.dim
    for q in pts:
        Lq = assemble_L(check, q).entries
        if frob(Lq @ Lq - Lq) >= tol:
            raise NotProjector(
                f"idempotency residual {frob(Lq @ Lq - Lq):.3g} at {q}")
    L1 = assemble_L(check, pts[0]).entries
    if frob(L1) < tol or frob(L1 - np.eye(d + 2)) < tol:
        raise NoRealSplit("projector is trivial (0 or identity)")
    return P, f_proj


@dataclass
class EigenstructureReport:
    """Eigen data of a^i_j at a point of a projector solution."""

    mu: float
    clusters: list[tuple[float, int]]
    classification: str        # "interior" | "mu_max" | "mu_min"
    k_param: int

    def expected_clusters(self, n: int) -> dict[float, int]:
        """Multiplicity table implied by the classification and k."""
        k = self.k_param
        if self.classification == "interior":
            table = {1.0: 2 * k, 0.0: 2 * n - 2 * k - 2, 1.0 - self.mu: 2}
        elif self.classification == "mu_max":
            table = {1.0: 2 * k, 0.0: 2 * n - 2 * k}
        else:
            table = {1.0: 2 * k + 2, 0.0: 2 * n - 2 * k - 2}
        return {v: m for v, m in table.items() if m > 0}


def eigenstructure_at(prob: TannoProblem, p, tol: float = 1e-6,
                      projector_tol: float = 1e-7) -> EigenstructureReport:
    """Classify the a^i_j eigenstructure at p for a projector solution."""
    chart = prob.chart
    p = chart.require_inside(p)
    L = assemble_L(prob, p).entries
    if frob(L @ L - L) >= projector_tol * max(1.0, frob(L)):
        raise NotProjector("extended operator is not idempotent at p")
    parts = operator_parts(prob, p)
    mu = float(parts.mu)
    clusters = spectrum(parts.ahat, cluster_tol=tol).clusters
    m1 = sum(m for v, m in spectrum(L, cluster_tol=tol).clusters
             if abs(v - 1.0) <= 10 * tol)
    k = (m1 - 2) // 2
    if abs(mu - 1.0) <= 10 * tol:
        cls = "mu_max"
    elif abs(mu) <= 10 * tol:
        cls = "mu_min"
    else:
        cls = "interior"
    return EigenstructureReport(mu, clusters, cls, k)
