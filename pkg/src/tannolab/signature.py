"""Metric inertia and the eigenspace-restriction positivity checks.

At an extremum of mu the Hessian identity mu_{,ij} = 2 a_ij - 2 mu g_ij
restricted to the appropriate a-eigenspace pins the sign of g there; away
from extrema the verdict is a plain inertia scan over samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .calculus import frob, scalar_covariant_jets
from .charts import KahlerChart
from .errors import DegenerateBasis, NoExtremalPoint, SingularMetric
from .operator import operator_parts
from .tanno import TannoProblem

GRAD_THRESHOLD = 1e-6


def metric_signature(chart: KahlerChart, p) -> tuple[int, int]:
    """(n_pos, n_neg) inertia of g at p via symmetric eigendecomposition."""
    p = chart.require_inside(p)
    g0 = chart.metric_jets(p, 0)[0]
    if abs(np.linalg.det(g0)) < 1e-12:
        raise SingularMetric(f"metric singular at {p}")
    ev = np.linalg.eigvalsh(0.5 * (g0 + g0.T))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def restrict_form(form, basis) -> np.ndarray:
    """Gram matrix of a symmetric bilinear form on the span of basis vectors."""
    B = np.column_stack([np.asarray(v, dtype=float) for v in basis])
    sv = np.linalg.svd(B, compute_uv=False)
    if sv.size == 0 or sv[-1] < 1e-8 * max(1.0, sv[0]):
        raise DegenerateBasis("basis vectors are numerically dependent")
    form = np.asarray(form, dtype=float)
    return B.T @ form @ B


def _inertia(sym: np.ndarray, tol: float = 1e-9) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    scale = max(1.0, float(np.max(np.abs(ev))) if ev.size else 1.0)
    return (int(np.sum(ev > tol * scale)), int(np.sum(ev < -tol * scale)))


def _eigenspace(mat: np.ndarray, value: float, tol: float = 1e-6):
    """Orthonormal basis of the (numerical) eigenspace of a square matrix."""
    d = mat.shape[0]
    u, s, vt = np.linalg.svd(mat - value * np.eye(d))
    scale = max(1.0, s[0]) if s.size else 1.0
    null_mask = s < tol * scale
    basis = vt[null_mask].T
    return [basis[:, i] for i in range(basis.shape[1])]


@dataclass
class ExtremalFinding:
    """One located critical point of mu and the restriction checks there."""

    point: np.ndarray
    mu: float
    kind: str                      # "mu_max" | "mu_min"
    grad_norm: float
    hessian_eigs: list[float] = field(default_factory=list)
    g_restricted_inertia: tuple[int, int] | None = None
    identity_residual: float | None = None


@dataclass
class SignatureReport:
    """Outcome of the positivity scan over a sample set."""

    n_pos: int
    n_neg: int
    per_point: list[tuple[np.ndarray, tuple[int, int]]]
    verdict: str                   # positive|negative|indefinite|mixed-across-points
    extremal_findings: list[ExtremalFinding] = field(default_factory=list)
    witnessed_cases: list[str] = field(default_factory=list)
    note: str = ""


def _verdict_from_inertias(inertias, dim) -> tuple[int, int, str]:
    uniq = sorted(set(inertias))
    if len(uniq) > 1:
        return uniq[0][0], uniq[0][1], "mixed-across-points"
    np_, nn = uniq[0]
    if np_ == dim:
        v = "positive"
    elif nn == dim:
        v = "negative"
    else:
        v = "indefinite"
    return np_, nn, v


def _refine_extremum(chart: KahlerChart, mu_field, x0) -> np.ndarray:
    """Minimize |grad mu|^2 from x0; exact gradient via order-2 jets."""

    def fun(x):
        jets = mu_field.jets(x, 2)
        g = jets[1]
        return float(g @ g), 2.0 * (jets[2] @ g)

    r = chart.domain_radius / np.sqrt(chart.dim)
    bounds = [(-r, r)] * chart.dim
    res = optimize.minimize(fun, np.asarray(x0, float), jac=True,
                            method="L-BFGS-B", bounds=bounds,
                            options={"ftol": 1e-18, "gtol": 1e-14})
    return res.x


def positivity_scan(prob: TannoProblem, samples, tol: float = 1e-6,
                    grad_threshold: float = GRAD_THRESHOLD) -> SignatureReport:
    """Inertia scan plus eigenspace restrictions at located mu-extrema.

    ``prob.f`` should be a projector solution (c = 1).  Constant solutions
    bypass the extremal analysis: the hypothesis of the positivity theorem
    (a non-constant solution) is not met, and the report says so.
    """
    chart = prob.chart
    pts = [chart.require_inside(q) for q in samples]
    if not pts:
        raise ValueError("need at least one sample point")
    inertias = [metric_signature(chart, q) for q in pts]
    per_point = list(zip(pts, inertias))
    n_pos, n_neg, verdict = _verdict_from_inertias(inertias, chart.dim)

    values = np.array([prob.f(q) for q in pts])
    grads = [np.linalg.norm(prob.f.gradient(q)) for q in pts]
    spread = float(values.max() - values.min())
    if spread < 1e-10 and max(grads) < 1e-10:
        return SignatureReport(
            n_pos, n_neg, per_point, verdict,
            note="constant solution, positivity-theorem hypothesis not met")

    mu_field = -2.0 * prob.f
    mu_vals = -2.0 * values

    # Locate critical points of mu: refine from the best sample starts plus
    # radial shrinks towards the chart center (|grad mu| can also decay
    # towards the chart boundary, stranding a single descent run there).
    starts = []
    order = np.argsort([g for g in grads])
    for idx in order[:4]:
        for t in (1.0, 0.5, 0.25, 0.0):
            starts.append(t * pts[idx])
    candidates = []
    for x0 in starts:
        x_star = _refine_extremum(chart, mu_field, x0)
        gnorm = float(np.linalg.norm(mu_field.gradient(x_star)))
        if gnorm < grad_threshold and chart.inside(x_star):
            if not any(np.linalg.norm(x_star - c) < 1e-6 for c, _ in candidates):
                candidates.append((x_star, gnorm))
    if not candidates:
        raise NoExtremalPoint(
            f"no point with |grad mu| < {grad_threshold:g} found "
            "(chart may not contain the extremum)")

    findings = []
    witnessed = set()
    mu_lo, mu_hi = float(mu_vals.min()), float(mu_vals.max())
    for x_star, gnorm in candidates:
        parts = operator_parts(prob, x_star)
        mu_star = float(parts.mu)
        kind = "mu_max" if mu_star >= 0.5 * (mu_lo + mu_hi) else "mu_min"
        _, _, mu_hess = scalar_covariant_jets(chart, mu_field, x_star, 2)
        g0 = chart.metric_jets(x_star, 0)[0]
        ahat = parts.ahat
        hess_eigs = list(np.linalg.eigvalsh(0.5 * (mu_hess + mu_hess.T)))
        finding = ExtremalFinding(x_star, mu_star, kind, gnorm, hess_eigs)
        if kind == "mu_max":
            basis = _eigenspace(ahat, 0.0, tol)
            if basis:
                g_rest = restrict_form(g0, basis)
                h_rest = restrict_form(mu_hess, basis)
                finding.g_restricted_inertia = _inertia(g_rest)
                finding.identity_residual = frob(h_rest + 2.0 * g_rest)
            witnessed.add("mu_max")
        else:
            basis = _eigenspace(ahat, 1.0, tol)
            if basis:
                g_rest = restrict_form(g0, basis)
                h_rest = restrict_form(mu_hess, basis)
                finding.g_restricted_inertia = _inertia(g_rest)
                finding.identity_residual = frob(h_rest - 2.0 * g_rest)
            witnessed.add("mu_min")
        findings.append(finding)

    # Which of the three eigenstructure cases did the samples visit?
    for q, mv in zip(pts, mu_vals):
        mu_q = float(mv)
        if abs(mu_q - 1.0) <= 10 * tol:
            witnessed.add("mu_max")
        elif abs(mu_q) <= 10 * tol:
            witnessed.add("mu_min")
        else:
            witnessed.add("interior")

    return SignatureReport(n_pos, n_neg, per_point, verdict, findings,
                           sorted(witnessed))
