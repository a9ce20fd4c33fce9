"""Suite configuration, the claim-check registry, and report emission.

Each registered check verifies one named claim over the configured chart,
solution field and sample set, returning a worst-case residual that is
compared against the check's tolerance (overridable per run).  Checks never
abort the suite: errors and structural inapplicability are recorded per
check.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .calculus import frob, kahler_residuals, nabla_scalar, christoffel
from .charts import KahlerChart
from .errors import ConfigError
from .fields import ConstField, ScalarField
from .manifolds import (cpn_height_function, flat_kahler_chart,
                        fubini_study_chart, integrate_geodesic,
                        random_lightlike_directions, random_polynomial_field,
                        random_quadratic_field, sample_points,
                        sphere_second_eigenfunction)
from .operator import (assemble_L, minimal_polynomial, poly_star,
                       product_block_check, projector_from_solution, spectrum)
from .signature import positivity_scan
from .tanno import (TannoProblem, bundle_from_f, f_from_mu,
                    gallot_tanno_residual, laplace_identity_residual,
                    lightlike_third_derivative, mu_hessian_residual,
                    system_residual, tanno_residual, trace_identity_residual,
                    transport_bundle)
from . import fd

THREAD_ENV = "TANNO_LAB_THREADS"


class SkipCheck(Exception):
    """Raised inside a check when the configuration makes it inapplicable."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class SuiteConfig:
    chart: dict
    solution: str = "constant:-0.5"
    c: float = 1.0
    seed: int = 7
    samples: int = 25
    radius: float | None = None
    checks: list[str] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        known = {"chart", "solution", "c", "seed", "samples", "radius",
                 "checks", "tolerances"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        if "chart" not in data:
            raise ConfigError("config field 'chart' is required")
        cfg = cls(
            chart=dict(data["chart"]),
            solution=str(data.get("solution", "constant:-0.5")),
            c=float(data.get("c", 1.0)),
            seed=int(data.get("seed", 7)),
            samples=int(data.get("samples", 25)),
            radius=(None if data.get("radius") is None
                    else float(data["radius"])),
            checks=list(data.get("checks", [])),
            tolerances=dict(data.get("tolerances", {})),
        )
        if cfg.samples < 1:
            raise ConfigError("config field 'samples' must be >= 1")
        for name, tol in cfg.tolerances.items():
            if float(tol) <= 0:
                raise ConfigError(f"tolerances.{name} must be positive")
        return cfg

    def to_dict(self) -> dict:
        return {
            "chart": self.chart, "solution": self.solution, "c": self.c,
            "seed": self.seed, "samples": self.samples, "radius": self.radius,
            "checks": self.checks, "tolerances": self.tolerances,
        }


def build_chart(spec: dict) -> KahlerChart:
    spec = dict(spec)
    name = spec.pop("name", None)
    if name in ("fubini_study", "fs"):
        n = int(spec.pop("n", 1))
        radius = float(spec.pop("domain_radius", 2.0))
        _reject_extras("chart", spec)
        return fubini_study_chart(n, radius)
    if name == "flat":
        p = int(spec.pop("p", 1))
        q = int(spec.pop("q", 0))
        radius = float(spec.pop("domain_radius", 10.0))
        _reject_extras("chart", spec)
        return flat_kahler_chart(p, q, radius)
    raise ConfigError(f"chart_spec names unknown chart {name!r}")


def _reject_extras(where: str, leftover: dict):
    if leftover:
        raise ConfigError(f"{where}_spec has unknown field(s): {sorted(leftover)}")


def build_solution(spec: str, chart: KahlerChart) -> ScalarField:
    kind, _, arg = spec.partition(":")
    if kind == "constant":
        try:
            return ConstField(chart.dim, float(arg))
        except ValueError as exc:
            raise ConfigError(f"solution_spec constant value {arg!r}") from exc
    if kind == "height":
        if not chart.name.startswith("Fubini-Study"):
            raise ConfigError("solution_spec 'height' requires a fubini_study chart")
        axis = int(arg) if arg else 0
        return cpn_height_function(chart.n, axis)
    if kind == "quadratic":
        seed = int(arg) if arg else 0
        return random_quadratic_field(chart.dim, seed)
    if kind == "sphere_quadratic":
        if chart.dim != 2:
            raise ConfigError("solution_spec 'sphere_quadratic' requires CP(1)")
        return sphere_second_eigenfunction()
    raise ConfigError(f"solution_spec names unknown solution {spec!r}")


# ---------------------------------------------------------------------------
# Check context
# ---------------------------------------------------------------------------

def _max_workers() -> int:
    env = os.environ.get(THREAD_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREAD_ENV} must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


@dataclass
class CheckContext:
    chart: KahlerChart
    f: ScalarField
    c: float
    points: list
    seed: int
    config: SuiteConfig

    @property
    def problem(self) -> TannoProblem:
        return TannoProblem(self.chart, self.f, self.c)

    @property
    def unit_problem(self) -> TannoProblem:
        """The c = 1 normalization (metric rescaled by c)."""
        return self.problem.rescaled()

    def map_points(self, fn, points=None):
        pts = self.points if points is None else points
        workers = _max_workers()
        if workers == 1 or len(pts) < 4:
            return [fn(q) for q in pts]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, pts))

    def is_flat_mixed(self) -> tuple[int, int] | None:
        g0 = self.chart.metric_jets(np.zeros(self.chart.dim), 0)[0]
        ev = np.linalg.eigvalsh(g0)
        pos, neg = int(np.sum(ev > 0)), int(np.sum(ev < 0))
        if pos and neg and self.chart.name.startswith("flat"):
            return pos // 2, neg // 2
        return None


@dataclass
class CheckOutcome:
    max_residual: float
    points: int
    note: str = ""


# ---------------------------------------------------------------------------
# The checks
# ---------------------------------------------------------------------------

def check_kahler_residuals(ctx: CheckContext) -> CheckOutcome:
    res = ctx.map_points(lambda q: max(kahler_residuals(ctx.chart, q)))
    return CheckOutcome(max(res), len(res))

def check_tanno_residual(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.problem
    res = ctx.map_points(lambda q: frob(tanno_residual(prob, q)))
    return CheckOutcome(max(res), len(res))

def check_gallot_tanno(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.problem
    res = ctx.map_points(lambda q: frob(gallot_tanno_residual(prob, q)))
    return CheckOutcome(max(res), len(res))

def check_laplace_identity(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.problem
    res = ctx.map_points(lambda q: laplace_identity_residual(prob, q))
    return CheckOutcome(max(res), len(res))

def check_lightlike_f3(ctx: CheckContext) -> CheckOutcome:
    blocks = ctx.is_flat_mixed()
    if blocks is None:
        raise SkipCheck("needs a flat chart of mixed signature")
    p_blk, q_blk = blocks
    dirs = random_lightlike_directions(ctx.chart, 20, ctx.seed, p_blk, q_blk)
    worst = 0.0
    for v in dirs:
        geo = integrate_geodesic(ctx.chart, np.zeros(ctx.chart.dim), v, 4.0, 16)
        worst = max(worst, lightlike_third_derivative(ctx.chart, ctx.f, geo))
    return CheckOutcome(worst, len(dirs))

def check_system_residual(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    res = ctx.map_points(lambda q: max(system_residual(prob, q)))
    return CheckOutcome(max(res), len(res))

def check_trace_identity(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    res = ctx.map_points(lambda q: trace_identity_residual(prob, q))
    return CheckOutcome(max(res), len(res))

def check_inverse_roundtrip(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    def one(q):
        b = bundle_from_f(prob, q)
        return abs(f_from_mu(b.mu) - prob.f(q))
    res = ctx.map_points(one)
    return CheckOutcome(max(res), len(res))

def densify_polyline(waypoints, max_seg: float):
    """Insert intermediate points so no segment exceeds max_seg."""
    out = [np.asarray(waypoints[0], dtype=float)]
    for q in waypoints[1:]:
        q = np.asarray(q, dtype=float)
        prev = out[-1]
        seg = np.linalg.norm(q - prev)
        n = max(1, int(np.ceil(seg / max_seg)))
        for k in range(1, n + 1):
            out.append(prev + (k / n) * (q - prev))
    return out

def _random_polyline(chart, rng, n_way=4):
    r = 0.6 * chart.domain_radius
    pts = [rng.uniform(-r / np.sqrt(chart.dim), r / np.sqrt(chart.dim),
                       size=chart.dim) for _ in range(n_way)]
    return densify_polyline(pts, 0.2 * chart.domain_radius)

def check_transport_zero(ctx: CheckContext) -> CheckOutcome:
    from .tanno import SolutionBundle
    chart = ctx.unit_problem.chart
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    d = chart.dim
    for _ in range(10):
        path = _random_polyline(chart, rng)
        zero = SolutionBundle(np.zeros((d, d)), np.zeros(d), 0.0)
        out = transport_bundle(chart, path, zero)
        worst = max(worst, out.norm())
    return CheckOutcome(worst, 10)

def check_transport_match(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    chart = prob.chart
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    trials = min(6, len(ctx.points) - 1) if len(ctx.points) > 1 else 0
    if trials == 0:
        raise SkipCheck("needs at least two sample points")
    for k in range(trials):
        p, q = ctx.points[k], ctx.points[k + 1]
        init = bundle_from_f(prob, p)
        path = densify_polyline([p, q], 0.2 * chart.domain_radius)
        out = transport_bundle(chart, path, init)
        ref = bundle_from_f(prob, q)
        diff = np.sqrt(frob(out.a - ref.a) ** 2
                       + np.linalg.norm(out.grad - ref.grad) ** 2
                       + (out.mu - ref.mu) ** 2)
        worst = max(worst, diff / max(1.0, ref.norm()))
    return CheckOutcome(worst, trials)

def check_transport_loop(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    chart = prob.chart
    center = ctx.points[0]
    r = 0.3 * chart.domain_radius
    loop = []
    for t in np.linspace(0.0, 2 * np.pi, 41):
        q = center.copy()
        q[0] += r * (np.cos(t) - 1.0)
        q[1] += r * np.sin(t)
        loop.append(q)
    init = bundle_from_f(prob, loop[0])
    out = transport_bundle(chart, loop, init)
    defect = np.sqrt(frob(out.a - init.a) ** 2
                     + np.linalg.norm(out.grad - init.grad) ** 2
                     + (out.mu - init.mu) ** 2)
    return CheckOutcome(defect / max(1.0, init.norm()), len(loop))

def check_operator_identity(ctx: CheckContext) -> CheckOutcome:
    chart = ctx.unit_problem.chart
    prob = TannoProblem(chart, ConstField(chart.dim, -0.5), 1.0)
    d = chart.dim
    res = ctx.map_points(
        lambda q: frob(assemble_L(prob, q).entries - np.eye(d + 2)))
    return CheckOutcome(max(res), len(res))

def check_block_identity(ctx: CheckContext) -> CheckOutcome:
    chart = ctx.unit_problem.chart
    worst = 0.0
    for k in range(5):
        fa = random_polynomial_field(chart.dim, ctx.seed + 2 * k)
        fb = random_polynomial_field(chart.dim, ctx.seed + 2 * k + 1)
        pa = TannoProblem(chart, fa, 1.0)
        pb = TannoProblem(chart, fb, 1.0)
        for q in ctx.points[:5]:
            rep = product_block_check(pa, pb, q)
            worst = max(worst, rep.block_residual)
    return CheckOutcome(worst, 5 * min(5, len(ctx.points)))

def check_star_power(ctx: CheckContext) -> CheckOutcome:
    from .operator import star_power
    prob = ctx.unit_problem
    chart = prob.chart
    pts = ctx.points[:20]
    worst = 0.0
    for k in (2, 3, 4):
        fk = star_power(chart, prob.f, k)
        probk = TannoProblem(chart, fk, 1.0)
        for q in pts:
            Lk = assemble_L(probk, q).entries
            L1 = assemble_L(prob, q).entries
            worst = max(worst, frob(Lk - np.linalg.matrix_power(L1, k)))
    return CheckOutcome(worst, len(pts))

def check_poly_star_closure(ctx: CheckContext) -> CheckOutcome:
    from .operator import PolynomialReal
    prob = ctx.unit_problem
    chart = prob.chart
    P_proj, _ = projector_from_solution(prob, ctx.points[:5])
    polys = [P_proj, PolynomialReal((0.0, 0.0, 1.0)), PolynomialReal((1.0,))]
    worst = 0.0
    for P in polys:
        fP = poly_star(chart, prob.f, P)
        probP = TannoProblem(chart, fP, 1.0)
        for q in ctx.points[:8]:
            worst = max(worst, max(system_residual(probP, q)))
    return CheckOutcome(worst, min(8, len(ctx.points)))

def check_spectrum_constancy(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    specs = ctx.map_points(
        lambda q: spectrum(assemble_L(prob, q)).clusters)
    base = specs[0]
    worst = 0.0
    for s in specs[1:]:
        if len(s) != len(base) or [m for _, m in s] != [m for _, m in base]:
            worst = max(worst, 1.0)
            continue
        worst = max(worst, max(abs(a - b) for (a, _), (b, _) in zip(s, base)))
    return CheckOutcome(worst, len(specs))

def check_minimal_polynomial(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    pts = ctx.points[:20]
    polys = ctx.map_points(
        lambda q: minimal_polynomial(assemble_L(prob, q)).coeffs, pts)
    base = np.array(polys[0])
    worst = 0.0
    for cs in polys[1:]:
        if len(cs) != len(base):
            worst = max(worst, 1.0)
        else:
            worst = max(worst, float(np.max(np.abs(np.array(cs) - base))))
    return CheckOutcome(worst, len(pts))

def check_two_real_eigenvalues(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    counts = ctx.map_points(
        lambda q: len(spectrum(assemble_L(prob, q)).clusters))
    bad = sum(1 for c in counts if c < 2)
    return CheckOutcome(float(bad), len(counts),
                        note="points with fewer than two real clusters")

def check_projector(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    P, f_proj = projector_from_solution(prob, ctx.points)
    probP = TannoProblem(prob.chart, f_proj, 1.0)
    worst = 0.0
    mu_violation = 0.0
    for q in ctx.points:
        L = assemble_L(probP, q).entries
        worst = max(worst, frob(L @ L - L))
        mu = -2.0 * f_proj(q)
        mu_violation = max(mu_violation, max(0.0, -mu), max(0.0, mu - 1.0))
    return CheckOutcome(max(worst, mu_violation), len(ctx.points),
                        note=f"P = {P!r}")

def check_eigenstructure(ctx: CheckContext) -> CheckOutcome:
    from .operator import eigenstructure_at
    prob = ctx.unit_problem
    _, f_proj = projector_from_solution(prob, ctx.points)
    probP = TannoProblem(prob.chart, f_proj, 1.0)
    n = prob.chart.n
    worst = 0.0
    seen = set()
    for q in ctx.points:
        rep = eigenstructure_at(probP, q)
        seen.add(rep.classification)
        expected = rep.expected_clusters(n)
        exp_sorted = sorted([v for v, m in expected.items() for _ in range(m)])
        act_sorted = sorted([v for v, m in rep.clusters for _ in range(m)])
        if len(exp_sorted) != len(act_sorted):
            worst = max(worst, 1.0)
        elif exp_sorted:
            worst = max(worst, float(np.max(np.abs(
                np.array(exp_sorted) - np.array(act_sorted)))))
    return CheckOutcome(worst, len(ctx.points),
                        note="cases seen: " + ", ".join(sorted(seen)))

def check_mu_hessian(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    res = ctx.map_points(lambda q: mu_hessian_residual(prob, q))
    return CheckOutcome(max(res), len(res))

def check_positivity(ctx: CheckContext) -> CheckOutcome:
    prob = ctx.unit_problem
    values = [prob.f(q) for q in ctx.points]
    constant = max(values) - min(values) < 1e-10
    if constant:
        report = positivity_scan(prob, ctx.points)
        ok = "hypothesis not met" in report.note
        return CheckOutcome(0.0 if ok else 1.0, len(ctx.points),
                            note=f"verdict={report.verdict}; {report.note}")
    _, f_proj = projector_from_solution(prob, ctx.points)
    probP = TannoProblem(prob.chart, f_proj, 1.0)
    report = positivity_scan(probP, ctx.points)
    ok = report.verdict == "positive"
    for fnd in report.extremal_findings:
        if fnd.g_restricted_inertia is not None:
            ok = ok and fnd.g_restricted_inertia[1] == 0
            ok = ok and fnd.identity_residual < 1e-6
        if fnd.kind == "mu_max":
            ok = ok and all(e <= 1e-6 for e in fnd.hessian_eigs)
    note = (f"verdict={report.verdict}; inertia=({report.n_pos},{report.n_neg}); "
            f"cases={','.join(report.witnessed_cases)}")
    return CheckOutcome(0.0 if ok else 1.0, len(ctx.points), note=note)

def check_oracle_derivatives(ctx: CheckContext) -> CheckOutcome:
    chart, f = ctx.chart, ctx.f
    pts = ctx.points[:3]
    worst = 0.0
    for q in pts:
        exact1 = nabla_scalar(chart, f, q, 1).components
        approx1 = fd.fd_gradient(lambda x: f(x), q)
        worst = max(worst, _rel_err(exact1, approx1))
        fj = f.jets(q, 3)
        approx2 = fd.fd_hessian(lambda x: f(x), q)
        worst = max(worst, _rel_err(fj[2], approx2))
        approx3 = fd.fd_third(lambda x: f(x), q)
        worst = max(worst, _rel_err(fj[3], approx3))
        exactG = christoffel(chart, q).components
        approxG = fd.christoffel_fd(chart, q)
        worst = max(worst, _rel_err(exactG, approxG))
    return CheckOutcome(worst, len(pts))

def _rel_err(exact, approx) -> float:
    exact = np.asarray(exact, float)
    approx = np.asarray(approx, float)
    return frob(exact - approx) / max(1.0, frob(exact))


@dataclass(frozen=True)
class CheckSpec:
    func: object
    tolerance: float
    description: str


REGISTRY: dict[str, CheckSpec] = {
    "kahler.residuals": CheckSpec(
        check_kahler_residuals, 1e-9,
        "chart structure: |J^2+Id|, |J^T g J - g|, |nabla J| at samples"),
    "eq1.residual": CheckSpec(
        check_tanno_residual, 1e-7,
        "third-order equation residual f_,ijk + c(2f_k g_ij + ... - Jbar terms)"),
    "eq2.residual": CheckSpec(
        check_gallot_tanno, 1e-8,
        "J-free third-order equation residual (real form)"),
    "rem1.laplace_identity": CheckSpec(
        check_laplace_identity, 1e-6,
        "contracted identity (Delta f)_,k = -4c(n+1) f_,k"),
    "rem2.lightlike_f3": CheckSpec(
        check_lightlike_f3, 1e-9,
        "f''' = 0 along lightlike geodesics for flat-chart solutions"),
    "sys.residual": CheckSpec(
        check_system_residual, 1e-7,
        "first-order system residuals for (a_ij, f_i, mu), c=1"),
    "sys.trace_identity": CheckSpec(
        check_trace_identity, 1e-6,
        "trace identity f_i = 1/4 (a^al_al)_,i"),
    "sys.inverse_roundtrip": CheckSpec(
        check_inverse_roundtrip, 0.0,
        "f_from_mu after bundle_from_f recovers f exactly"),
    "lem1.transport_zero": CheckSpec(
        check_transport_zero, 1e-10,
        "zero initial bundle stays zero along random curves"),
    "lem1.transport_match": CheckSpec(
        check_transport_match, 1e-5,
        "solution bundle transported p->q matches direct evaluation"),
    "lem1.transport_loop": CheckSpec(
        check_transport_loop, 1e-5,
        "solution bundle returns to itself around a closed loop"),
    "op.identity_at_constant": CheckSpec(
        check_operator_identity, 0.0,
        "extended operator of f = -1/2 is the identity"),
    "eq_product.block_identity": CheckSpec(
        check_block_identity, 1e-10,
        "block product formula for L(f) L(F), arbitrary smooth fields"),
    "lem2.star_power": CheckSpec(
        check_star_power, 1e-7,
        "L(f^{*k}) = L(f)^k for k = 2, 3, 4 on solutions"),
    "cor1.poly_star_closure": CheckSpec(
        check_poly_star_closure, 1e-7,
        "P*(f) remains a solution for real polynomials P"),
    "cor2.spectrum_constancy": CheckSpec(
        check_spectrum_constancy, 1e-6,
        "clustered spectrum of the extended operator is point-independent"),
    "lem3.minimal_polynomial": CheckSpec(
        check_minimal_polynomial, 1e-5,
        "minimal polynomial coefficients agree across points"),
    "lem4.two_real_eigenvalues": CheckSpec(
        check_two_real_eigenvalues, 0.5,
        "at least two distinct real eigenvalue clusters everywhere"),
    "lem5.projector": CheckSpec(
        check_projector, 1e-7,
        "Lagrange polynomial yields a non-trivial projector; 0 <= mu <= 1"),
    "lem6.eigenstructure": CheckSpec(
        check_eigenstructure, 1e-6,
        "eigenvalue/multiplicity table of a^i_j per interior/max/min case"),
    "eq_mu.hessian": CheckSpec(
        check_mu_hessian, 1e-7,
        "Hessian identity mu_,ij = 2a_ij - 2 mu g_ij"),
    "thm3.positivity": CheckSpec(
        check_positivity, 0.5,
        "metric inertia (2n,0) at samples; eigenspace restrictions at extrema"),
    "oracle.derivatives": CheckSpec(
        check_oracle_derivatives, 1e-6,
        "jet derivatives (orders 1-3, Christoffel) vs finite differences"),
}

# eq2 (the J-free equation) is satisfied by different fields than eq1 on the
# same chart, so it only runs when a config asks for it explicitly.
DEFAULT_CHECKS = [name for name in REGISTRY if name != "eq2.residual"]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class CheckRecord:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    points: int
    seconds: float
    status: str = "ok"            # ok | skipped | error
    note: str = ""


@dataclass
class VerificationReport:
    checks: list[CheckRecord]
    verdict: str
    version: str
    config: dict

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, zero_timing: bool = False) -> dict:
        recs = []
        for r in self.checks:
            d = asdict(r)
            if zero_timing:
                d["seconds"] = 0.0
            recs.append(d)
        return {"tool": "tannolab", "version": self.version,
                "config": self.config, "checks": recs, "verdict": self.verdict}

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        checks = [CheckRecord(**r) for r in data["checks"]]
        return cls(checks, data["verdict"], data["version"], data["config"])


def run_suite(config: SuiteConfig) -> VerificationReport:
    chart = build_chart(config.chart)
    f = build_solution(config.solution, chart)
    radius = config.radius if config.radius is not None \
        else 0.75 * chart.domain_radius
    points = sample_points(chart, config.samples, config.seed, radius)
    ctx = CheckContext(chart, f, config.c, points, config.seed, config)

    names = config.checks or DEFAULT_CHECKS
    records = []
    for name in names:
        if name not in REGISTRY:
            raise ConfigError(f"checks names unknown check {name!r}")
        spec = REGISTRY[name]
        tol = float(config.tolerances.get(name, spec.tolerance))
        t0 = time.perf_counter()
        try:
            outcome = spec.func(ctx)
            dt = time.perf_counter() - t0
            records.append(CheckRecord(
                name, float(outcome.max_residual), tol,
                bool(float(outcome.max_residual) <= tol),
                int(outcome.points), dt, "ok", outcome.note))
        except SkipCheck as exc:
            dt = time.perf_counter() - t0
            records.append(CheckRecord(
                name, float("nan"), tol, True, 0, dt, "skipped", str(exc)))
        except Exception as exc:   # a broken check never aborts the suite
            dt = time.perf_counter() - t0
            records.append(CheckRecord(
                name, float("inf"), tol, False, 0, dt, "error",
                f"{type(exc).__name__}: {exc}"))
    verdict = "pass" if all(r.passed for r in records) else "fail"
    return VerificationReport(records, verdict, __version__, config.to_dict())


def emit_report(report: VerificationReport, fmt: str = "json",
                destination=None, zero_timing: bool = False) -> str:
    """Serialize a report; writes to a path or file object if given."""
    if fmt == "json":
        text = json.dumps(report.to_dict(zero_timing=zero_timing),
                          indent=2, sort_keys=True, allow_nan=True) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["check", "max_residual", "tolerance", "pass",
                         "points", "seconds"])
        for r in report.checks:
            seconds = 0.0 if zero_timing else r.seconds
            writer.writerow([r.name, repr(r.max_residual), repr(r.tolerance),
                             r.passed, r.points, repr(seconds)])
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w") as fh:
                fh.write(text)
    return text


def load_report(path) -> VerificationReport:
    with open(path) as fh:
        return VerificationReport.from_dict(json.load(fh))
