"""Inertia computation, form restriction and the positivity scan."""

import numpy as np
import pytest

from conftest import points_on
from tannolab.errors import DegenerateBasis, NoExtremalPoint
from tannolab.fields import ConstField
from tannolab.manifolds import cpn_height_function
from tannolab.operator import operator_parts, projector_from_solution
from tannolab.signature import (metric_signature, positivity_scan,
                                restrict_form)
from tannolab.tanno import TannoProblem


class TestMetricSignature:
    def test_split_flat(self, flat11):
        assert metric_signature(flat11, np.zeros(4)) == (2, 2)

    def test_fs_positive(self, fs1):
        for p in points_on(fs1, 20, seed=51):
            assert metric_signature(fs1, p) == (2, 0)

    def test_negated_metric(self, fs1):
        neg = fs1.with_negated_metric()
        assert metric_signature(neg, np.zeros(2)) == (0, 2)

    def test_constant_across_chart(self, fs2):
        sigs = {metric_signature(fs2, p) for p in points_on(fs2, 15, seed=52)}
        assert sigs == {(4, 0)}


class TestRestrictForm:
    def test_full_standard_basis(self):
        form = np.array([[2.0, 1.0], [1.0, 3.0]])
        out = restrict_form(form, [np.array([1.0, 0]), np.array([0, 1.0])])
        assert np.allclose(out, form)

    def test_single_vector(self):
        form = np.diag([2.0, -1.0])
        v = np.array([1.0, 1.0])
        out = restrict_form(form, [v])
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(1.0)

    def test_degenerate_basis_rejected(self):
        form = np.eye(3)
        with pytest.raises(DegenerateBasis):
            restrict_form(form, [np.ones(3), 2.0 * np.ones(3)])

    def test_gradient_span_positive_on_cp1(self, fs1_unit, height1):
        prob = TannoProblem(fs1_unit, height1, 1.0)
        p = np.array([0.6, 0.3])
        parts = operator_parts(prob, p)
        g0 = fs1_unit.metric(p)
        out = restrict_form(g0, [parts.grad_up, parts.grad_bar_up])
        ev = np.linalg.eigvalsh(out)
        assert np.all(ev > 0)


class TestPositivityScan:
    def _projector_problem(self, chart, f):
        prob = TannoProblem(chart, f, 1.0)
        pts = points_on(chart, 8, seed=53)
        _, f_proj = projector_from_solution(prob, pts)
        return TannoProblem(chart, f_proj, 1.0), pts

    def test_cp1_verdict_positive(self, fs1_unit, height1):
        probP, pts = self._projector_problem(fs1_unit, height1)
        report = positivity_scan(probP, pts)
        assert report.verdict == "positive"
        assert (report.n_pos, report.n_neg) == (2, 0)
        assert all(sig == (2, 0) for _, sig in report.per_point)
        assert report.extremal_findings
        assert "mu_min" in report.witnessed_cases

    def test_cp1_axis1_witnesses_mu_max(self, fs1_unit):
        f1 = cpn_height_function(1, 1)
        probP, pts = self._projector_problem(fs1_unit, f1)
        report = positivity_scan(probP, pts)
        assert report.verdict == "positive"
        finding = next(f for f in report.extremal_findings if f.kind == "mu_max")
        # Hessian of mu at its maximum is non-positive.
        assert all(e <= 1e-8 for e in finding.hessian_eigs)
        # The restriction identity mu_hess|E0 = -2 g|E0 and g|E0 > 0.
        assert finding.identity_residual < 1e-6
        assert finding.g_restricted_inertia[1] == 0
        assert finding.g_restricted_inertia[0] > 0

    def test_cp2_verdict_positive(self, fs2_unit, height2):
        probP, pts = self._projector_problem(fs2_unit, height2)
        report = positivity_scan(probP, pts)
        assert report.verdict == "positive"
        assert (report.n_pos, report.n_neg) == (4, 0)

    def test_mu_min_restriction_identity(self, fs1_unit, height1):
        probP, pts = self._projector_problem(fs1_unit, height1)
        report = positivity_scan(probP, pts)
        finding = next(f for f in report.extremal_findings
                       if f.kind == "mu_min")
        assert finding.identity_residual < 1e-6
        assert finding.g_restricted_inertia == (2, 0)

    def test_constant_solution_hypothesis_branch(self, flat11):
        prob = TannoProblem(flat11, ConstField(4, -0.5), 1.0)
        pts = points_on(flat11, 6, seed=54)
        report = positivity_scan(prob, pts)
        assert report.verdict == "indefinite"
        assert (report.n_pos, report.n_neg) == (2, 2)
        assert "hypothesis not met" in report.note
        assert not report.extremal_findings

    def test_no_extremum_in_domain(self):
        # A translated round-sphere patch: the only critical point of the
        # height sits at (-2.5, 0), outside the 0.9 domain ball, so the
        # scan must report absence rather than inventing an extremum.
        from tannolab import jets as J
        from tannolab.charts import KahlerChart
        from tannolab.fields import ExprField

        shift = 2.5

        def potential(x):
            r2 = (x[0] + shift) * (x[0] + shift) + x[1] * x[1]
            return 2 * J.log(1 + r2)

        def height(x):
            r2 = (x[0] + shift) * (x[0] + shift) + x[1] * x[1]
            return (1 - r2) / (1 + r2)

        chart = KahlerChart.from_potential(
            2, potential, 0.9, "shifted CP(1) patch").rescaled(0.25)
        prob = TannoProblem(chart, ExprField(2, height), 1.0)
        pts = points_on(chart, 6, seed=55, radius=0.6)
        with pytest.raises(NoExtremalPoint):
            positivity_scan(prob, pts)
