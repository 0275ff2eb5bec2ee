import math

import numpy as np
import pytest

from src.models.entities import (
    AnnulusSpec,
    BoundaryLayout,
    ComparisonReport,
    Metric,
    Relation,
    ShapeKind,
    ShapeSpec,
    SpaceForm,
    SymmetrizationPlan,
)
from src.solvers.domains import build_domain, parse_shape
from src.solvers.planar import minimize_rayleigh
from src.solvers.radial import solve_annulus, solve_lambda_star
from src.utils.validators import GeometryError, ParameterError
from src.verify import (
    SuiteResult,
    VerificationSuite,
    VerifyOptions,
    check_curvature_monotonicity,
    check_faber_krahn,
    check_hadamard,
    check_mu_decay,
    check_rearrangement,
    check_sign_structure,
    check_trial_bound,
    check_vanishing_hole,
    fit_loglog,
    hadamard_derivative,
    mesh_convergence,
    mu_trial_upper_bound,
    richardson_limit,
    scan_trial_bounds,
    symmetrization_plan,
)

MU = BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN


class TestComparisonReport:
    def test_ge(self):
        report = ComparisonReport.compare(2.0, 1.0, Relation.GE, 0.0, "two vs one")
        assert report.passed
        assert report.slack == pytest.approx(1.0)

    def test_le_within_tolerance(self):
        report = ComparisonReport.compare(1.01, 1.0, Relation.LE, 0.02, "slightly above")
        assert report.slack == pytest.approx(-0.01)
        assert report.passed

    def test_eq_fails_outside_tolerance(self):
        report = ComparisonReport.compare(1.1, 1.0, Relation.EQ, 0.05, "ten percent off")
        assert not report.passed
        assert report.slack == pytest.approx(-0.1)

    def test_zero_rhs_uses_absolute_slack(self):
        report = ComparisonReport.compare(1e-12, 0.0, Relation.LE, 1e-9, "tiny")
        assert report.passed

    def test_expected_failure(self):
        report = ComparisonReport.compare(0.8, 1.0, Relation.GE, 0.02, "known violation", expected=False)
        assert not report.passed
        assert report.as_expected
        assert report.slack == pytest.approx(-0.2)

    def test_unexpected_pass(self):
        report = ComparisonReport.compare(1.0, 1.0, Relation.GE, 0.02, "bound met", expected=False)
        assert report.passed
        assert not report.as_expected


class TestFits:
    def test_exact_power_law(self):
        xs = [0.1, 0.2, 0.4, 0.8]
        fit = fit_loglog(xs, [3.0 * x ** 2 for x in xs])
        assert fit.slope == pytest.approx(2.0)
        assert math.exp(fit.intercept) == pytest.approx(3.0)
        assert fit.r_squared == pytest.approx(1.0)
        np.testing.assert_allclose(fit.predict(xs), fit.ys)

    def test_needs_four_points(self):
        with pytest.raises(ParameterError):
            fit_loglog([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])

    def test_positive_values(self):
        with pytest.raises(ParameterError):
            fit_loglog([1.0, 2.0, 3.0, 4.0], [1.0, -2.0, 3.0, 4.0])

    def test_richardson_removes_leading_term(self):
        limit = richardson_limit(0.2, 5.0 + 3.0 * 0.2 ** 2, 0.1, 5.0 + 3.0 * 0.1 ** 2, 2.0)
        assert limit == pytest.approx(5.0, rel=1e-12)


class TestSymmetrization:
    def test_targets(self, coarse_annulus):
        assert symmetrization_plan(coarse_annulus).target == SpaceForm(2, 0.0)
        sphere = build_domain(parse_shape("annulus:1,0.3"), 1.0 / 16, Metric.SPHERE)
        assert symmetrization_plan(sphere).target == SpaceForm(2, 1.0)

    def test_only_unit_volume_ratio(self):
        with pytest.raises(ParameterError):
            SymmetrizationPlan(beta=0.5, target=SpaceForm(2))


class TestRadialChecks:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("kappa", [-1.0, 0.0, 0.5])
    def test_sign_structure(self, p, kappa):
        for layout in (BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET, MU):
            result = solve_annulus(SpaceForm(2, kappa), p, AnnulusSpec(0.3, 1.0, layout))
            report = check_sign_structure(result)
            assert report.passed, report.parameters

    def test_curvature_monotonicity(self):
        reports = check_curvature_monotonicity(2.0, 2, 0.5, 1.0, [-1.0, 0.0, 0.5])
        assert len(reports) == 4
        assert all(r.passed for r in reports)

    def test_curvature_ladder_must_increase(self):
        with pytest.raises(ParameterError):
            check_curvature_monotonicity(2.0, 2, 0.5, 1.0, [0.5, 0.0])

    def test_vanishing_hole(self):
        fit, reports = check_vanishing_hole(2.0, 2, 1.0, [0.16, 0.08, 0.04, 0.02])
        assert all(r.passed for r in reports), [r.theorem for r in reports if not r.passed]
        assert fit.slope == pytest.approx(2.0, abs=0.3)

    def test_vanishing_hole_ladder_validation(self):
        with pytest.raises(ParameterError):
            check_vanishing_hole(2.0, 2, 1.0, [0.02, 0.04, 0.08, 0.16])

    def test_mu_decay(self):
        fit, reports = check_mu_decay(2.0, 3, 1.0, [0.2, 0.1, 0.05, 0.025])
        assert all(r.passed for r in reports)
        assert fit.slope > 0.7

    def test_mu_decay_needs_three_dimensions(self):
        with pytest.raises(ParameterError):
            check_mu_decay(2.0, 2, 1.0, [0.2, 0.1, 0.05, 0.025])

    def test_trial_bound_is_above_mu(self):
        assert check_trial_bound(2.0, 3, 1.0, 0.1, 0.1).passed

    def test_trial_bound_geometry(self):
        with pytest.raises(GeometryError):
            mu_trial_upper_bound(SpaceForm(3), 2.0, 0.5, 0.6, 1.0)

    def test_trial_bound_scan(self):
        bounds, fit = scan_trial_bounds(SpaceForm(3), 2.0, 0.1, 1.0, [0.05, 0.1, 0.2, 0.4])
        assert len(bounds) == 4
        assert all(b > 0 for b in bounds)
        assert fit.xs == (0.05, 0.1, 0.2, 0.4)

    def test_hadamard(self):
        report, _ = check_hadamard(2.0, 2, 0.3, 1.0, 1e-3)
        assert report.passed, report.parameters
        assert report.parameters["sign"] == "positive"
        assert report.parameters["mismatch"] < 1e-4

    def test_hadamard_mismatch_shrinks_with_step(self):
        _, refinement = check_hadamard(2.0, 2, 0.3, 1.0, 1e-3)
        assert refinement.theorem == "hadamard-refinement"
        assert refinement.passed, refinement.parameters
        # Second-order difference: halving delta cuts the mismatch about 4x
        assert refinement.lhs == pytest.approx(4.0, rel=0.15)
        assert refinement.parameters["half_mismatch"] < refinement.parameters["mismatch"]

    def test_hadamard_derivative_positive(self):
        result = solve_lambda_star(SpaceForm(3, -1.0), 2.5, AnnulusSpec(0.4, 1.0))
        assert hadamard_derivative(result) > 0

    def test_hadamard_step_bound(self):
        with pytest.raises(ParameterError):
            check_hadamard(2.0, 2, 0.3, 1.0, 0.05)


class TestPlanarChecks:
    def test_faber_krahn_concentric(self):
        # Dirichlet nodes sit up to one spacing outside the circle, biasing the grid value low by O(h)
        domain = build_domain(parse_shape("annulus:1,0.3"), 1.0 / 64)
        report = check_faber_krahn(domain, 2.0)
        assert report.passed
        assert report.expected
        assert report.relation is Relation.GE
        assert report.tolerance == pytest.approx(0.02 + 1.0 / 64)
        assert report.parameters["r1_star"] == pytest.approx(math.sqrt(domain.hole_volume() / math.pi))

    def test_faber_krahn_concentric_mu_layout(self):
        # Hole nodes pinned inside the Dirichlet circle pull mu low by about 2% at this spacing
        domain = build_domain(parse_shape("annulus:1,0.3", 0.0, MU), 1.0 / 64)
        report = check_faber_krahn(domain, 2.0)
        assert report.passed, report.slack
        assert report.slack > -report.tolerance
        assert abs(report.slack) < 0.035

    @pytest.mark.slow
    def test_faber_krahn_offset_hole_falls_below_bound(self):
        domain = build_domain(parse_shape("annulus:1,0.3", 0.4), 1.0 / 64)
        report = check_faber_krahn(domain, 2.0)
        assert report.expected is False
        assert not report.passed
        assert report.as_expected
        # About -22% at h = 1/128, far beyond the grid allowance
        assert report.slack < -0.15

    @pytest.mark.slow
    def test_faber_krahn_offset_mu_layout(self):
        domain = build_domain(parse_shape("annulus:1,0.3", 0.4, MU), 1.0 / 64)
        report = check_faber_krahn(domain, 2.0)
        assert not report.passed
        assert report.as_expected
        assert report.slack < -0.3

    def test_grid_allowance_shrinks_with_spacing(self):
        opts = VerifyOptions()
        assert opts.grid_allowance(1.0 / 64) == pytest.approx(0.02 + 1.0 / 64)
        assert opts.grid_allowance(1.0 / 128) < opts.grid_allowance(1.0 / 64)
        assert VerifyOptions(grid_bias_factor=0.0).grid_allowance(0.5) == 0.02

    def test_faber_krahn_needs_a_hole(self, unit_square):
        with pytest.raises(ParameterError):
            check_faber_krahn(build_domain(unit_square, 1.0 / 8), 2.0)

    def test_rearrangement_reports(self, offset_annulus):
        field = minimize_rayleigh(offset_annulus, 2.0).field
        reports = check_rearrangement(field, 2.0, SpaceForm(2), offset_annulus.hole_volume())
        assert [r.theorem for r in reports] == [
            "rearrangement-norm", "rearrangement-energy", "rearrangement-ladder", "rearrangement-volume",
        ]
        by_name = {r.theorem: r for r in reports}
        assert by_name["rearrangement-volume"].passed
        # The energy bound needs a hole symmetric about the center
        assert by_name["rearrangement-energy"].expected is False
        assert all(r.expected for r in reports if r.theorem != "rearrangement-energy")
        assert by_name["rearrangement-norm"].lhs == pytest.approx(1.0, rel=0.02)

    def test_mesh_convergence(self, unit_square):
        values, report = mesh_convergence(unit_square, 2.0, [1.0 / 8, 1.0 / 16, 1.0 / 32])
        assert len(values) == 3
        assert values[0] < values[1] < values[2] < 2.0 * math.pi ** 2
        assert report.passed

    def test_mesh_spacings_must_decrease(self, unit_square):
        with pytest.raises(ParameterError):
            mesh_convergence(unit_square, 2.0, [1.0 / 16, 1.0 / 8, 1.0 / 32])


class TestSuite:
    def test_domains(self):
        shapes = VerificationSuite.faber_krahn_domains()
        assert len(shapes) == 5
        assert all(s.has_hole for s in shapes)
        assert [s.hole_centered for s in shapes] == [True, False, False, False, True]
        cap = VerificationSuite.cap_domain()
        assert cap.dims[0] == pytest.approx(math.tan(0.6))
        assert cap.hole_centered

    def test_result_counts_expected_failures(self):
        holds = ComparisonReport.compare(1.0, 1.0, Relation.EQ, 0.0, "equal")
        violated = ComparisonReport.compare(0.7, 1.0, Relation.GE, 0.02, "off-center hole", expected=False)
        result = SuiteResult(reports={"a": [holds], "b": [violated]})
        assert result.passed
        assert result.expected_failures == [violated]

        met = ComparisonReport.compare(1.0, 1.0, Relation.GE, 0.02, "off-center hole", expected=False)
        result.reports["c"] = [met]
        assert not result.passed
        assert result.failures == [met]

    @pytest.mark.slow
    def test_quick_suite_passes(self):
        result = VerificationSuite(quick=True).run_all()
        assert result.passed, [(r.theorem, r.parameters) for r in result.failures]
        assert set(result.fits) == {"vanishing-hole", "mu-decay"}
        violated = result.expected_failures
        assert {r.theorem for r in violated} == {"faber-krahn", "rearrangement-energy"}
        assert all(r.slack < -r.tolerance for r in violated)

    @pytest.mark.slow
    def test_full_suite_passes(self):
        result = VerificationSuite().run_all()
        assert result.passed, [(r.theorem, r.parameters) for r in result.failures]
        # Every off-center domain at both exponents, plus the offset mu domain and the energy bound
        assert len(result.expected_failures) == 2 * 3 + 1 + 1
