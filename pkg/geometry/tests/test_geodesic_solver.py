"""
Tests for the regularized geodesic solver.
"""
import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from unittest import skipUnless

from geometry.conformal import NEGATIVE, POSITIVE
from geometry.exceptions import FieldShapeError, InadmissibleError, SolverError
from geometry.fields import random_admissible_field
from geometry.geodesic_solver import (
    build_plan,
    comparison_check,
    comparison_path,
    epsilon_schedule,
    geodesic_operator,
    linearization_matrix,
    linearized_apply,
    newton_solve,
    solve_geodesic,
    solve_linear,
)
from geometry.path import node_densities
from geometry.surface import build_icosphere, fixture_path, load_mesh


def _plan_and_path(surface, u0, u1, intervals=8, epsilon_min=1e-2):
    plan = build_plan(surface, u0, u1, epsilon_min, intervals)
    return plan, comparison_path(plan, u0, u1)


class PlanTest(SimpleTestCase):
    """ε schedule, forcing and the exact comparison path."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.surface = build_icosphere(1)
        rng = np.random.default_rng(21)
        cls.u0 = random_admissible_field(cls.surface, rng, POSITIVE)
        cls.u1 = random_admissible_field(cls.surface, rng, POSITIVE)

    def test_epsilon_schedule(self):
        schedule = epsilon_schedule(1e-3)
        self.assertEqual(schedule[0], 1.0)
        self.assertEqual(schedule[-1], 1e-3)
        self.assertEqual(schedule[1], 0.5)
        self.assertTrue(all(a > b for a, b in zip(schedule, schedule[1:])))
        self.assertEqual(epsilon_schedule(1.0), (1.0,))
        with self.assertRaises(ValueError):
            epsilon_schedule(0.0)

    def test_forcing_floor(self):
        plan = build_plan(self.surface, self.u0, self.u1, 1e-2, 8, margin=0.5)
        self.assertEqual(plan.f0.shape, (7, self.surface.vertex_count))
        self.assertGreaterEqual(plan.f0.min(), 0.5 * (1 - 1e-12))
        self.assertEqual(plan.summary()["N"], 8)

    def test_comparison_path_solves_the_first_stage(self):
        plan, path = _plan_and_path(self.surface, self.u0, self.u1)
        residual = geodesic_operator(self.surface, path, plan.f0)
        self.assertLess(np.abs(residual).max(), 1e-10 * (1 + np.abs(plan.f0).max()))

    def test_inadmissible_boundary_data(self):
        with self.assertRaises(InadmissibleError):
            build_plan(self.surface, self.u0, -40 * self.u1, 1e-2, 8)

    def test_forcing_shape_is_checked(self):
        plan, path = _plan_and_path(self.surface, self.u0, self.u1)
        with self.assertRaises(FieldShapeError):
            geodesic_operator(self.surface, path, np.zeros((3, 3)))


class LinearizationTest(SimpleTestCase):
    """The Newton operator is the derivative of G."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.surface = build_icosphere(1)
        rng = np.random.default_rng(5)
        u0 = random_admissible_field(cls.surface, rng, POSITIVE)
        u1 = random_admissible_field(cls.surface, rng, POSITIVE)
        cls.plan, cls.path = _plan_and_path(cls.surface, u0, u1)
        cls.phi = np.zeros_like(cls.path.nodes)
        cls.phi[1:-1] = 0.1 * rng.standard_normal(cls.phi[1:-1].shape)

    def test_matches_finite_differences(self):
        h = 1e-6
        plus = geodesic_operator(self.surface, self.path.with_nodes(self.path.nodes + h * self.phi), self.plan.f0)
        minus = geodesic_operator(self.surface, self.path.with_nodes(self.path.nodes - h * self.phi), self.plan.f0)
        fd = (plus - minus) / (2 * h)
        exact = linearized_apply(self.surface, self.path, self.phi)
        self.assertLess(np.abs(exact - fd).max() / (1 + np.abs(exact).max()), 1e-6)

    def test_time_bump_identity(self):
        t = self.path.times[:, None]
        bump = np.broadcast_to(t * (1 - t), self.path.nodes.shape).copy()
        bump[[0, -1]] = 0.0
        result = linearized_apply(self.surface, self.path, bump)
        kappa = node_densities(self.surface, self.path)[1:-1]
        np.testing.assert_allclose(result, -2 * kappa, rtol=0, atol=1e-10 * np.abs(kappa).max())

    def test_matrix_agrees_with_apply(self):
        matrix = linearization_matrix(self.surface, self.path)
        product = (matrix @ self.phi[1:-1].ravel()).reshape(self.phi[1:-1].shape)
        exact = linearized_apply(self.surface, self.path, self.phi)
        np.testing.assert_allclose(product, exact, rtol=1e-10, atol=1e-10 * np.abs(exact).max())

    def test_boundary_rows_must_vanish(self):
        bad = np.ones_like(self.path.nodes)
        with self.assertRaises(ValueError):
            linearized_apply(self.surface, self.path, bad)

    def test_solve_linear(self):
        matrix = linearization_matrix(self.surface, self.path)
        rhs = np.arange(matrix.shape[0], dtype=float)
        x = solve_linear(matrix, rhs)
        self.assertLess(np.linalg.norm(matrix @ x - rhs) / np.linalg.norm(rhs), 1e-10)


class NewtonTest(SimpleTestCase):
    """Damped Newton on a single regularization stage."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.surface = build_icosphere(1)
        rng = np.random.default_rng(8)
        cls.u0 = random_admissible_field(cls.surface, rng, POSITIVE)
        cls.u1 = random_admissible_field(cls.surface, rng, POSITIVE)
        cls.plan, cls.path = _plan_and_path(cls.surface, cls.u0, cls.u1)

    def test_exact_start_needs_no_iterations(self):
        result = newton_solve(self.surface, self.u0, self.u1, self.plan.f0, self.path)
        self.assertEqual(result.iterations, 0)
        self.assertGreater(result.margin, 0.0)

    def test_converges_to_smaller_forcing(self):
        result = newton_solve(self.surface, self.u0, self.u1, 0.5 * self.plan.f0, self.path)
        self.assertLessEqual(result.residual, 1e-9)
        self.assertEqual(len(result.history), result.iterations + 1)
        np.testing.assert_array_equal(result.path.nodes[0], self.u0)
        np.testing.assert_array_equal(result.path.nodes[-1], self.u1)

    def test_iteration_cap_reports_best_iterate(self):
        with self.assertRaises(SolverError) as ctx:
            newton_solve(self.surface, self.u0, self.u1, 0.5 * self.plan.f0, self.path, max_iterations=0)
        self.assertIsNotNone(ctx.exception.best)
        self.assertIn("history", ctx.exception.diagnostics)

    def test_equal_endpoints_give_a_time_symmetric_path(self):
        plan, path = _plan_and_path(self.surface, self.u0, self.u0)
        result = newton_solve(self.surface, self.u0, self.u0, 0.5 * plan.f0, path)
        self.assertLessEqual(result.residual, 1e-9)
        nodes = result.path.nodes
        self.assertLessEqual(float(np.abs(nodes - nodes[::-1]).max()), 1e-8)
        t = np.linspace(0.0, 1.0, nodes.shape[0])[:, None]
        np.testing.assert_allclose(nodes, self.u0[None, :] + 0.5 * plan.A0 * t * (1.0 - t), atol=1e-7)

    def test_rejects_mismatched_start(self):
        with self.assertRaises(ValueError):
            newton_solve(self.surface, self.u1, self.u0, self.plan.f0, self.path)

    def test_comparison_ordering(self):
        large = newton_solve(self.surface, self.u0, self.u1, 0.5 * self.plan.f0, self.path)
        small = newton_solve(self.surface, self.u0, self.u1, 0.25 * self.plan.f0, large.path)
        report = comparison_check(self.surface, small.path, 0.25 * self.plan.f0, large.path, 0.5 * self.plan.f0)
        self.assertTrue(report["pass"], report)
        with self.assertRaises(ValueError):
            comparison_check(self.surface, large.path, 0.5 * self.plan.f0, small.path, 0.25 * self.plan.f0)


class SolveGeodesicTest(SimpleTestCase):
    """Continuation runs on exact and random boundary data."""

    def test_shift_distance_on_sphere(self):
        surface = build_icosphere(1)
        c = 0.3
        report = solve_geodesic(surface, np.zeros(surface.vertex_count), np.full(surface.vertex_count, c),
                                intervals=8, epsilon_min=1e-2)
        self.assertAlmostEqual(report.extrapolated_distance, c * math.sqrt(4 * math.pi), delta=1e-6)
        self.assertAlmostEqual(report.distance, c * math.sqrt(4 * math.pi), delta=1e-6)
        linear = np.linspace(0, c, 9)[:, None]
        self.assertLess(np.abs(report.path.nodes - linear).max(), 1e-2)
        self.assertEqual(report.epsilon_reached, 1e-2)
        self.assertGreaterEqual(report.ordering_gap, -1e-7)

    def test_ordering_gap_is_measured_on_interior_nodes(self):
        surface = build_icosphere(1)
        report = solve_geodesic(surface, np.zeros(surface.vertex_count), np.full(surface.vertex_count, 0.3),
                                intervals=8, epsilon_min=1e-2)
        # stage solutions are u0 + ct + εA0 t(1 − t); consecutive stages differ most weakly at t = 1/8
        schedule = np.asarray(report.plan.schedule)
        expected = float(np.min(schedule[:-1] - schedule[1:])) * report.plan.A0 * (1 / 8) * (7 / 8)
        self.assertGreater(report.ordering_gap, 0.0)
        self.assertAlmostEqual(report.ordering_gap, expected, delta=1e-7)

    def test_shift_distance_on_negative_cone(self):
        surface = load_mesh(fixture_path("genus2.off"), curvature_mode="constant")
        c = 0.2
        report = solve_geodesic(surface, np.zeros(surface.vertex_count), np.full(surface.vertex_count, c),
                                NEGATIVE, intervals=8, epsilon_min=5e-2)
        self.assertEqual(report.path.cone, NEGATIVE)
        self.assertAlmostEqual(report.extrapolated_distance, c * math.sqrt(4 * math.pi), delta=1e-6)

    def test_zero_distance(self):
        surface = build_icosphere(1)
        u0 = random_admissible_field(surface, np.random.default_rng(3), POSITIVE)
        report = solve_geodesic(surface, u0, u0, intervals=8, epsilon_min=1e-2)
        self.assertLess(report.extrapolated_distance, 1e-6)

    def test_random_pair_report(self):
        surface = build_icosphere(1)
        rng = np.random.default_rng(13)
        u0 = random_admissible_field(surface, rng, POSITIVE)
        u1 = random_admissible_field(surface, rng, POSITIVE)
        report = solve_geodesic(surface, u0, u1, intervals=8, epsilon_min=5e-2)
        summary = report.summary()
        self.assertEqual(len(summary["stages"]), len(report.plan.schedule))
        self.assertLessEqual(report.residual, 1e-9)
        self.assertGreater(report.margin, 0.0)
        self.assertGreaterEqual(report.ordering_gap, -1e-7)
        distances = [stage.distance for stage in report.stages]
        self.assertTrue(all(d > 0 for d in distances))

    def test_rejects_inadmissible_endpoints(self):
        surface = build_icosphere(1)
        with self.assertRaises(InadmissibleError):
            solve_geodesic(surface, np.zeros(surface.vertex_count), np.zeros(surface.vertex_count), NEGATIVE)

    @skipUnless(settings.CONFORMIX["EXTENDED_TESTS"], "extended suite")
    def test_shift_recovery_at_full_size(self):
        surface = build_icosphere(3)
        c = 0.3
        report = solve_geodesic(surface, np.zeros(surface.vertex_count), np.full(surface.vertex_count, c),
                                intervals=64, epsilon_min=1e-3)
        expected = c * math.sqrt(4 * math.pi)
        self.assertLess(abs(report.extrapolated_distance - expected) / expected, 1e-2)
        linear = np.linspace(0, c, 65)[:, None]
        self.assertLess(np.abs(report.path.nodes - linear).max(), 1e-3)

    @skipUnless(settings.CONFORMIX["EXTENDED_TESTS"], "extended suite")
    def test_comparison_on_random_pairs(self):
        surface = build_icosphere(2)
        rng = np.random.default_rng(17)
        for _ in range(5):
            u0 = random_admissible_field(surface, rng, POSITIVE)
            u1 = random_admissible_field(surface, rng, POSITIVE)
            report = solve_geodesic(surface, u0, u1, intervals=32, epsilon_min=1e-3)
            self.assertGreaterEqual(report.ordering_gap, -1e-7)
