"""
Tests for the closed-form reference geodesics.
"""
import math

import numpy as np
from django.test import SimpleTestCase
from unittest.mock import patch

from geometry.conformal import NEGATIVE, POSITIVE
from geometry.exceptions import OracleError
from geometry.geodesic_solver import solve_geodesic
from geometry.oracle import (
    DilationFamily,
    dilation_factor,
    dilation_kinematics,
    dilation_path,
    dilation_refinement,
    shift_geodesic,
)
from geometry.path import geodesic_residual, path_length
from geometry.surface import build_icosphere, fixture_path, load_mesh


class DilationFamilyTest(SimpleTestCase):
    """Pole-fixing dilations of the round sphere."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.sphere = build_icosphere(2)
        cls.family = DilationFamily.on(cls.sphere, 0.5)

    def test_only_defined_on_icospheres(self):
        genus2 = load_mesh(fixture_path("genus2.off"))
        with self.assertRaises(OracleError):
            DilationFamily.on(genus2, 0.5)

    def test_starts_at_the_round_metric(self):
        np.testing.assert_allclose(dilation_factor(self.family, 0.0), 0.0, atol=1e-15)

    def test_kinematics_match_finite_differences(self):
        h = 1e-4
        t = 0.3
        plus, here, minus = (dilation_factor(self.family, s) for s in (t + h, t, t - h))
        kin = dilation_kinematics(self.family, t)
        np.testing.assert_allclose(kin.velocity, (plus - minus) / (2 * h), atol=1e-7)
        np.testing.assert_allclose(kin.acceleration, (plus - 2 * here + minus) / h ** 2, atol=1e-5)
        np.testing.assert_array_equal(kin.speed_gradient_sq, -kin.acceleration)

    def test_acceleration_is_nonpositive(self):
        for t in (0.0, 0.5, 1.0):
            self.assertLessEqual(float(dilation_kinematics(self.family, t).acceleration.max()), 0.0)

    def test_expected_speed(self):
        self.assertAlmostEqual(self.family.expected_speed, 0.5 * math.sqrt(4 * math.pi / 3))
        self.assertEqual(DilationFamily.on(self.sphere, -0.5).expected_speed, self.family.expected_speed)


class DilationPathTest(SimpleTestCase):
    """The sampled dilation path is an approximate discrete geodesic."""

    def test_length_approaches_the_closed_form(self):
        sphere = build_icosphere(3)
        family = DilationFamily.on(sphere, 0.5)
        length = path_length(sphere, dilation_path(family, 64))
        self.assertLess(abs(length - family.expected_speed) / family.expected_speed, 5e-2)

    def test_residual_decreases_under_refinement(self):
        residuals = []
        for level in (2, 3):
            sphere = build_icosphere(level)
            path = dilation_path(DilationFamily.on(sphere, 0.5), 64)
            residuals.append(float(np.abs(geodesic_residual(sphere, path)).max()))
        self.assertLess(residuals[1], residuals[0])

    def test_duration_rescales_time(self):
        sphere = build_icosphere(1)
        family = DilationFamily.on(sphere, 0.5)
        path = dilation_path(family, 8, duration=2.0)
        np.testing.assert_allclose(path.nodes[-1], dilation_factor(family, 2.0))


class DilationRefinementTest(SimpleTestCase):
    """Level and N are refined together."""

    def test_rows_pair_level_with_intervals(self):
        sphere = build_icosphere(2)
        rows = dilation_refinement(sphere, 0.5, 16)
        self.assertEqual([(row["level"], row["N"]) for row in rows], [(2, 16), (3, 32)])
        self.assertEqual(rows[1]["V"], build_icosphere(3).vertex_count)
        first = float(np.abs(geodesic_residual(sphere, dilation_path(DilationFamily.on(sphere, 0.5), 16))).max())
        self.assertEqual(rows[0]["residual"], first)
        self.assertLess(rows[1]["residual"], rows[0]["residual"])

    def test_stops_at_the_largest_level(self):
        with patch("geometry.oracle.MAX_ICOSPHERE_LEVEL", 1):
            rows = dilation_refinement(build_icosphere(1), 0.5, 8, levels=3)
        self.assertEqual(len(rows), 1)

    def test_only_on_icospheres(self):
        with self.assertRaises(OracleError):
            dilation_refinement(load_mesh(fixture_path("genus2.off")), 0.5, 8)



class SolverAgainstDilationTest(SimpleTestCase):
    """Continuation between dilation endpoints recovers the dilation path."""

    def test_solution_tracks_the_dilation(self):
        sphere = build_icosphere(2)
        family = DilationFamily.on(sphere, 0.5)
        reference = dilation_path(family, 32)
        report = solve_geodesic(sphere, reference.nodes[0], reference.nodes[-1], intervals=32, epsilon_min=1e-3)
        self.assertEqual(report.epsilon_reached, 1e-3)
        self.assertLess(float(np.abs(report.path.nodes - reference.nodes).max()), 1e-2)
        error = abs(report.extrapolated_distance - family.expected_speed) / family.expected_speed
        self.assertLess(error, 3e-3)


class ShiftGeodesicOracleTest(SimpleTestCase):
    """Constant shifts have length |c|√|2πχ| on either cone."""

    def test_sphere(self):
        sphere = build_icosphere(1)
        path = shift_geodesic(np.zeros(sphere.vertex_count), 0.3, 8)
        self.assertAlmostEqual(path_length(sphere, path), 0.3 * math.sqrt(4 * math.pi), delta=1e-12)
        self.assertEqual(path.cone, POSITIVE)

    def test_genus_two(self):
        genus2 = load_mesh(fixture_path("genus2.off"), curvature_mode="constant")
        path = shift_geodesic(np.zeros(genus2.vertex_count), 0.3, 8, cone=NEGATIVE)
        self.assertAlmostEqual(path_length(genus2, path), 0.3 * math.sqrt(4 * math.pi), delta=1e-12)
        np.testing.assert_allclose(geodesic_residual(genus2, path), 0.0, atol=1e-12)
