"""
Tests for discrete paths and their energy, length and geodesic quantities.
"""
import math
import pathlib
import tempfile

import numpy as np
from django.test import SimpleTestCase

from geometry.conformal import NEGATIVE, POSITIVE
from geometry.exceptions import FieldShapeError, InadmissibleError
from geometry.fields import random_admissible_field, random_smooth_field
from geometry.oracle import shift_geodesic
from geometry.path import (
    TimePath,
    conserved_functional,
    covariant_derivative,
    drift,
    energy_density,
    geodesic_residual,
    linear_path,
    node_weights,
    path_energy,
    path_length,
    time_derivative,
    trapezoid_weights,
    velocity,
)
from geometry.surface import build_icosphere, fixture_path, load_mesh


class TimePathTest(SimpleTestCase):
    """Construction, grid access and serialization."""

    def test_rejects_bad_shapes(self):
        with self.assertRaises(FieldShapeError):
            TimePath(np.zeros(5))
        with self.assertRaises(ValueError):
            TimePath(np.zeros((2, 5)))
        with self.assertRaises(ValueError):
            TimePath(np.zeros((3, 5)), cone="sideways")

    def test_nodes_are_read_only_copies(self):
        source = np.zeros((5, 3))
        path = TimePath(source)
        source[1, 1] = 7.0
        self.assertEqual(path.nodes[1, 1], 0.0)
        with self.assertRaises(ValueError):
            path.nodes[0, 0] = 1.0

    def test_grid_access(self):
        path = linear_path(np.zeros(3), np.ones(3), 4)
        self.assertEqual(path.intervals, 4)
        self.assertEqual(path.node_count, 5)
        self.assertAlmostEqual(path.step, 0.25)
        np.testing.assert_allclose(path.at(0.75), 0.75)
        with self.assertRaises(ValueError):
            path.at(0.3)

    def test_json_and_csv_forms(self):
        path = linear_path(np.zeros(4), np.arange(4.0), 3, cone=NEGATIVE)
        data = path.to_json()
        self.assertEqual((data["N"], data["V"], data["cone"]), (3, 4, NEGATIVE))
        again = TimePath.from_json({**data, "nodes": np.asarray(data["nodes"]).tolist()})
        np.testing.assert_array_equal(again.nodes, path.nodes)
        with self.assertRaises(FieldShapeError):
            TimePath.from_json({**data, "N": 5})
        with tempfile.TemporaryDirectory() as tmp:
            target = pathlib.Path(tmp) / "path.csv"
            path.save_csv(target)
            loaded = TimePath.load_csv(target, cone=NEGATIVE)
        np.testing.assert_array_equal(loaded.nodes, path.nodes)

    def test_trapezoid_weights_sum_to_one(self):
        weights = trapezoid_weights(8)
        self.assertAlmostEqual(weights.sum(), 1.0)
        self.assertAlmostEqual(weights[0], 1 / 16)

    def test_velocity_is_exact_for_quadratics(self):
        t = np.linspace(0, 1, 7)[:, None]
        path = TimePath(np.hstack([t ** 2, 3 * t]))
        np.testing.assert_allclose(velocity(path)[:, 0], 2 * t[:, 0], atol=1e-12)
        np.testing.assert_allclose(velocity(path)[:, 1], 3.0, atol=1e-12)


class ShiftGeodesicTest(SimpleTestCase):
    """Constant shifts are exact geodesics on either cone."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.sphere = build_icosphere(2)
        cls.genus2 = load_mesh(fixture_path("genus2.off"), curvature_mode="constant")

    def test_energy_and_length_on_sphere(self):
        c = 0.3
        path = shift_geodesic(np.zeros(self.sphere.vertex_count), c, 16)
        np.testing.assert_allclose(energy_density(self.sphere, path), c * c * 4 * math.pi, rtol=1e-12)
        self.assertAlmostEqual(path_length(self.sphere, path), c * math.sqrt(4 * math.pi), delta=1e-12)
        self.assertAlmostEqual(path_energy(self.sphere, path), 0.5 * c * c * 4 * math.pi, delta=1e-12)

    def test_length_on_negative_cone(self):
        c = -0.25
        path = shift_geodesic(np.zeros(self.genus2.vertex_count), c, 8, cone=NEGATIVE)
        self.assertAlmostEqual(path_length(self.genus2, path), abs(c) * math.sqrt(4 * math.pi), delta=1e-12)

    def test_residual_and_covariant_derivative_vanish(self):
        rng = np.random.default_rng(0)
        u0 = random_admissible_field(self.sphere, rng, POSITIVE)
        path = shift_geodesic(u0, 0.2, 8)
        np.testing.assert_allclose(geodesic_residual(self.sphere, path), 0.0, atol=1e-10)
        np.testing.assert_allclose(covariant_derivative(self.sphere, path, velocity(path)), 0.0, atol=1e-10)

    def test_conserved_functionals(self):
        path = shift_geodesic(np.zeros(self.sphere.vertex_count), 0.5, 8)
        np.testing.assert_allclose(conserved_functional(self.sphere, path, 1), 0.5 * 4 * math.pi, rtol=1e-12)
        cubic = conserved_functional(self.sphere, path, lambda x: x ** 3)
        self.assertLess(drift(cubic), 1e-12)
        with self.assertRaises(ValueError):
            conserved_functional(self.sphere, path, 3)


class PathValidationTest(SimpleTestCase):
    """Inadmissible nodes and mismatched fields are reported."""

    def test_inadmissible_node_is_named(self):
        sphere = build_icosphere(1)
        rng = np.random.default_rng(1)
        bump = random_smooth_field(sphere, rng, amplitude=1.0)
        spike = 50.0 * bump
        nodes = np.stack([np.zeros(sphere.vertex_count), spike, np.zeros(sphere.vertex_count)])
        with self.assertRaises(InadmissibleError) as ctx:
            energy_density(sphere, TimePath(nodes))
        self.assertIn("node 1", str(ctx.exception))

    def test_vertex_count_mismatch(self):
        sphere = build_icosphere(1)
        with self.assertRaises(FieldShapeError):
            path_length(sphere, linear_path(np.zeros(5), np.ones(5), 4))

    def test_covariant_derivative_shape(self):
        sphere = build_icosphere(1)
        path = shift_geodesic(np.zeros(sphere.vertex_count), 0.1, 4)
        with self.assertRaises(FieldShapeError):
            covariant_derivative(sphere, path, np.zeros((3, sphere.vertex_count)))


class TimeDiscretizationTest(SimpleTestCase):
    """Second-order accuracy in t of velocity, length and the covariant derivative."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.sphere = build_icosphere(2)
        rng = np.random.default_rng(21)
        cls.u0 = random_admissible_field(cls.sphere, rng, POSITIVE)
        cls.u1 = random_admissible_field(cls.sphere, rng, POSITIVE)

    def _eased_path(self, intervals):
        # convex combinations of admissible fields stay admissible
        t = np.linspace(0.0, 1.0, intervals + 1)[:, None]
        s = 0.5 * (1.0 - np.cos(math.pi * t))
        return TimePath((1.0 - s) * self.u0[None, :] + s * self.u1[None, :])

    def test_velocity_of_sine_is_second_order(self):
        errors = []
        for intervals in (16, 32, 64):
            t = np.linspace(0.0, 1.0, intervals + 1)
            path = TimePath(np.stack([np.sin(math.pi * t), np.zeros_like(t)], axis=1))
            errors.append(float(np.abs(velocity(path)[:, 0] - math.pi * np.cos(math.pi * t)).max()))
        for coarse, fine in zip(errors, errors[1:]):
            with self.subTest(coarse=coarse, fine=fine):
                self.assertGreater(coarse / fine, 3.5)
                self.assertLess(coarse / fine, 4.5)

    def test_length_is_invariant_under_reparameterization(self):
        linear = linear_path(self.u0, self.u1, 64)
        t = np.linspace(0.0, 1.0, 65)[:, None]
        squared = TimePath((1.0 - t ** 2) * self.u0[None, :] + t ** 2 * self.u1[None, :])
        expected = path_length(self.sphere, linear)
        self.assertGreater(expected, 0.0)
        self.assertAlmostEqual(path_length(self.sphere, squared), expected, delta=5e-3 * expected)

    def test_straight_line_residual_does_not_refine_away(self):
        peaks = []
        for intervals in (32, 64, 128):
            residual = geodesic_residual(self.sphere, linear_path(self.u0, self.u1, intervals))
            peaks.append(float(np.abs(residual).max()))
        self.assertGreater(min(peaks), 1e-4)
        self.assertGreater(min(peaks), 0.8 * max(peaks))

    def test_metric_compatibility_against_constants(self):
        # against the constant field the pairing Σ α |K_u| e^{2u} a has exact spatial
        # derivative Σ α̇ κ a + αᵀ W u̇, so only the time discretization remains
        errors = []
        for intervals in (32, 64):
            path = self._eased_path(intervals)
            t = np.linspace(0.0, 1.0, intervals + 1)[:, None]
            alpha = np.cos(math.pi * t) * self.u0[None, :] + t ** 3 * self.u1[None, :]
            weights = node_weights(self.sphere, path)
            pairing = np.einsum("kv,kv->k", alpha, weights)
            covariant = np.einsum("kv,kv->k", covariant_derivative(self.sphere, path, alpha), weights)
            errors.append(float(np.abs(time_derivative(pairing, path.step) - covariant).max()))
            scale = float(np.abs(covariant).max())
        self.assertGreater(errors[0] / errors[1], 3.0)
        self.assertLess(errors[1], 1e-2 * scale)

    def test_covariant_derivative_is_torsion_free(self):
        # u(s, t) quadratic in each parameter, so the finite differences are exact
        rng = np.random.default_rng(22)
        phi = [random_admissible_field(self.sphere, rng, POSITIVE) for _ in range(4)]
        grid = np.linspace(0.0, 1.0, 5)
        s, t = grid[:, None, None], grid[None, :, None]
        family = 0.2 * (s * phi[0] + t * phi[1] + s * t * phi[2] + t ** 2 * phi[3])
        step = grid[1] - grid[0]
        d_ds = np.gradient(family, step, axis=0, edge_order=2)
        d_dt = np.gradient(family, step, axis=1, edge_order=2)
        along_t = np.stack([covariant_derivative(self.sphere, TimePath(family[i]), d_ds[i]) for i in range(5)])
        along_s = np.stack(
            [covariant_derivative(self.sphere, TimePath(family[:, j]), d_dt[:, j]) for j in range(5)], axis=1,
        )
        np.testing.assert_allclose(along_t, along_s, atol=1e-10)
