"""
Tests for run artifacts and the manifest.
"""
import datetime
import json
import pathlib
import tempfile
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from geometry.path import TimePath, linear_path
from geometry.surface import fixture_path
from geometry.utils import file_digest
from toolkit.config import RunConfig
from toolkit.reports import RunArtifacts

FIXED_NOW = datetime.datetime(2024, 1, 2, 3, 4, 5, tzinfo=datetime.timezone.utc)


class RunArtifactsTest(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = pathlib.Path(self.tmp.name)
        self.config = RunConfig.resolve("geodesic", {"output_dir": str(self.root), "mesh": "genus2.off"})

    def tearDown(self):
        self.tmp.cleanup()

    def test_files_land_under_the_command_directory(self):
        artifacts = RunArtifacts(self.config)
        report = artifacts.write_report({"pass": True, "value": np.float64(1.5)})
        series = artifacts.write_series(["t", "x"], [(0.0, 1.0), (1.0, 2.0)])
        field = artifacts.write_field("u", np.zeros(3), cone="positive")
        self.assertEqual(report, self.root / "geodesic" / "report.json")
        self.assertEqual(series.read_text().splitlines()[0], "t,x")
        self.assertEqual(json.loads(field.read_text())["cone"], "positive")
        self.assertEqual(set(artifacts.written), {"report.json", "series.csv", "fields/u.json"})

    def test_reports_are_byte_identical(self):
        first = RunArtifacts(self.config, root=self.root / "a")
        second = RunArtifacts(self.config, root=self.root / "b")
        payload = {"b": [1.0, 2.0], "a": {"nested": np.arange(3)}, "pass": True}
        self.assertEqual(first.write_report(payload).read_bytes(), second.write_report(payload).read_bytes())

    def test_path_round_trips(self):
        artifacts = RunArtifacts(self.config)
        path = linear_path(np.zeros(4), np.ones(4), 4)
        target = artifacts.write_path("path", path)
        again = TimePath.from_json(json.loads(target.read_text()))
        np.testing.assert_array_equal(again.nodes, path.nodes)

    @patch("toolkit.reports.timezone.now", return_value=FIXED_NOW)
    def test_manifest(self, _now):
        artifacts = RunArtifacts(self.config)
        report = artifacts.write_report({"pass": True})
        manifest = json.loads(artifacts.write_manifest().read_text())
        self.assertEqual(manifest["command"], "geodesic")
        self.assertEqual(manifest["created_at"], FIXED_NOW.isoformat())
        self.assertEqual(manifest["outputs"], {"report.json": file_digest(report)})
        self.assertEqual(manifest["inputs"]["mesh"]["sha1"], file_digest(fixture_path("genus2.off")))
        self.assertEqual(manifest["config"]["mesh"], "genus2.off")
