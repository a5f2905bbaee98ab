"""
Tests for the JSON, CSV and digest helpers.
"""
import json
import pathlib
import tempfile

import numpy as np
from django.test import SimpleTestCase

from geometry.utils import array_digest, blob_digest, dumps_json, load_csv_matrix, load_json, save_csv, to_jsonable


class JsonTest(SimpleTestCase):

    def test_numpy_values_become_plain_json(self):
        data = to_jsonable({"a": np.arange(3), "b": np.float64("nan"), "c": np.inf, 1: np.bool_(True)})
        self.assertEqual(data, {"a": [0, 1, 2], "b": None, "c": "inf", "1": True})

    def test_dumps_is_sorted_and_newline_terminated(self):
        text = dumps_json({"b": 1, "a": 2})
        self.assertTrue(text.endswith("\n"))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(json.loads(text), {"a": 2, "b": 1})

    def test_missing_file_returns_default(self):
        self.assertEqual(load_json("/nonexistent/file.json", default={}), {})


class CsvTest(SimpleTestCase):

    def test_header_is_skipped(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = pathlib.Path(tmp) / "nested" / "series.csv"
            save_csv(target, ["t", "F"], [(0.0, 1.5), (0.1, 1.25)])
            matrix = load_csv_matrix(target)
        np.testing.assert_array_equal(matrix, [[0.0, 1.5], [0.1, 1.25]])


class DigestTest(SimpleTestCase):

    def test_blob_digest_matches_git(self):
        self.assertEqual(blob_digest(b""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391")

    def test_array_digest_depends_on_shape(self):
        values = np.arange(6.0)
        self.assertNotEqual(array_digest(values), array_digest(values.reshape(2, 3)))
        self.assertEqual(array_digest(values), array_digest(values.copy()))
