"""
Run artifacts: report.json, series.csv, fields/*.json and manifest.json.

Reports are written with sorted keys and no timestamps so identical runs
produce byte-identical files; the timestamp lives in the manifest only.
"""
from __future__ import annotations

import logging
import pathlib
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
from django.utils import timezone

from geometry.fields import save_field
from geometry.path import TimePath
from geometry.utils import file_digest, save_csv, save_json

from .config import RunConfig

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"
SERIES_NAME = "series.csv"
MANIFEST_NAME = "manifest.json"
FIELDS_DIR = "fields"


class RunArtifacts:
    """Collects the files of one command run under ``<output_dir>/<command>/``."""

    def __init__(self, config: RunConfig, root: Optional[pathlib.Path] = None):
        self.config = config
        self.root = pathlib.Path(root or config.output_dir) / config.command
        self.written: Dict[str, pathlib.Path] = {}

    def _path(self, relative: str) -> pathlib.Path:
        path = self.root / relative
        self.written[relative] = path
        return path

    def write_report(self, report: Dict[str, Any]) -> pathlib.Path:
        path = self._path(REPORT_NAME)
        save_json(path, report)
        return path

    def write_series(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> pathlib.Path:
        path = self._path(SERIES_NAME)
        save_csv(path, header, rows)
        return path

    def write_field(self, name: str, values: np.ndarray, **meta: Any) -> pathlib.Path:
        path = self._path(f"{FIELDS_DIR}/{name}.json")
        save_field(path, values, **meta)
        return path

    def write_path(self, name: str, path: TimePath) -> pathlib.Path:
        target = self._path(f"{FIELDS_DIR}/{name}.json")
        save_json(target, path.to_json())
        return target

    def write_manifest(self) -> pathlib.Path:
        """Config echo plus git-style blob digests of every input and output."""
        inputs = {}
        for name, path in self.config.input_files().items():
            inputs[name] = {"path": str(path), "sha1": file_digest(path) if path.exists() else None}
        outputs = {relative: file_digest(path) for relative, path in sorted(self.written.items())}
        manifest = {
            "command": self.config.command,
            "config": self.config.echo(),
            "inputs": inputs,
            "outputs": outputs,
            "created_at": timezone.now().isoformat(),
        }
        path = self.root / MANIFEST_NAME
        save_json(path, manifest)
        logger.info("wrote %d artifacts to %s", len(self.written) + 1, self.root)
        return path
