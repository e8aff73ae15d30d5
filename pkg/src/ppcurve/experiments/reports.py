"""Experiment reports.

A report is written as three files next to each other::

    <out>.json          the reproducible document (schema ``SCHEMA_VERSION``)
    <out>.samples.csv   raw statistic samples, header ``n,index,statistic`` (limit samples use n = 0)
    <out>.timing.json   wall-clock seconds

Only the first two are covered by the reproducibility contract.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np

from ppcurve.experiments.config import ExperimentConfig, ExperimentName
from ppcurve.io import dumps_json, sidecar_path, write_csv, write_json

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "ppcurve.report/1"
SAMPLES_HEADER = ("n", "index", "statistic")

type FloatArray = np.ndarray


class SampleRow(NamedTuple):
    n: int
    index: int
    statistic: float


def sample_rows(n: int, values: FloatArray) -> list[SampleRow]:
    return [SampleRow(n, i, float(v)) for i, v in enumerate(values)]


def describe(values: FloatArray) -> dict[str, float | int]:
    """Count, mean, standard deviation, standard error and 99th percentile of a statistic sample."""
    values = np.asarray(values, dtype=np.float64)
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return {
        "count": int(values.size),
        "mean": float(np.mean(values)),
        "sd": sd,
        "se": sd / float(np.sqrt(values.size)),
        "p99": float(np.quantile(values, 0.99)),
    }


@dataclass
class ExperimentReport:
    experiment: ExperimentName
    config: ExperimentConfig
    summaries: list[dict[str, Any]] = field(default_factory=list)
    results: dict[str, Any] = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)
    samples: list[SampleRow] = field(default_factory=list, repr=False)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def samples_for(self, n: int) -> FloatArray:
        return np.asarray([row.statistic for row in self.samples if row.n == n], dtype=np.float64)

    def to_document(self, samples_file: str | None = None) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "experiment": self.experiment,
            "seed": self.config.master_seed,
            "config": self.config.to_dict(),
            "tolerances": self.config.tolerances.to_dict(),
            "summaries": self.summaries,
            "results": self.results,
            "flags": self.flags,
            "passed": self.passed,
            "samples_file": samples_file,
        }

    def to_json(self, samples_file: str | None = None) -> str:
        return dumps_json(self.to_document(samples_file))

    def write(self, path: Path | str) -> Path:
        path = Path(path)
        samples_path = sidecar_path(path, "samples.csv") if self.samples else None

        if samples_path is not None:
            write_csv(samples_path, SAMPLES_HEADER, self.samples)
        write_json(path, self.to_document(samples_path.name if samples_path else None))
        write_json(sidecar_path(path, "timing.json"), {"experiment": self.experiment, "wall_clock": self.wall_clock})

        logger.info("Wrote %s report to %s", self.experiment, path)
        return path
