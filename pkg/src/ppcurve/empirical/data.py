"""Datasets behind a P-P plot: paired draws (X_i, Y_i) or two independent samples.

CSV layouts:

- paired: one file with header ``x,y`` and one pair per row;
- independent: two single-column files, the first holding the X sample, the second the Y sample.
  A non-numeric first row is taken as a header.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from ppcurve.copulas.models import CopulaModel, Product
from ppcurve.empirical.plots import build_pp_plot
from ppcurve.empirical.samples import FloatArray, SortedSample
from ppcurve.empirical.steps import StepFunction
from ppcurve.errors import DataError, DomainError
from ppcurve.margins.models import MarginModel
from ppcurve.rng import open_uniform

logger = logging.getLogger(__name__)

type SampleMode = Literal["paired", "independent"]


@dataclass(frozen=True, eq=False)
class SampleData:
    x: FloatArray
    y: FloatArray
    mode: SampleMode = "paired"
    x_sample: SortedSample = field(init=False, repr=False)
    y_sample: SortedSample = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in ("paired", "independent"):
            raise DomainError(f"Unsupported sample mode: {self.mode!r}")
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if self.mode == "paired" and x.shape != y.shape:
            raise DomainError(f"Paired data needs equal lengths, got {x.size} and {y.size}")

        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x_sample", SortedSample.from_values(x))
        object.__setattr__(self, "y_sample", SortedSample.from_values(y))

    def __repr__(self) -> str:
        return f"<SampleData (mode={self.mode}, m={self.m}, n={self.n})>"

    @property
    def m(self) -> int:
        return self.x_sample.n

    @property
    def n(self) -> int:
        return self.y_sample.n

    @property
    def is_paired(self) -> bool:
        return self.mode == "paired"

    def pp_plot(self) -> StepFunction:
        return build_pp_plot(self.x_sample, self.y_sample)


def draw_sample_data(
    f_model: MarginModel,
    g_model: MarginModel,
    copula: CopulaModel,
    n: int,
    rng: np.random.Generator,
    *,
    m: int | None = None,
) -> SampleData:
    """Paired pairs (F^-1(U), G^-1(V)) with (U, V) from the copula, or independent samples when ``m`` is set.

    Independent samples are coupled by the product copula whatever ``copula`` is.
    """
    if n < 1 or (m is not None and m < 1):
        raise DomainError(f"Sample sizes must be positive, got n={n}, m={m}")

    if m is None:
        u, v = copula.sample(n, rng)
        return SampleData(f_model.qf(u), g_model.qf(v), mode="paired")

    if not isinstance(copula, Product):
        logger.debug("Independent samples ignore copula %s", copula)
    x = f_model.qf(open_uniform(rng, m))
    y = g_model.qf(open_uniform(rng, n))
    return SampleData(x, y, mode="independent")


def _parse_float(raw: str, source: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise DataError(f"Expected a number, got {raw!r}", source=source, line=line)
    if not math.isfinite(value):
        raise DataError(f"Expected a finite number, got {raw!r}", source=source, line=line)
    return value


def read_paired_csv(path: Path | str) -> SampleData:
    path = Path(path)
    source = str(path)
    xs, ys = [], []

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [it.strip().lower() for it in header] != ["x", "y"]:
            raise DataError(f"Expected header 'x,y', got {header!r}", source=source, line=1)

        for row in reader:
            line = reader.line_num
            if not row or all(not it.strip() for it in row):
                continue
            if len(row) != 2:
                raise DataError(f"Expected 2 columns, got {len(row)}", source=source, line=line)
            xs.append(_parse_float(row[0].strip(), source, line))
            ys.append(_parse_float(row[1].strip(), source, line))

    if not xs:
        raise DataError("No data rows", source=source)

    logger.debug("Read %d pairs from %s", len(xs), path)
    return SampleData(np.asarray(xs), np.asarray(ys), mode="paired")


def read_single_column_csv(path: Path | str) -> FloatArray:
    path = Path(path)
    source = str(path)
    values = []

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            line = reader.line_num
            if not row or all(not it.strip() for it in row):
                continue
            if len(row) != 1:
                raise DataError(f"Expected 1 column, got {len(row)}", source=source, line=line)
            raw = row[0].strip()
            if line == 1 and not values:
                try:
                    float(raw)
                except ValueError:
                    continue
            values.append(_parse_float(raw, source, line))

    if not values:
        raise DataError("No data rows", source=source)

    logger.debug("Read %d values from %s", len(values), path)
    return np.asarray(values)


def load_sample_data(paths: list[Path] | list[str]) -> SampleData:
    """One path: paired ``x,y`` file. Two paths: independent X and Y samples."""
    match paths:
        case [paired]:
            return read_paired_csv(paired)
        case [x_path, y_path]:
            return SampleData(read_single_column_csv(x_path), read_single_column_csv(y_path), mode="independent")
        case _:
            raise DomainError(f"Expected one paired file or two single-column files, got {len(paths)} paths")
