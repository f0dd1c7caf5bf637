"""Shared data model, errors, seeding and plain-text matrix I/O.

Time series are stored time-in-rows: an ``(n_samples, n_channels)`` float64
array. Channel indices are 0-based in the API and 1-based in every file
this package writes.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np


class UnmixioError(Exception):
    """Base class for errors raised by this package."""


class MatrixParseError(UnmixioError, ValueError):
    """A matrix text file could not be parsed."""


class ConfigError(UnmixioError, ValueError):
    """Invalid experiment configuration."""


class NumericalError(UnmixioError, ArithmeticError):
    """A computation hit a singular, rank-deficient or unstable case."""


class SingularMatrixError(NumericalError):
    pass


class RankDeficientError(NumericalError):
    pass


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped at its iteration cap."""


def as_series(x, name: str = "x", min_channels: int = 1) -> np.ndarray:
    """Validate and return a time-in-rows float64 matrix.

    One-dimensional input is treated as a single channel.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (samples x channels), got shape {arr.shape}")
    n, p = arr.shape
    if p < min_channels:
        raise ValueError(f"{name} needs at least {min_channels} channel(s)")
    if n <= p:
        raise ValueError(f"{name} needs more samples than channels, got {n} x {p}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class EpochedSeries:
    """Equal-length epochs of a multichannel recording.

    Attributes
    ----------
    data : ndarray, shape (n_epochs, epoch_length, n_channels)
    sampling_rate : float
        Samples per second.
    """

    data: np.ndarray
    sampling_rate: float

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ValueError(f"epoched data must be 3-D, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("epoched data contains non-finite entries")
        if self.sampling_rate <= 0:
            raise ValueError("sampling_rate must be positive")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n_epochs(self) -> int:
        return self.data.shape[0]

    @property
    def epoch_length(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[2]

    def concatenated(self) -> np.ndarray:
        """Epochs stacked end to end as one (n_epochs*epoch_length, p) series."""
        return self.data.reshape(-1, self.n_channels).copy()

    @classmethod
    def from_continuous(cls, x, epoch_length: int, sampling_rate: float) -> "EpochedSeries":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if epoch_length < 1 or x.shape[0] % epoch_length:
            raise ValueError(
                f"{x.shape[0]} samples do not split into epochs of {epoch_length}"
            )
        return cls(x.reshape(-1, epoch_length, x.shape[1]), sampling_rate)


@dataclass(frozen=True)
class SeedSpec:
    """Seed plus stream id; each pair yields an independent PCG64 stream."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.stream < 0:
            raise ValueError("stream id must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard Gaussian draws by the Box-Muller transform of uniform pairs."""
    shape = tuple(np.atleast_1d(shape))
    n = int(np.prod(shape))
    m = (n + 1) // 2
    u = rng.random((m, 2))
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u lies in (0, 1]
    theta = 2.0 * np.pi * u[:, 1]
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:n].reshape(shape)


def uniform(rng: np.random.Generator, low: float, high: float, shape) -> np.ndarray:
    return low + (high - low) * rng.random(shape)


_SPLIT = re.compile(r"[,\s]+")


def read_matrix(path) -> np.ndarray:
    """Read a whitespace- or comma-separated numeric matrix.

    Blank lines are ignored. Raises ``MatrixParseError`` on an empty file,
    ragged rows (reporting the 1-based line number) or a non-numeric token
    (reporting line and column).
    """
    rows: list[list[float]] = []
    width: Optional[int] = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip().strip(",")
            if not stripped:
                continue
            tokens = _SPLIT.split(stripped)
            values = []
            for col, tok in enumerate(tokens, start=1):
                try:
                    values.append(float(tok))
                except ValueError:
                    raise MatrixParseError(
                        f"{path}: line {lineno}, column {col}: non-numeric token {tok!r}"
                    ) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise MatrixParseError(
                    f"{path}: line {lineno}: expected {width} columns, found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise MatrixParseError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.float64)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_matrix(m, path) -> None:
    """Write one row per line, tab separated, with round-trip precision."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in arr:
            fh.write("\t".join(_fmt(v) for v in row))
            fh.write("\n")


def write_matrix_csv(m, path) -> None:
    """Write a matrix as ``row,col,value`` records with 1-based indices."""
    arr = np.atleast_2d(np.asarray(m, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        for (i, j), v in np.ndenumerate(arr):
            w.writerow([i + 1, j + 1, _fmt(v)])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        records = list(csv.DictReader(fh))
    if not records:
        raise MatrixParseError(f"{path}: no records")
    n = max(int(r["row"]) for r in records)
    p = max(int(r["col"]) for r in records)
    out = np.full((n, p), np.nan)
    for r in records:
        out[int(r["row"]) - 1, int(r["col"]) - 1] = float(r["value"])
    return out


def write_rows_csv(header: Iterable[str], rows: Iterable[Iterable], path) -> None:
    """Write records to a path or an already-open text stream."""
    if hasattr(path, "write"):
        _write_rows(path, header, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
