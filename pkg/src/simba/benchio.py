"""Benchmark matrix I/O: load, validate, normalize, split, and perturb.

This module owns the matrix conventions used everywhere else: scores live in
an (m models x d datasets) float grid, missing cells are NaN, and normalized
scores are fractions of the headroom above each dataset's random-chance level,
clamped to [0, 1].
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateChanceError,
    IncompleteMatrixError,
    ParseError,
    SchemaError,
    SplitError,
)

MATRIX_HEADER_KEY = "model_id"
CHANCE_HEADER = ("dataset_id", "chance_level")


def format_real(x: float) -> str:
    """Render a real for report files: 17 significant digits, round-trip safe."""
    return f"{float(x):.17g}"


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _duplicates(ids) -> list[str]:
    seen: set[str] = set()
    dupes: list[str] = []
    for i in ids:
        if i in seen and i not in dupes:
            dupes.append(i)
        seen.add(i)
    return dupes


def _check_ids(ids: tuple[str, ...], what: str) -> None:
    if not ids:
        raise SchemaError(f"no {what} ids found")
    if any(not i for i in ids):
        raise SchemaError(f"empty {what} id")
    dupes = _duplicates(ids)
    if dupes:
        raise SchemaError(f"duplicate {what} ids: {', '.join(dupes)}")


@dataclass(frozen=True)
class RawBenchmark:
    """As-loaded score table in raw metric units plus per-dataset chance levels.

    `scores` is (m, d) with NaN marking missing cells; `chance_levels` is the
    per-dataset score a blind-guess model attains, each in [0, 1).
    """

    model_ids: tuple[str, ...]
    dataset_ids: tuple[str, ...]
    scores: np.ndarray
    chance_levels: np.ndarray

    def __post_init__(self):
        _check_ids(self.model_ids, "model")
        _check_ids(self.dataset_ids, "dataset")
        scores = _frozen(self.scores)
        chance = _frozen(self.chance_levels)
        if scores.shape != (len(self.model_ids), len(self.dataset_ids)):
            raise SchemaError(
                f"score grid shape {scores.shape} does not match "
                f"{len(self.model_ids)} models x {len(self.dataset_ids)} datasets"
            )
        if chance.shape != (len(self.dataset_ids),):
            raise SchemaError("chance_levels must have one entry per dataset")
        for d, c in zip(self.dataset_ids, chance):
            if c == 1.0:
                raise DegenerateChanceError(
                    f"dataset {d!r} has chance level 1.0; normalization is undefined"
                )
            if not 0.0 <= c < 1.0:
                raise SchemaError(f"dataset {d!r} chance level {c} outside [0, 1)")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "chance_levels", chance)

    @property
    def n_models(self) -> int:
        return len(self.model_ids)

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_ids)


@dataclass(frozen=True)
class Benchmark:
    """Normalized score matrix; every present cell lies in [0, 1].

    Columns must carry at least two present cells so that any pairwise
    statistic downstream is defined.
    """

    model_ids: tuple[str, ...]
    dataset_ids: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        _check_ids(self.model_ids, "model")
        _check_ids(self.dataset_ids, "dataset")
        scores = _frozen(self.scores)
        if scores.shape != (len(self.model_ids), len(self.dataset_ids)):
            raise SchemaError(
                f"score grid shape {scores.shape} does not match "
                f"{len(self.model_ids)} models x {len(self.dataset_ids)} datasets"
            )
        present = ~np.isnan(scores)
        vals = scores[present]
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise SchemaError("normalized scores must lie in [0, 1]")
        thin = np.flatnonzero(present.sum(axis=0) < 2)
        if thin.size:
            names = ", ".join(self.dataset_ids[i] for i in thin)
            raise SchemaError(f"datasets with fewer than 2 observed models: {names}")
        object.__setattr__(self, "scores", scores)

    @property
    def n_models(self) -> int:
        return len(self.model_ids)

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_ids)

    @property
    def present_mask(self) -> np.ndarray:
        return ~np.isnan(self.scores)


@dataclass(frozen=True)
class ModelSplit:
    """Disjoint train/test halves of a benchmark over models (datasets shared)."""

    train: Benchmark
    test: Benchmark
    seed: int
    ratio: float

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise SplitError(f"split ratio must be in (0, 1), got {self.ratio}")
        train_ids = set(self.train.model_ids)
        test_ids = set(self.test.model_ids)
        if train_ids & test_ids:
            raise SplitError("train and test model ids overlap")
        if self.train.dataset_ids != self.test.dataset_ids:
            raise SplitError("train and test halves must share dataset ids in order")


def _read_rows(source) -> list[list[str]]:
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        text = io.StringIO(data)
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = io.StringIO(fh.read())
    return [row for row in csv.reader(text) if row]


def load_benchmark(source, chance_source) -> RawBenchmark:
    """Parse a score matrix file and its chance-level file into a RawBenchmark.

    `source` rows: header "model_id,<dataset ids...>" then one row per model;
    an empty field marks a missing cell. `chance_source` rows: header
    "dataset_id,chance_level" then one row per dataset. Both accept paths or
    file-like objects.
    """
    rows = _read_rows(source)
    if not rows:
        raise SchemaError("matrix file is empty")
    header = [c.strip() for c in rows[0]]
    if header[0] != MATRIX_HEADER_KEY:
        raise SchemaError(
            f"matrix header must start with {MATRIX_HEADER_KEY!r}, got {header[0]!r}"
        )
    dataset_ids = tuple(header[1:])
    _check_ids(dataset_ids, "dataset")

    model_ids: list[str] = []
    score_rows: list[list[float]] = []
    for rownum, row in enumerate(rows[1:], start=2):
        cells = [c.strip() for c in row]
        if len(cells) != 1 + len(dataset_ids):
            raise ParseError(
                f"expected {1 + len(dataset_ids)} fields, got {len(cells)}", row=rownum
            )
        model_ids.append(cells[0])
        parsed: list[float] = []
        for col, cell in enumerate(cells[1:]):
            if cell == "":
                parsed.append(float("nan"))
                continue
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"non-numeric cell {cell!r}", row=rownum, column=dataset_ids[col]
                ) from None
        score_rows.append(parsed)
    _check_ids(tuple(model_ids), "model")

    chance_rows = _read_rows(chance_source)
    if not chance_rows:
        raise SchemaError("chance file is empty")
    chance_header = tuple(c.strip() for c in chance_rows[0])
    if chance_header != CHANCE_HEADER:
        raise SchemaError(
            f"chance file header must be {','.join(CHANCE_HEADER)!r}, "
            f"got {','.join(chance_header)!r}"
        )
    chance_by_id: dict[str, float] = {}
    for rownum, row in enumerate(chance_rows[1:], start=2):
        cells = [c.strip() for c in row]
        if len(cells) != 2:
            raise ParseError("expected 2 fields", row=rownum)
        did, raw = cells
        if did in chance_by_id:
            raise SchemaError(f"duplicate dataset id {did!r} in chance file")
        try:
            chance_by_id[did] = float(raw)
        except ValueError:
            raise ParseError(
                f"non-numeric chance level {raw!r}", row=rownum, column="chance_level"
            ) from None
    missing = [d for d in dataset_ids if d not in chance_by_id]
    if missing:
        raise SchemaError(f"datasets missing from chance file: {', '.join(missing)}")

    return RawBenchmark(
        model_ids=tuple(model_ids),
        dataset_ids=dataset_ids,
        scores=np.array(score_rows, dtype=float),
        chance_levels=np.array([chance_by_id[d] for d in dataset_ids], dtype=float),
    )


def normalize_scores(raw: RawBenchmark) -> Benchmark:
    """Rescale each present cell to its fraction of headroom above chance.

    x -> max(0, (x - x_random) / (1 - x_random)), then clamped to [0, 1];
    missing cells stay missing.
    """
    headroom = 1.0 - raw.chance_levels
    if np.any(headroom <= 0.0):
        bad = [d for d, h in zip(raw.dataset_ids, headroom) if h <= 0.0]
        raise DegenerateChanceError(
            f"chance level leaves no headroom for: {', '.join(bad)}"
        )
    normalized = (raw.scores - raw.chance_levels[None, :]) / headroom[None, :]
    normalized = np.clip(normalized, 0.0, 1.0)  # NaN passes through untouched
    return Benchmark(raw.model_ids, raw.dataset_ids, normalized)


def split_models(bench: Benchmark, ratio: float, seed: int) -> ModelSplit:
    """Partition models into train/test halves, deterministically per seed.

    Train size is round(ratio * m) with ties rounded toward train; original
    model order is preserved within each half.
    """
    if not 0.0 < ratio < 1.0:
        raise SplitError(f"split ratio must be in (0, 1), got {ratio}")
    m = bench.n_models
    if m < 2:
        raise SplitError("need at least 2 models to split")
    n_train = int(np.floor(ratio * m + 0.5))
    if n_train == 0 or n_train == m:
        raise SplitError(
            f"ratio {ratio} with {m} models leaves an empty half "
            f"({n_train} train / {m - n_train} test)"
        )
    perm = np.random.default_rng(seed).permutation(m)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])

    def take(idx: np.ndarray) -> Benchmark:
        return Benchmark(
            tuple(bench.model_ids[i] for i in idx),
            bench.dataset_ids,
            bench.scores[idx, :],
        )

    return ModelSplit(train=take(train_idx), test=take(test_idx), seed=seed, ratio=ratio)


def perturb_with_noise(bench: Benchmark, mean: float, sigma: float, seed: int) -> Benchmark:
    """Add independent Gaussian noise to every present cell, re-clamped to [0, 1].

    sigma is the standard deviation; sigma=0 with mean=0 leaves the matrix
    bit-identical. Missing cells are untouched.
    """
    if sigma < 0.0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    noise = np.random.default_rng(seed).normal(mean, sigma, size=bench.scores.shape)
    perturbed = np.clip(bench.scores + noise, 0.0, 1.0)
    return Benchmark(bench.model_ids, bench.dataset_ids, perturbed)


def check_complete(bench: Benchmark, context: str = "this operation") -> None:
    """Fail fast when an operation requires complete columns, listing offenders."""
    mask = bench.present_mask
    if mask.all():
        return
    rows, cols = np.nonzero(~mask)
    missing = [(bench.model_ids[r], bench.dataset_ids[c]) for r, c in zip(rows, cols)]
    shown = ", ".join(f"({m}, {d})" for m, d in missing[:20])
    more = f" and {len(missing) - 20} more" if len(missing) > 20 else ""
    raise IncompleteMatrixError(
        f"{context} requires complete columns; missing cells: {shown}{more}",
        missing=missing,
    )
