"""Pairwise relationship census over dataset columns or model rows.

Every pair is classified as linear, exponential, power-law, or none by fitting
six single-feature least-squares regressions (three families, both prediction
directions) and keeping the family of the best r-squared, subject to a
threshold below which the pair counts as unrelated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Mapping

import numpy as np

from .benchio import Benchmark
from .errors import DegenerateFitError, InsufficientDataError
from .validation import as_float_vector, check_equal_length

# Offset keeping log transforms defined on clamped scores; surfaced in reports.
LOG_OFFSET = 1e-6
# Below this many common observations r-squared is vacuous (2 points always fit).
MIN_COMMON_OBSERVATIONS = 3
R2_THRESHOLD = 0.5

DIRECTION_FORWARD = "i->j"
DIRECTION_REVERSE = "j->i"


class Relationship(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"
    POWER_LAW = "power_law"
    NONE = "none"


# Fit order doubles as tie-break precedence: simplest family wins equal r².
FIT_FAMILIES = (Relationship.LINEAR, Relationship.EXPONENTIAL, Relationship.POWER_LAW)

AXIS_DATASETS = "datasets"
AXIS_MODELS = "models"


@dataclass(frozen=True)
class FitResult:
    """One least-squares fit in its (possibly log-transformed) space."""

    family: Relationship
    direction: str
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class RelationshipVerdict:
    """Best-of-six classification for one pair."""

    klass: Relationship
    best_fit: FitResult | None
    n_common: int
    note: str | None = None


@dataclass(frozen=True)
class RelationshipCensus:
    """All pairwise verdicts along one axis plus per-class counts."""

    axis: str
    counts: Mapping[Relationship, int]
    verdicts: Mapping[tuple[int, int], RelationshipVerdict]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _transform(values: np.ndarray, log: bool, role: str) -> np.ndarray:
    if not log:
        return values
    shifted = values + LOG_OFFSET
    if np.any(shifted <= 0.0):
        raise DegenerateFitError(f"log transform undefined for {role} values <= {-LOG_OFFSET}")
    return np.log(shifted)


def fit_pair_regression(
    x, y, family: Relationship, direction: str = DIRECTION_FORWARD
) -> FitResult:
    """Ordinary least squares of y on x under one relationship family.

    linear fits y ~ a*x + b directly; exponential fits log(y) ~ a*x + b;
    power_law fits log(y) ~ a*log(x) + b. r_squared is computed in the fitted
    (transformed) space. Raises InsufficientDataError below 3 points and
    DegenerateFitError on zero variance or an infeasible log transform.
    """
    x = as_float_vector(x, "x")
    y = as_float_vector(y, "y")
    check_equal_length(x, y)
    if x.size < MIN_COMMON_OBSERVATIONS:
        raise InsufficientDataError(
            f"need at least {MIN_COMMON_OBSERVATIONS} common observations, got {x.size}"
        )
    if family == Relationship.NONE:
        raise ValueError("cannot fit the 'none' family")
    log_x = family == Relationship.POWER_LAW
    log_y = family in (Relationship.EXPONENTIAL, Relationship.POWER_LAW)
    px = _transform(x, log_x, "predictor")
    py = _transform(y, log_y, "target")
    if np.ptp(px) == 0.0:
        raise DegenerateFitError("zero variance in predictor")
    if np.ptp(py) == 0.0:
        raise DegenerateFitError("zero variance in target")

    design = np.column_stack([px, np.ones_like(px)])
    coef, _, _, _ = np.linalg.lstsq(design, py, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    residuals = py - (slope * px + intercept)
    ss_res = float(residuals @ residuals)
    centered = py - py.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 - ss_res / ss_tot
    return FitResult(family, direction, slope, intercept, r_squared)


def classify_relationship(x, y, threshold: float = R2_THRESHOLD) -> RelationshipVerdict:
    """Classify a pair by the best of six fits, or none below the threshold.

    Missing values are dropped pairwise before fitting. Infeasible fits are
    skipped; if all six are infeasible the verdict is none.
    """
    x = as_float_vector(x, "x")
    y = as_float_vector(y, "y")
    check_equal_length(x, y)
    common = np.isfinite(x) & np.isfinite(y)
    n_common = int(common.sum())
    if n_common < MIN_COMMON_OBSERVATIONS:
        return RelationshipVerdict(
            Relationship.NONE, None, n_common,
            note=f"fewer than {MIN_COMMON_OBSERVATIONS} common observations",
        )
    cx, cy = x[common], y[common]

    best: FitResult | None = None
    for family in FIT_FAMILIES:
        for direction, (px, py) in (
            (DIRECTION_FORWARD, (cx, cy)),
            (DIRECTION_REVERSE, (cy, cx)),
        ):
            try:
                fit = fit_pair_regression(px, py, family, direction)
            except DegenerateFitError:
                continue
            if best is None or fit.r_squared > best.r_squared:
                best = fit
    if best is None:
        return RelationshipVerdict(
            Relationship.NONE, None, n_common, note="all six fits degenerate"
        )
    if best.r_squared < threshold:
        return RelationshipVerdict(Relationship.NONE, best, n_common)
    return RelationshipVerdict(best.family, best, n_common)


def _census(vectors: np.ndarray, axis: str, threshold: float) -> RelationshipCensus:
    n = vectors.shape[0]
    counts = {k: 0 for k in Relationship}
    verdicts: dict[tuple[int, int], RelationshipVerdict] = {}
    for i, j in combinations(range(n), 2):
        verdict = classify_relationship(vectors[i], vectors[j], threshold)
        verdicts[(i, j)] = verdict
        counts[verdict.klass] += 1
    return RelationshipCensus(axis=axis, counts=counts, verdicts=verdicts)


def compare_all_datasets(bench: Benchmark, threshold: float = R2_THRESHOLD) -> RelationshipCensus:
    """Verdict for each unordered dataset pair, over commonly observed models."""
    if bench.n_datasets < 2:
        raise ValueError("need at least 2 datasets to compare")
    return _census(bench.scores.T, AXIS_DATASETS, threshold)


def compare_all_models(bench: Benchmark, threshold: float = R2_THRESHOLD) -> RelationshipCensus:
    """Verdict for each unordered model pair, over commonly observed datasets."""
    if bench.n_models < 2:
        raise ValueError("need at least 2 models to compare")
    return _census(bench.scores, AXIS_MODELS, threshold)
