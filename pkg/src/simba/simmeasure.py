"""Pairwise dataset-similarity measures and the d x d similarity matrix.

Three rank/linear correlations (pearson, spearman, kendall_tau) keep their
signed values in [-1, 1]. The six distance-derived measures map a distance
into (0, 1]: Lp norms and the globally normalized 1-D Wasserstein distance via
exp(-distance), Jensen-Shannon via 1 - sqrt(divergence) on column-normalized
distributions, and cosine as the plain angle cosine.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .benchio import Benchmark
from .validation import as_float_vector, check_equal_length

# Natural-log Jensen-Shannon divergence is bounded by ln 2; dividing by it
# keeps the divergence in [0, 1] before the 1 - sqrt map.
_LN2 = float(np.log(2.0))


class Measure(str, Enum):
    PEARSON = "pearson"
    SPEARMAN = "spearman"
    KENDALL_TAU = "kendall_tau"
    COSINE = "cosine"
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"
    MINKOWSKI_P3 = "minkowski_p3"
    WASSERSTEIN = "wasserstein"
    JENSEN_SHANNON = "jensen_shannon"


CORRELATION_MEASURES = frozenset(
    {Measure.PEARSON, Measure.SPEARMAN, Measure.KENDALL_TAU}
)
_LP_ORDERS = {Measure.MANHATTAN: 1.0, Measure.EUCLIDEAN: 2.0, Measure.MINKOWSKI_P3: 3.0}


class DegenerateColumnWarning(UserWarning):
    """A column pair had no usable signal under the requested measure."""


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric d x d similarity grid with unit diagonal for one measure."""

    measure: Measure
    dataset_ids: tuple[str, ...]
    values: np.ndarray
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        d = len(self.dataset_ids)
        if values.shape != (d, d):
            raise ValueError(f"similarity grid shape {values.shape} does not match d={d}")
        if not np.array_equal(values, values.T):
            raise ValueError("similarity matrix must be symmetric")
        if not np.allclose(np.diag(values), 1.0, atol=1e-12):
            raise ValueError("similarity matrix diagonal must be 1")
        if np.nanmin(values) < -1.0 - 1e-12 or np.nanmax(values) > 1.0 + 1e-12:
            raise ValueError("similarity values must lie in [-1, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_datasets(self) -> int:
        return len(self.dataset_ids)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    # Fractional ranks: ties share the mean of the positions they occupy.
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> tuple[float, str | None]:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return 0.0, "zero variance under a correlation measure"
    return float(xc @ yc) / denom, None


def _kendall(x: np.ndarray, y: np.ndarray) -> tuple[float, str | None]:
    # Goodman-Kruskal form: ties drop out of both numerator and denominator.
    iu, ju = np.triu_indices(x.size, k=1)
    sx = np.sign(x[iu] - x[ju])
    sy = np.sign(y[iu] - y[ju])
    prod = sx * sy
    concordant = int(np.sum(prod > 0))
    discordant = int(np.sum(prod < 0))
    if concordant + discordant == 0:
        return 0.0, "all pairs tied under kendall_tau"
    return (concordant - discordant) / (concordant + discordant), None


def _cosine(x: np.ndarray, y: np.ndarray) -> tuple[float, str | None]:
    nx = float(np.sqrt(x @ x))
    ny = float(np.sqrt(y @ y))
    if nx == 0.0 or ny == 0.0:
        return 0.0, "zero-norm column under cosine"
    return float(x @ y) / (nx * ny), None


def wasserstein_1d(x: np.ndarray, y: np.ndarray) -> float:
    """W1 between two equal-size empirical distributions (equal weights)."""
    return float(np.mean(np.abs(np.sort(x) - np.sort(y))))


def _as_distribution(v: np.ndarray) -> np.ndarray:
    total = v.sum()
    if total <= 0.0:
        # Max-entropy stand-in: a zero-sum column has no distribution of its own.
        return np.full(v.size, 1.0 / v.size)
    return v / total


def _jensen_shannon(x: np.ndarray, y: np.ndarray) -> tuple[float, str | None]:
    note = None
    if x.sum() <= 0.0 or y.sum() <= 0.0:
        note = "zero-sum column replaced by the uniform distribution"
    p = _as_distribution(x)
    q = _as_distribution(y)
    m = 0.5 * (p + q)
    kl_p = float(np.sum(np.where(p > 0.0, p * np.log(p / np.where(m > 0.0, m, 1.0)), 0.0)))
    kl_q = float(np.sum(np.where(q > 0.0, q * np.log(q / np.where(m > 0.0, m, 1.0)), 0.0)))
    divergence = 0.5 * (kl_p + kl_q) / _LN2
    divergence = min(max(divergence, 0.0), 1.0)
    return 1.0 - float(np.sqrt(divergence)), note


def _pair_similarity(
    x: np.ndarray, y: np.ndarray, measure: Measure, context: float | None
) -> tuple[float, str | None]:
    if measure == Measure.PEARSON:
        return _pearson(x, y)
    if measure == Measure.SPEARMAN:
        return _pearson(_average_ranks(x), _average_ranks(y))
    if measure == Measure.KENDALL_TAU:
        return _kendall(x, y)
    if measure == Measure.COSINE:
        return _cosine(x, y)
    if measure in _LP_ORDERS:
        p = _LP_ORDERS[measure]
        dist = float(np.sum(np.abs(x - y) ** p) ** (1.0 / p))
        return float(np.exp(-dist)), None
    if measure == Measure.WASSERSTEIN:
        if context is None:
            raise ValueError("wasserstein similarity requires the max-W1 context")
        w1 = wasserstein_1d(x, y)
        ratio = w1 / context if context > 0.0 else 0.0
        return float(np.exp(-ratio)), None
    if measure == Measure.JENSEN_SHANNON:
        return _jensen_shannon(x, y)
    raise ValueError(f"unknown measure {measure!r}")


def column_similarity(x, y, measure: Measure, context: float | None = None) -> float:
    """Similarity of two score columns under one measure.

    `context` is the benchmark-wide maximum pairwise W1 distance and is only
    consulted for the wasserstein measure. Degenerate inputs (zero variance
    under a correlation, zero norm under cosine) yield 0 with a warning.
    """
    x = as_float_vector(x, "x")
    y = as_float_vector(y, "y")
    check_equal_length(x, y, "columns")
    if x.size < 2:
        raise ValueError("need at least 2 common observations")
    measure = Measure(measure)
    value, note = _pair_similarity(x, y, measure, context)
    if note is not None:
        warnings.warn(note, DegenerateColumnWarning, stacklevel=2)
    return value


def max_pairwise_wasserstein(bench: Benchmark) -> float:
    """Largest W1 distance over all dataset-column pairs (common rows only)."""
    scores, present = bench.scores, bench.present_mask
    best = 0.0
    for i in range(bench.n_datasets):
        for j in range(i + 1, bench.n_datasets):
            common = present[:, i] & present[:, j]
            if common.sum() < 2:
                continue
            best = max(best, wasserstein_1d(scores[common, i], scores[common, j]))
    return best


def similarity_matrix(bench: Benchmark, measure: Measure) -> SimilarityMatrix:
    """Full symmetric similarity matrix over dataset columns.

    Pairs are compared over their commonly observed models; a pair with fewer
    than 2 common observations gets similarity 0 and a diagnostic entry.
    """
    measure = Measure(measure)
    d = bench.n_datasets
    if d < 2:
        raise ValueError("need at least 2 datasets")
    context = max_pairwise_wasserstein(bench) if measure == Measure.WASSERSTEIN else None

    scores, present = bench.scores, bench.present_mask
    values = np.eye(d)
    diagnostics: list[str] = []
    for i in range(d):
        for j in range(i + 1, d):
            common = present[:, i] & present[:, j]
            pair = f"{measure.value}({bench.dataset_ids[i]}, {bench.dataset_ids[j]})"
            if common.sum() < 2:
                values[i, j] = values[j, i] = 0.0
                diagnostics.append(f"{pair}: fewer than 2 common observations; set to 0")
                continue
            value, note = _pair_similarity(
                scores[common, i], scores[common, j], measure, context
            )
            values[i, j] = values[j, i] = value
            if note is not None:
                diagnostics.append(f"{pair}: {note}; set to {value:g}")
    return SimilarityMatrix(
        measure=measure,
        dataset_ids=bench.dataset_ids,
        values=values,
        diagnostics=tuple(diagnostics),
    )
