"""Representative-subset discovery and coverage evaluation.

Discovery greedily (or with a beam) grows a set of dataset columns maximizing
proxy coverage: the mean, over all datasets, of each dataset's best similarity
to the chosen set (1 for members). Coverage of a chosen subset is then scored
for real as the Pearson correlation between model mean win rates computed on
the subset and on the full benchmark.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .benchio import Benchmark, check_complete
from .simmeasure import Measure, SimilarityMatrix, similarity_matrix
from .validation import as_float_matrix, check_subset_indices

METHOD_GREEDY = "greedy"
METHOD_GREEDY_MIN = "greedy_min"
METHOD_GREEDY_MAX = "greedy_max"
BASELINE_KINDS = ("random", METHOD_GREEDY_MIN, METHOD_GREEDY_MAX)

# Float-sum wobble allowance when checking that greedy deltas never decrease.
_MONOTONE_TOL = 1e-12


class UndefinedCoverageWarning(UserWarning):
    """A coverage value was undefined (constant mean win rates) and flagged."""


@dataclass(frozen=True)
class SelectionTrace:
    """Ordered dataset picks with the proxy coverage reached after each pick.

    `order` holds distinct 0-based dataset indices; it spans all datasets when
    discovery runs with gamma=1. `deltas` is None for baseline orders, which
    are not driven by a similarity matrix.
    """

    order: tuple[int, ...]
    deltas: tuple[float, ...] | None
    method: str

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if len(set(order)) != len(order):
            raise ValueError("selection order contains duplicate dataset indices")
        if any(i < 0 for i in order):
            raise ValueError("selection order contains negative indices")
        object.__setattr__(self, "order", order)
        if self.deltas is not None:
            deltas = tuple(float(v) for v in self.deltas)
            if len(deltas) != len(order):
                raise ValueError("one delta per selection step required")
            if self.method.startswith(("greedy", "beam")):
                diffs = np.diff(deltas)
                if diffs.size and diffs.min() < -_MONOTONE_TOL:
                    raise ValueError("greedy/beam proxy coverage must be non-decreasing")
            object.__setattr__(self, "deltas", deltas)

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage at every prefix size 1..d of a full-length selection order."""

    etas: tuple[float, ...]
    trace: SelectionTrace

    def __post_init__(self):
        etas = tuple(float(v) for v in self.etas)
        if len(etas) != len(self.trace):
            raise ValueError("need one coverage value per selection step")
        if any(not -1.0 - 1e-12 <= e <= 1.0 + 1e-12 for e in etas):
            raise ValueError("coverage values must lie in [-1, 1]")
        if abs(etas[-1] - 1.0) > 1e-12:
            raise ValueError(
                f"full-benchmark coverage must be 1, got {etas[-1]!r}; "
                "the trace must cover all datasets"
            )
        object.__setattr__(self, "etas", etas)

    @property
    def n_datasets(self) -> int:
        return len(self.etas)


def _sim_values(sim) -> np.ndarray:
    if isinstance(sim, SimilarityMatrix):
        return sim.values
    values = np.asarray(sim, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("similarity grid must be square")
    return values


def proxy_coverage(subset, sim) -> float:
    """Mean over datasets of the best similarity to the chosen set (1 inside).

    The empty set has proxy coverage 0.
    """
    values = _sim_values(sim)
    d = values.shape[0]
    idx = check_subset_indices(subset, d)
    if not idx:
        return 0.0
    members = list(idx)
    lam = values[:, members].max(axis=1)
    lam[members] = 1.0
    return float(lam.sum() / d)


def coverage_gain(subset, candidate: int, sim) -> float:
    """Proxy coverage gained by adding one dataset; 0 if already a member."""
    values = _sim_values(sim)
    d = values.shape[0]
    idx = check_subset_indices(subset, d)
    candidate = int(candidate)
    check_subset_indices([candidate], d, "candidate")
    if candidate in idx:
        return 0.0
    return proxy_coverage(idx + (candidate,), values) - proxy_coverage(idx, values)


def _greedy_trace(values: np.ndarray, gamma: float) -> tuple[list[int], list[float]]:
    d = values.shape[0]
    exhaust = gamma >= 1.0  # gamma=1 always walks the full benchmark
    lam = np.zeros(d)
    chosen: list[int] = []
    deltas: list[float] = []
    remaining = list(range(d))
    current = 0.0
    while remaining and (exhaust or current < gamma):
        best_i = -1
        best_lam: np.ndarray | None = None
        best_delta = -np.inf
        for i in remaining:  # ascending index order makes ties deterministic
            trial = np.maximum(lam, values[:, i])
            trial[i] = 1.0
            delta = float(trial.sum() / d)
            if delta > best_delta:
                best_delta, best_i, best_lam = delta, i, trial
        chosen.append(best_i)
        remaining.remove(best_i)
        lam = best_lam
        current = best_delta
        deltas.append(current)
    return chosen, deltas


def _beam_trace(
    values: np.ndarray, gamma: float, beam_width: int
) -> tuple[list[int], list[float]]:
    d = values.shape[0]
    exhaust = gamma >= 1.0
    # state: (order, deltas, lam)
    states: list[tuple[tuple[int, ...], tuple[float, ...], np.ndarray]] = [
        ((), (), np.zeros(d))
    ]
    for _ in range(d):
        expanded: list[tuple[tuple[int, ...], tuple[float, ...], np.ndarray]] = []
        for order, deltas, lam in states:
            members = set(order)
            for i in range(d):
                if i in members:
                    continue
                trial = np.maximum(lam, values[:, i])
                trial[i] = 1.0
                delta = float(trial.sum() / d)
                expanded.append((order + (i,), deltas + (delta,), trial))
        # Highest delta first; equal deltas fall back to the smaller order tuple,
        # which reproduces greedy's lowest-index tie-break at beam_width=1.
        expanded.sort(key=lambda s: (-s[1][-1], s[0]))
        states = expanded[:beam_width]
        if not exhaust and states[0][1][-1] >= gamma:
            break
    best = max(states, key=lambda s: (s[1][-1], s[1], tuple(-i for i in s[0])))
    return list(best[0]), list(best[1])


def discover_representative(
    sim, gamma: float = 1.0, beam_width: int = 1
) -> SelectionTrace:
    """Grow a representative set until proxy coverage reaches gamma.

    beam_width=1 is plain greedy argmax-gain selection; larger widths keep the
    top partial sets per depth by proxy coverage and return the best final
    trace. gamma=1 always yields a full-length order, even when duplicate
    columns saturate proxy coverage early.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    if beam_width < 1:
        raise ValueError(f"beam_width must be >= 1, got {beam_width}")
    values = _sim_values(sim)
    if beam_width == 1:
        order, deltas = _greedy_trace(values, gamma)
        method = METHOD_GREEDY
    else:
        order, deltas = _beam_trace(values, gamma, beam_width)
        method = f"beam:{beam_width}"
    return SelectionTrace(order=tuple(order), deltas=tuple(deltas), method=method)


def baseline_order(bench: Benchmark, kind: str, seed: int = 0) -> SelectionTrace:
    """Reference selection orders: seeded shuffle or column-mean sorts.

    greedy_min/greedy_max order datasets by ascending/descending mean score
    over present cells; ties keep the original dataset order.
    """
    if kind not in BASELINE_KINDS:
        raise ValueError(f"kind must be one of {BASELINE_KINDS}, got {kind!r}")
    d = bench.n_datasets
    if kind == "random":
        order = np.random.default_rng(seed).permutation(d)
        return SelectionTrace(tuple(int(i) for i in order), None, f"random:{seed}")
    col_means = np.nanmean(bench.scores, axis=0)
    ascending = np.argsort(col_means, kind="stable")
    order = ascending if kind == METHOD_GREEDY_MIN else ascending[::-1]
    return SelectionTrace(tuple(int(i) for i in order), None, kind)


def _win_fractions(matrix: np.ndarray) -> np.ndarray:
    """Per (model, dataset): fraction of other models strictly beaten there."""
    m = matrix.shape[0]
    fractions = np.empty_like(matrix)
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        fractions[:, j] = (col[:, None] > col[None, :]).sum(axis=1) / (m - 1)
    return fractions


def mean_win_rate(matrix) -> np.ndarray:
    """Per model: average fraction of other models strictly beaten, over datasets.

    Exact ties award a win to neither side. Requires a complete grid with at
    least 2 models.
    """
    matrix = as_float_matrix(matrix, "matrix", allow_nan=False)
    m, n = matrix.shape
    if m < 2:
        raise ValueError("mean win rate needs at least 2 models to compare")
    if n < 1:
        raise ValueError("mean win rate needs at least 1 dataset")
    return _win_fractions(matrix).mean(axis=1)


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    ac = a - a.mean()
    bc = b - b.mean()
    denom = np.sqrt(float(ac @ ac) * float(bc @ bc))
    if denom == 0.0:
        return float("nan")
    return float(ac @ bc) / denom


def coverage(bench: Benchmark, subset) -> float:
    """Pearson correlation of subset-based vs full-benchmark mean win rates.

    Returns NaN (with a warning) when either win-rate vector is constant;
    curve construction treats that sentinel as 0.
    """
    check_complete(bench, "coverage")
    idx = check_subset_indices(subset, bench.n_datasets)
    if not idx:
        raise ValueError("coverage of the empty subset is undefined")
    full = mean_win_rate(bench.scores)
    sub = mean_win_rate(bench.scores[:, sorted(idx)])
    eta = _pearson(full, sub)
    if np.isnan(eta):
        warnings.warn(
            "coverage undefined: constant mean win rates", UndefinedCoverageWarning,
            stacklevel=2,
        )
    return eta


def _etas_for_order(
    fractions: np.ndarray, full_mwr: np.ndarray, order: tuple[int, ...]
) -> list[float]:
    etas: list[float] = []
    order = list(order)
    for k in range(1, len(order) + 1):
        sub = fractions[:, order[:k]].mean(axis=1)
        eta = _pearson(full_mwr, sub)
        etas.append(0.0 if np.isnan(eta) else eta)
    return etas


def coverage_curve(bench: Benchmark, trace: SelectionTrace) -> CoverageCurve:
    """Coverage at every prefix size 1..d of a full-length trace."""
    check_complete(bench, "coverage_curve")
    d = bench.n_datasets
    if len(trace) != d:
        raise ValueError(
            f"trace covers {len(trace)} of {d} datasets; run discovery with gamma=1"
        )
    check_subset_indices(trace.order, d, "trace order")
    fractions = _win_fractions(bench.scores)
    full_mwr = fractions.mean(axis=1)
    if np.ptp(full_mwr) == 0.0:
        raise ValueError(
            "coverage undefined: full-benchmark mean win rates are constant"
        )
    return CoverageCurve(tuple(_etas_for_order(fractions, full_mwr, trace.order)), trace)


def random_baseline_curves(
    bench: Benchmark, n_runs: int, base_seed: int
) -> list[CoverageCurve]:
    """Coverage curves for n_runs seeded random orders (seed = base_seed + run)."""
    check_complete(bench, "random_baseline_curves")
    d = bench.n_datasets
    fractions = _win_fractions(bench.scores)
    full_mwr = fractions.mean(axis=1)
    if np.ptp(full_mwr) == 0.0:
        raise ValueError(
            "coverage undefined: full-benchmark mean win rates are constant"
        )
    curves = []
    for run in range(n_runs):
        seed = base_seed + run
        order = tuple(int(i) for i in np.random.default_rng(seed).permutation(d))
        trace = SelectionTrace(order, None, f"random:{seed}")
        curves.append(CoverageCurve(tuple(_etas_for_order(fractions, full_mwr, order)), trace))
    return curves


def anchored_auc(values) -> float:
    """Trapezoidal area: point k at x=k/n, first value held constant to x=0.

    A constant curve integrates to its constant, so curves from different
    sizes are directly comparable.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("need a non-empty 1-D curve")
    if v.size == 1:
        return float(v[0])
    return float((v[0] + 0.5 * (v[:-1] + v[1:]).sum()) / v.size)


def sc_auc(curve: CoverageCurve) -> float:
    """Signed area under coverage vs normalized subset size (higher is better)."""
    return anchored_auc(curve.etas)


def smallest_covering_prefix(curve: CoverageCurve, threshold: float = 0.95) -> int:
    """Least prefix size whose coverage reaches the threshold (d if none)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    for k, eta in enumerate(curve.etas, start=1):
        if eta >= threshold:
            return k
    return curve.n_datasets


def proportion_vs_random(
    system_curve: CoverageCurve,
    random_curves,
    threshold: float = 0.95,
) -> tuple[float, float]:
    """Fractions of random runs the system matches or beats.

    The first value compares full-curve signed AUCs; the second restricts both
    sides to prefix sizes 1..max(s_star, 2), where s_star is the system's
    smallest covering prefix at the threshold. Ties count in the system's
    favor.
    """
    random_curves = list(random_curves)
    if not random_curves:
        raise ValueError("need at least one random curve")
    d = system_curve.n_datasets
    if any(c.n_datasets != d for c in random_curves):
        raise ValueError("all curves must cover the same benchmark size")
    system_auc = sc_auc(system_curve)
    auc_prop = float(np.mean([sc_auc(c) <= system_auc for c in random_curves]))
    window = max(smallest_covering_prefix(system_curve, threshold), 2)
    system_prefix = anchored_auc(system_curve.etas[:window])
    max2_prop = float(
        np.mean([anchored_auc(c.etas[:window]) <= system_prefix for c in random_curves])
    )
    return auc_prop, max2_prop


class RepresentativeSubsetSelector(TransformerMixin, BaseEstimator):
    """Column selector for normalized score matrices.

    fit(X) computes the similarity matrix for `measure` over the columns of X
    (an m x d grid of scores in [0, 1], no missing cells) and runs greedy or
    beam discovery; transform(X) returns the selected columns in selection
    order. With gamma=1 the full column permutation is retained, which is what
    coverage-curve construction expects.
    """

    def __init__(self, measure: str = "pearson", gamma: float = 1.0, beam_width: int = 1):
        self.measure = measure
        self.gamma = gamma
        self.beam_width = beam_width

    def fit(self, X, y=None):
        X = as_float_matrix(X, "X", allow_nan=False)
        bench = Benchmark(
            tuple(f"m{i}" for i in range(X.shape[0])),
            tuple(f"d{j}" for j in range(X.shape[1])),
            X,
        )
        self.similarity_ = similarity_matrix(bench, Measure(self.measure))
        self.trace_ = discover_representative(
            self.similarity_, gamma=self.gamma, beam_width=self.beam_width
        )
        self.order_ = np.array(self.trace_.order, dtype=int)
        self.deltas_ = np.array(self.trace_.deltas, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "order_")
        X = as_float_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, selector was fitted with {self.n_features_in_}"
            )
        return X[:, self.order_]

    def get_support(self) -> np.ndarray:
        """Boolean mask over input columns marking the selected datasets."""
        check_is_fitted(self, "order_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.order_] = True
        return mask
