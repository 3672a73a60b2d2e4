"""Held-out performance prediction from a representative subset.

Regressors map a model's scores on the chosen datasets to its scores on the
rest of the benchmark: closed-form ridge with an unpenalized intercept,
uniform-weight k-nearest-neighbors, and small ReLU multilayer perceptrons
trained by seeded full-batch gradient descent. All predictions are clamped to
[0, 1] since scores are normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .benchio import Benchmark, ModelSplit, check_complete
from .errors import ConfigError
from .repset import SelectionTrace, anchored_auc
from .validation import as_float_matrix, check_equal_length

PREDICTOR_KINDS = ("ridge", "knn", "mlp1", "mlp2")
_MLP_HIDDEN = {"mlp1": (12,), "mlp2": (12, 12)}

DEFAULT_RIDGE_LAMBDA = 1.0
DEFAULT_KNN_K = 5


@dataclass(frozen=True)
class PredictorSpec:
    """Which regressor to train and its fixed hyperparameters."""

    kind: str
    ridge_lambda: float = DEFAULT_RIDGE_LAMBDA
    knn_k: int = DEFAULT_KNN_K
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PREDICTOR_KINDS:
            raise ConfigError(f"predictor kind must be one of {PREDICTOR_KINDS}, got {self.kind!r}")
        if self.ridge_lambda < 0.0:
            raise ConfigError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")
        if self.knn_k < 1:
            raise ConfigError(f"knn_k must be >= 1, got {self.knn_k}")

    @property
    def mlp_hidden(self) -> tuple[int, ...]:
        """Hidden layer widths; fixed per kind (empty for non-MLP regressors)."""
        return _MLP_HIDDEN.get(self.kind, ())


@dataclass(frozen=True)
class Predictor:
    """A trained regressor bound to its input/output dataset ids."""

    spec: PredictorSpec
    input_ids: tuple[str, ...]
    output_ids: tuple[str, ...]
    model: BaseEstimator


@dataclass(frozen=True)
class MseCurve:
    """Held-out test MSE at every prefix size 1..d-1 of a selection order."""

    sizes: tuple[int, ...]
    mses: tuple[float, ...]
    spec: PredictorSpec
    noise_sigma: float = 0.0

    def __post_init__(self):
        if len(self.sizes) != len(self.mses):
            raise ValueError("one MSE per prefix size required")
        if any(m < 0.0 for m in self.mses):
            raise ValueError("MSE values must be non-negative")


@dataclass(frozen=True)
class KFoldStability:
    """Per-fold curve areas plus their mean and (population) standard deviation."""

    fold_aucs: tuple[float, ...]
    mean: float
    std: float


def _clip01(values: np.ndarray) -> np.ndarray:
    return np.clip(values, 0.0, 1.0)


class RidgeScorePredictor(RegressorMixin, BaseEstimator):
    """Closed-form multi-output ridge regression; the intercept is unpenalized."""

    def __init__(self, alpha: float = DEFAULT_RIDGE_LAMBDA):
        self.alpha = alpha

    def fit(self, X, Y):
        X = as_float_matrix(X, "X", allow_nan=False)
        Y = as_float_matrix(Y, "Y", allow_nan=False)
        check_equal_length(X, Y, "X and Y")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        x_mean = X.mean(axis=0)
        y_mean = Y.mean(axis=0)
        Xc = X - x_mean
        Yc = Y - y_mean
        if self.alpha > 0.0:
            gram = Xc.T @ Xc + self.alpha * np.eye(X.shape[1])
            coef = np.linalg.solve(gram, Xc.T @ Yc)
        else:
            coef, _, _, _ = np.linalg.lstsq(Xc, Yc, rcond=None)
        self.coef_ = coef
        self.intercept_ = y_mean - x_mean @ coef
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = as_float_matrix(X, "X", allow_nan=False)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return _clip01(X @ self.coef_ + self.intercept_)


class KNNScorePredictor(RegressorMixin, BaseEstimator):
    """Uniform-weight k-nearest-neighbors regression under Euclidean distance.

    The effective neighbor count is min(n_neighbors, training set size).
    """

    def __init__(self, n_neighbors: int = DEFAULT_KNN_K):
        self.n_neighbors = n_neighbors

    def fit(self, X, Y):
        X = as_float_matrix(X, "X", allow_nan=False)
        Y = as_float_matrix(Y, "Y", allow_nan=False)
        check_equal_length(X, Y, "X and Y")
        if self.n_neighbors < 1:
            raise ValueError(f"n_neighbors must be >= 1, got {self.n_neighbors}")
        self.X_ = X
        self.Y_ = Y
        self.effective_k_ = min(self.n_neighbors, X.shape[0])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = as_float_matrix(X, "X", allow_nan=False)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        sq_dists = ((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
        # Stable argsort keeps equal-distance neighbors in training order.
        neighbors = np.argsort(sq_dists, axis=1, kind="stable")[:, : self.effective_k_]
        return _clip01(self.Y_[neighbors].mean(axis=1))


class MLPScorePredictor(RegressorMixin, BaseEstimator):
    """ReLU feedforward net trained by full-batch gradient descent on MSE.

    Weights start uniform in +-1/sqrt(fan_in) from a seeded generator, biases
    at zero; training stops after max_iter steps or once the loss improves by
    less than tol. Deterministic for a fixed seed.
    """

    def __init__(
        self,
        hidden_layer_sizes: tuple[int, ...] = (12,),
        learning_rate: float = 0.01,
        max_iter: int = 5000,
        tol: float = 1e-8,
        seed: int = 0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed

    def _init_params(self, n_in: int, n_out: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
        rng = np.random.default_rng(self.seed)
        sizes = [n_in, *self.hidden_layer_sizes, n_out]
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return weights, biases

    def _forward(self, X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
        activations = [X]
        pre_acts = []
        h = X
        for W, b in zip(self.weights_[:-1], self.biases_[:-1]):
            z = h @ W + b
            pre_acts.append(z)
            h = np.maximum(z, 0.0)
            activations.append(h)
        out = h @ self.weights_[-1] + self.biases_[-1]
        return out, activations, pre_acts

    def loss_and_gradients(
        self, X, Y
    ) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
        """Training loss and its analytic gradients at the current parameters.

        Returns (loss, weight_grads, bias_grads); exposed so the gradients can
        be verified against finite differences.
        """
        check_is_fitted(self, "weights_")
        X = as_float_matrix(X, "X", allow_nan=False)
        Y = as_float_matrix(Y, "Y", allow_nan=False)
        out, activations, pre_acts = self._forward(X)
        err = out - Y
        loss = float(np.mean(err**2))
        delta = 2.0 * err / err.size
        weight_grads: list[np.ndarray] = [np.empty(0)] * len(self.weights_)
        bias_grads: list[np.ndarray] = [np.empty(0)] * len(self.biases_)
        for layer in range(len(self.weights_) - 1, -1, -1):
            weight_grads[layer] = activations[layer].T @ delta
            bias_grads[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights_[layer].T) * (pre_acts[layer - 1] > 0.0)
        return loss, weight_grads, bias_grads

    def fit(self, X, Y):
        X = as_float_matrix(X, "X", allow_nan=False)
        Y = as_float_matrix(Y, "Y", allow_nan=False)
        check_equal_length(X, Y, "X and Y")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be >= 0, got {self.max_iter}")
        self.weights_, self.biases_ = self._init_params(X.shape[1], Y.shape[1])
        self.n_features_in_ = X.shape[1]
        prev_loss = np.inf
        n_iter = 0
        for n_iter in range(1, self.max_iter + 1):
            loss, weight_grads, bias_grads = self.loss_and_gradients(X, Y)
            if prev_loss - loss < self.tol:
                break
            for layer in range(len(self.weights_)):
                self.weights_[layer] -= self.learning_rate * weight_grads[layer]
                self.biases_[layer] -= self.learning_rate * bias_grads[layer]
            prev_loss = loss
        self.n_iter_ = n_iter
        return self

    def predict(self, X):
        check_is_fitted(self, "weights_")
        X = as_float_matrix(X, "X", allow_nan=False)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        out, _, _ = self._forward(X)
        return _clip01(out)


def make_estimator(spec: PredictorSpec) -> BaseEstimator:
    """Fresh unfitted estimator for a spec."""
    if spec.kind == "ridge":
        return RidgeScorePredictor(alpha=spec.ridge_lambda)
    if spec.kind == "knn":
        return KNNScorePredictor(n_neighbors=spec.knn_k)
    return MLPScorePredictor(hidden_layer_sizes=spec.mlp_hidden, seed=spec.seed)


def train_predictor(
    train_inputs,
    train_targets,
    spec: PredictorSpec,
    input_ids: tuple[str, ...] | None = None,
    output_ids: tuple[str, ...] | None = None,
) -> Predictor:
    """Fit a regressor from subset scores to remaining-dataset scores."""
    X = as_float_matrix(train_inputs, "train_inputs", allow_nan=False)
    Y = as_float_matrix(train_targets, "train_targets", allow_nan=False)
    check_equal_length(X, Y, "train_inputs and train_targets")
    if X.shape[0] < 1:
        raise ValueError("need at least one training model")
    if X.shape[1] < 1 or Y.shape[1] < 1:
        raise ValueError("need at least one input and one output dataset")
    if input_ids is None:
        input_ids = tuple(str(i) for i in range(X.shape[1]))
    if output_ids is None:
        output_ids = tuple(str(j) for j in range(Y.shape[1]))
    if len(input_ids) != X.shape[1]:
        raise ValueError(f"{len(input_ids)} input ids for {X.shape[1]} input columns")
    if len(output_ids) != Y.shape[1]:
        raise ValueError(f"{len(output_ids)} output ids for {Y.shape[1]} output columns")
    model = make_estimator(spec).fit(X, Y)
    return Predictor(spec=spec, input_ids=tuple(input_ids), output_ids=tuple(output_ids), model=model)


def predict_scores(pred: Predictor, inputs) -> np.ndarray:
    """Predicted remaining-dataset scores, one row per input row, in [0, 1]."""
    X = as_float_matrix(inputs, "inputs", allow_nan=False)
    if X.shape[1] != len(pred.input_ids):
        raise ValueError(
            f"inputs have {X.shape[1]} columns, predictor was trained on {len(pred.input_ids)}"
        )
    return pred.model.predict(X)


def _mse_over_sizes(
    train_scores: np.ndarray,
    test_scores: np.ndarray,
    order: tuple[int, ...],
    spec: PredictorSpec,
) -> list[float]:
    d = train_scores.shape[1]
    mses: list[float] = []
    for k in range(1, d):
        chosen = sorted(order[:k])
        rest = sorted(set(range(d)) - set(chosen))
        model = make_estimator(spec).fit(train_scores[:, chosen], train_scores[:, rest])
        predicted = model.predict(test_scores[:, chosen])
        mses.append(float(np.mean((predicted - test_scores[:, rest]) ** 2)))
    return mses


def mse_curve(
    split: ModelSplit,
    trace: SelectionTrace,
    spec: PredictorSpec,
    noise_sigma: float = 0.0,
) -> MseCurve:
    """Test MSE at every prefix size 1..d-1 of a full-length selection order.

    The trace must come from discovery on the train half alone; the test
    models only ever appear as evaluation rows.
    """
    check_complete(split.train, "mse_curve (train half)")
    check_complete(split.test, "mse_curve (test half)")
    d = split.train.n_datasets
    if d < 2:
        raise ValueError("need at least 2 datasets to trace an MSE curve")
    if len(trace) != d:
        raise ValueError(f"trace covers {len(trace)} of {d} datasets; need the full order")
    mses = _mse_over_sizes(split.train.scores, split.test.scores, trace.order, spec)
    return MseCurve(tuple(range(1, d)), tuple(mses), spec, noise_sigma)


def auc_mse(curve: MseCurve) -> float:
    """Area under test MSE vs normalized subset size (lower is better)."""
    return anchored_auc(curve.mses)


def kfold_stability(
    train_bench: Benchmark,
    trace: SelectionTrace,
    spec: PredictorSpec,
    k_folds: int,
) -> KFoldStability:
    """Curve-area spread across seeded k-fold splits of the training models.

    Each fold serves once as the held-out model set; folds are assigned by a
    generator seeded from spec.seed, so results are reproducible.
    """
    check_complete(train_bench, "kfold_stability")
    m = train_bench.n_models
    if not 2 <= k_folds <= m:
        raise ConfigError(f"k_folds must be in [2, {m}] for {m} training models, got {k_folds}")
    d = train_bench.n_datasets
    if len(trace) != d:
        raise ValueError(f"trace covers {len(trace)} of {d} datasets; need the full order")
    perm = np.random.default_rng(spec.seed).permutation(m)
    folds = np.array_split(perm, k_folds)
    aucs: list[float] = []
    for fold in folds:
        heldout = np.sort(fold)
        fit_rows = np.sort(np.setdiff1d(perm, fold))
        mses = _mse_over_sizes(
            train_bench.scores[fit_rows, :], train_bench.scores[heldout, :], trace.order, spec
        )
        aucs.append(anchored_auc(mses))
    values = np.array(aucs)
    return KFoldStability(tuple(aucs), float(values.mean()), float(values.std()))
