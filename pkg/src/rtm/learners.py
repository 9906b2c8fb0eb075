"""Base regression learners, feature selection, PLS and model ranking.

All learners are implemented directly on numpy so that the contracts the rest
of the package relies on hold exactly: deterministic output under a fixed
seed, documented tie-breaking (lowest training index for KNN distance ties,
stable ordering in grid ranking) and a shared standardization step.

Learner kinds:

* ``rr``    ridge regression, closed form, unpenalized intercept
* ``knn``   k-nearest neighbours on standardized features
* ``tree``  extremely randomized trees (uniform random feature + cut)
* ``ada``   AdaBoost.R2 with exponential loss over depth-1 stumps
* ``const`` training-mean baseline

Each ModelSpec may add preprocessing: recursive feature elimination down to
``n_features`` columns and/or a NIPALS PLS projection to ``n_components``
scores (FS first, then PLS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

STD_FLOOR = 1e-12


class Scaler:
    """Per-column standardization with the training mean and population std."""

    def __init__(self, X: np.ndarray):
        X = np.asarray(X, dtype=float)
        self.mean_ = X.mean(axis=0)
        self.std_ = np.maximum(X.std(axis=0), STD_FLOOR)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean_) / self.std_

    def inverse_transform(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.std_ + self.mean_


@dataclass(frozen=True)
class ModelSpec:
    """A learner kind plus its hyperparameters and preprocessing choices."""

    kind: str
    alpha: float | None = None  # rr penalty
    k: int | None = None  # knn neighbours
    min_leaf: int = 1
    min_split: int = 2
    n_estimators: int = 500
    learning_rate: float = 1.0
    n_features: int | None = None  # FS: keep this many columns
    n_components: int | None = None  # PLS: project to this many scores
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("rr", "knn", "tree", "ada", "const"):
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if self.kind == "rr" and (self.alpha is None or self.alpha < 0):
            raise ValueError("rr needs alpha >= 0")
        if self.kind == "knn" and (self.k is None or self.k < 1):
            raise ValueError("knn needs k >= 1")

    def label(self) -> str:
        parts = [self.kind]
        if self.kind == "rr":
            parts.append(f"alpha={self.alpha:g}")
        elif self.kind == "knn":
            parts.append(f"k={self.k}")
        elif self.kind == "tree":
            parts.append(f"leaf={self.min_leaf},trees={self.n_estimators}")
        elif self.kind == "ada":
            parts.append(f"rounds={self.n_estimators}")
        name = "{}({})".format(parts[0], ",".join(parts[1:]))
        if self.n_features is not None:
            name += f"+fs{self.n_features}"
        if self.n_components is not None:
            name += f"+pls{self.n_components}"
        return name


# ---------------------------------------------------------------------------
# Inner learners.  Each operates on the already-standardized design matrix.


def _ridge_coefs(Z: np.ndarray, y_centered: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0.0:
        return np.linalg.lstsq(Z, y_centered, rcond=None)[0]
    d = Z.shape[1]
    return np.linalg.solve(Z.T @ Z + alpha * np.eye(d), Z.T @ y_centered)


class _Ridge:
    def __init__(self, Z, y, spec):
        self.intercept = float(np.mean(y))
        self.coefs = _ridge_coefs(Z, y - self.intercept, spec.alpha)

    def predict(self, Z):
        return Z @ self.coefs + self.intercept


class _Knn:
    def __init__(self, Z, y, spec):
        self.Z = Z
        self.y = np.asarray(y, dtype=float)
        self.k = min(spec.k, len(y))

    def predict(self, Z):
        d2 = ((Z[:, None, :] - self.Z[None, :, :]) ** 2).sum(axis=2)
        # stable argsort: equal distances resolve to the lower training index
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        return self.y[nearest].mean(axis=1)


class _Const:
    def __init__(self, Z, y, spec):
        self.value = float(np.mean(y))

    def predict(self, Z):
        return np.full(len(Z), self.value)


class _TreeNode:
    __slots__ = ("feature", "cut", "left", "right", "value")

    def __init__(self, value=None, feature=None, cut=None, left=None, right=None):
        self.value = value
        self.feature = feature
        self.cut = cut
        self.left = left
        self.right = right


def _grow_tree(Z, y, idx, min_leaf, min_split, rng):
    n = len(idx)
    targets = y[idx]
    if n < min_split or n < 2 * min_leaf or targets.min() == targets.max():
        return _TreeNode(value=float(targets.mean()))
    rows = Z[idx]
    lo = rows.min(axis=0)
    hi = rows.max(axis=0)
    candidates = np.flatnonzero(hi > lo)
    if candidates.size == 0:
        return _TreeNode(value=float(y[idx].mean()))
    for _ in range(10):
        feat = int(candidates[rng.integers(candidates.size)])
        cut = rng.uniform(lo[feat], hi[feat])
        if cut <= lo[feat]:
            cut = np.nextafter(lo[feat], hi[feat])
        mask = rows[:, feat] < cut
        n_left = int(mask.sum())
        if min_leaf <= n_left <= n - min_leaf:
            left = _grow_tree(Z, y, idx[mask], min_leaf, min_split, rng)
            right = _grow_tree(Z, y, idx[~mask], min_leaf, min_split, rng)
            return _TreeNode(feature=feat, cut=float(cut), left=left, right=right)
    return _TreeNode(value=float(y[idx].mean()))


def _tree_predict(node, Z, idx, out):
    if node.value is not None:
        out[idx] = node.value
        return
    mask = Z[idx, node.feature] < node.cut
    _tree_predict(node.left, Z, idx[mask], out)
    _tree_predict(node.right, Z, idx[~mask], out)


class _ExtraTrees:
    """Totally randomized trees: uniform random feature, uniform random cut."""

    def __init__(self, Z, y, spec):
        y = np.asarray(y, dtype=float)
        seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_estimators)
        idx = np.arange(len(y))
        self.trees = [
            _grow_tree(Z, y, idx, spec.min_leaf, spec.min_split, np.random.default_rng(s))
            for s in seeds
        ]

    def predict(self, Z):
        total = np.zeros(len(Z))
        idx = np.arange(len(Z))
        out = np.empty(len(Z))
        for tree in self.trees:
            _tree_predict(tree, Z, idx, out)
            total += out
        return total / len(self.trees)


class _Stump:
    __slots__ = ("feature", "cut", "left", "right")

    def predict(self, Z):
        if self.feature is None:
            return np.full(len(Z), self.left)
        return np.where(Z[:, self.feature] <= self.cut, self.left, self.right)


def _fit_stump(Z, y, w):
    """Depth-1 regression stump minimizing weighted squared error."""
    best = _Stump()
    best.feature, best.cut = None, None
    best.left = best.right = float(np.average(y, weights=w))
    total_w = w.sum()
    total_wy = (w * y).sum()
    base_sse = (w * y * y).sum() - total_wy**2 / total_w
    best_sse = base_sse
    for j in range(Z.shape[1]):
        order = np.argsort(Z[:, j], kind="stable")
        zv = Z[order, j]
        wv = w[order]
        wy = wv * y[order]
        cw = np.cumsum(wv)
        cwy = np.cumsum(wy)
        cwyy = np.cumsum(wy * y[order])
        # split after position i (i.e. between zv[i] and zv[i+1]) where values differ
        splits = np.flatnonzero(zv[:-1] < zv[1:])
        for i in splits:
            lw, lwy, lwyy = cw[i], cwy[i], cwyy[i]
            rw = total_w - lw
            rwy = total_wy - lwy
            rwyy = cwyy[-1] - lwyy
            sse = (lwyy - lwy**2 / lw) + (rwyy - rwy**2 / rw)
            if sse < best_sse - 1e-15:
                best_sse = sse
                best.feature = j
                best.cut = float((zv[i] + zv[i + 1]) / 2.0)
                best.left = float(lwy / lw)
                best.right = float(rwy / rw)
    return best


class _AdaBoostR2:
    """Drucker's AdaBoost.R2 with exponential loss and weighted-median output."""

    def __init__(self, Z, y, spec):
        y = np.asarray(y, dtype=float)
        n = len(y)
        w = np.full(n, 1.0 / n)
        self.stumps: list[_Stump] = []
        self.alphas: list[float] = []
        for _ in range(spec.n_estimators):
            stump = _fit_stump(Z, y, w)
            err = np.abs(stump.predict(Z) - y)
            d = err.max()
            if d <= 1e-15:
                self.stumps.append(stump)
                self.alphas.append(1.0)
                break
            loss = 1.0 - np.exp(-err / d)
            avg_loss = float((w * loss).sum())
            if avg_loss >= 0.5:
                if not self.stumps:
                    self.stumps.append(stump)
                    self.alphas.append(1.0)
                break
            beta = avg_loss / (1.0 - avg_loss)
            self.stumps.append(stump)
            self.alphas.append(spec.learning_rate * math.log(1.0 / beta))
            w = w * beta ** ((1.0 - loss) * spec.learning_rate)
            w /= w.sum()

    def predict(self, Z):
        preds = np.stack([s.predict(Z) for s in self.stumps])  # (rounds, n)
        alphas = np.asarray(self.alphas)
        order = np.argsort(preds, axis=0, kind="stable")
        cum = np.cumsum(alphas[order], axis=0)
        pick = np.argmax(cum >= 0.5 * alphas.sum(), axis=0)
        cols = np.arange(preds.shape[1])
        return preds[order[pick, cols], cols]


_INNER = {"rr": _Ridge, "knn": _Knn, "tree": _ExtraTrees, "ada": _AdaBoostR2, "const": _Const}


# ---------------------------------------------------------------------------
# Preprocessing.


def select_features(X: np.ndarray, y: np.ndarray, m: int, inner_alpha: float = 1.0) -> tuple[int, ...]:
    """Recursive feature elimination down to ``m`` columns.

    Repeatedly fits ridge on the standardized remaining columns and drops the
    one with the smallest absolute coefficient (ties drop the higher index).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not 1 <= m <= X.shape[1]:
        raise ValueError(f"m must be in [1, {X.shape[1]}]")
    remaining = list(range(X.shape[1]))
    while len(remaining) > m:
        sub = X[:, remaining]
        Z = Scaler(sub).transform(sub)
        coefs = np.abs(_ridge_coefs(Z, y - y.mean(), inner_alpha))
        # last occurrence of the minimum -> ties drop the higher index
        drop = len(coefs) - 1 - int(np.argmin(coefs[::-1]))
        del remaining[drop]
    return tuple(remaining)


class PlsProjection:
    """NIPALS PLS1: sequence of weight/loading vectors on standardized X."""

    def __init__(self, Z: np.ndarray, y: np.ndarray, n_components: int):
        if n_components < 1:
            raise ValueError("n_components must be >= 1")
        Xk = np.array(Z, dtype=float)
        yk = np.asarray(y, dtype=float) - float(np.mean(y))
        self.y_mean = float(np.mean(y))
        W, P, Q = [], [], []
        for _ in range(min(n_components, Z.shape[1])):
            w = Xk.T @ yk
            nw = np.linalg.norm(w)
            if nw < 1e-12:
                break
            w = w / nw
            t = Xk @ w
            tt = float(t @ t)
            if tt < 1e-12:
                break
            p = Xk.T @ t / tt
            q = float(yk @ t) / tt
            Xk = Xk - np.outer(t, p)
            yk = yk - q * t
            W.append(w)
            P.append(p)
            Q.append(q)
        if not W:
            raise ValueError("no PLS component could be extracted (constant input)")
        self.W = np.column_stack(W)
        self.P = np.column_stack(P)
        self.Q = np.asarray(Q)

    @property
    def n_components(self) -> int:
        return self.W.shape[1]

    def transform(self, Z: np.ndarray) -> np.ndarray:
        Zk = np.array(Z, dtype=float)
        scores = np.empty((len(Zk), self.n_components))
        for k in range(self.n_components):
            t = Zk @ self.W[:, k]
            scores[:, k] = t
            Zk -= np.outer(t, self.P[:, k])
        return scores

    def predict(self, Z: np.ndarray) -> np.ndarray:
        """Regression through the projection: y_mean + scores @ q."""
        return self.y_mean + self.transform(Z) @ self.Q


class StandardizedPls:
    """PLS fitted on standardized X; transform/predict accept raw feature rows."""

    def __init__(self, X: np.ndarray, y: np.ndarray, n_components: int):
        self.scaler = Scaler(X)
        self.projection = PlsProjection(self.scaler.transform(X), y, n_components)

    @property
    def n_components(self) -> int:
        return self.projection.n_components

    def transform(self, X: np.ndarray) -> np.ndarray:
        return self.projection.transform(self.scaler.transform(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.projection.predict(self.scaler.transform(X))


def fit_pls(X, y, n_components: int) -> StandardizedPls:
    return StandardizedPls(X, y, n_components)


# ---------------------------------------------------------------------------
# The trained-model wrapper and the public train_* entry points.


class TrainedModel:
    """A fitted spec: scaler + optional FS/PLS + the inner learner."""

    def __init__(self, spec: ModelSpec, X: np.ndarray, y: np.ndarray):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError("X must be 2-d with one row per target")
        if len(y) < 2:
            raise ValueError("need at least 2 training rows")
        self.spec = spec
        self.n_features_in = X.shape[1]
        self.selected: tuple[int, ...] | None = None
        if spec.n_features is not None:
            # clamp so grid presets written for the full manifest stay valid
            self.selected = select_features(X, y, min(spec.n_features, X.shape[1]))
            X = X[:, self.selected]
        self.scaler = Scaler(X)
        Z = self.scaler.transform(X)
        self.pls: PlsProjection | None = None
        if spec.n_components is not None:
            self.pls = PlsProjection(Z, y, spec.n_components)
            Z = self.pls.transform(Z)
        self.inner = _INNER[spec.kind](Z, y, spec)

    def _design(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in:
            raise ValueError(f"expected {self.n_features_in} feature columns")
        if self.selected is not None:
            X = X[:, self.selected]
        Z = self.scaler.transform(X)
        if self.pls is not None:
            Z = self.pls.transform(Z)
        return Z

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.inner.predict(self._design(X))


def fit_model(spec: ModelSpec, X, y) -> TrainedModel:
    return TrainedModel(spec, X, y)


def train_ridge(X, y, alpha: float) -> TrainedModel:
    return fit_model(ModelSpec("rr", alpha=alpha), X, y)


def train_knn(X, y, k: int) -> TrainedModel:
    return fit_model(ModelSpec("knn", k=k), X, y)


def train_extra_trees(X, y, spec: ModelSpec | None = None, **kwargs) -> TrainedModel:
    spec = replace(spec or ModelSpec("tree"), kind="tree", **kwargs)
    return fit_model(spec, X, y)


def train_adaboost_r2(X, y, spec: ModelSpec | None = None, **kwargs) -> TrainedModel:
    spec = replace(spec or ModelSpec("ada"), kind="ada", **kwargs)
    return fit_model(spec, X, y)


# ---------------------------------------------------------------------------
# Cross-validation, grid search, top-k averaging.


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle then contiguous split; fold sizes differ by at most 1."""
    if folds < 2 or folds > n:
        raise ValueError(f"folds must be in [2, {n}]")
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def _fold_score(pred: np.ndarray, gold: np.ndarray, scoring: str) -> float:
    if scoring == "mae":
        return float(np.mean(np.abs(pred - gold)))
    if scoring == "neg_r":
        sp, sg = pred.std(), gold.std()
        if sp == 0.0 or sg == 0.0:
            return 0.0  # uninformative fold: treat as zero correlation
        r = float(np.mean((pred - pred.mean()) * (gold - gold.mean())) / (sp * sg))
        return -r
    raise ValueError(f"unknown scoring {scoring!r}")


def cross_validate(
    spec: ModelSpec, X, y, folds: int = 7, seed: int = 0, scoring: str = "mae"
) -> tuple[float, list[float]]:
    """Mean held-out score over a seeded contiguous fold split."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    parts = fold_indices(len(y), folds, seed)
    scores = []
    for i, test_idx in enumerate(parts):
        train_idx = np.concatenate([p for j, p in enumerate(parts) if j != i])
        model = fit_model(spec, X[train_idx], y[train_idx])
        scores.append(_fold_score(model.predict(X[test_idx]), y[test_idx], scoring))
    return float(np.mean(scores)), scores


def grid_search(
    specs: list[ModelSpec], X, y, folds: int = 7, seed: int = 0, scoring: str = "mae"
) -> list[tuple[ModelSpec, float]]:
    """Cross-validate every spec and rank ascending; ties keep grid order."""
    if not specs:
        raise ValueError("empty grid")
    scored = [(spec, cross_validate(spec, X, y, folds, seed, scoring)[0]) for spec in specs]
    return sorted(scored, key=lambda pair: pair[1])  # stable -> grid order on ties


class AveragedModel:
    """Unweighted mean of the top-k ranked specs, each refit on all data."""

    def __init__(self, ranked: list[tuple[ModelSpec, float]], k: int, X, y):
        if not 1 <= k <= len(ranked):
            raise ValueError(f"k must be in [1, {len(ranked)}]")
        self.members = [fit_model(spec, X, y) for spec, _ in ranked[:k]]

    def predict(self, X) -> np.ndarray:
        return np.mean([m.predict(X) for m in self.members], axis=0)


def average_top_k(ranked, k: int, X, y) -> AveragedModel:
    return AveragedModel(ranked, k, X, y)


# Default hyperparameter grids.  The ranges below are the package defaults;
# "small" is a fast preset for tests and demos.

def default_grid(seed: int = 0, tree_estimators: int = 500, ada_estimators: int = 500) -> list[ModelSpec]:
    specs: list[ModelSpec] = []
    for alpha in (0.01, 0.1, 1.0, 10.0, 100.0):
        specs.append(ModelSpec("rr", alpha=alpha, seed=seed))
        specs.append(ModelSpec("rr", alpha=alpha, n_features=8, seed=seed))
        specs.append(ModelSpec("rr", alpha=alpha, n_features=16, seed=seed))
        specs.append(ModelSpec("rr", alpha=alpha, n_components=2, seed=seed))
        specs.append(ModelSpec("rr", alpha=alpha, n_components=4, seed=seed))
        specs.append(ModelSpec("rr", alpha=alpha, n_components=8, seed=seed))
    for k in (1, 3, 5, 9, 15):
        specs.append(ModelSpec("knn", k=k, seed=seed))
        specs.append(ModelSpec("knn", k=k, n_components=4, seed=seed))
    for min_leaf in (1, 3, 5):
        specs.append(
            ModelSpec("tree", min_leaf=min_leaf, min_split=max(2, 2 * min_leaf),
                      n_estimators=tree_estimators, seed=seed)
        )
    specs.append(ModelSpec("ada", n_estimators=ada_estimators, seed=seed))
    return specs


def small_grid(seed: int = 0) -> list[ModelSpec]:
    return [
        ModelSpec("rr", alpha=0.1, seed=seed),
        ModelSpec("rr", alpha=1.0, seed=seed),
        ModelSpec("rr", alpha=10.0, seed=seed),
        ModelSpec("rr", alpha=1.0, n_features=8, seed=seed),
        ModelSpec("knn", k=3, seed=seed),
        ModelSpec("knn", k=5, seed=seed),
        ModelSpec("tree", min_leaf=3, min_split=6, n_estimators=80, seed=seed),
    ]
