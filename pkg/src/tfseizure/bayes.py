"""Gaussian Naive Bayes with stratified train/test splitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from tfseizure.errors import InputError, TrainingError
from tfseizure.features import FeatureMatrix, FeatureVector

VARIANCE_FLOOR_SCALE = 1e-9


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.3
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise InputError("train_fraction must lie in (0, 1)")


@dataclass
class GnbModel:
    """Per-class feature Gaussians and class priors.

    ``means[c]`` and ``variances[c]`` are arrays aligned with ``feature_names``.
    """

    classes: list
    priors: dict
    feature_names: tuple
    means: dict
    variances: dict
    variance_floor: float = field(default=0.0)

    def log_scores(self, x) -> np.ndarray:
        """Unnormalized log posterior of every class, in ``classes`` order."""
        x = np.asarray(x, dtype=float)
        scores = []
        for c in self.classes:
            mu, var = self.means[c], self.variances[c]
            ll = -0.5 * np.log(2 * np.pi * var) - (x - mu) ** 2 / (2 * var)
            scores.append(math.log(self.priors[c]) + math.fsum(ll))
        return np.array(scores)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split(matrix: FeatureMatrix, spec: SplitSpec) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Seeded train/test partition.

    With ``stratified`` each class contributes ``round(train_fraction * size)``
    rows to the training set. Rows are ordered by source id before shuffling,
    so the partition depends only on the seed and the row contents.
    """
    by_class: dict = {}
    for i, label in enumerate(matrix.labels):
        by_class.setdefault(label, []).append(i)
    for label, rows in by_class.items():
        if len(rows) < 2:
            raise InputError(f"class {label!r} has fewer than 2 rows")
    rng = np.random.default_rng(spec.seed)

    def ordered(rows):
        return sorted(rows, key=lambda i: (matrix.source_ids[i], i))

    train: list = []
    if spec.stratified:
        for label in sorted(by_class):
            rows = ordered(by_class[label])
            n_train = _round_half_up(spec.train_fraction * len(rows))
            if n_train < 2:
                raise InputError(f"class {label!r} would keep fewer than 2 training rows")
            perm = rng.permutation(len(rows))
            train.extend(rows[j] for j in perm[:n_train])
    else:
        rows = ordered(range(len(matrix)))
        n_train = _round_half_up(spec.train_fraction * len(rows))
        perm = rng.permutation(len(rows))
        train = [rows[j] for j in perm[:n_train]]
        for label in by_class:
            if sum(matrix.labels[i] == label for i in train) < 2:
                raise InputError(f"class {label!r} would keep fewer than 2 training rows")
    train_set = set(train)
    train_rows = sorted(train, key=lambda i: (matrix.source_ids[i], i))
    test_rows = [i for i in ordered(range(len(matrix))) if i not in train_set]
    return matrix.take(train_rows), matrix.take(test_rows)


def fit(train: FeatureMatrix) -> GnbModel:
    """Population mean and variance per class and feature, with a variance floor.

    Sums use ``math.fsum`` so the fitted model does not depend on row order.
    """
    classes = train.classes
    if len(classes) < 2:
        raise TrainingError("training data must contain at least two classes")
    means, variances, priors = {}, {}, {}
    n_total = len(train)
    labels = np.array(train.labels)
    for c in classes:
        block = train.X[labels == c]
        n = block.shape[0]
        if n < 2:
            raise TrainingError(f"class {c!r} has fewer than 2 training rows")
        mu = np.array([math.fsum(col) / n for col in block.T])
        var = np.array([math.fsum((col - m) ** 2) / n for col, m in zip(block.T, mu)])
        means[c], variances[c] = mu, var
        priors[c] = n / n_total

    all_var = np.concatenate([variances[c] for c in classes])
    mean_var = math.fsum(all_var) / all_var.size if all_var.size else 0.0
    floor = VARIANCE_FLOOR_SCALE * mean_var if mean_var > 0 else VARIANCE_FLOOR_SCALE
    for c in classes:
        variances[c] = np.maximum(variances[c], floor)
    return GnbModel(classes, priors, train.names, means, variances, floor)


def _feature_array(model: GnbModel, v) -> np.ndarray:
    if isinstance(v, FeatureVector):
        names, values = v.names, v.as_array()
    elif isinstance(v, dict):
        names, values = tuple(v), np.array(list(v.values()), dtype=float)
    else:
        values = np.asarray(v, dtype=float)
        if values.shape != (len(model.feature_names),):
            raise InputError("feature array length does not match the model")
        return values
    if set(names) != set(model.feature_names):
        raise InputError("feature names do not match the model")
    lookup = dict(zip(names, values))
    return np.array([lookup[n] for n in model.feature_names])


def predict(model: GnbModel, v) -> tuple[str, dict]:
    """Most probable class and the normalized per-class posteriors.

    ``v`` may be a :class:`FeatureVector`, a name->value dict or an array in
    the model's feature order. Ties go to the lexically first class.
    """
    x = _feature_array(model, v)
    scores = model.log_scores(x)
    shifted = np.exp(scores - scores.max())
    post = shifted / shifted.sum()
    best = int(np.argmax(scores))
    return model.classes[best], dict(zip(model.classes, post.tolist()))


@dataclass
class AccuracyReport:
    accuracy: float
    per_class: dict
    classes: list
    confusion: np.ndarray  # rows: true class, columns: predicted class
    n_test: int


def evaluate(model: GnbModel, test: FeatureMatrix) -> AccuracyReport:
    """Total and per-class accuracy plus the confusion matrix on ``test``."""
    if len(test) == 0:
        raise InputError("test set is empty")
    test = test.select(model.feature_names)
    classes = sorted(set(model.classes) | set(test.labels))
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    for row, label in zip(test.X, test.labels):
        pred, _ = predict(model, row)
        confusion[index[label], index[pred]] += 1
    per_class = {}
    for c in classes:
        n = confusion[index[c]].sum()
        if n:
            per_class[c] = confusion[index[c], index[c]] / n
    accuracy = np.trace(confusion) / confusion.sum()
    return AccuracyReport(float(accuracy), per_class, classes, confusion, int(confusion.sum()))


def repeated_accuracy(matrix: FeatureMatrix, seeds: Sequence[int],
                      train_fraction: float = 0.3) -> list:
    """Total test accuracy for each seed of a stratified split."""
    out = []
    for seed in seeds:
        train, test = split(matrix, SplitSpec(train_fraction, seed))
        out.append(evaluate(fit(train), test).accuracy)
    return out


def save_model(model: GnbModel, path) -> None:
    """Plain-text model file; floats use ``repr`` so reloading is exact."""
    lines = [f"features\t{','.join(model.feature_names)}",
             f"variance_floor\t{model.variance_floor!r}"]
    for c in model.classes:
        lines.append(f"prior\t{c}\t{model.priors[c]!r}")
    for c in model.classes:
        for name, mu, var in zip(model.feature_names, model.means[c], model.variances[c]):
            lines.append(f"stat\t{c}\t{name}\t{float(mu)!r}\t{float(var)!r}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_model(path) -> GnbModel:
    names: tuple = ()
    floor = 0.0
    priors: dict = {}
    stats: dict = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            parts = line.rstrip("\n").split("\t")
            if not parts or parts == [""]:
                continue
            key = parts[0]
            try:
                if key == "features":
                    names = tuple(parts[1].split(","))
                elif key == "variance_floor":
                    floor = float(parts[1])
                elif key == "prior":
                    priors[parts[1]] = float(parts[2])
                elif key == "stat":
                    stats.setdefault(parts[1], {})[parts[2]] = (float(parts[3]), float(parts[4]))
                else:
                    raise ValueError(f"unknown key {key!r}")
            except (IndexError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: malformed model line ({exc})") from None
    classes = sorted(priors)
    means = {c: np.array([stats[c][n][0] for n in names]) for c in classes}
    variances = {c: np.array([stats[c][n][1] for n in names]) for c in classes}
    return GnbModel(classes, priors, names, means, variances, floor)
