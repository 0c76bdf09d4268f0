"""Information-gain feature ranking on equal-width discretized features."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from tfseizure.errors import InputError
from tfseizure.features import FeatureMatrix


@dataclass(frozen=True)
class RankingResult:
    """``(feature_name, ig_bits)`` pairs, best first."""

    entries: tuple

    @property
    def names(self) -> list:
        return [name for name, _ in self.entries]

    def top(self, k: int) -> list:
        return self.names[:k]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["rank", "feature", "ig_bits"])
            for i, (name, ig) in enumerate(self.entries, 1):
                w.writerow([i, name, repr(float(ig))])


def discretize(column, n_bins: int = 10) -> np.ndarray:
    """Equal-width bin index of each value over ``[min, max]``.

    The top edge falls in the last bin; a constant column is all zeros.
    """
    if n_bins < 2:
        raise InputError("n_bins must be at least 2")
    v = np.asarray(column, dtype=float)
    if v.size == 0:
        return np.zeros(0, dtype=int)
    if not np.all(np.isfinite(v)):
        raise InputError("cannot discretize non-finite values")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros(v.size, dtype=int)
    width = (hi - lo) / n_bins
    return np.minimum(np.floor((v - lo) / width).astype(int), n_bins - 1)


def _entropy_from_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(-np.sum(p * np.log2(p)))


def label_entropy(labels) -> float:
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    return _entropy_from_counts(counts)


def info_gain(bins, labels) -> float:
    """``H(labels) - sum_b (n_b / n) H(labels | bin = b)`` in bits."""
    bins = np.asarray(bins)
    labels = np.asarray(labels)
    if bins.shape != labels.shape:
        raise InputError("bins and labels must have the same length")
    if bins.size == 0:
        raise InputError("info_gain needs at least one observation")
    n = bins.size
    _, label_idx = np.unique(labels, return_inverse=True)
    bin_vals, bin_idx = np.unique(bins, return_inverse=True)
    table = np.zeros((bin_vals.size, label_idx.max() + 1), dtype=int)
    np.add.at(table, (bin_idx, label_idx), 1)
    h = _entropy_from_counts(table.sum(axis=0))
    conditional = sum(row.sum() / n * _entropy_from_counts(row) for row in table)
    # clamp float residue so 0 <= IG <= H holds exactly
    return float(min(max(h - conditional, 0.0), h))


def rank_features(matrix: FeatureMatrix, n_bins: int = 10) -> RankingResult:
    """Rank every column of ``matrix`` by information gain, descending;
    equal gains are ordered by feature name."""
    if len(set(matrix.labels)) < 2:
        raise InputError("ranking needs at least two classes")
    gains = [(name, info_gain(discretize(matrix.column(name), n_bins), matrix.labels))
             for name in matrix.names]
    gains.sort(key=lambda item: (-item[1], item[0]))
    return RankingResult(tuple(gains))


def read_ranking_csv(path) -> RankingResult:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return RankingResult(tuple((r["feature"], float(r["ig_bits"])) for r in rows))
