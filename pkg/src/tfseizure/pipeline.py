"""Batch stages: extract -> evaluate / rank / histogram, and TFD rendering.

Stages exchange plain CSV files. Floats are written with ``repr`` (shortest
round-trip form), so reloading a CSV reproduces the matrix bit for bit.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from tfseizure.bayes import SplitSpec, evaluate, fit, split
from tfseizure.dataset import DatasetManifest, load_two_class, read_key_values, synth_corpus, write_corpus
from tfseizure.errors import ConfigError, CsvParseError, InputError
from tfseizure.features import (BEST4_TF, FAMILY_SETS, TF, TIME_FREQ, FeatureConfig,
                                FeatureMatrix, extract_all)
from tfseizure.ranking import rank_features
from tfseizure.signals import analytic_signal
from tfseizure.tfd import KERNEL_KINDS, KernelSpec, qtfd, render_greyscale

HISTOGRAM_BINS = 20
OVERLAP_SPAN_SD = 6.0
OVERLAP_RTOL = 1e-4


@dataclass(frozen=True)
class RunConfig:
    """Everything one pipeline run needs.

    Config files hold ``key = value`` lines whose keys are the field names
    below (or ``FeatureConfig`` field names); list values are comma separated.
    """

    manifest: str | None = None
    output_dir: str = "tfseizure-out"
    kernels: tuple = KERNEL_KINDS
    family_sets: tuple = (TIME_FREQ, TF)
    lag_window_length: int = 127
    fft_length: int = 512
    alpha: float = 1.0
    window_kind: str = "hamming"
    features: FeatureConfig = field(default_factory=FeatureConfig)
    train_fraction: float = 0.3
    seed: int = 0
    n_seeds: int = 10
    best_k: int = 4
    n_bins: int = 10
    n_jobs: int = 1
    healthy_set: str = "A"
    seizure_set: str = "E"

    def __post_init__(self):
        bad = [k for k in self.kernels if k not in KERNEL_KINDS]
        if bad or not self.kernels:
            raise ConfigError(f"kernels must be a non-empty subset of {KERNEL_KINDS}")
        bad = [f for f in self.family_sets if f not in FAMILY_SETS]
        if bad or not self.family_sets:
            raise ConfigError(f"family_sets must be a non-empty subset of {tuple(FAMILY_SETS)}")
        for kind in self.kernels:
            self.kernel_spec(kind)
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be at least 1")
        if self.best_k < 1 or any(self.best_k > len(FAMILY_SETS[f]) for f in self.family_sets):
            raise ConfigError("best_k must lie between 1 and the family feature count")
        if self.n_bins < 2:
            raise ConfigError("n_bins must be at least 2")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be at least 1")
        SplitSpec(self.train_fraction, self.seed)

    def kernel_spec(self, kind: str) -> KernelSpec:
        return KernelSpec(kind, self.lag_window_length, self.fft_length, self.alpha, self.window_kind)

    @property
    def seeds(self) -> list:
        return list(range(self.seed, self.seed + self.n_seeds))

    def require_manifest(self) -> DatasetManifest:
        if not self.manifest:
            raise ConfigError("no manifest configured")
        if not os.path.isfile(self.manifest):
            raise ConfigError(f"manifest {self.manifest} does not exist")
        return DatasetManifest.from_file(self.manifest)

    @classmethod
    def from_mapping(cls, values: dict, base: "RunConfig | None" = None) -> "RunConfig":
        """Apply string (or typed) overrides on top of ``base``."""
        base = base or cls()
        run_fields = {f.name: f for f in fields(cls)}
        feat_fields = {f.name: f for f in fields(FeatureConfig)}
        run_kw, feat_kw = {}, {}
        for key, raw in values.items():
            if raw is None:
                continue
            if key in run_fields and key != "features":
                run_kw[key] = _coerce(getattr(base, key), raw, key)
            elif key in feat_fields:
                feat_kw[key] = _coerce(getattr(base.features, key), raw, key)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        if feat_kw:
            run_kw["features"] = replace(base.features, **feat_kw)
        return replace(base, **run_kw)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "RunConfig":
        values = read_key_values(path)
        if "manifest" in values and not os.path.isabs(values["manifest"]):
            values["manifest"] = str(Path(path).resolve().parent / values["manifest"])
        cfg = cls.from_mapping(values)
        return cls.from_mapping(overrides or {}, cfg)


def _coerce(current, raw, key):
    if not isinstance(raw, str):
        return tuple(raw) if isinstance(current, tuple) else raw
    try:
        if isinstance(current, tuple):
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if isinstance(current, bool):
            return raw.strip().lower() in ("1", "true", "yes")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None
    return raw.strip()


# -- CSV persistence -------------------------------------------------------------------

def write_feature_csv(matrix: FeatureMatrix, path) -> None:
    """Header is the feature names then ``label,source_id``; rows sorted by source id."""
    order = sorted(range(len(matrix)), key=lambda i: matrix.source_ids[i])
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(matrix.names) + ["label", "source_id"])
        for i in order:
            w.writerow([repr(float(v)) for v in matrix.X[i]]
                       + [matrix.labels[i], matrix.source_ids[i]])


def read_feature_csv(path) -> FeatureMatrix:
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise CsvParseError(f"{path}: empty file")
    header = rows[0]
    if len(header) < 3 or header[-2:] != ["label", "source_id"]:
        raise CsvParseError(f"{path}: row 1: header must end with label,source_id")
    names = header[:-2]
    X, labels, ids = [], [], []
    for rownum, row in enumerate(rows[1:], 2):
        if len(row) != len(header):
            raise CsvParseError(f"{path}: row {rownum}: expected {len(header)} fields, got {len(row)}")
        try:
            values = [float(v) for v in row[:-2]]
        except ValueError:
            raise CsvParseError(f"{path}: row {rownum}: non-numeric feature value") from None
        if not all(math.isfinite(v) for v in values):
            raise CsvParseError(f"{path}: row {rownum}: non-finite feature value")
        X.append(values)
        labels.append(row[-2])
        ids.append(row[-1])
    if not X:
        raise CsvParseError(f"{path}: no data rows")
    family = next((fam for fam, fam_names in FAMILY_SETS.items() if tuple(names) == fam_names), None)
    return FeatureMatrix(names, np.array(X), labels, ids, family)


def feature_csv_name(family_set: str, kernel: str | None) -> str:
    return f"features_{family_set}.csv" if family_set == TIME_FREQ else f"features_{family_set}_{kernel}.csv"


# -- extract --------------------------------------------------------------------

def _extract_one(args):
    segment, kernel, cfg, family = args
    return extract_all(segment, kernel, cfg, family)


def extract_features(segments, kernel: KernelSpec | None, cfg: FeatureConfig, family_set: str,
                     n_jobs: int = 1) -> FeatureMatrix:
    """Feature matrix of ``segments``, optionally fanned out over processes."""
    jobs = [(s, kernel, cfg, family_set) for s in segments]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            vectors = list(pool.map(_extract_one, jobs, chunksize=4))
    else:
        vectors = [_extract_one(j) for j in jobs]
    return FeatureMatrix.from_vectors(vectors, [s.label for s in segments],
                                      [s.source_id for s in segments])


def cmd_extract(config: RunConfig, segments=None) -> list:
    """Write one feature CSV per (family set, kernel); returns the paths.

    ``segments`` overrides loading from the manifest.
    """
    if segments is None:
        manifest = config.require_manifest()
        segments = load_two_class(manifest, config.healthy_set, config.seizure_set)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for family in config.family_sets:
        kinds = [None] if family == TIME_FREQ else list(config.kernels)
        for kind in kinds:
            kernel = config.kernel_spec(kind) if kind else None
            matrix = extract_features(segments, kernel, config.features, family, config.n_jobs)
            path = out / feature_csv_name(family, kind)
            write_feature_csv(matrix, path)
            paths.append(path)
    return paths


# -- evaluate -----------------------------------------------------------------

@dataclass
class SetResult:
    """Per-seed accuracies of one feature subset."""

    label: str
    features: tuple
    accuracies: list

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))


def accuracy_over_seeds(matrix: FeatureMatrix, seeds: Sequence[int],
                        train_fraction: float = 0.3) -> list:
    out = []
    for seed in seeds:
        train, test = split(matrix, SplitSpec(train_fraction, seed))
        out.append(evaluate(fit(train), test).accuracy)
    return out


def evaluate_matrix(matrix: FeatureMatrix, config: RunConfig) -> list:
    """Accuracy of the full set, the IG top-k set and (TF only) the fixed best-4 set."""
    results = [SetResult("all features", matrix.names,
                         accuracy_over_seeds(matrix, config.seeds, config.train_fraction))]
    top = tuple(rank_features(matrix, config.n_bins).top(config.best_k))
    results.append(SetResult(f"top-{config.best_k} by information gain", top,
                             accuracy_over_seeds(matrix.select(top), config.seeds,
                                                 config.train_fraction)))
    if all(n in matrix.names for n in BEST4_TF):
        results.append(SetResult("{" + ", ".join(BEST4_TF) + "}", BEST4_TF,
                                 accuracy_over_seeds(matrix.select(BEST4_TF), config.seeds,
                                                     config.train_fraction)))
    return results


def _column_label(path) -> str:
    stem = Path(path).stem
    return stem[len("features_"):] if stem.startswith("features_") else stem


def format_report(table: dict, config: RunConfig, synthetic: bool = False) -> str:
    """Plain-text accuracy table: one block per feature CSV, mean +- sd and per-seed values."""
    lines = ["Total classification accuracy (stratified "
             f"{config.train_fraction:.0%} train / {1 - config.train_fraction:.0%} test, "
             f"seeds {config.seeds[0]}..{config.seeds[-1]})"]
    if synthetic:
        lines.append("DATA: synthetic surrogate corpus (not the Bonn recordings)")
    lines.append("")
    width = max((len(r.label) for rs in table.values() for r in rs), default=10)
    cols = list(table)
    lines.append(f"{'feature set':<{width}}  " + "  ".join(f"{c:>18}" for c in cols))
    labels = []
    for rs in table.values():
        for r in rs:
            if r.label not in labels:
                labels.append(r.label)
    for label in labels:
        cells = []
        for c in cols:
            r = next((r for r in table[c] if r.label == label), None)
            cells.append(f"{100 * r.mean:7.3f}% +-{100 * r.std:6.3f}" if r else f"{'-':>18}")
        lines.append(f"{label:<{width}}  " + "  ".join(f"{s:>18}" for s in cells))
    lines.append("")
    for c in cols:
        for r in table[c]:
            lines.append(f"[{c}] {r.label}: features={','.join(r.features)}")
            lines.append(f"[{c}] {r.label}: per-seed=" + ",".join(f"{a:.6f}" for a in r.accuracies))
    return "\n".join(lines) + "\n"


def cmd_evaluate(config: RunConfig, csv_paths: Sequence, report_name: str = "accuracy_report.txt"):
    """Run repeated split/fit/evaluate on each CSV and write the report.

    Returns ``(report_path, {column_label: [SetResult, ...]})``.
    """
    if not csv_paths:
        raise InputError("no feature CSV given")
    matrices = {_column_label(p): read_feature_csv(p) for p in csv_paths}
    table = {label: evaluate_matrix(m, config) for label, m in matrices.items()}
    synthetic = all(any("synthetic" in s for s in m.source_ids) for m in matrices.values())
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / report_name
    path.write_text(format_report(table, config, synthetic))
    return path, table


# -- rank ---------------------------------------------------------------------------

def cmd_rank(config: RunConfig, csv_path):
    """Write ``ranking_<family>.csv`` next to the outputs; returns ``(path, RankingResult)``."""
    matrix = read_feature_csv(csv_path)
    result = rank_features(matrix, config.n_bins)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"ranking_{_column_label(csv_path)}.csv"
    result.write_csv(path)
    return path, result


# -- render ----------------------------------------------------------------------

def _safe_name(source_id: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in source_id)


def cmd_render(config: RunConfig, source_ids: Sequence[str] = (), segments=None) -> list:
    """One greyscale PGM per (segment, kernel).

    Without ``source_ids`` the first healthy and first seizure segment are drawn.
    """
    if segments is None:
        manifest = config.require_manifest()
        segments = load_two_class(manifest, config.healthy_set, config.seizure_set)
    segments = sorted(segments, key=lambda s: s.source_id)
    if source_ids:
        by_id = {s.source_id: s for s in segments}
        missing = [sid for sid in source_ids if sid not in by_id]
        if missing:
            raise InputError(f"unknown segment ids: {', '.join(missing)}")
        chosen = [by_id[sid] for sid in source_ids]
    else:
        chosen = []
        for label in ("healthy", "seizure"):
            match = next((s for s in segments if s.label == label), None)
            if match is not None:
                chosen.append(match)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for seg in chosen:
        z = analytic_signal(seg)
        for kind in config.kernels:
            path = out / f"tfd_{kind}_{_safe_name(seg.source_id)}.pgm"
            render_greyscale(qtfd(z, config.kernel_spec(kind)), path)
            paths.append(path)
    return paths


# -- histogram ------------------------------------------------------------------

def _normal_pdf(x, mean, var):
    return np.exp(-(x - mean) ** 2 / (2 * var)) / np.sqrt(2 * np.pi * var)


def normal_overlap(mean_a, var_a, mean_b, var_b, center=None, spread=None) -> float:
    """Area under ``min`` of two normal densities.

    Integrated by the trapezoid rule over ``center +- 6 spread`` (defaults:
    midpoint of the means and the larger standard deviation), doubling the
    grid until successive estimates agree to 1e-4 relative.
    """
    var_a = max(var_a, 1e-300)
    var_b = max(var_b, 1e-300)
    if center is None:
        center = 0.5 * (mean_a + mean_b)
    if spread is None or spread <= 0:
        spread = max(math.sqrt(var_a), math.sqrt(var_b), abs(mean_a - mean_b) / 2)
    lo, hi = center - OVERLAP_SPAN_SD * spread, center + OVERLAP_SPAN_SD * spread
    n = 1025
    prev = None
    while True:
        x = np.linspace(lo, hi, n)
        y = np.minimum(_normal_pdf(x, mean_a, var_a), _normal_pdf(x, mean_b, var_b))
        est = float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))
        if prev is not None and abs(est - prev) <= OVERLAP_RTOL * max(abs(est), 1e-300):
            return est
        if n > 2 ** 22:
            return est
        prev = est
        n = 2 * n - 1


@dataclass
class HistogramResult:
    feature: str
    edges: np.ndarray
    counts: dict
    means: dict
    variances: dict
    overlap: float


def class_histogram(matrix: FeatureMatrix, feature: str, n_bins: int = HISTOGRAM_BINS) -> HistogramResult:
    """Per-class histogram over the pooled range plus fitted normals and their overlap."""
    if feature not in matrix.names:
        raise InputError(f"unknown feature {feature!r}")
    values = matrix.column(feature)
    labels = np.array(matrix.labels)
    classes = matrix.classes
    if len(classes) != 2:
        raise InputError("histogram overlap needs exactly two classes")
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, n_bins + 1)
    counts, means, variances = {}, {}, {}
    for c in classes:
        v = values[labels == c]
        counts[c] = np.histogram(v, bins=edges)[0]
        means[c] = float(np.mean(v))
        variances[c] = float(np.var(v))
    pooled_mean, pooled_sd = float(values.mean()), float(values.std())
    a, b = classes
    overlap = normal_overlap(means[a], variances[a], means[b], variances[b],
                             pooled_mean, pooled_sd)
    return HistogramResult(feature, edges, counts, means, variances, overlap)


def cmd_histogram(config: RunConfig, csv_path, feature: str):
    """Write ``histogram_<feature>.csv`` and ``histogram_<feature>_fit.csv``.

    Returns ``(histogram_path, fit_path, HistogramResult)``.
    """
    matrix = read_feature_csv(csv_path)
    result = class_histogram(matrix, feature)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tag = f"{_column_label(csv_path)}_{feature}"
    hist_path = out / f"histogram_{tag}.csv"
    fit_path = out / f"histogram_{tag}_fit.csv"
    with open(hist_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["class", "bin", "left", "right", "count"])
        for c, counts in result.counts.items():
            for i, n in enumerate(counts):
                w.writerow([c, i, repr(float(result.edges[i])), repr(float(result.edges[i + 1])), int(n)])
    with open(fit_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["quantity", "class", "value"])
        for c in result.means:
            w.writerow(["mean", c, repr(result.means[c])])
            w.writerow(["variance", c, repr(result.variances[c])])
        w.writerow(["overlap", "", repr(result.overlap)])
    return hist_path, fit_path, result


# -- synth ------------------------------------------------------------------------

def cmd_synth(output_root, seed: int = 0, per_class: int = 50) -> Path:
    """Write a surrogate corpus tree and return its manifest path."""
    return write_corpus(synth_corpus(seed, per_class), output_root)
