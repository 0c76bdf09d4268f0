import csv
import os

import numpy as np
import pytest

from tfseizure.errors import ConfigError, CsvParseError, InputError
from tfseizure.features import FeatureMatrix, TF_FREQ_NAMES, TF_TIME_NAMES
from tfseizure.pipeline import (RunConfig, class_histogram, cmd_evaluate, cmd_extract, cmd_histogram,
                                cmd_rank, cmd_render, normal_overlap, read_feature_csv,
                                write_feature_csv)
from tfseizure.dataset import synth_corpus
from tfseizure.signals import EegSegment, synth_tone
from tfseizure.tfd import read_pgm


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(kernels=("wigner",))
    with pytest.raises(ConfigError):
        RunConfig(best_k=17)
    with pytest.raises(ConfigError):
        RunConfig(lag_window_length=128)
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"no_such_key": "1"})
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"n_seeds": "ten"})
    with pytest.raises(ConfigError):
        RunConfig().require_manifest()


def test_run_config_from_file(tmp_path):
    (tmp_path / "run.cfg").write_text(
        "# demo\nmanifest = data/manifest.txt\nkernels = swvd, spec\nn_seeds = 4\n"
        "alpha = 0.5\nrolloff_lambda = 0.9\n")
    cfg = RunConfig.from_file(tmp_path / "run.cfg", {"n_seeds": "2"})
    assert cfg.kernels == ("swvd", "spec")
    assert cfg.n_seeds == 2 and cfg.seeds == [0, 1]
    assert cfg.alpha == 0.5 and cfg.features.rolloff_lambda == 0.9
    assert cfg.manifest == str(tmp_path / "data" / "manifest.txt")


def test_extract_shapes_and_determinism(small_config, small_corpus, tmp_path):
    paths = cmd_extract(small_config, small_corpus)
    names = sorted(p.name for p in paths)
    assert names == ["features_tf_cwd.csv", "features_tf_spec.csv", "features_tf_swvd.csv",
                     "features_time_freq.csv"]
    by_name = {p.name: p for p in paths}
    with open(by_name["features_time_freq.csv"]) as f:
        rows = list(csv.reader(f))
    assert len(rows[0]) == 17 + 2 and len(rows) == 1 + 12
    ids = [r[-1] for r in rows[1:]]
    assert ids == sorted(ids)
    first = {p.name: p.read_bytes() for p in paths}
    again = cmd_extract(small_config, small_corpus)
    assert {p.name: p.read_bytes() for p in again} == first


def test_extract_200_rows(small_config):
    corpus = synth_corpus(2, 100, n_samples=128)
    cfg = RunConfig.from_mapping({"kernels": "spec", "family_sets": "tf"}, small_config)
    (path,) = cmd_extract(cfg, corpus)
    m = read_feature_csv(path)
    assert m.X.shape == (200, 16)
    assert m.names == TF_TIME_NAMES + TF_FREQ_NAMES
    assert m.labels.count("healthy") == 100


def test_csv_round_trip_bit_exact(tmp_path):
    X = np.random.default_rng(0).standard_normal((5, 3)) * 1e-7
    m = FeatureMatrix(["a", "b", "c"], X, ["x", "y", "x", "y", "x"], ["3", "1", "2", "5", "4"])
    write_feature_csv(m, tmp_path / "f.csv")
    back = read_feature_csv(tmp_path / "f.csv")
    assert back.source_ids == ["1", "2", "3", "4", "5"]
    order = [1, 2, 0, 4, 3]
    assert back.X.tobytes() == X[order].tobytes()


@pytest.mark.parametrize("body, row", [
    ("a,label,source_id\n1.0,x,s1\nnope,y,s2\n", 3),
    ("a,label,source_id\n1.0,x,s1\n2.0,y\n", 3),
    ("a,label,source_id\n1.0,x,s1\n2.0,y,s2\ninf,x,s3\n", 4),
])
def test_malformed_csv_reports_row(tmp_path, body, row):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(CsvParseError, match=f"row {row}"):
        read_feature_csv(p)


def test_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(CsvParseError, match="row 1"):
        read_feature_csv(p)


def test_evaluate_and_rank(small_config, small_corpus):
    paths = cmd_extract(small_config, small_corpus)
    report_path, table = cmd_evaluate(small_config, paths)
    text = report_path.read_text()
    assert "DATA: synthetic surrogate corpus" in text
    assert set(table) == {"time_freq", "tf_swvd", "tf_cwd", "tf_spec"}
    for label, results in table.items():
        assert results[0].label == "all features"
        assert len(results[0].accuracies) == 3
        assert all(0.0 <= a <= 1.0 for a in results[0].accuracies)
        assert len(results[1].features) == 4
    assert len(table["tf_swvd"]) == 3 and len(table["time_freq"]) == 2
    assert "TiTF1, TiTF8, TiTF2, FrTF2" in text

    tf_path = next(p for p in paths if p.name == "features_tf_swvd.csv")
    rank_path, result = cmd_rank(small_config, tf_path)
    with open(rank_path) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["rank", "feature", "ig_bits"]
    gains = [float(r[2]) for r in rows[1:]]
    assert len(gains) == 16
    assert all(a >= b for a, b in zip(gains, gains[1:]))


def test_evaluate_needs_csv(small_config):
    with pytest.raises(InputError):
        cmd_evaluate(small_config, [])


def test_render_pair(small_config, small_corpus):
    cfg = RunConfig.from_mapping({"kernels": "swvd"}, small_config)
    paths = cmd_render(cfg, segments=small_corpus)
    assert [p.name for p in paths] == ["tfd_swvd_A_synthetic000.pgm", "tfd_swvd_E_synthetic000.pgm"]
    for p in paths:
        assert read_pgm(p).shape == (64, 256)
    with pytest.raises(InputError):
        cmd_render(cfg, ["A/nothing"], segments=small_corpus)


def test_render_zero_and_tone(small_config):
    zero = EegSegment(np.zeros(256), 173.61, None, "zero")
    fs = 173.61
    tone = synth_tone(20.0, fs, 256, source_id="tone")
    cfg = RunConfig.from_mapping({"kernels": "spec,swvd"}, small_config)
    paths = cmd_render(cfg, ["zero", "tone"], segments=[zero, tone])
    for p in paths[:2]:
        assert not read_pgm(p).any()
    expected_k = round(2 * 64 * 20.0 / fs)
    for p in paths[2:]:
        img = read_pgm(p).astype(float)
        row_means = img.mean(axis=1)
        brightest = int(np.argmax(row_means))
        assert abs((64 - 1 - brightest) - expected_k) <= 1
        assert row_means[brightest] > 4 * np.median(row_means)


def test_normal_overlap_values():
    assert normal_overlap(0, 1, 0, 1) == pytest.approx(1.0, abs=1e-4)
    # analytic 2 Phi(-d/2) for equal unit variances
    assert normal_overlap(0, 1, 2, 1) == pytest.approx(0.3173105078629141, rel=1e-3)
    assert normal_overlap(0, 1, 10, 1) < 1e-5


def histogram_matrix(a, b):
    X = np.concatenate([a, b])[:, None]
    labels = ["healthy"] * len(a) + ["seizure"] * len(b)
    return FeatureMatrix(["TiTF1"], X, labels, [f"r{i:04d}" for i in range(len(labels))])


def test_histogram_identical_classes():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(1000)
    res = class_histogram(histogram_matrix(v, v.copy()), "TiTF1")
    assert res.overlap == pytest.approx(1.0, abs=0.02)
    assert sum(res.counts["healthy"]) == 1000 and len(res.edges) == 21


def test_histogram_separated_classes(small_config):
    rng = np.random.default_rng(0)
    m = histogram_matrix(rng.normal(0, 1, 1000), rng.normal(10, 1, 1000))
    path = os.path.join(small_config.output_dir, "sep.csv")
    os.makedirs(small_config.output_dir, exist_ok=True)
    write_feature_csv(m, path)
    hist, fit, res = cmd_histogram(small_config, path, "TiTF1")
    assert res.overlap < 0.01
    with open(fit) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["quantity", "class", "value"]
    assert rows[-1][0] == "overlap"
    with pytest.raises(InputError):
        cmd_histogram(small_config, path, "TiTF9")
