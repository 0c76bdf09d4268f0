import numpy as np
import pytest

from tfseizure.dataset import (DatasetManifest, load_set, load_two_class, read_samples, synth_corpus,
                               write_corpus, write_segment)
from tfseizure.errors import ConfigError, DatasetFileError, InputError
from tfseizure.signals import EegSegment


def write_lines(path, values):
    path.write_text("".join(f"{v}\n" for v in values))


@pytest.fixture
def bonn_tree(tmp_path):
    rng = np.random.default_rng(0)
    for tag, sub in (("A", "Z"), ("E", "S")):
        (tmp_path / sub).mkdir()
        for i in range(5):
            write_lines(tmp_path / sub / f"{sub}{i:03d}.txt", rng.integers(-500, 500, 4097))
    (tmp_path / "manifest.txt").write_text("root = .\nset.A = Z\nset.E = S\n")
    return tmp_path


def test_truncates_4097_lines(bonn_tree):
    m = DatasetManifest.from_file(bonn_tree / "manifest.txt")
    segs = load_set(m, "A")
    assert len(segs) == 5
    assert all(len(s) == 4096 and s.label == "healthy" for s in segs)
    assert segs[0].sample_rate_hz == 173.61
    raw = read_samples(bonn_tree / "Z" / "Z000.txt")
    np.testing.assert_array_equal(segs[0].samples, raw[:4096])


def test_hundred_files(tmp_path):
    (tmp_path / "Z").mkdir()
    for i in range(100):
        write_lines(tmp_path / "Z" / f"Z{i:03d}.txt", range(20))
    m = DatasetManifest.from_directories(tmp_path, {"A": "Z"}, segment_length=16)
    segs = load_set(m, "A")
    assert len(segs) == 100 and {s.label for s in segs} == {"healthy"}


def test_two_class_labels(bonn_tree):
    m = DatasetManifest.from_file(bonn_tree / "manifest.txt")
    segs = load_two_class(m)
    assert [s.label for s in segs] == ["healthy"] * 5 + ["seizure"] * 5
    assert segs[5].source_id == "E/S000"


def test_lexical_order(tmp_path):
    (tmp_path / "Z").mkdir()
    for name in ("b.txt", "a.txt", "c.txt"):
        write_lines(tmp_path / "Z" / name, [ord(name[0])] * 4)
    m = DatasetManifest.from_directories(tmp_path, {"A": "Z"}, segment_length=4)
    assert [s.source_id for s in load_set(m, "A")] == ["A/a", "A/b", "A/c"]


def test_empty_file_error_names_file(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    with pytest.raises(DatasetFileError, match="empty.txt"):
        read_samples(p)


def test_unparsable_line_reports_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1\n2\nx7\n4\n")
    with pytest.raises(DatasetFileError) as info:
        read_samples(p)
    assert info.value.line == 3
    assert "bad.txt:3" in str(info.value)


def test_short_file_error(tmp_path):
    (tmp_path / "Z").mkdir()
    write_lines(tmp_path / "Z" / "short.txt", range(10))
    m = DatasetManifest.from_directories(tmp_path, {"A": "Z"}, segment_length=16)
    with pytest.raises(DatasetFileError, match="short.txt"):
        load_set(m, "A")


def test_manifest_errors(tmp_path):
    with pytest.raises(ConfigError):
        DatasetManifest.from_directories(tmp_path, {"A": "missing"})
    (tmp_path / "m.txt").write_text("root = .\nbogus = 1\n")
    with pytest.raises(ConfigError):
        DatasetManifest.from_file(tmp_path / "m.txt")
    with pytest.raises(ConfigError):
        DatasetManifest(str(tmp_path), {"Q": []})


def test_overlapping_sets_rejected(tmp_path):
    (tmp_path / "Z").mkdir()
    write_lines(tmp_path / "Z" / "a.txt", range(4))
    with pytest.raises(ConfigError):
        DatasetManifest.from_directories(tmp_path, {"A": "Z", "E": "Z"})


def test_unknown_set(bonn_tree):
    m = DatasetManifest.from_file(bonn_tree / "manifest.txt")
    with pytest.raises(InputError):
        load_set(m, "C")


def test_write_read_round_trip(tmp_path):
    x = np.random.default_rng(2).standard_normal(300) * 1e3
    seg = EegSegment(x, 173.61, "seizure", "E/x")
    write_segment(seg, tmp_path / "x.txt")
    np.testing.assert_array_equal(read_samples(tmp_path / "x.txt"), x)


def test_synth_deterministic_and_counts():
    a = synth_corpus(7, 5, n_samples=512)
    b = synth_corpus(7, 5, n_samples=512)
    assert len(a) == 10
    assert [s.label for s in a].count("seizure") == 5
    for s, t in zip(a, b):
        assert s.samples.tobytes() == t.samples.tobytes() and s.source_id == t.source_id
    c = synth_corpus(8, 5, n_samples=512)
    assert a[0].samples.tobytes() != c[0].samples.tobytes()
    with pytest.raises(InputError):
        synth_corpus(0, 1)


def test_synth_healthy_unit_rms():
    for s in synth_corpus(1, 4, n_samples=1024)[:4]:
        assert np.sqrt(np.mean(s.samples ** 2)) == pytest.approx(1.0, rel=1e-12)


def band_power(seg, lo, hi):
    x = seg.samples
    power = np.abs(np.fft.rfft(x)) ** 2 / x.size
    f = np.fft.rfftfreq(x.size, 1 / seg.sample_rate_hz)
    return power[(f >= lo) & (f <= hi)].sum()


def test_synth_seizure_band_excess():
    segs = synth_corpus(3, 20)
    healthy = np.mean([band_power(s, 2.5, 5.5) for s in segs if s.label == "healthy"])
    seizure = np.mean([band_power(s, 2.5, 5.5) for s in segs if s.label == "seizure"])
    assert 10 * np.log10(seizure / healthy) >= 6.0


def test_write_corpus_reloads(tmp_path):
    segs = synth_corpus(0, 3, n_samples=256)
    manifest = write_corpus(segs, tmp_path)
    m = DatasetManifest.from_file(manifest)
    assert m.synthetic and m.segment_length == 256
    back = load_two_class(m)
    assert [s.source_id for s in back] == [s.source_id for s in segs]
    for s, t in zip(segs, back):
        np.testing.assert_array_equal(s.samples, t.samples)
