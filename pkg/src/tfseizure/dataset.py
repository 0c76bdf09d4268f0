"""Bonn EEG corpus loading and a synthetic surrogate corpus.

The Bonn database ships five directories (sets A-E, 100 text files each, one
integer sample per line, 4097 lines per file). A manifest is a plain-text file
of ``key = value`` lines::

    root = /data/bonn
    set.A = Z
    set.E = S
    sample_rate_hz = 173.61
    segment_length = 4096

``set.<tag>`` values are directories relative to ``root``. ``synthetic = true``
marks a surrogate corpus written by :func:`write_corpus`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tfseizure.errors import ConfigError, DatasetFileError, InputError
from tfseizure.signals import HEALTHY, SEIZURE, EegSegment

SET_TAGS = ("A", "B", "C", "D", "E")
BONN_SAMPLE_RATE_HZ = 173.61
BONN_SEGMENT_LENGTH = 4096

# the two-class experiment: A (healthy, eyes open) against E (ictal)
DEFAULT_SET_LABELS = {"A": HEALTHY, "E": SEIZURE}


@dataclass
class DatasetManifest:
    root_path: str
    sets: dict = field(default_factory=dict)
    sample_rate_hz: float = BONN_SAMPLE_RATE_HZ
    segment_length: int = BONN_SEGMENT_LENGTH
    synthetic: bool = False

    def __post_init__(self):
        unknown = set(self.sets) - set(SET_TAGS)
        if unknown:
            raise ConfigError(f"unknown set tags {sorted(unknown)}")
        if not self.sample_rate_hz > 0:
            raise ConfigError("sample_rate_hz must be positive")
        if self.segment_length < 2:
            raise ConfigError("segment_length must be at least 2")
        seen: dict = {}
        for tag, files in self.sets.items():
            for p in files:
                key = os.path.realpath(p)
                if key in seen and seen[key] != tag:
                    raise ConfigError(f"{p} is listed in both set {seen[key]} and set {tag}")
                seen[key] = tag

    @classmethod
    def from_directories(cls, root, set_dirs: dict, **kw) -> "DatasetManifest":
        """Build a manifest listing every regular file of each set directory in lexical order."""
        root = Path(root)
        sets = {}
        for tag, sub in set_dirs.items():
            d = root / sub
            if not d.is_dir():
                raise ConfigError(f"set {tag}: directory {d} does not exist")
            sets[tag] = [str(p) for p in sorted(d.iterdir(), key=lambda p: p.name)
                         if p.is_file() and not p.name.startswith(".")]
        return cls(str(root), sets, **kw)

    @classmethod
    def from_file(cls, path) -> "DatasetManifest":
        values = read_key_values(path)
        base = Path(path).resolve().parent
        root = Path(values.pop("root", str(base)))
        if not root.is_absolute():
            root = base / root
        set_dirs = {}
        kw = {}
        for key, val in values.items():
            if key.startswith("set."):
                set_dirs[key[4:].upper()] = val
            elif key == "sample_rate_hz":
                kw["sample_rate_hz"] = float(val)
            elif key == "segment_length":
                kw["segment_length"] = int(val)
            elif key == "synthetic":
                kw["synthetic"] = val.lower() in ("1", "true", "yes")
            else:
                raise ConfigError(f"{path}: unknown manifest key {key!r}")
        if not set_dirs:
            raise ConfigError(f"{path}: manifest lists no sets")
        return cls.from_directories(root, set_dirs, **kw)


def read_key_values(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    return out


def read_samples(path) -> np.ndarray:
    """One numeric sample per line; blank lines are skipped."""
    values = []
    try:
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise DatasetFileError(path, f"cannot parse {text[:20]!r} as a number", lineno) from None
    except OSError as exc:
        if isinstance(exc, DatasetFileError):
            raise
        raise DatasetFileError(path, exc.strerror or str(exc)) from None
    if not values:
        raise DatasetFileError(path, "file is empty")
    return np.array(values)


def write_segment(segment: EegSegment, path) -> None:
    """Write samples one per line with round-trip float formatting."""
    with open(path, "w") as f:
        f.writelines(f"{v!r}\n" for v in segment.samples.tolist())


def load_set(manifest: DatasetManifest, set_tag: str, label: str | None = None) -> list:
    """Load every file of one set, truncated to ``segment_length`` samples."""
    if set_tag not in manifest.sets:
        raise InputError(f"manifest has no set {set_tag!r}")
    if label is None:
        label = DEFAULT_SET_LABELS.get(set_tag)
    segments = []
    for path in sorted(manifest.sets[set_tag], key=lambda p: os.path.basename(p)):
        x = read_samples(path)
        if x.size < manifest.segment_length:
            raise DatasetFileError(path, f"has {x.size} samples, need {manifest.segment_length}")
        source_id = f"{set_tag}/{Path(path).stem}"
        segments.append(EegSegment(x[:manifest.segment_length], manifest.sample_rate_hz,
                                   label, source_id))
    return segments


def load_two_class(manifest: DatasetManifest, healthy_set: str = "A",
                   seizure_set: str = "E") -> list:
    return load_set(manifest, healthy_set, HEALTHY) + load_set(manifest, seizure_set, SEIZURE)


def _band_noise(rng, n, fs, n_tones=30, f_lo=1.0, f_hi=40.0):
    t = np.arange(n) / fs
    freqs = rng.uniform(f_lo, f_hi, n_tones)
    phases = rng.uniform(0, 2 * np.pi, n_tones)
    x = np.cos(2 * np.pi * freqs[:, None] * t[None, :] + phases[:, None]).sum(axis=0)
    return x / np.sqrt(np.mean(x ** 2))


def synth_corpus(seed: int, per_class: int, sample_rate_hz: float = BONN_SAMPLE_RATE_HZ,
                 n_samples: int = BONN_SEGMENT_LENGTH) -> list:
    """Deterministic two-class surrogate corpus.

    Healthy segments are unit-RMS sums of 30 random tones in 1-40 Hz. Seizure
    segments are the same kind of background plus a 3-5 Hz sinusoid with
    amplitude 4 (four times the background RMS), switched on over a random
    interval covering at least half the segment.
    """
    if per_class < 2:
        raise InputError("per_class must be at least 2")
    rng = np.random.default_rng(seed)
    t = np.arange(n_samples) / sample_rate_hz
    out = []
    for i in range(per_class):
        x = _band_noise(rng, n_samples, sample_rate_hz)
        out.append(EegSegment(x, sample_rate_hz, HEALTHY, f"A/synthetic{i:03d}"))
    for i in range(per_class):
        x = _band_noise(rng, n_samples, sample_rate_hz)
        f = rng.uniform(3.0, 5.0)
        phase = rng.uniform(0, 2 * np.pi)
        length = int(np.ceil(rng.uniform(0.5, 1.0) * n_samples))
        start = int(rng.integers(0, n_samples - length + 1))
        gate = np.zeros(n_samples)
        gate[start:start + length] = 1.0
        x = x + 4.0 * gate * np.cos(2 * np.pi * f * t + phase)
        out.append(EegSegment(x, sample_rate_hz, SEIZURE, f"E/synthetic{i:03d}"))
    return out


def write_corpus(segments, root, manifest_name: str = "manifest.txt") -> Path:
    """Write labeled segments as a Bonn-style tree (``A/`` healthy, ``E/`` seizure)
    plus a manifest; returns the manifest path."""
    root = Path(root)
    dirs = {HEALTHY: "A", SEIZURE: "E"}
    counters = {HEALTHY: 0, SEIZURE: 0}
    for d in dirs.values():
        (root / d).mkdir(parents=True, exist_ok=True)
    n = None
    fs = None
    for seg in segments:
        if seg.label not in dirs:
            raise InputError(f"segment {seg.source_id!r} has no class label")
        stem = seg.source_id.rsplit("/", 1)[-1] or f"{counters[seg.label]:03d}"
        write_segment(seg, root / dirs[seg.label] / f"{stem}.txt")
        counters[seg.label] += 1
        n, fs = len(seg), seg.sample_rate_hz
    manifest = root / manifest_name
    manifest.write_text(
        "# synthetic surrogate corpus; not the Bonn recordings\n"
        f"root = .\nset.A = A\nset.E = E\nsample_rate_hz = {fs!r}\n"
        f"segment_length = {n}\nsynthetic = true\n"
    )
    return manifest
