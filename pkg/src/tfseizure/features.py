"""Time, frequency and time-frequency feature families.

Two feature sets are produced per segment:

* ``time_freq``: TiF1-TiF10 (statistics of the analytic envelope) followed by
  FrF1-FrF7 (spectral shape of the analytic signal), 17 values.
* ``tf``: TiTF1-TiTF9 (statistics of the flattened TFD) followed by
  FrTF1-FrTF7 (sub-band energies, flux, moments and concentration of the TFD),
  16 values.

Every division by zero and log of zero is closed by a convention returning 0,
so all features are finite for finite input. Frequency indices ``k`` used in
moments and roll-off are 1-based (column 0 is ``k = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from tfseizure.errors import ConfigError, InputError
from tfseizure.signals import AnalyticSignal, EegSegment, analytic_signal
from tfseizure.tfd import KernelSpec, TfdMatrix, qtfd

TIME_NAMES = tuple(f"TiF{i}" for i in range(1, 11))
FREQ_NAMES = tuple(f"FrF{i}" for i in range(1, 8))
TF_TIME_NAMES = tuple(f"TiTF{i}" for i in range(1, 10))
TF_FREQ_NAMES = tuple(f"FrTF{i}" for i in range(1, 8))

TIME_FREQ = "time_freq"
TF = "tf"
FAMILY_SETS = {
    TIME_FREQ: TIME_NAMES + FREQ_NAMES,
    TF: TF_TIME_NAMES + TF_FREQ_NAMES,
}

# fixed four-feature TF subset evaluated next to the full TF set
BEST4_TF = ("TiTF1", "TiTF8", "TiTF2", "FrTF2")


@dataclass(frozen=True)
class FeatureConfig:
    """Tunable constants of the feature formulas.

    Attributes:
        band_split_divisor: ``f_delta``; the low/high split sits at column
            ``floor(M / f_delta)``.
        rolloff_lambda: Power fraction for the roll-off features.
        flux_frame_length: Frame length (samples) for spectral flux.
        flux_overlap: Fractional overlap of consecutive flux frames.
        tf_flux_lag: Time lag ``L`` (rows) of the TF flux.
        renyi_alpha: Integer order of the Renyi entropy.
        spectrum_bins: Number of one-sided spectrum bins ``M`` for FrF*.
        time_source: ``"envelope"`` (|z|) or ``"raw"`` (Re z) for TiF*.
    """

    band_split_divisor: float = 4.0
    rolloff_lambda: float = 0.85
    flux_frame_length: int = 512
    flux_overlap: float = 0.5
    tf_flux_lag: int = 512
    renyi_alpha: int = 3
    spectrum_bins: int = 512
    time_source: str = "envelope"

    def __post_init__(self):
        if not self.band_split_divisor > 0:
            raise ConfigError("band_split_divisor must be positive")
        if not 0 < self.rolloff_lambda < 1:
            raise ConfigError("rolloff_lambda must lie in (0, 1)")
        if int(self.flux_frame_length) != self.flux_frame_length or self.flux_frame_length < 1:
            raise ConfigError("flux_frame_length must be a positive integer")
        if not 0 <= self.flux_overlap < 1:
            raise ConfigError("flux_overlap must lie in [0, 1)")
        if int(self.tf_flux_lag) != self.tf_flux_lag or self.tf_flux_lag < 1:
            raise ConfigError("tf_flux_lag must be a positive integer")
        if int(self.renyi_alpha) != self.renyi_alpha or self.renyi_alpha < 2:
            raise ConfigError("renyi_alpha must be an integer >= 2")
        if int(self.spectrum_bins) != self.spectrum_bins or self.spectrum_bins < 1:
            raise ConfigError("spectrum_bins must be a positive integer")
        if self.time_source not in ("envelope", "raw"):
            raise ConfigError("time_source must be 'envelope' or 'raw'")


@dataclass(frozen=True)
class FeatureVector:
    """Named feature values in the fixed order of their family set."""

    values: dict
    family_set: str

    def __post_init__(self):
        expected = FAMILY_SETS.get(self.family_set)
        if expected is None:
            raise InputError(f"unknown family set {self.family_set!r}")
        if tuple(self.values) != expected:
            raise InputError(f"feature names do not match family set {self.family_set!r}")
        if not all(np.isfinite(v) for v in self.values.values()):
            raise InputError("feature values must be finite")

    @property
    def names(self) -> tuple:
        return tuple(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(list(self.values.values()), dtype=float)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, name):
        return self.values[name]


class FeatureMatrix:
    """Feature rows with labels and source ids.

    ``X`` is ``n_rows x n_features``; ``names`` gives the column order. Any
    subset of a family's columns may be held (e.g. a best-k selection).
    """

    def __init__(self, names: Sequence[str], X, labels: Sequence[str],
                 source_ids: Sequence[str], family_set: str | None = None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(names):
            raise InputError("X must be n_rows x len(names)")
        if len(labels) != X.shape[0] or len(source_ids) != X.shape[0]:
            raise InputError("labels and source_ids must have one entry per row")
        if len(set(names)) != len(names):
            raise InputError("duplicate feature names")
        self.names = tuple(names)
        self.X = X
        self.labels = list(labels)
        self.source_ids = list(source_ids)
        self.family_set = family_set

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], labels, source_ids) -> "FeatureMatrix":
        if not vectors:
            raise InputError("no feature vectors given")
        family = vectors[0].family_set
        if any(v.family_set != family for v in vectors):
            raise InputError("all rows must share one family set")
        X = np.vstack([v.as_array() for v in vectors])
        return cls(vectors[0].names, X, labels, source_ids, family)

    def __len__(self):
        return self.X.shape[0]

    @property
    def rows(self) -> Iterator[tuple]:
        for i in range(len(self)):
            yield dict(zip(self.names, self.X[i])), self.labels[i], self.source_ids[i]

    @property
    def classes(self) -> list:
        return sorted(set(self.labels))

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.names.index(name)]
        except ValueError:
            raise InputError(f"unknown feature {name!r}") from None

    def select(self, names: Sequence[str]) -> "FeatureMatrix":
        idx = []
        for name in names:
            if name not in self.names:
                raise InputError(f"unknown feature {name!r}")
            idx.append(self.names.index(name))
        return FeatureMatrix(names, self.X[:, idx], self.labels, self.source_ids, self.family_set)

    def take(self, rows: Sequence[int]) -> "FeatureMatrix":
        rows = list(rows)
        return FeatureMatrix(self.names, self.X[rows], [self.labels[i] for i in rows],
                             [self.source_ids[i] for i in rows], self.family_set)


# -- shared statistics ---------------------------------------------------------

def _rank_positions(N: int, rank: float) -> tuple[int, int, float]:
    """0-based neighbours and weight for a 1-based fractional rank, clamped to [1, N]."""
    r = min(max(rank, 1.0), float(N))
    lo = int(np.floor(r))
    return lo - 1, min(lo, N - 1), r - lo


def quartile_range(values, axis=0):
    """Inter-quartile range on sorted data at ranks (N+1)/4 and 3(N+1)/4,
    linearly interpolated between order statistics."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    N = v.shape[0]
    lo_q = _rank_positions(N, (N + 1) / 4)
    hi_q = _rank_positions(N, 3 * (N + 1) / 4)
    kth = sorted({lo_q[0], lo_q[1], hi_q[0], hi_q[1]})
    part = np.partition(v, kth, axis=0)

    def at(pos):
        a, b, frac = pos
        return part[a] + frac * (part[b] - part[a])

    return at(hi_q) - at(lo_q)


def shannon_entropy_bits(values) -> float:
    """``-sum p log2 p`` with ``p = |v| / sum |v|``; zero input gives 0."""
    a = np.abs(np.ravel(values))
    total = a.sum()
    if total <= 0:
        return 0.0
    p = a[a > 0] / total
    return float(-np.sum(p * np.log2(p)))


def _int_power(x: np.ndarray, a: int) -> np.ndarray:
    # repeated multiplication; float pow is far slower on large matrices
    out = x.copy()
    for _ in range(a - 1):
        out *= x
    return out


def _median_abs_dev(v: np.ndarray) -> float:
    return float(np.median(np.abs(v - np.median(v))))


# -- time features ---------------------------------------------------------------

def envelope_features(e) -> dict:
    """TiF1-TiF10 of a real 1-D sequence (the envelope in normal use)."""
    e = np.asarray(e, dtype=float)
    N = e.size
    mu = e.mean()
    d = e - mu
    var = np.mean(d ** 2)
    sigma = np.sqrt(var)
    if sigma > 0:
        skew = np.sum(d ** 3) / (N * sigma ** 3)
        kurt = np.sum(d ** 4) / (N * sigma ** 4)
    else:
        skew = kurt = 0.0
    return {
        "TiF1": float(mu),
        "TiF2": float(var),
        "TiF3": float(skew),
        "TiF4": float(kurt),
        "TiF5": float(sigma / mu) if mu != 0 else 0.0,
        "TiF6": float(np.mean(np.abs(d))),
        "TiF7": _median_abs_dev(e),
        "TiF8": float(np.sqrt(np.mean(e ** 2))),
        "TiF9": float(quartile_range(e)),
        "TiF10": shannon_entropy_bits(e),
    }


def time_features(z, cfg: FeatureConfig | None = None) -> dict:
    """TiF1-TiF10 computed on the envelope ``|z[n]|`` (or ``Re z`` in raw mode)."""
    cfg = cfg or FeatureConfig()
    zv = z.values if isinstance(z, AnalyticSignal) else np.asarray(z, dtype=complex)
    if zv.size < 4:
        raise InputError("time features need at least 4 samples")
    source = np.abs(zv) if cfg.time_source == "envelope" else zv.real
    return envelope_features(source)


# -- frequency features -------------------------------------------------------------

def one_sided_power(zv, n_bins: int) -> np.ndarray:
    """Power of ``z`` in ``n_bins`` bands centered on ``k * fs / (2 n_bins)``.

    The signal is zero-padded to the smallest multiple of ``2 n_bins`` that
    holds it, transformed, and the positive-frequency half of ``|DFT|^2 / nfft``
    is summed into bands of equal width. The total equals the
    positive-frequency share of ``sum |z|^2``.
    """
    zv = np.asarray(zv, dtype=complex)
    two_m = 2 * int(n_bins)
    nfft = two_m * max(1, -(-zv.size // two_m))
    ratio = nfft // two_m
    spec = np.fft.fft(zv, n=nfft)[: nfft // 2]
    power = (spec.real ** 2 + spec.imag ** 2) / nfft
    band = np.minimum(np.floor(np.arange(nfft // 2) / ratio + 0.5).astype(int), n_bins - 1)
    return np.bincount(band, weights=power, minlength=n_bins)


def spectral_shape_features(magnitude, cfg: FeatureConfig | None = None) -> dict:
    """FrF1, FrF2 and FrF4-FrF7 of a one-sided magnitude spectrum ``|Z[k]|``."""
    cfg = cfg or FeatureConfig()
    mag = np.abs(np.asarray(magnitude, dtype=float))
    M = mag.size
    k = np.arange(1, M + 1)
    power = mag ** 2
    delta = int(np.floor(M / cfg.band_split_divisor))
    total_power = power.sum()
    total_mag = mag.sum()

    centroid = float(np.sum(k * mag) / total_mag) if total_mag > 0 else 0.0
    if total_power > 0:
        reach = np.cumsum(power) >= cfg.rolloff_lambda * total_power
        rolloff = (int(np.argmax(reach)) + 1) / M
        P = power / total_power
        P = P[P > 0]
        entropy = float(-np.sum(P * np.log(P)) / np.log(M)) if M > 1 else 0.0
    else:
        rolloff = entropy = 0.0
    if total_mag > 0 and np.all(mag > 0):
        flatness = float(np.exp(np.mean(np.log(mag))) / np.mean(mag))
    else:
        flatness = 0.0
    return {
        "FrF1": float(power[:delta].sum()),
        "FrF2": float(power[delta:].sum()),
        "FrF4": centroid,
        "FrF5": float(rolloff),
        "FrF6": flatness,
        "FrF7": entropy,
    }


def spectral_flux(zv, cfg: FeatureConfig | None = None) -> float:
    """Mean squared difference of unit-sum magnitude spectra of consecutive frames."""
    cfg = cfg or FeatureConfig()
    zv = np.asarray(zv, dtype=complex)
    L = int(cfg.flux_frame_length)
    hop = max(1, int(round(L * (1 - cfg.flux_overlap))))
    starts = range(0, zv.size - L + 1, hop)
    spectra = []
    for s in starts:
        mag = np.sqrt(one_sided_power(zv[s:s + L], cfg.spectrum_bins))
        total = mag.sum()
        spectra.append(mag / total if total > 0 else mag)
    if len(spectra) < 2:
        return 0.0
    S = np.array(spectra)
    return float(np.mean(np.sum(np.diff(S, axis=0) ** 2, axis=1)))


def freq_features(z, cfg: FeatureConfig | None = None) -> dict:
    """FrF1-FrF7 of an analytic signal."""
    cfg = cfg or FeatureConfig()
    zv = z.values if isinstance(z, AnalyticSignal) else np.asarray(z, dtype=complex)
    mag = np.sqrt(one_sided_power(zv, cfg.spectrum_bins))
    shape = spectral_shape_features(mag, cfg)
    out = {"FrF1": shape["FrF1"], "FrF2": shape["FrF2"], "FrF3": spectral_flux(zv, cfg)}
    out.update((name, shape[name]) for name in ("FrF4", "FrF5", "FrF6", "FrF7"))
    return out


# -- time-frequency features --------------------------------------------------------

def _rho(rho) -> np.ndarray:
    r = rho.rho if isinstance(rho, TfdMatrix) else np.asarray(rho, dtype=float)
    if r.ndim != 2:
        raise InputError("rho must be a 2-D matrix")
    return r


def tf_time_features(rho) -> dict:
    """TiTF1-TiTF9: statistics of all N*M distribution values."""
    r = _rho(rho)
    N, M = r.shape
    flat = r.ravel()
    count = flat.size
    mu = flat.mean()
    d = flat - mu
    d2 = d * d
    var = np.mean(d2)
    if var > 0 and count > 1:
        skew = np.dot(d2, d) / ((count - 1) * var ** 1.5)
        kurt = np.dot(d2, d2) / ((count - 1) * var ** 2)
    else:
        skew = kurt = 0.0
    return {
        "TiTF1": float(mu),
        "TiTF2": float(var),
        "TiTF3": float(skew),
        "TiTF4": float(kurt),
        "TiTF5": float(np.sqrt(var) / mu) if mu != 0 else 0.0,
        "TiTF6": float(np.mean(np.abs(d))),
        "TiTF7": _median_abs_dev(flat),
        "TiTF8": float(np.mean(quartile_range(r, axis=0))),
        "TiTF9": shannon_entropy_bits(r),
    }


def tf_freq_features(rho, cfg: FeatureConfig | None = None) -> dict:
    """FrTF1-FrTF7: sub-band energies, TF flux, mean instantaneous-frequency
    moment, roll-off, flatness and Renyi entropy of the distribution."""
    cfg = cfg or FeatureConfig()
    r = _rho(rho)
    N, M = r.shape
    k = np.arange(1, M + 1)
    split = int(np.floor(M / cfg.band_split_divisor))
    absr = np.abs(r)

    lag = int(cfg.tf_flux_lag)
    flux = float(np.sum((r[:N - lag] - r[lag:]) ** 2)) if lag < N else 0.0

    slice_energy = r.sum(axis=1)
    ok = slice_energy > 0
    if np.any(ok):
        inst_freq = float(np.mean((r[ok] @ k) / slice_energy[ok]))
    else:
        inst_freq = 0.0

    col_energy = absr.sum(axis=0)
    total_abs = col_energy.sum()
    if total_abs > 0:
        reach = np.cumsum(col_energy) >= cfg.rolloff_lambda * total_abs
        rolloff = (int(np.argmax(reach)) + 1) / M
    else:
        rolloff = 0.0

    if total_abs > 0 and np.all(absr > 0):
        flatness = float(np.exp(np.mean(np.log(absr))) / np.mean(absr))
    else:
        flatness = 0.0

    total = r.sum()
    renyi = 0.0
    if total > 0:
        a = int(cfg.renyi_alpha)
        p = r / total
        s = np.sum(_int_power(p, a))
        if s > 0:
            renyi = float(np.log2(s) / (1 - a))

    return {
        "FrTF1": float(r[:, :split].sum()),
        "FrTF2": float(r[:, split:].sum()),
        "FrTF3": flux,
        "FrTF4": inst_freq,
        "FrTF5": float(rolloff),
        "FrTF6": flatness,
        "FrTF7": renyi,
    }


def extract_all(segment, kernel: KernelSpec | None = None, cfg: FeatureConfig | None = None,
                family_set: str = TF) -> FeatureVector:
    """Full feature vector of one segment.

    Runs the Hilbert transform, then either the time and frequency features
    (``time_freq``) or the TFD followed by the TF features (``tf``).
    """
    if family_set not in FAMILY_SETS:
        raise InputError(f"unknown family set {family_set!r}")
    cfg = cfg or FeatureConfig()
    z = segment if isinstance(segment, AnalyticSignal) else analytic_signal(segment)
    if family_set == TIME_FREQ:
        values = time_features(z, cfg)
        values.update(freq_features(z, cfg))
    else:
        tfd = qtfd(z, kernel or KernelSpec())
        values = tf_time_features(tfd)
        values.update(tf_freq_features(tfd, cfg))
    return FeatureVector(values, family_set)


def extract_matrix(segments: Sequence[EegSegment], kernel: KernelSpec | None = None,
                   cfg: FeatureConfig | None = None, family_set: str = TF) -> FeatureMatrix:
    """Feature matrix over ``segments`` in the order given."""
    vectors = [extract_all(s, kernel, cfg, family_set) for s in segments]
    return FeatureMatrix.from_vectors(vectors, [s.label for s in segments],
                                      [s.source_id for s in segments])
