"""Real/analytic signal conversion, DFT helpers, windows and synthetic test signals.

The synthetic generators (tones and linear chirps) have known instantaneous
frequency laws, which makes them convenient oracles for the TFD engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from tfseizure.errors import InputError

HEALTHY = "healthy"
SEIZURE = "seizure"
LABELS = (HEALTHY, SEIZURE)

WINDOW_KINDS = ("hamming", "hann", "rectangular")


@dataclass(frozen=True, eq=False)
class EegSegment:
    """One real-valued single-channel recording.

    Attributes:
        samples: 1-D float array of length N (microvolts for real EEG).
        sample_rate_hz: Sampling frequency in Hz.
        label: ``"healthy"``, ``"seizure"`` or None.
        source_id: Identifier of the recording (file stem for real data).
    """

    samples: np.ndarray
    sample_rate_hz: float
    label: Optional[str] = None
    source_id: str = ""

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise InputError("segment must be 1-D with at least 2 samples")
        if not np.all(np.isfinite(x)):
            raise InputError(f"segment {self.source_id!r} has non-finite samples")
        if not self.sample_rate_hz > 0:
            raise InputError("sample_rate_hz must be positive")
        if self.label is not None and self.label not in LABELS:
            raise InputError(f"unknown label {self.label!r}")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True, eq=False)
class AnalyticSignal:
    """Complex signal with (ideally) a one-sided spectrum."""

    values: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        z = np.asarray(self.values, dtype=complex)
        if z.ndim != 1 or z.size < 1:
            raise InputError("analytic signal must be a non-empty 1-D array")
        if not np.all(np.isfinite(z)):
            raise InputError("analytic signal has non-finite values")
        if not self.sample_rate_hz > 0:
            raise InputError("sample_rate_hz must be positive")
        object.__setattr__(self, "values", z)

    def __len__(self):
        return self.values.size

    @property
    def envelope(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class WindowSpec:
    kind: str = "hamming"
    length: int = 127

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise InputError(f"unknown window kind {self.kind!r}; expected one of {WINDOW_KINDS}")
        if int(self.length) != self.length or self.length < 1 or self.length % 2 == 0:
            raise InputError(f"window length must be an odd positive integer, got {self.length}")


def dft(values, size: Optional[int] = None) -> np.ndarray:
    """Unnormalized forward DFT of ``values`` zero-padded to ``size`` points."""
    v = np.asarray(values, dtype=complex)
    size = v.size if size is None else int(size)
    if size <= 0:
        raise InputError("DFT size must be positive")
    if size < v.size:
        raise InputError(f"DFT size {size} is shorter than the input ({v.size})")
    return np.fft.fft(v, n=size)


def idft(values, size: Optional[int] = None) -> np.ndarray:
    """Inverse DFT, scaled by ``1/size``."""
    v = np.asarray(values, dtype=complex)
    size = v.size if size is None else int(size)
    if size <= 0:
        raise InputError("DFT size must be positive")
    if size < v.size:
        raise InputError(f"DFT size {size} is shorter than the input ({v.size})")
    return np.fft.ifft(v, n=size)


def make_window(spec: WindowSpec) -> np.ndarray:
    """Symmetric window of odd length with a peak of exactly 1 at the center."""
    L = spec.length
    if L == 1 or spec.kind == "rectangular":
        return np.ones(L)
    n = np.arange(L)
    c = np.cos(2 * np.pi * n / (L - 1))
    if spec.kind == "hamming":
        w = 0.54 - 0.46 * c
    else:
        w = 0.5 * (1.0 - c)
    w[L // 2] = 1.0
    # enforce exact symmetry against cos rounding
    return 0.5 * (w + w[::-1])


def _as_samples(x) -> tuple[np.ndarray, float]:
    if isinstance(x, EegSegment):
        return x.samples, x.sample_rate_hz
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError("signal has non-finite samples")
    return arr, 1.0


def analytic_signal(segment) -> AnalyticSignal:
    """Analytic version of a real signal via the frequency-domain Hilbert transform.

    The full-length DFT of the input is taken, strictly negative frequencies are
    zeroed, strictly positive ones doubled, DC (and Nyquist for even N) kept.

    Args:
        segment: An :class:`EegSegment` or a real 1-D array (sample rate 1).

    Returns:
        The :class:`AnalyticSignal` whose real part equals the input.
    """
    x, fs = _as_samples(segment)
    N = x.size
    # DC passes through untouched; transforming only the AC part keeps constants exact
    dc = x.mean()
    X = np.fft.fft(x - dc)
    h = np.zeros(N)
    if N % 2 == 0:
        h[N // 2] = 1.0
        h[1:N // 2] = 2.0
    else:
        h[1:(N + 1) // 2] = 2.0
    hilbert = np.fft.ifft(X * h).imag
    return AnalyticSignal(x + 1j * hilbert, fs)


def _check_frequency(freq_hz, sample_rate_hz):
    if not sample_rate_hz > 0:
        raise InputError("sample_rate_hz must be positive")
    if not 0 < freq_hz < sample_rate_hz / 2:
        raise InputError(
            f"frequency {freq_hz} Hz outside (0, Nyquist={sample_rate_hz / 2:g} Hz)"
        )


def synth_tone(freq_hz, sample_rate_hz, n_samples, amplitude=1.0,
               label=None, source_id="tone") -> EegSegment:
    """``amplitude * cos(2 pi f n / fs)`` for n = 0 .. n_samples - 1."""
    _check_frequency(freq_hz, sample_rate_hz)
    n = np.arange(int(n_samples))
    x = amplitude * np.cos(2 * np.pi * freq_hz * n / sample_rate_hz)
    return EegSegment(x, sample_rate_hz, label, source_id)


def chirp_phase(f0_hz, f1_hz, sample_rate_hz, n_samples) -> np.ndarray:
    """Phase (radians) of the linear chirp whose frequency goes f0 -> f1
    between the first and last sample."""
    n = np.arange(int(n_samples))
    t = n / sample_rate_hz
    duration = (n_samples - 1) / sample_rate_hz
    rate = (f1_hz - f0_hz) / duration
    return 2 * np.pi * (f0_hz * t + 0.5 * rate * t ** 2)


def synth_lfm_chirp(f0_hz, f1_hz, sample_rate_hz, n_samples,
                    label=None, source_id="chirp") -> EegSegment:
    """Unit-amplitude linear FM chirp sweeping ``f0_hz`` to ``f1_hz``."""
    _check_frequency(f0_hz, sample_rate_hz)
    _check_frequency(f1_hz, sample_rate_hz)
    x = np.cos(chirp_phase(f0_hz, f1_hz, sample_rate_hz, n_samples))
    return EegSegment(x, sample_rate_hz, label, source_id)
