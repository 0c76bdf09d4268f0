"""Discrete quadratic time-frequency distributions.

Implements

    rho[n, k] = 2 Re DFT_{m -> k} { G[n, m] *_n ( z[n + m] z*[n - m] ) }

for a smoothed (pseudo) Wigner-Ville kernel and a Choi-Williams kernel, plus
the spectrogram computed directly as the squared magnitude of a sliding-window
DFT. Column ``k`` of every distribution corresponds to the physical frequency
``k * fs / (2 M)``, so the M columns span 0 .. fs/2.

Samples of ``z`` outside ``[0, N-1]`` read as zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import fftconvolve

from tfseizure.errors import ConfigError, InputError
from tfseizure.signals import AnalyticSignal, WindowSpec, make_window

KERNEL_KINDS = ("swvd", "cwd", "spec")

# Choi-Williams time-lag kernel is cut where it drops below this fraction of its peak.
CWD_TRUNCATION = 1e-6

# rows per FFT batch; bounds peak memory for the spectrogram
_ROW_CHUNK = 1024


@dataclass(frozen=True)
class KernelSpec:
    """Which distribution to compute and its discretization parameters.

    Attributes:
        kind: ``"swvd"``, ``"cwd"`` or ``"spec"``.
        lag_window_length: Odd number of lags ``L`` (SWVD/CWD), or the analysis
            window length for the spectrogram.
        fft_length: Number of frequency columns ``M``.
        alpha: Choi-Williams spread parameter (ignored by other kinds).
        window_kind: Window family for the SWVD lag window and the SPEC
            analysis window.
    """

    kind: str = "swvd"
    lag_window_length: int = 127
    fft_length: int = 512
    alpha: float = 1.0
    window_kind: str = "hamming"

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        L, M = self.lag_window_length, self.fft_length
        if int(L) != L or L < 1 or L % 2 == 0:
            raise ConfigError(f"lag_window_length must be odd and positive, got {L}")
        if int(M) != M or M < 1:
            raise ConfigError(f"fft_length must be a positive integer, got {M}")
        if M < L:
            raise ConfigError(f"fft_length ({M}) must be >= lag_window_length ({L})")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        # validates window_kind
        self.window

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.window_kind, self.lag_window_length)

    @property
    def half_lag(self) -> int:
        return (self.lag_window_length - 1) // 2

    @classmethod
    def swvd(cls, **kw) -> "KernelSpec":
        return cls(kind="swvd", **kw)

    @classmethod
    def cwd(cls, alpha=1.0, **kw) -> "KernelSpec":
        return cls(kind="cwd", alpha=alpha, **kw)

    @classmethod
    def spec(cls, **kw) -> "KernelSpec":
        return cls(kind="spec", **kw)


@dataclass(frozen=True, eq=False)
class TfdMatrix:
    """N x M real distribution; rows are time samples, columns frequency bins."""

    rho: np.ndarray
    sample_rate_hz: float
    kernel: KernelSpec = field(default_factory=KernelSpec)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if rho.ndim != 2:
            raise InputError("rho must be a 2-D matrix")
        if not np.all(np.isfinite(rho)):
            raise InputError("rho has non-finite entries")
        object.__setattr__(self, "rho", rho)

    @property
    def shape(self):
        return self.rho.shape

    @property
    def frequencies_hz(self) -> np.ndarray:
        M = self.rho.shape[1]
        return np.arange(M) * self.sample_rate_hz / (2 * M)

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(self.rho.shape[0]) / self.sample_rate_hz


def _values(z) -> np.ndarray:
    if isinstance(z, AnalyticSignal):
        return z.values
    return np.asarray(z, dtype=complex)


def instantaneous_autocorrelation(z, lag_window_length: int) -> np.ndarray:
    """``K[n, m + h] = z[n + m] conj(z[n - m])`` for ``m = -h .. h``.

    Returns an ``N x L`` complex matrix with ``h = (L - 1) // 2``.
    """
    L = int(lag_window_length)
    if L < 1 or L % 2 == 0:
        raise InputError(f"lag_window_length must be odd and positive, got {lag_window_length}")
    zv = _values(z)
    N, h = zv.size, (L - 1) // 2
    zp = np.concatenate([np.zeros(h, complex), zv, np.zeros(h, complex)])
    n = np.arange(N)[:, None] + h
    m = np.arange(-h, h + 1)[None, :]
    return zp[n + m] * np.conj(zp[n - m])


def cwd_time_lag_kernel(alpha: float, half_lag: int, n_max: int | None = None) -> np.ndarray:
    """Discretized Choi-Williams time-lag kernel.

    Column ``m + half_lag`` holds ``sqrt(alpha / (4 pi m^2)) exp(-alpha n^2 / (4 m^2))``
    for time offsets ``n = -P .. P`` (row ``n + P``); entries below
    ``CWD_TRUNCATION`` of the column peak are zero. The lag-0 column is a unit
    impulse. ``n_max`` caps the half-support ``P``.
    """
    lags = np.arange(-half_lag, half_lag + 1)
    reach = 2 * np.abs(lags) * np.sqrt(np.log(1 / CWD_TRUNCATION) / alpha)
    P = int(np.floor(reach.max())) if lags.size else 0
    if n_max is not None:
        P = min(P, int(n_max))
    n = np.arange(-P, P + 1)[:, None]
    G = np.zeros((2 * P + 1, lags.size))
    nz = lags != 0
    m = lags[nz][None, :].astype(float)
    shape = np.exp(-alpha * n ** 2 / (4 * m ** 2))
    G[:, nz] = np.where(shape >= CWD_TRUNCATION, np.sqrt(alpha / (4 * np.pi * m ** 2)) * shape, 0.0)
    G[P, ~nz] = 1.0
    return G


def kernelled_autocorrelation(z, kernel: KernelSpec) -> np.ndarray:
    """``G *_n K`` for the SWVD or CWD kernel, as an ``N x L`` complex matrix."""
    K = instantaneous_autocorrelation(z, kernel.lag_window_length)
    if kernel.kind == "swvd":
        return K * make_window(kernel.window)[None, :]
    if kernel.kind == "cwd":
        N = K.shape[0]
        G = cwd_time_lag_kernel(kernel.alpha, kernel.half_lag, n_max=max(N - 1, 0))
        if not np.any(K):
            return K
        return fftconvolve(K, G, mode="same", axes=0)
    raise ConfigError(f"kernel kind {kernel.kind!r} has no lag-domain form here")


def lag_dft(R: np.ndarray, fft_length: int) -> np.ndarray:
    """DFT over the lag axis of an ``N x L`` lag matrix (lag 0 in the middle column).

    Non-negative lags go to the first columns of the M-point buffer and negative
    lags wrap to the end. The complex result is returned before taking ``2 Re``.
    """
    N, L = R.shape
    h = (L - 1) // 2
    M = int(fft_length)
    if M < L:
        raise ConfigError(f"fft_length ({M}) must be >= lag_window_length ({L})")
    buf = np.zeros((N, M), dtype=complex)
    buf[:, :h + 1] = R[:, h:]
    if h:
        buf[:, M - h:] = R[:, :h]
    return np.fft.fft(buf, axis=1)


def stft_two_sided(z, window: np.ndarray, nfft: int) -> np.ndarray:
    """Sliding-window DFT evaluated at every sample (hop 1).

    Frame ``n`` covers samples ``n - h .. n + h`` of the zero-padded signal,
    multiplied by ``window`` (odd length ``2h + 1``). Returns ``N x nfft``.
    """
    zv = _values(z)
    w = np.asarray(window, dtype=float)
    L = w.size
    if L % 2 == 0:
        raise InputError("analysis window length must be odd")
    if nfft < L:
        raise ConfigError(f"nfft ({nfft}) must be >= window length ({L})")
    h = (L - 1) // 2
    zp = np.concatenate([np.zeros(h, complex), zv, np.zeros(h, complex)])
    frames = sliding_window_view(zp, L)
    out = np.empty((zv.size, nfft), dtype=complex)
    for start in range(0, zv.size, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, zv.size)
        out[start:stop] = np.fft.fft(frames[start:stop] * w, n=nfft, axis=1)
    return out


def _spectrogram(zv: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    w = make_window(kernel.window)
    M = kernel.fft_length
    h = kernel.half_lag
    zp = np.concatenate([np.zeros(h, complex), zv, np.zeros(h, complex)])
    frames = sliding_window_view(zp, w.size)
    rho = np.empty((zv.size, M))
    # a 2M-point transform puts column k at k * fs / (2M), matching the lag-domain kinds
    for start in range(0, zv.size, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, zv.size)
        S = np.fft.fft(frames[start:stop] * w, n=2 * M, axis=1)[:, :M]
        rho[start:stop] = S.real ** 2 + S.imag ** 2
    return rho


def qtfd(z, kernel: KernelSpec | None = None) -> TfdMatrix:
    """Quadratic TFD of an analytic signal.

    Args:
        z: :class:`AnalyticSignal` (or complex array, sample rate taken as 1).
        kernel: Distribution and discretization; defaults to SWVD with a
            127-lag Hamming window and M = 512.

    Returns:
        :class:`TfdMatrix` of shape ``N x M``.
    """
    kernel = KernelSpec() if kernel is None else kernel
    fs = z.sample_rate_hz if isinstance(z, AnalyticSignal) else 1.0
    zv = _values(z)
    if kernel.kind == "spec":
        rho = _spectrogram(zv, kernel)
    else:
        R = kernelled_autocorrelation(zv, kernel)
        rho = 2.0 * lag_dft(R, kernel.fft_length).real
    return TfdMatrix(rho, fs, kernel)


def to_greyscale(rho) -> np.ndarray:
    """Map a distribution to an 8-bit image.

    Pixel value is ``round(255 (rho - min) / (max - min))``; time runs along
    the horizontal axis and the highest frequency is the top row. Constant
    input maps to all zeros.
    """
    r = np.asarray(rho.rho if isinstance(rho, TfdMatrix) else rho, dtype=float)
    lo, hi = r.min(), r.max()
    if hi > lo:
        px = np.floor(255.0 * (r - lo) / (hi - lo) + 0.5)
    else:
        px = np.zeros_like(r)
    return np.clip(px, 0, 255).astype(np.uint8).T[::-1]


def write_pgm(path, image: np.ndarray) -> None:
    """Write an 8-bit array as a binary (P5) PGM file."""
    img = np.ascontiguousarray(image, dtype=np.uint8)
    height, width = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM written by :func:`write_pgm` (no header comments)."""
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(maxsplit=4)
    if len(parts) < 4 or parts[0] != b"P5":
        raise InputError(f"{path}: not a binary PGM file")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise InputError(f"{path}: only 8-bit PGM is supported")
    header_len = len(b"P5\n%d %d\n255\n" % (width, height))
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=header_len)
    return pixels.reshape(height, width)


def render_greyscale(tfd: TfdMatrix, path) -> np.ndarray:
    """Write ``tfd`` as a PGM image at ``path`` and return the pixel array."""
    img = to_greyscale(tfd)
    dirname = os.path.dirname(os.fspath(path))
    if dirname and not os.path.isdir(dirname):
        raise OSError(f"cannot write {path}: directory does not exist")
    write_pgm(path, img)
    return img
