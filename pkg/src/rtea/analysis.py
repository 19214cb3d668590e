"""Diagnostics: RMSE, Hilbert envelope spectra and peak identification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal


def rmse(a, b) -> float:
    """Root-mean-square error between two equal-length signals."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.mean(d * d)))


@dataclass(frozen=True)
class EnvelopeSpectrum:
    """One-sided spectrum of the mean-removed Hilbert envelope."""

    freqs_hz: np.ndarray
    magnitude: np.ndarray
    smoothed: np.ndarray
    resolution_hz: float


def _moving_average(v: np.ndarray, width: int) -> np.ndarray:
    # Centered (zero-phase) moving average; width forced odd.
    if width % 2 == 0:
        width += 1
    kernel = np.full(width, 1.0 / width)
    return np.convolve(v, kernel, mode="same")


def envelope_spectrum(x, fs: float, nfft: int | None = None, smooth_hz: float = 2.0) -> EnvelopeSpectrum:
    """Envelope spectrum of ``x``: analytic-signal magnitude, mean removed,
    Fourier magnitude on ``nfft`` points, plus a lowpass-smoothed profile.

    The analytic signal doubles the one-sided spectrum in the frequency
    domain; the envelope mean is removed before the transform so the DC bin
    does not mask low-frequency repetition rates.  ``nfft`` may exceed the
    signal length to interpolate the spectrum (default: signal length).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-D signal with at least 2 samples")
    if not fs > 0:
        raise ValueError(f"sample rate must be positive, got {fs}")
    if nfft is None:
        nfft = x.size
    if nfft < x.size:
        raise ValueError(f"nfft = {nfft} is below the signal length {x.size}")
    env = np.abs(scipy.signal.hilbert(x))
    env = env - env.mean()
    magnitude = np.abs(np.fft.rfft(env, n=nfft))
    freqs = np.fft.rfftfreq(nfft, d=1.0 / fs)
    resolution = fs / nfft
    width = max(3, int(round(smooth_hz / resolution)))
    return EnvelopeSpectrum(
        freqs_hz=freqs,
        magnitude=magnitude,
        smoothed=_moving_average(magnitude, width),
        resolution_hz=resolution,
    )


@dataclass(frozen=True)
class PeakReport:
    """Peaks of the smoothed profile in a band, strongest first.

    ``harmonic_score`` is the fraction of multiples k*f1 (k = 1..n) of the
    strongest peak that coincide with some local maximum of the profile.
    """

    peaks: list[tuple[float, float]]
    fundamental_hz: float | None
    harmonic_score: float
    harmonics_found: list[int]


def _local_maxima(v: np.ndarray) -> np.ndarray:
    # scipy handles flat-topped peaks (returns plateau midpoints), which a
    # moving-averaged impulse produces; a strict two-sided test would miss
    # them entirely
    peaks, _ = scipy.signal.find_peaks(v)
    return peaks


def find_peaks(
    spec: EnvelopeSpectrum,
    band_hz: tuple[float, float],
    n_harmonics: int = 5,
    tol_hz: float | None = None,
) -> PeakReport:
    """Locate local maxima of the smoothed profile inside ``band_hz`` and
    score how consistently multiples of the strongest one reappear."""
    lo, hi = band_hz
    if not lo < hi:
        raise ValueError(f"empty band: {band_hz}")
    if hi <= float(spec.freqs_hz[0]) or lo >= float(spec.freqs_hz[-1]):
        raise ValueError(f"band {band_hz} lies outside the spectrum range")
    if n_harmonics < 1:
        raise ValueError(f"n_harmonics must be >= 1, got {n_harmonics}")
    if tol_hz is None:
        tol_hz = max(1.0, 2.0 * spec.resolution_hz)
    maxima = _local_maxima(spec.smoothed)
    freqs = spec.freqs_hz[maxima]
    mags = spec.smoothed[maxima]
    in_band = (freqs >= lo) & (freqs <= hi)
    order = np.argsort(mags[in_band])[::-1]
    peaks = [
        (float(f), float(g))
        for f, g in zip(freqs[in_band][order], mags[in_band][order])
    ]
    if not peaks:
        return PeakReport(peaks=[], fundamental_hz=None, harmonic_score=0.0, harmonics_found=[])
    f1 = peaks[0][0]
    found = [
        k
        for k in range(1, n_harmonics + 1)
        if freqs.size and np.min(np.abs(freqs - k * f1)) <= tol_hz
    ]
    return PeakReport(
        peaks=peaks,
        fundamental_hz=f1,
        harmonic_score=len(found) / n_harmonics,
        harmonics_found=found,
    )
