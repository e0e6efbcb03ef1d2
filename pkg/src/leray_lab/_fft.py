"""Thin FFT layer: scipy.fft with a process-wide worker cap.

The LERAY_LAB_THREADS environment variable caps internal FFT parallelism
(default: all CPUs). Coefficients follow the "forward" normalization, i.e.
spectral arrays hold true Fourier-series coefficients c_k with
u(x) = sum_k c_k exp(i k.x).
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft as _sfft


def worker_count() -> int:
    env = os.environ.get("LERAY_LAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"LERAY_LAB_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise ValueError("LERAY_LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def fftn(phys: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Physical samples -> Fourier coefficients c_k."""
    return _sfft.fftn(phys, axes=axes, norm="forward", workers=worker_count())


def ifftn(coeff: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Fourier coefficients c_k -> complex physical samples."""
    return _sfft.ifftn(coeff, axes=axes, norm="forward", workers=worker_count())


def rfftn(phys: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Real samples -> half-spectrum coefficients (last axis N//2 + 1)."""
    return _sfft.rfftn(phys, axes=axes, norm="forward", workers=worker_count())


def irfftn(coeff: np.ndarray, shape: tuple[int, ...], axes: tuple[int, ...]) -> np.ndarray:
    """Half-spectrum coefficients -> real samples (fast path for real fields)."""
    return _sfft.irfftn(coeff, s=shape, axes=axes, norm="forward", workers=worker_count())
