"""Discrete Fourier transforms and layout shifts.

Convention: the forward transform carries no normalisation factor and the
inverse carries ``1/N``::

    X(k) = sum_n x(n) exp(-2 pi i k n / N)
    x(n) = (1/N) sum_k X(k) exp(+2 pi i k n / N)

All indexing is modulo the signal length. The fast path is backed by
:mod:`numpy.fft` (pocketfft, exact mixed-radix with Bluestein fallback for
large prime factors); :func:`dft_reference` is an independent quadratic-time
evaluation of the sums above and serves as its test oracle.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_signal",
    "as_image",
    "dft_forward",
    "dft_inverse",
    "dft_reference",
    "dft2_forward",
    "dft2_inverse",
    "fftshift",
    "ifftshift",
    "rotate",
]


def as_signal(x, name: str = "x") -> np.ndarray:
    """Validate and convert ``x`` to a 1D complex128 array (a copy)."""
    arr = np.array(x, dtype=np.complex128, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have length >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def as_image(x, name: str = "x") -> np.ndarray:
    """Validate and convert ``x`` to a 2D complex128 array (a copy)."""
    arr = np.array(x, dtype=np.complex128, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have h, w >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def dft_forward(x) -> np.ndarray:
    """Forward DFT, ``X(k) = sum_n x(n) exp(-2 pi i k n / N)``."""
    return np.fft.fft(as_signal(x))


def dft_inverse(X) -> np.ndarray:
    """Inverse DFT with ``1/N`` normalisation; exact inverse of :func:`dft_forward`."""
    return np.fft.ifft(as_signal(X, "X"))


def dft_reference(x, inverse: bool = False) -> np.ndarray:
    """Direct O(N^2) evaluation of the DFT sums.

    The exponent ``k*n`` is reduced modulo ``N`` in integer arithmetic before
    the twiddle lookup so that large products do not lose phase accuracy.
    """
    x = as_signal(x)
    n = x.size
    idx = np.arange(n)
    kn = np.outer(idx, idx) % n
    sign = 1.0 if inverse else -1.0
    twiddle = np.exp(sign * 2j * np.pi * np.arange(n) / n)
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        out[k] = np.sum(x * twiddle[kn[k]])
    if inverse:
        out /= n
    return out


def rotate(x, a: int) -> np.ndarray:
    """Return ``y`` with ``y(n) = x((n + a) mod N)``."""
    x = as_signal(x)
    return np.roll(x, -int(a))


def fftshift(x) -> np.ndarray:
    """Move index 0 (DC) to position ``N // 2``."""
    x = as_signal(x)
    return np.roll(x, x.size // 2)


def ifftshift(x) -> np.ndarray:
    """Exact inverse of :func:`fftshift` for every length, odd included."""
    x = as_signal(x)
    return np.roll(x, -(x.size // 2))


def dft2_forward(x) -> np.ndarray:
    """Separable 2D forward DFT: 1D transform along columns then rows."""
    x = as_image(x)
    return np.fft.fft(np.fft.fft(x, axis=1), axis=0)


def dft2_inverse(X) -> np.ndarray:
    """Separable 2D inverse DFT (``1/(h w)`` normalisation)."""
    X = as_image(X, "X")
    return np.fft.ifft(np.fft.ifft(X, axis=1), axis=0)
