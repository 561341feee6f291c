"""Image-space aliasing produced by equispaced k-space masks.

Keeping only lines with ``k mod R == o`` turns the inverse transform into a
sum of ``R`` copies of the image, shifted by multiples of ``N/R`` and
weighted by the phases ``exp(-2 pi i r o / R)``. This module computes the
masked image through the transforms, predicts it from that closed form, and
compares the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kmask.dft_core import as_signal, dft_forward, dft_inverse
from kmask.mask_gen import SamplingMask, equispaced_mask

__all__ = [
    "AliasCopy",
    "AliasPrediction",
    "SUPPORT_TOL",
    "apply_mask",
    "clamp_reconstruct",
    "masked_image",
    "predicted_alias_image",
    "support_half_width",
    "verify_alias_identity",
]

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class AliasCopy:
    shift: int
    phase: complex


@dataclass(frozen=True)
class AliasPrediction:
    """The ``R`` shifted, phase-weighted copies and their normalised sum."""

    copies: tuple
    predicted: np.ndarray

    @property
    def acceleration(self) -> int:
        return len(self.copies)


def _check_layout(mask: SamplingMask, layout: str):
    if mask.layout != layout:
        raise ValueError(f"mask layout is {mask.layout!r}, expected {layout!r}")


def apply_mask(X, mask: SamplingMask, layout: str = "unshifted") -> np.ndarray:
    """Zero every k-space sample whose mask bit is clear.

    ``layout`` states how ``X`` is stored; it has to agree with the mask.
    """
    X = as_signal(X, "X")
    if X.size != mask.n:
        raise ValueError(f"length mismatch: signal has {X.size} samples, mask {mask.n}")
    _check_layout(mask, layout)
    return np.where(mask.bits, X, 0)


def masked_image(x, mask: SamplingMask) -> np.ndarray:
    """Inverse transform of the masked spectrum of ``x``."""
    x = as_signal(x)
    _check_layout(mask, "unshifted")
    return dft_inverse(apply_mask(dft_forward(x), mask))


def predicted_alias_image(x, acceleration: int, offset: int = 0) -> AliasPrediction:
    """Closed-form aliased image for an equispaced mask.

    ``predicted(m) = (1/R) sum_r x((m + r N/R) mod N) exp(-2 pi i r offset / R)``
    """
    x = as_signal(x)
    n = x.size
    if acceleration < 1:
        raise ValueError(f"acceleration must be >= 1, got {acceleration}")
    if n % acceleration:
        raise ValueError(f"length {n} is not a multiple of acceleration {acceleration}")
    if not 0 <= offset < acceleration:
        raise ValueError(f"offset must lie in [0, {acceleration}), got {offset}")
    step = n // acceleration
    copies = []
    predicted = np.zeros(n, dtype=np.complex128)
    for r in range(acceleration):
        # reduce r*offset first so the phase is an exact root of unity lookup
        phase = np.exp(-2j * np.pi * ((r * offset) % acceleration) / acceleration)
        copies.append(AliasCopy(shift=r * step, phase=complex(phase)))
        predicted += phase * np.roll(x, -r * step)
    predicted /= acceleration
    return AliasPrediction(copies=tuple(copies), predicted=predicted)


def verify_alias_identity(x, acceleration: int, offset: int = 0) -> float:
    """Max absolute gap between the transform path and the closed form."""
    x = as_signal(x)
    if x.size % acceleration:
        raise ValueError(f"length {x.size} is not a multiple of acceleration {acceleration}")
    mask = equispaced_mask(x.size, acceleration, offset)
    direct = masked_image(x, mask)
    predicted = predicted_alias_image(x, acceleration, offset).predicted
    return float(np.max(np.abs(direct - predicted)))


def clamp_reconstruct(y, acceleration: int = 4) -> np.ndarray:
    """``R * max(Re y, 0)``: exact for half-field-of-view real images under offset 1, R=4."""
    y = as_signal(y, "y")
    return acceleration * np.maximum(y.real, 0.0)


def support_half_width(x, tol: float = SUPPORT_TOL) -> bool:
    """Whether the support of ``x`` fits inside a cyclic window of ``N // 2`` samples."""
    x = as_signal(x)
    n = x.size
    support = np.flatnonzero(np.abs(x) > tol)
    if support.size == 0:
        return True
    window = n // 2
    if window == 0:
        return False
    # the smallest covering cyclic window is n minus the largest cyclic gap
    gaps = np.diff(np.concatenate((support, [support[0] + n])))
    span = n - int(gaps.max()) + 1
    return span <= window
