"""Seeded synthetic magnetisation images.

Every random draw goes through ``numpy.random.Generator(PCG64)`` seeded from
a ``SeedSequence`` derived from ``PhantomSpec.seed``, so a spec always
reproduces the same array on any platform.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from kmask.dft_core import as_signal

__all__ = [
    "PHANTOM_KINDS",
    "PHASE_MODELS",
    "PhantomSpec",
    "add_noise",
    "apply_phase_ramp",
    "make_phantom",
    "support_length",
]

PHANTOM_KINDS = ("box", "smooth_bumps", "random_smooth")
PHASE_MODELS = ("none", "constant", "ramp", "random")


@dataclass(frozen=True)
class PhantomSpec:
    """Synthetic image description.

    Attributes:
        n: Width along the subsampled (phase-encode) axis.
        kind: ``box``, ``smooth_bumps`` or ``random_smooth``.
        support_fraction: Fraction of the width that may be non-zero.
        start: First index of the (cyclic) support window.
        phase: ``none``, ``constant`` (``phase_param`` radians), ``ramp``
            (``phase_param`` is the slope) or ``random`` (smooth random phase
            of peak amplitude ``phase_param`` radians).
        phase_param: Parameter of the phase model.
        noise_sigma: Per-component std of complex white noise.
        seed: Seed for every random draw.
        height: Number of rows for a 2D phantom; ``None`` gives a 1D signal.
        amplitude: Box height.
    """

    n: int
    kind: str = "box"
    support_fraction: float = 0.5
    start: int = 0
    phase: str = "none"
    phase_param: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    height: Optional[int] = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kind not in PHANTOM_KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}; expected one of {PHANTOM_KINDS}")
        if self.phase not in PHASE_MODELS:
            raise ValueError(f"unknown phase model {self.phase!r}; expected one of {PHASE_MODELS}")
        if not 0 < self.support_fraction <= 1:
            raise ValueError(f"support_fraction must lie in (0, 1], got {self.support_fraction}")
        if support_length(self.n, self.support_fraction) < 1:
            raise ValueError("support_fraction * n must be >= 1")
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise ValueError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        if not math.isfinite(self.phase_param):
            raise ValueError("phase_param must be finite")
        if self.height is not None and self.height < 1:
            raise ValueError(f"height must be >= 1, got {self.height}")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PhantomSpec":
        return cls(**data)


def support_length(n: int, support_fraction: float) -> int:
    # tolerance keeps e.g. 0.3 * 10 from flooring to 2
    return int(math.floor(support_fraction * n + 1e-9))


def _lowpass_noise(rng: np.random.Generator, length: int, cutoff: int) -> np.ndarray:
    """Real Gaussian noise keeping only the ``cutoff`` lowest rfft bins above DC."""
    spectrum = np.fft.rfft(rng.standard_normal(length))
    spectrum[cutoff + 1 :] = 0
    return np.fft.irfft(spectrum, n=length)


def _profile(kind: str, length: int, amplitude: float, rng: np.random.Generator) -> np.ndarray:
    """Non-negative magnitude profile filling a window of ``length`` samples."""
    if kind == "box":
        return np.full(length, amplitude, dtype=float)
    if kind == "smooth_bumps":
        pos = np.arange(length, dtype=float)
        out = np.zeros(length)
        for _ in range(int(rng.integers(3, 6))):
            centre = rng.uniform(0, length - 1) if length > 1 else 0.0
            half_width = max(1.0, rng.uniform(length / 8, length / 2))
            height = rng.uniform(0.5, 1.5)
            d = np.abs(pos - centre)
            out += np.where(d < half_width, height * 0.5 * (1 + np.cos(np.pi * d / half_width)), 0.0)
        return out
    # random_smooth
    if length < 3:
        return np.abs(rng.standard_normal(length)) + 0.1
    smooth = _lowpass_noise(rng, length, max(1, length // 8))
    return np.abs(smooth)


def _embed(values: np.ndarray, n: int, start: int) -> np.ndarray:
    out = np.zeros(n)
    out[(start + np.arange(values.size)) % n] = values
    return out


def _phase(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.n
    if spec.phase == "none":
        return np.ones(n, dtype=np.complex128)
    if spec.phase == "constant":
        return np.full(n, np.exp(1j * spec.phase_param))
    if spec.phase == "ramp":
        return np.exp(1j * np.pi * spec.phase_param * np.arange(n) / n)
    smooth = _lowpass_noise(rng, n, max(1, n // 16)) if n >= 3 else rng.standard_normal(n)
    peak = np.max(np.abs(smooth))
    if peak > 0:
        smooth = smooth / peak
    return np.exp(1j * spec.phase_param * smooth)


def make_phantom(spec: PhantomSpec) -> np.ndarray:
    """Render ``spec`` as a complex array of shape ``(n,)`` or ``(height, n)``.

    The image is a non-negative magnitude (zero outside the support window)
    times the phase model along the width axis, plus complex white noise.
    """
    mag_seq, phase_seq, noise_seq, row_seq = np.random.SeedSequence(spec.seed).spawn(4)
    length = support_length(spec.n, spec.support_fraction)
    magnitude = _embed(
        _profile(spec.kind, length, spec.amplitude, np.random.default_rng(mag_seq)),
        spec.n,
        spec.start,
    )
    image = magnitude * _phase(spec, np.random.default_rng(phase_seq))
    if spec.height is not None:
        rows = _profile(spec.kind, spec.height, 1.0, np.random.default_rng(row_seq))
        image = rows[:, None] * image[None, :]
    if spec.noise_sigma > 0:
        image = image + _noise(image.shape, spec.noise_sigma, np.random.default_rng(noise_seq))
    return image.astype(np.complex128)


def _noise(shape, sigma: float, rng: np.random.Generator) -> np.ndarray:
    parts = rng.standard_normal((2,) + tuple(shape))
    return sigma * (parts[0] + 1j * parts[1])


def apply_phase_ramp(x, slope: float) -> np.ndarray:
    """Multiply by ``exp(i pi slope n / N)``."""
    x = as_signal(x)
    n = x.size
    return x * np.exp(1j * np.pi * slope * np.arange(n) / n)


def add_noise(x, sigma: float, seed: int) -> np.ndarray:
    """Add circular complex Gaussian noise, std ``sigma`` per component."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    x = np.array(x, dtype=np.complex128)
    if sigma == 0:
        return x
    return x + _noise(x.shape, sigma, np.random.default_rng(seed))
