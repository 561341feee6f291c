"""Construction of Cartesian line-sampling masks.

Masks are always generated in the unshifted (DC at index 0) layout and moved
into the centred layout only through :func:`shift_mask`, so the residue
pattern ``k mod R`` is never computed against shifted indices.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "KINDS",
    "LAYOUTS",
    "MaskSpec",
    "SamplingMask",
    "add_center_lines",
    "center_indices",
    "custom_mask",
    "default_negative_offset",
    "equispaced_mask",
    "extend_mask_2d",
    "full_mask",
    "offset_mask_irregular",
    "random_mask",
    "sampling_fraction",
    "shift_mask",
]

KINDS = ("equispaced", "irregular", "random", "custom")
LAYOUTS = ("unshifted", "shifted")


@dataclass(frozen=True)
class MaskSpec:
    """Parameters that produced a mask.

    ``offset_pos`` holds the residue for equispaced masks and the positive-half
    offset for irregular ones. ``custom`` covers masks given directly as bits
    (full masks, masks read from CSV).
    """

    width: int
    acceleration: int
    kind: str = "equispaced"
    offset_pos: Optional[int] = None
    offset_neg: Optional[int] = None
    seed: Optional[int] = None
    center_lines: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mask kind {self.kind!r}; expected one of {KINDS}")
        if self.width < 1:
            raise ValueError(f"width must be >= 1, got {self.width}")
        min_accel = 1 if self.kind == "custom" else 2
        if self.acceleration < min_accel:
            raise ValueError(f"acceleration must be >= {min_accel}, got {self.acceleration}")
        if not 0 <= self.center_lines <= self.width:
            raise ValueError(f"center_lines must lie in [0, {self.width}], got {self.center_lines}")
        for name in ("offset_pos", "offset_neg"):
            value = getattr(self, name)
            if value is not None and not 0 <= value < self.acceleration:
                raise ValueError(
                    f"{name} must lie in [0, {self.acceleration}), got {value}"
                )
        if self.kind in ("equispaced", "irregular") and self.offset_pos is None:
            raise ValueError(f"{self.kind} masks need offset_pos")
        if self.kind == "irregular" and self.offset_neg is None:
            raise ValueError("irregular masks need offset_neg")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random masks need an explicit seed")


@dataclass(frozen=True)
class SamplingMask:
    """Binary keep/drop vector over k-space line indices.

    ``bits`` is stored read-only. ``misaligned`` is set when an equispaced
    mask was requested for a width that is not a multiple of the
    acceleration; the aliased copies then sit at fractional pixel offsets.
    """

    bits: np.ndarray
    layout: str
    spec: MaskSpec
    misaligned: bool = field(default=False, compare=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool).reshape(-1)
        if bits.size < 1:
            raise ValueError("mask must have length >= 1")
        if not bits.any():
            raise ValueError("mask must keep at least one line")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if bits.size != self.spec.width:
            raise ValueError(f"bits length {bits.size} != spec width {self.spec.width}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.spec == other.spec
            and np.array_equal(self.bits, other.bits)
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return int(self.bits.size)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.bits.astype(dtype if dtype is not None else bool)


def default_negative_offset(acceleration: int) -> int:
    """Negative-half offset that reproduces the ``k mod R == 1`` pattern.

    Counting backwards from the last index, index ``N-1-j`` satisfies
    ``(N-1-j) mod R == 1`` for every multiple ``N`` of ``R`` exactly when
    ``j mod R == R-2``.
    """
    if acceleration < 2:
        raise ValueError(f"acceleration must be >= 2, got {acceleration}")
    return (acceleration - 2) % acceleration


def equispaced_mask(n: int, acceleration: int, offset: int = 0) -> SamplingMask:
    """Keep every line with ``k mod acceleration == offset``.

    Widths that are not a multiple of ``acceleration`` are accepted but the
    returned mask has ``misaligned=True``; prefer :func:`offset_mask_irregular`
    for those.
    """
    spec = MaskSpec(width=n, acceleration=acceleration, kind="equispaced", offset_pos=offset)
    bits = np.arange(n) % acceleration == offset
    misaligned = n % acceleration != 0
    if misaligned:
        logger.debug(
            "width %d is not a multiple of acceleration %d: aliased copies fall "
            "between pixels", n, acceleration
        )
    return SamplingMask(bits, "unshifted", spec, misaligned=misaligned)


def offset_mask_irregular(
    n: int, acceleration: int, offset_pos: int = 1, offset_neg: Optional[int] = None
) -> SamplingMask:
    """Offset mask built separately on the positive and negative frequency halves.

    The positive half has ``(n + 1) // 2`` entries starting at DC; the negative
    half holds the remaining entries and is filled counting backwards from
    the end, so the pattern relative to the highest negative frequency does
    not depend on whether ``n`` is a multiple of ``acceleration``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if offset_neg is None:
        offset_neg = default_negative_offset(acceleration)
    spec = MaskSpec(
        width=n,
        acceleration=acceleration,
        kind="irregular",
        offset_pos=offset_pos,
        offset_neg=offset_neg,
    )
    poslen = (n + 1) // 2
    neglen = n - poslen
    positive = np.zeros(poslen, dtype=bool)
    negative = np.zeros(neglen, dtype=bool)
    positive[offset_pos::acceleration] = True
    negative[offset_neg::acceleration] = True
    bits = np.concatenate((positive, negative[::-1]))
    return SamplingMask(bits, "unshifted", spec)


def center_indices(n: int, count: int) -> np.ndarray:
    """Indices of the ``count`` lowest-frequency lines in unshifted layout.

    ``ceil(count/2)`` lines from DC upwards and ``floor(count/2)`` from the
    top of the array (the lowest negative frequencies).
    """
    if not 0 <= count <= n:
        raise ValueError(f"count must lie in [0, {n}], got {count}")
    n_pos = (count + 1) // 2
    n_neg = count // 2
    return np.concatenate((np.arange(n_pos), np.arange(n - n_neg, n))).astype(int)


def add_center_lines(mask: SamplingMask, count: int) -> SamplingMask:
    """OR the ``count`` lowest-frequency lines into an unshifted mask."""
    if mask.layout != "unshifted":
        raise ValueError("center lines are defined in unshifted coordinates; unshift the mask first")
    bits = mask.bits.copy()
    bits[center_indices(mask.n, count)] = True
    spec = dataclasses.replace(mask.spec, center_lines=max(mask.spec.center_lines, count))
    return SamplingMask(bits, "unshifted", spec, misaligned=mask.misaligned)


def random_mask(n: int, acceleration: int, seed: int, center: int = 0) -> SamplingMask:
    """Uniform random line selection at exact cardinality.

    The mask keeps ``max(1, floor(n/acceleration + 1/2))`` lines: the
    ``center`` lowest-frequency lines first, the rest drawn uniformly without
    replacement by ``numpy.random.Generator(PCG64(seed))``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    spec = MaskSpec(
        width=n, acceleration=acceleration, kind="random", seed=seed, center_lines=center
    )
    total = max(1, int(np.floor(n / acceleration + 0.5)))
    if total < center:
        raise ValueError(
            f"{center} center lines exceed the {total} lines allowed at acceleration {acceleration}"
        )
    bits = np.zeros(n, dtype=bool)
    bits[center_indices(n, center)] = True
    rest = np.flatnonzero(~bits)
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = rng.choice(rest, size=total - center, replace=False)
    bits[chosen] = True
    return SamplingMask(bits, "unshifted", spec)


def full_mask(n: int) -> SamplingMask:
    """Mask keeping every line."""
    return custom_mask(np.ones(n, dtype=bool))


def custom_mask(bits, layout: str = "unshifted", acceleration: int = 1) -> SamplingMask:
    """Wrap an arbitrary bit vector as a mask of kind ``custom``."""
    bits = np.asarray(bits, dtype=bool).reshape(-1)
    spec = MaskSpec(width=bits.size, acceleration=acceleration, kind="custom")
    return SamplingMask(bits, layout, spec)


def shift_mask(mask: SamplingMask) -> SamplingMask:
    """Move a mask between unshifted and fftshifted layouts."""
    shift = mask.n // 2
    if mask.layout == "unshifted":
        return SamplingMask(np.roll(mask.bits, shift), "shifted", mask.spec, mask.misaligned)
    return SamplingMask(np.roll(mask.bits, -shift), "unshifted", mask.spec, mask.misaligned)


def extend_mask_2d(mask: SamplingMask, other_len: int, axis: str = "cols") -> np.ndarray:
    """Replicate a 1D line mask into a 2D binary image.

    ``axis`` names the image axis the 1D mask indexes: ``"cols"`` gives an
    ``(other_len, n)`` image whose rows all equal the mask, ``"rows"`` an
    ``(n, other_len)`` image whose columns all equal it. A multi-coil mask is
    a stack of identical copies of the result.
    """
    if other_len < 1:
        raise ValueError(f"other_len must be >= 1, got {other_len}")
    if axis == "cols":
        return np.tile(mask.bits, (other_len, 1))
    if axis == "rows":
        return np.tile(mask.bits[:, None], (1, other_len))
    raise ValueError(f"axis must be 'rows' or 'cols', got {axis!r}")


def sampling_fraction(mask: SamplingMask) -> Fraction:
    return Fraction(int(mask.bits.sum()), mask.n)
