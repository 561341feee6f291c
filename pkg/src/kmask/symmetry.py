"""Information retained by a mask once conjugate symmetry is accounted for.

For a real signal ``X(-f) = conj(X(f))``, so sampling both ``f`` and ``-f``
measures the same two real numbers twice. DC and (for even ``N``) the
Nyquist line are self-conjugate and carry a single real number each. The
functions here count those degrees of freedom, build the real measurement
operator whose rank must agree with the count, and reconstruct real signals
from it by minimum-norm least squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kmask.dft_core import as_signal
from kmask.mask_gen import SamplingMask

__all__ = [
    "DEFAULT_RCOND",
    "RedundancyReport",
    "frequency_of_index",
    "ls_reconstruct",
    "measure",
    "measurement_matrix",
    "numeric_rank",
    "pseudo_inverse",
    "redundancy_report",
    "retained_frequencies",
]

DEFAULT_RCOND = 1e-9


def frequency_of_index(k: int, n: int) -> int:
    """Signed frequency stored at index ``k`` of an unshifted length-``n`` spectrum.

    Even ``n``: ``0, 1, ..., n/2 - 1, -n/2, ..., -1``.
    Odd ``n``: ``0, 1, ..., (n-1)/2, -(n-1)/2, ..., -1``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k < n:
        raise ValueError(f"index {k} out of range for length {n}")
    return k if 2 * k < n else k - n


def _require_unshifted(mask: SamplingMask):
    if mask.layout != "unshifted":
        raise ValueError("frequency accounting needs an unshifted mask")


def retained_frequencies(mask: SamplingMask) -> list[int]:
    _require_unshifted(mask)
    return [frequency_of_index(int(k), mask.n) for k in mask.indices]


@dataclass(frozen=True)
class RedundancyReport:
    """Retained frequencies grouped into conjugacy classes ``{f, -f}``.

    Attributes:
        n: Signal length.
        retained: Signed frequencies in index order.
        classes: One sorted tuple per class, ordered by ``|f|``.
        unique_classes: ``len(classes)``.
        real_dof: Real numbers of a real signal fixed by the retained lines.
        redundant_pairs: Classes sampled at both ``f`` and ``-f`` (``f`` not
            DC or Nyquist).
    """

    n: int
    retained: tuple
    classes: tuple
    unique_classes: int
    real_dof: int
    redundant_pairs: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "retained": list(self.retained),
            "classes": [list(c) for c in self.classes],
            "unique_classes": self.unique_classes,
            "real_dof": self.real_dof,
            "redundant_pairs": self.redundant_pairs,
        }


def _self_conjugate(f: int, n: int) -> bool:
    return f == 0 or (n % 2 == 0 and abs(f) == n // 2)


def redundancy_report(mask: SamplingMask) -> RedundancyReport:
    retained = retained_frequencies(mask)
    n = mask.n
    groups: dict[int, set] = {}
    for f in retained:
        groups.setdefault(abs(f), set()).add(f)
    classes = tuple(tuple(sorted(groups[a])) for a in sorted(groups))
    real_dof = 0
    redundant = 0
    for cls in classes:
        if _self_conjugate(cls[0], n):
            real_dof += 1
        else:
            real_dof += 2
            redundant += len(cls) == 2
    return RedundancyReport(
        n=n,
        retained=tuple(retained),
        classes=classes,
        unique_classes=len(classes),
        real_dof=real_dof,
        redundant_pairs=redundant,
    )


def measurement_matrix(mask: SamplingMask, n: int | None = None) -> np.ndarray:
    """Real operator mapping a real signal to its retained DFT coefficients.

    Rows come in pairs per retained index ``k`` (in index order):
    ``cos(2 pi k m / n)`` giving ``Re X(k)`` and ``-sin(2 pi k m / n)`` giving
    ``Im X(k)``. Shape ``(2 * retained, n)``.
    """
    _require_unshifted(mask)
    if n is None:
        n = mask.n
    if n != mask.n:
        raise ValueError(f"mask length {mask.n} does not match n={n}")
    ks = mask.indices
    m = np.arange(n)
    angle = 2 * np.pi * (np.outer(ks, m) % n) / n
    op = np.empty((2 * ks.size, n))
    op[0::2] = np.cos(angle)
    op[1::2] = -np.sin(angle)
    return op


def measure(X, mask: SamplingMask) -> np.ndarray:
    """Stack ``(Re X(k), Im X(k))`` over retained ``k`` in the operator's row order."""
    X = as_signal(X, "X")
    if X.size != mask.n:
        raise ValueError(f"length mismatch: spectrum has {X.size} samples, mask {mask.n}")
    kept = X[mask.indices]
    out = np.empty(2 * kept.size)
    out[0::2] = kept.real
    out[1::2] = kept.imag
    return out


def numeric_rank(op, tol: float = DEFAULT_RCOND) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    op = np.asarray(op, dtype=float)
    if op.size == 0:
        raise ValueError("operator is empty")
    if not 0 < tol < 1:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    s = np.linalg.svd(op, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def pseudo_inverse(op: np.ndarray, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """SVD pseudo-inverse dropping singular values at or below ``rcond * s_max``."""
    u, s, vt = np.linalg.svd(op, full_matrices=False)
    keep = s > rcond * s[0] if s.size and s[0] > 0 else np.zeros_like(s, dtype=bool)
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def ls_reconstruct(Y_masked, mask: SamplingMask, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Minimum-norm real signal consistent with the retained coefficients.

    ``Y_masked`` is the full-length masked spectrum; entries outside the mask
    are ignored.
    """
    op = measurement_matrix(mask)
    b = measure(Y_masked, mask)
    return pseudo_inverse(op, rcond) @ b
