"""scikit-learn compatible wrappers.

Rows of ``X`` are 1D signals (``n_samples x n``); the mask is built for the
width seen in :meth:`fit`. ``sklearn.utils.check_array`` rejects complex
input, so validation is done by :func:`check_signals` with the same
conventions.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from kmask.mask_gen import (
    SamplingMask,
    add_center_lines,
    equispaced_mask,
    offset_mask_irregular,
    random_mask,
)
from kmask.symmetry import (
    DEFAULT_RCOND,
    measurement_matrix,
    numeric_rank,
    pseudo_inverse,
    redundancy_report,
)

__all__ = ["KSpaceMasker", "LeastSquaresReconstructor", "build_mask", "check_signals"]


def check_signals(X, n_features: int | None = None, estimator=None) -> np.ndarray:
    """Validate a batch of 1D signals and return it as 2D complex128.

    A single 1D signal is promoted to one row.
    """
    name = type(estimator).__name__ if estimator is not None else "input"
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValueError(f"{name}: object arrays are not supported")
    arr = arr.astype(np.complex128)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name}: expected 2D array (n_samples, n), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name}: found array with shape {arr.shape}; need at least one sample and one feature")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: input contains NaN or infinity")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(
            f"X has {arr.shape[1]} features, but {name} is expecting {n_features} features as input"
        )
    return arr


def build_mask(n, kind="equispaced", acceleration=4, offset=1, offset_neg=None, center_lines=0, seed=None) -> SamplingMask:
    if kind == "equispaced":
        mask = equispaced_mask(n, acceleration, offset)
    elif kind == "irregular":
        mask = offset_mask_irregular(n, acceleration, offset, offset_neg)
    elif kind == "random":
        if seed is None:
            raise ValueError("random masks need an explicit seed")
        return random_mask(n, acceleration, seed=seed, center=center_lines)
    else:
        raise ValueError(f"unknown mask kind {kind!r}")
    return add_center_lines(mask, center_lines) if center_lines else mask


class _MaskParamsMixin:
    def _fit_mask(self, X):
        X = check_signals(X, estimator=self)
        self.n_features_in_ = X.shape[1]
        self.mask_ = build_mask(
            X.shape[1],
            kind=self.kind,
            acceleration=self.acceleration,
            offset=self.offset,
            offset_neg=self.offset_neg,
            center_lines=self.center_lines,
            seed=self.seed,
        )
        return X


class KSpaceMasker(_MaskParamsMixin, TransformerMixin, BaseEstimator):
    """Subsample each signal's spectrum with a line mask.

    Parameters
    ----------
    acceleration : int, default=4
        Keep roughly one line in ``acceleration``.
    kind : {"equispaced", "irregular", "random"}, default="equispaced"
    offset : int, default=1
        Residue kept by equispaced masks; positive-half offset for irregular ones.
    offset_neg : int or None, default=None
        Negative-half offset for irregular masks; ``None`` picks the value
        matching the equispaced pattern.
    center_lines : int, default=0
        Lowest-frequency lines ORed into the mask.
    seed : int or None, default=None
        Required for ``kind="random"``.
    output : {"image", "kspace"}, default="image"
        Return the aliased images or the masked spectra.

    Attributes
    ----------
    mask_ : SamplingMask
    n_features_in_ : int
    """

    def __init__(self, acceleration=4, kind="equispaced", offset=1, offset_neg=None,
                 center_lines=0, seed=None, output="image"):
        self.acceleration = acceleration
        self.kind = kind
        self.offset = offset
        self.offset_neg = offset_neg
        self.center_lines = center_lines
        self.seed = seed
        self.output = output

    def fit(self, X, y=None):
        if self.output not in ("image", "kspace"):
            raise ValueError(f"output must be 'image' or 'kspace', got {self.output!r}")
        self._fit_mask(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "mask_")
        X = check_signals(X, self.n_features_in_, self)
        spectra = np.fft.fft(X, axis=1) * self.mask_.bits
        if self.output == "kspace":
            return spectra
        return np.fft.ifft(spectra, axis=1)


class LeastSquaresReconstructor(_MaskParamsMixin, TransformerMixin, BaseEstimator):
    """Acquire through a line mask and reconstruct real signals by least squares.

    ``transform`` maps images (or, with ``input="kspace"``, already masked
    spectra) to the minimum-norm real signals consistent with the retained
    coefficients. ``score`` is the negative mean squared error against the
    real part of the input images, so larger is better as scikit-learn
    model selection expects.

    Attributes
    ----------
    mask_ : SamplingMask
    operator_ : ndarray of shape (2 * kept_lines, n)
    real_dof_ : int
        Real degrees of freedom retained under conjugate symmetry.
    rank_ : int
        Numeric rank of ``operator_``; equals ``real_dof_``.
    """

    def __init__(self, acceleration=4, kind="equispaced", offset=1, offset_neg=None,
                 center_lines=0, seed=None, rcond=DEFAULT_RCOND, input="image"):
        self.acceleration = acceleration
        self.kind = kind
        self.offset = offset
        self.offset_neg = offset_neg
        self.center_lines = center_lines
        self.seed = seed
        self.rcond = rcond
        self.input = input

    def fit(self, X, y=None):
        if self.input not in ("image", "kspace"):
            raise ValueError(f"input must be 'image' or 'kspace', got {self.input!r}")
        if not 0 < self.rcond < 1:
            raise ValueError(f"rcond must lie in (0, 1), got {self.rcond}")
        self._fit_mask(X)
        self.operator_ = measurement_matrix(self.mask_)
        self.real_dof_ = redundancy_report(self.mask_).real_dof
        self.rank_ = numeric_rank(self.operator_, self.rcond)
        self._pinv = pseudo_inverse(self.operator_, self.rcond)
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_signals(X, self.n_features_in_, self)
        spectra = X if self.input == "kspace" else np.fft.fft(X, axis=1)
        kept = spectra[:, self.mask_.indices]
        stacked = np.empty((X.shape[0], 2 * kept.shape[1]))
        stacked[:, 0::2] = kept.real
        stacked[:, 1::2] = kept.imag
        return stacked @ self._pinv.T

    def score(self, X, y=None):
        """Negative mean squared reconstruction error; ``y`` overrides the target."""
        if self.input != "image" and y is None:
            raise ValueError("score needs target signals y when input='kspace'")
        target = np.real(check_signals(X if y is None else y, estimator=self))
        return -float(np.mean((self.transform(X) - target) ** 2))
