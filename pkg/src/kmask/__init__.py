"""Equispaced k-space subsampling masks, aliasing simulation and conjugate-symmetry analysis."""

from kmask.alias_sim import (
    AliasPrediction,
    apply_mask,
    clamp_reconstruct,
    masked_image,
    predicted_alias_image,
    support_half_width,
    verify_alias_identity,
)
from kmask.dft_core import (
    dft2_forward,
    dft2_inverse,
    dft_forward,
    dft_inverse,
    dft_reference,
    fftshift,
    ifftshift,
)
from kmask.estimators import KSpaceMasker, LeastSquaresReconstructor
from kmask.mask_gen import (
    MaskSpec,
    SamplingMask,
    add_center_lines,
    default_negative_offset,
    equispaced_mask,
    extend_mask_2d,
    offset_mask_irregular,
    random_mask,
    sampling_fraction,
    shift_mask,
)
from kmask.phantom import PhantomSpec, add_noise, apply_phase_ramp, make_phantom
from kmask.symmetry import (
    RedundancyReport,
    frequency_of_index,
    ls_reconstruct,
    measurement_matrix,
    numeric_rank,
    redundancy_report,
    retained_frequencies,
)

__version__ = "0.1.0"

__all__ = [
    "AliasPrediction",
    "KSpaceMasker",
    "LeastSquaresReconstructor",
    "MaskSpec",
    "PhantomSpec",
    "RedundancyReport",
    "SamplingMask",
    "add_center_lines",
    "add_noise",
    "apply_mask",
    "apply_phase_ramp",
    "clamp_reconstruct",
    "default_negative_offset",
    "dft2_forward",
    "dft2_inverse",
    "dft_forward",
    "dft_inverse",
    "dft_reference",
    "equispaced_mask",
    "extend_mask_2d",
    "fftshift",
    "frequency_of_index",
    "ifftshift",
    "ls_reconstruct",
    "make_phantom",
    "masked_image",
    "measurement_matrix",
    "numeric_rank",
    "offset_mask_irregular",
    "predicted_alias_image",
    "random_mask",
    "redundancy_report",
    "retained_frequencies",
    "sampling_fraction",
    "shift_mask",
    "support_half_width",
    "verify_alias_identity",
]
