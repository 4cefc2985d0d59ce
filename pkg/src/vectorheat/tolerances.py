"""Central numeric thresholds.

All epsilons used by mesh validation and the numerical kernels live here so
that tests and callers tune one record instead of hunting constants.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # Faces with area below area_rel_eps * bbox_diagonal^2 are rejected.
    area_rel_eps: float = 1e-12
    # Unit-complex transport entries must satisfy ||r| - 1| < unit_eps.
    unit_eps: float = 1e-12
    # Degenerate tangent projections fall back to the next one-ring edge.
    tangent_proj_eps: float = 1e-12
    # Eigenvalues below -psd_rel_eps * lambda_max fail the PSD check.
    psd_rel_eps: float = 1e-8
    # Per-column eigen residual bound, relative to lambda_max.
    eig_residual_rel: float = 1e-6
    # Magnitude nonlinearity treats |z| below this as exactly zero.
    magnitude_eps: float = 1e-20
    # Ground-truth magnitudes at or below this are masked out of the loss.
    gt_mask_eps: float = 1e-12
    # Channels whose mean magnitude is below norm_rel_eps * bbox scale are
    # left unnormalized.
    norm_rel_eps: float = 1e-12


DEFAULT_TOL = Tolerances()
