"""Grayscale image restoration with a smoothness prior along patch orderings.

The library reorders the pixels of an image so that a randomized
nearest-neighbor walk through patch space visits similar patches
consecutively, then restores the image by minimizing a data term plus a
robust penalty on the second differences of the reordered pixels, summed over
all shifted copies of the image.  Supported problems: Gaussian and
photon-limited denoising, deblurring, and 3x single-image super-resolution.
"""

from .image import (PatchSet, as_image, column_stack_pixels, extract_patches,
                    extract_subimage, mirror_fold, mirror_pad, unstack_pixels)
from .imgio import read_image, write_image
from .lbfgs import LbfgsConfig, MinimizeResult, minimize
from .likelihoods import Objective, ObjectiveSpec, assemble_objective
from .metrics import ordering_diagnostics, psnr, ssim, tail_distribution
from .operators import (BlurOperator, ComposedOperator, DownsampleOperator, Psf,
                        add_gaussian_noise, bin_image, blur_scenario, gaussian_psf,
                        make_psf, sample_poisson, unbin_upscale, uniform_psf)
from .ordering import (OrderingParams, Permutation, neighbor_probabilities, ordering_tv,
                       randomized_nn_order, raster_permutation, zigzag_permutation)
from .pipeline import (RestoreResult, SelfInitResult, SynthesisResult, default_init,
                       restore, self_init_restore, synthesize)
from .presets import (Preset, SELF_INIT_MU_SCHEDULE, deblur_preset, gaussian_preset,
                      named_preset, poisson_preset, preset_names, sr_preset)
from .regularizer import (OrderingWeights, RegularizerConfig, SmoothnessPrior,
                          compute_weights, edge_gamma, l2_closed_form_denoise,
                          laplacian_1d, laplacian_1d_adjoint, smoothed_abs,
                          smoothed_abs_grad, smoothness_value_grad)

__version__ = "0.1.0"
