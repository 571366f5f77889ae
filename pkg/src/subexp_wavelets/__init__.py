"""Band-limited orthonormal wavelets with subexponential decay.

Construction of the wavelet/scaling pair from a Gevrey seed bump, the
multiresolution projection kernels, tensor-product wavelet expansions, and
the numerical certificates (orthonormality, vanishing moments, decay fits,
Parseval checks) that quantify each claimed property.
"""

from .bump import BumpError, GevreyBump, build_bump, certify_gevrey, cumulative
from .construction import (BellFunction, ConstructionError, WaveletSystem,
                           build_bell, build_wavelet_system, cross_gram_fourier,
                           decay_profile, run_certificate_suite,
                           scaling_modulus, spectral_moments, two_scale_gram)
from .expansion import (CoefficientSet, DualRepresentative, ExpansionError,
                        IndexWindow, WaveletIndex, analyze, bessel_gap, cwt,
                        parseval_check, synthesize_partial, tensor_atom)
from .metrics import (DecayFit, FeasibleK, HalfplaneParams, MetricsError,
                      SeminormParams, SequenceNormParams, halfplane_norm_probe,
                      index_weight, max_feasible_k, seminorm_estimate,
                      sequence_norm, subexp_decay_fit)
from .numerics import (Grid1D, NumericsError, SampledFunction, SpectrumOnBand,
                       forward_transform_values, inner_product, integrate,
                       norm_l2, pairing, spectral_derivative, synthesize,
                       synthesize_values)
from .projection import (PrimitiveDecomposition, ProjectionError,
                         ProjectionKernel, build_kernel, kernel_decay_certificate,
                         kernel_eval, mra_convergence_experiment,
                         polynomial_reproduction, primitive_decomposition_1d,
                         project, project_at)

__version__ = "0.1.0"
