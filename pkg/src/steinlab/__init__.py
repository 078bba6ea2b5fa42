"""steinlab: desk-scale numerical checks for covariance representations,
Lp-Poincare inequalities, Stein kernels and quantitative W1 CLTs."""

__version__ = "0.1.0"

from .measures import (Beta, CenteredExponential, ExpPower, ExpPowerRadial, Gamma,
                       Gaussian, LogConcave, MeasureSpec, SampleBatch, SpectralMeasure,
                       Stable, StableRotInv, UniformProduct, characteristic_function,
                       check_nondegenerate, sample, sample_interpolation_pair,
                       spec_from_json)
from .special import (DensityGrid1D, QuadratureResult, adaptive_quad, hermite_eval,
                      log_derivative_stable, q_alpha_integral, stable_density_1d,
                      upper_incomplete_gamma)
from .functions import Character, Constant, Coordinate, HermiteProduct, SmoothBump, UserCallback
from .semigroups import (SemigroupQuery, bismut_stable_check, dual_semigroup_1d,
                         frac_gradient, gamma_transform, gaussian_hessian_bismut,
                         gradient_bismut_stable, mehler_gaussian, mehler_stable,
                         t_family_1d)
from .stein import (DiscrepancyReport, SteinKernelField, F_delta, f_delta,
                    kernel_1d_from_density, kernel_for_spec, product_kernel,
                    solve_stein_equation, stein_discrepancy, sum_discrepancy_bound,
                    tau_radial_multid)
from .transport import (EmpiricalPair, SinkhornResult, mollify_lipschitz,
                        w1_dual_lower_bound, w1_exact_1d, w1_exact_assignment,
                        w1_sinkhorn)
from .inequalities import (InequalityReport, PoincareEstimate, asymmetric_cov_suite,
                           exp_weighted_vs_nonlocal, lp_poincare_gaussian,
                           pisier_check, poincare_rayleigh, sobolev_type_check,
                           stable_lp_poincare, verify_cov_representation_gaussian,
                           verify_cov_representation_stable_1d)
from .clt import (ExperimentConfig, RateReport, non_iid_bound, run_clt_experiment,
                  sample_normalized_sum, theoretical_bound)
