"""Interior transmission eigenvalues of a spherically stratified ball.

The toolkit evaluates the entire determinant D(k) from the radial IVP,
locates its zeros by argument-principle subdivision, and checks the
spectral-density, indicator and B-recovery laws that make the eigenvalue
set an inverse-problem observable.
"""

__version__ = "0.1.0"

from .errors import (BoundaryZero, DegenerateProfile, DomainError,
                     InsufficientData, InvalidProfile, IteigError,
                     NoConvergence, NotAnEigenvalue, ParseError,
                     QuadratureFailure, RegionTooSmall, StepUnderflow,
                     StripMismatchWarning, Unresolved)
from .scaled import ScaledComplex, rel_diff
from .profiles import (ConstantProfile, PolynomialProfile, SmoothBumpProfile,
                       LiouvilleMap, compute_liouville, potential,
                       potential_callable, potential_norms, profile_from_dict,
                       validate)
from .bessel import bessel_j1
from .radial import (RadialSolution, asymptotic_z, series_init, solve_y,
                     solve_z)
from .determinant import (DeterminantValue, NullPair, eval_D, eval_scriptD,
                          null_pair)
from .zeros import (BoxRegion, FindOptions, ZeroEntry, ZeroSet, find_zeros,
                    real_axis_zeros, refine_zero, winding_number,
                    zero_set_from_real_axis)
from .cartwright import (DensityEstimate, IndicatorEstimate, Wedge,
                         counting_function, indicator_estimate,
                         indicator_width, reciprocal_sum, wedge_density)
from .inverse import (Spectrum, UniquenessVerdict, compare_spectra,
                      crosscheck_F, recover_B, sl_eigenvalues)
