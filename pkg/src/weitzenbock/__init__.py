"""Symbol calculus, Levi forms and quadrature checks for pairs of first-order operators."""

from .catalog import CatalogEntry
from .checks import (CocancelSpace, EllipticityVerdict, check_c_ellipticity, check_constant_rank,
                     check_ellipticity, check_exact_complex, cocancel_space, dirac_type_check,
                     invariant_subspace_check, legendre_hadamard_constant)
from .domains import ImplicitDomain, ball, ellipsoid, polynomial, superellipsoid
from .errors import (DegenerateGradient, DimensionMismatch, NotPositiveSemiDefinite, NotStarShaped, RankJump,
                     SpecParseError, SupportError)
from .fields import TestField, make_bump_field, make_projected_field
from .geometry import (levi_matrix_curvature, levi_matrix_extension, levi_matrix_hessian, normal, shape_operator,
                       strict_convexity, strong_pseudoconvexity, kernel_projector_field)
from .quadrature import QuadratureRule, surface_integral, volume_integral
from .report import parse_pair_spec, run_full_analysis
from .symbols import (FirstOrderSymbol, LaplaceForm, OperatorPair, complex_rank_one_value, eval_symbol,
                      laplace_form, quadratic_form, rescale_pair, sqrt_laplace_symbol, stack_symbol)
from .verify import (IdentityReport, coercivity_quotient, morrey_quotient, square_function_quotient,
                     weitzenbock_residual)

__version__ = "0.1.0"
