"""Numerical laboratory for Berry-Esseen type bounds on weighted sums."""

from .arithmetic import (ArithmeticCertificate, CoefficientVector, certify_condition_iii,
                         check_conditions_i_ii, dist_to_lattice, minimal_certified_R,
                         s_function, sqrt2_diophantine_check, tail_integral_check, theta_zero,
                         uniform_theta)
from .errors import (BadDimension, BelabError, BudgetExceeded, ConfigError, DegenerateFit,
                     DegenerateLaw, PreconditionViolated, QuadratureFailure)
from .fourier import esseen_bound, product_charfun, regime_report
from .kolmogorov import (KolmogorovEstimate, classical_be_bound, exact_distance, mc_distance,
                         normal_cdf, weighted_sum_law)
from .laws import (DiscreteLaw, MomentProfile, charfun, moments, paley_zygmund_check,
                   parse_law, standardize, symmetrize)

__version__ = "0.1.0"
