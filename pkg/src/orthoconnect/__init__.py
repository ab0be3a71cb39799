"""Connection coefficients for polynomially and rationally modified orthogonal polynomials."""
from .errors import (BandwidthError, ConvergenceError, DomainError, NotPositiveDefiniteError,
                     NumericalError, RankDeficientError, SingularError)
from .recurrence import (OrthonormalFamily, SymBanded, TabulatedFamily, TriBanded, chebyshev_t,
                         chebyshev_u, clenshaw_eval, coeffs_from_monomials, coeffs_from_roots,
                         coeffs_of_polynomial, eval_basis, family_from_name, hermite, jacobi,
                         jacobi_matrix, laguerre, legendre, op_poly)
from .banded import (GivensSeq, apply_givens, cholesky_banded, ql_banded, qr_banded,
                     reverse_cholesky_banded, solve_tri)
from .infdim import AdaptiveResult, adaptive_ql, adaptive_reverse_cholesky, slab_two_norm
from .modify import (ConnectionFactors, connect, connect_poly, connect_rational_case1,
                     connect_rational_case2, connect_reciprocal, connect_sqrt_poly,
                     connection_diagonals, convert_coeffs, evaluate_modified, is_m_matrix, modified_family,
                     modified_jacobi)
from .calculus import (Antiderivative, DiffMatrix, classical_diff, higher_diff_chain,
                       integration_pinv, modified_diff, weak_laplacian)
from .quadrature import QuadratureRule, gauss_rule, golub_welsch, modified_rule
from . import toeplitz

__version__ = "0.1.0"
