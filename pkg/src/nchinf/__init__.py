"""Finite-dimensional numerics for tracial and subdiagonal subalgebras of M_n.

The ambient algebra is M_n with the normalized trace tau = tr / n.  The package
builds tracial subalgebras, computes Fuglede-Kadison determinants, factors
positive matrices through A, evaluates the Szego infimum, and certifies the
equivalent characterizations of finite maximal subdiagonal algebras.
"""
from .algebra_core import (MatrixAlgebra, fk_determinant, heron_iterates, heron_sqrt, polar,
                           spectral_apply)
from .certifier import CertificationReport, condition_report, falsification_fuzz, random_algebra
from .factorization import (FactorizationResult, factor_cholesky, factor_projection,
                            logmodularity_check, unique_state_extension_check)
from .invariant_subspaces import NOT_FOUND, Subspace, beurling_witness, bn_factor
from .subalgebra import (TracialSubalgebra, diagonal_algebra, l2_density_check, make_nest,
                         make_span, tau_maximality_check)
from .szego import SzegoOptions, SzegoResult, szego_check, szego_infimum
from .tolerances import Tolerances, use_tolerances

__all__ = [
    "MatrixAlgebra", "fk_determinant", "heron_iterates", "heron_sqrt", "polar", "spectral_apply",
    "CertificationReport", "condition_report", "falsification_fuzz", "random_algebra",
    "FactorizationResult", "factor_cholesky", "factor_projection", "logmodularity_check",
    "unique_state_extension_check", "NOT_FOUND", "Subspace", "beurling_witness", "bn_factor",
    "TracialSubalgebra", "diagonal_algebra", "l2_density_check", "make_nest", "make_span",
    "tau_maximality_check", "SzegoOptions", "SzegoResult", "szego_check", "szego_infimum",
    "Tolerances", "use_tolerances",
]
