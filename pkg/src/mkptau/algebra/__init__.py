"""Exact coefficient arithmetic: time polynomials, Laurent symbols, Schur polynomials, residues."""
from .kernels import BACKEND
from .laurent import LaurentPolynomial, residue
from .schur import miwa_shift, miwa_shift_by_derivatives, schur, schur_derivative_action, xi_exponential, xi_times
from .timepoly import Q, TimePolynomial, TimeSpace, rational

__all__ = [
    "BACKEND", "LaurentPolynomial", "Q", "TimePolynomial", "TimeSpace", "miwa_shift",
    "miwa_shift_by_derivatives", "rational", "residue", "schur", "schur_derivative_action",
    "xi_exponential", "xi_times",
]
