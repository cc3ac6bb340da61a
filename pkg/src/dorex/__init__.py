"""Exact kernel for graded double Ore extensions of Koszul regular algebras.

Given a quadratic algebra presented by generators and relations together with
extension data (two mixing scalars, a two-by-two matrix of degree-preserving
maps, and a pair of degree-one lifts), the package constructs the auxiliary
map quadruple, the minimal free resolution of the trivial module over the
extension, the homological determinant, the divergence vector, the Nakayama
automorphism, and the twisted superpotential, verifying every step with
exact arithmetic.
"""

from ._kernel import BACKEND
from .exact_linalg import (
    IUNIT,
    ONE,
    ZERO,
    DorexError,
    IndexOutOfRange,
    InternalCheckError,
    NoSolution,
    Scalar,
    ShapeMismatch,
    Subspace,
    Tensor,
    ValidationError,
    in_sandwich,
    intersect,
    sandwich,
    solve_affine,
    tau_apply,
    tensor_sub,
    word_rank,
    word_unrank,
    words_of_degree,
)

__version__ = "1.0.0"

__all__ = [
    "BACKEND",
    "DorexError",
    "IUNIT",
    "IndexOutOfRange",
    "InternalCheckError",
    "NoSolution",
    "ONE",
    "Scalar",
    "ShapeMismatch",
    "Subspace",
    "Tensor",
    "ValidationError",
    "ZERO",
    "__version__",
    "in_sandwich",
    "intersect",
    "sandwich",
    "solve_affine",
    "tau_apply",
    "tensor_sub",
    "word_rank",
    "word_unrank",
    "words_of_degree",
]
