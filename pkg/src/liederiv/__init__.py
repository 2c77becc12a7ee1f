"""Constructive standard decomposition of Lie derivations on finite-dimensional *-algebras.

Every Lie derivation ``L`` on ``A = Mat(n_1) + ... + Mat(n_m)`` splits as
``L = D + E`` with ``D`` an associative derivation and ``E`` a center-valued
trace.  :func:`standard_form` computes the splitting, :func:`type_I_form`
additionally writes ``D = D_a``.
"""
from .algebra import (
    AlgebraElement,
    CentralDescriptor,
    StarAlgebra,
    adjoint,
    center_basis,
    central_support,
    commutator,
    halving_projection,
    identity,
    make_algebra,
    matrix_unit,
    norm,
    partial_isometry_between,
    split_commutative,
    zeros,
)
from .decomposer import StandardForm, TypeIForm, lift_center_derivation, standard_form, type_I_form
from .exceptions import LieDerivError, NotInnerError, NotLieDerivationError
from .linmap import (
    LinearOperatorOnAlgebra,
    ResidualReport,
    inner_derivation,
    leibniz_residual,
    lie_derivation_space,
    lie_residual,
    sample_lie_derivation,
    solve_inner,
    trace_from_weights,
    trace_residual,
)
from .peirce import PeirceFrame, make_frame, peirce_split

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "CentralDescriptor",
    "LieDerivError",
    "LinearOperatorOnAlgebra",
    "NotInnerError",
    "NotLieDerivationError",
    "PeirceFrame",
    "ResidualReport",
    "StandardForm",
    "StarAlgebra",
    "TypeIForm",
    "adjoint",
    "center_basis",
    "central_support",
    "commutator",
    "halving_projection",
    "identity",
    "inner_derivation",
    "leibniz_residual",
    "lie_derivation_space",
    "lie_residual",
    "lift_center_derivation",
    "make_algebra",
    "make_frame",
    "matrix_unit",
    "norm",
    "partial_isometry_between",
    "peirce_split",
    "sample_lie_derivation",
    "solve_inner",
    "split_commutative",
    "standard_form",
    "trace_from_weights",
    "trace_residual",
    "type_I_form",
    "zeros",
]
