"""Series-expansion coefficients of the Heisenberg-picture ladder operators."""

from .chain import chain_term
from .models import (
    BogoliubovMatrix,
    CouplingMode,
    OperatorBasis,
    SystemSpec,
    TaylorCoefficients,
)
from .steps import (
    clear_step_cache,
    eq2a_second_order,
    step_coefficients_full,
    step_coefficients_rwa,
    step_matrix,
)
from .taylor import (
    closed_form_taylor,
    taylor_annihilation_row,
    taylor_coefficients,
    taylor_evaluate,
    to_ladder,
)

__all__ = [
    "CouplingMode",
    "SystemSpec",
    "OperatorBasis",
    "BogoliubovMatrix",
    "TaylorCoefficients",
    "step_matrix",
    "step_coefficients_full",
    "step_coefficients_rwa",
    "eq2a_second_order",
    "clear_step_cache",
    "taylor_coefficients",
    "taylor_evaluate",
    "taylor_annihilation_row",
    "closed_form_taylor",
    "to_ladder",
    "chain_term",
]
