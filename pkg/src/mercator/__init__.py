"""Mercator formal group law, the inverse Gudermannian, and Terrell rotation."""

from .errors import DomainError, InvariantError, PunctureError, VelocityError
from .gudermann import (
    aberration_sine,
    cayley_lambda_check,
    lambda_inv_num,
    lambda_num,
    mercator_add,
)
from .series import (
    BivariateSeries,
    UnivariateSeries,
    check_group_law_axioms,
    check_involution_coefficients,
    euler_numbers,
    gudermann_exp_series,
    gudermann_log_series,
    mercator_group_law,
)
from .terrell import rotation_fgl, rotation_table, rotation_taylor, to_psi_tilde

__version__ = "0.1.0"
