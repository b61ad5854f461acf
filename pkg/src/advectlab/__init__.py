"""Periodic 1-D advection: semi-Lagrangian, dG and FFT solvers and their error propagation."""

from advectlab.core import (
    ConfigurationError,
    Grid1D,
    InitialCondition,
    ModalField,
    NodalField,
    eval_ic,
    exact_advection,
    linf_error,
    project_modal,
    sample_nodal,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "Grid1D",
    "InitialCondition",
    "ModalField",
    "NodalField",
    "eval_ic",
    "exact_advection",
    "linf_error",
    "project_modal",
    "sample_nodal",
]
