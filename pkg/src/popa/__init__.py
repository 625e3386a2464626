"""Popa circle groups G_rho(R^d) and the homomorphisms between them."""
from .core import (LinFunc, PopaCtx, circle, eta, inverse, is_member, parse_vector, power,
                   vec)
from .errors import PopaError
from .homs import (ExpHom, HomSpec, LinearHom, LogHom, PowerHom, ZeroHom, classify_hom,
                   construct_4a, construct_4b_exp, hom_eval, hom_residual, hom_validate,
                   spec_from_dict)
from .radial import classify_abelian, combination_witness, sum_witness
from .report import Report
from .scalar_homs import BoMap, ExtParam, bo_eval

__version__ = "0.1.0"

__all__ = [
    "LinFunc", "PopaCtx", "circle", "eta", "inverse", "is_member", "parse_vector", "power", "vec",
    "PopaError", "HomSpec", "ZeroHom", "LinearHom", "PowerHom", "LogHom", "ExpHom", "classify_hom",
    "construct_4a", "construct_4b_exp", "hom_eval", "hom_residual", "hom_validate", "spec_from_dict",
    "classify_abelian", "combination_witness", "sum_witness", "Report", "BoMap", "ExtParam", "bo_eval",
]
