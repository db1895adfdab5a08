"""Density by moduli and finite-horizon convergence diagnostics for closed-set sequences."""

from . import convergence, density, modulus, wijsman
from .convergence import classify, exceptional_set
from .density import count_upto, density_trend, f_density_ratio, natural_density_ratio
from .errors import ConstructionError, DomainError, FDensityError, ParameterError, ParseError
from .expr import parse_modulus, parse_set
from .kernels import BACKEND
from .modulus import Modulus, check_axioms, combine, evaluate, lemma_modulus_from_set
from .wijsman import paper_sequence

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConstructionError",
    "DomainError",
    "FDensityError",
    "Modulus",
    "ParameterError",
    "ParseError",
    "check_axioms",
    "classify",
    "combine",
    "convergence",
    "count_upto",
    "density",
    "density_trend",
    "evaluate",
    "exceptional_set",
    "f_density_ratio",
    "lemma_modulus_from_set",
    "modulus",
    "natural_density_ratio",
    "paper_sequence",
    "parse_modulus",
    "parse_set",
    "wijsman",
]
