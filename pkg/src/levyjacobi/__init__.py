"""Jacobi fields of Levy white noise: extended Fock space and symmetric Fock space realizations."""
from .alphaidx import AlphaIndex, enumerate_alpha, k_alpha
from .basespace import Grid
from .config import RunConfig, parse_config
from .equivalence import build_intertwiner, compare_moments, mc_sample, oracle_moment
from .extfock import ExtSpace, ExtVector, SymTensor, inner_ext, u_n
from .fockrep import AField, FockSpace, FockVector, inner_fock
from .instance import Instance
from .jacobifield import JacobiField
from .measure import JumpMeasure, moments, normalize
from .orthopoly import JacobiMatrix, golub_welsch, jacobi_matrix

__version__ = "0.1.0"
