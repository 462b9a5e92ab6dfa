"""Dessin d'enfant counting and its matrix-model checks."""
from .dessins import (CapError, CountFilter, ModelParams, connected_gf, evaluate, exp_connected,
                      partition_function, swap_beta_gamma)
from .perm import Permutation, PermPair, genus_of_pair, is_transitive
from .series import GenusSeries, Space, TruncatedSeries, newton_solve

__all__ = [
    "CapError", "CountFilter", "ModelParams", "connected_gf", "evaluate", "exp_connected",
    "partition_function", "swap_beta_gamma", "Permutation", "PermPair", "genus_of_pair",
    "is_transitive", "GenusSeries", "Space", "TruncatedSeries", "newton_solve",
]
__version__ = "0.1.0"
