"""Exact-arithmetic toolkit for grid LPs, generalized LCPs, discounted
MDPs, two-player stochastic games, and the structural reductions that
connect them."""

from . import core, exactlp, games, glcp, lpgrid, mdp, reductions, serialize, uso, witness
from .errors import (
    DegenerateInstanceError,
    GridcubeError,
    PreconditionError,
    TooLargeError,
)

__version__ = "0.1.0"

__all__ = [
    "core",
    "exactlp",
    "games",
    "glcp",
    "lpgrid",
    "mdp",
    "reductions",
    "serialize",
    "uso",
    "witness",
    "GridcubeError",
    "PreconditionError",
    "DegenerateInstanceError",
    "TooLargeError",
]
