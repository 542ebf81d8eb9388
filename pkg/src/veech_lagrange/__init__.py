"""Lagrange values of Veech surfaces through boundary expansions."""

from .errors import *  # noqa: F401,F403
from .projective import (  # noqa: F401
    CirclePoint,
    Direction,
    Mat2,
    direction_of_vector,
    direction_to_boundary,
    boundary_to_direction,
    moebius_apply,
)
from .surface import SurfaceDescriptor, builtin_torus, validate_descriptor  # noqa: F401

__version__ = "0.1.0"
