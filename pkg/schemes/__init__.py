"""
Time-stepping schemes for the competition-diffusion system.

Classes:
    ExplicitScheme: forward Euler, tile-parallel, monotone under its step bound
    ImexScheme: implicit diffusion with explicit reaction
"""

from .ExplicitScheme import ExplicitScheme
from .ImexScheme import ImexScheme

SCHEMES = {
    "EXPLICIT": ExplicitScheme,
    "IMEX": ImexScheme,
}


def get_scheme(name: str):
    """Scheme class by name, case-insensitive."""
    key = (name or "EXPLICIT").upper()
    if key not in SCHEMES:
        raise ValueError(f"unknown scheme '{name}', available: {', '.join(SCHEMES)}")
    return SCHEMES[key]


__all__ = ["ExplicitScheme", "ImexScheme", "SCHEMES", "get_scheme"]
