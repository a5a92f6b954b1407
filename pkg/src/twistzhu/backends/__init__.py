"""Concrete vertex operator algebras."""

from .heisenberg import Heisenberg
from .virasoro import Virasoro

__all__ = ["Heisenberg", "Virasoro"]
