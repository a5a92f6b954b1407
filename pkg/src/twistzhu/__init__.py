"""Twisted Zhu algebras for vertex operator algebras with non-semisimple automorphisms."""

__version__ = "0.1.0"
