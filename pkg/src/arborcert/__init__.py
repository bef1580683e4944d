"""Exact arithmetic dynamics over Q: iterates, valuations and maximality certificates."""

from .exact import INFINITY, IteratePair, Poly, RatMap, compose, derivative, discriminant, iterate, poly_eval, resultant, wronskian
from .parse import ParseError, parse_map

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "IteratePair", "Poly", "RatMap", "compose", "derivative", "discriminant",
    "iterate", "poly_eval", "resultant", "wronskian", "ParseError", "parse_map",
]
