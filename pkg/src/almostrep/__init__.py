"""Exact and numerical tools for almost representations of Z^d and the Heisenberg group."""
from __future__ import annotations

__version__ = "0.1.0"
