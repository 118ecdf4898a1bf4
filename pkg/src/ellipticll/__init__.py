"""Elliptic GL(N) R-matrix identities, Lax pairs and Landau-Lifshitz field dynamics."""

__version__ = "0.1.0"
