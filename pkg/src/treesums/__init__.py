"""Exact generating functions for genus-zero moduli spaces, configuration
spaces and multiple covers, each computed by a sum over trees and by a
series equation."""

__version__ = "0.1.0"
