"""Exact q-series verification of Hall-Littlewood Rogers-Ramanujan-type identities."""

__version__ = "0.1.0"
