"""Integrability and level-statistics laboratory for the Rabi and Dicke family."""

__version__ = "0.1.0"
