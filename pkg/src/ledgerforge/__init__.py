"""Deterministic desk-scale distributed-ledger workbench."""

__version__ = "0.1.0"
