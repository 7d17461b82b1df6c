"""Scenario-based multi-product ad copywriting toolkit."""

__version__ = "0.1.0"
