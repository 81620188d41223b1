"""Benchmarking classical and LLM planners on PDDL domains."""

__version__ = "0.1.0"
