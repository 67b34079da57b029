"""Exact Bayesian inference for variable-length Markov chains under context-tree priors."""

__version__ = "0.1.0"
