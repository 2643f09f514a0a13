"""Gibbs sampling and modifications of it that reduce self transitions."""

__version__ = "0.1.0"

from .kernels import Method, kernel_row, kernel_matrix, kernel_sample  # noqa: E402,F401
