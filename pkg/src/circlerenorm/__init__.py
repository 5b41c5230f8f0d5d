"""Numerical toolkit for analytic circle maps: rotation numbers, Arnold
tongues, (-1)-measures, dynamical partitions, triple lifts and
renormalization expansion observables."""

__version__ = "0.1.0"
