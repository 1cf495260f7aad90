"""Computational toolkit for directed A-infinity algebra over F2, tree and
quadratic-differential combinatorics, and soliton numerics for Landau-Ginzburg
models on the complex plane."""

__version__ = "0.1.0"
