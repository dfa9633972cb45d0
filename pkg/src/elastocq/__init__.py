"""Transient elastic-wave scattering with coupled FEM/BEM and convolution quadrature."""

__version__ = "0.1.0"
