"""Spectra, zeros and crossings of PT-symmetric cubic double wells.

Two forms of one problem are handled:

- H(hbar) = hbar^2 p^2 + i(x^3 - x), the semiclassical double well
- K(alpha) = p^2 + i(x^3 + alpha x), related to it by scaling

Levels are found by shooting with WKB boundary seeds and certified against a
dense oscillator-basis oracle; states are followed into the complex plane to
locate and classify their zeros.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
