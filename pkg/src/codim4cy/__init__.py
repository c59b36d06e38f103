"""Codimension-four Calabi-Yau threefolds via Gorenstein resolutions.

Exact arithmetic over prime fields: polynomial rings, Gröbner bases, Hilbert
polynomials, minimal free resolutions, the structured complexes of the three
construction families, and the invariant pipeline built on top of them.
"""

__version__ = "0.1.0"
