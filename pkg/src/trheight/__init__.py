"""Height lower bounds for totally real numbers via a chordal test function."""

from .algebra import (
    HeightValue,
    IntPolynomial,
    RootSet,
    cyclotomic,
    is_totally_real,
    mahler_measure,
    parse_polynomial,
    roots,
    weil_height,
)

__version__ = "0.1.0"
