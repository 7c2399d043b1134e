"""Local statistics of sequences mod one, checked against lattice-counting limit laws."""

__version__ = "0.1.0"
