"""Critical types of atomic angular densities: curves, nests and minimizing measures."""

__version__ = "0.1.0"
