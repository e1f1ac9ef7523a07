"""Verificacao de armadilhas polinomiais sobre corpos finitos."""

__version__ = "0.3.0"

__all__ = ["__version__"]
