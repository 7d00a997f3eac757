"""faberlab - Faber polynomials, their asymptotics and zeros for domains with corners."""

__version__ = "0.1.0"
