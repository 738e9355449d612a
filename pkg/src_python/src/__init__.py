"""
openqosc
Exact non-Markovian dynamics of damped harmonic oscillators coupled to bosonic baths.
"""

__version__ = "0.1.0"
