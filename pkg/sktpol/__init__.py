"""
sktpol - exact invariant cohomology and SKT-polarised deformations
"""

__version__ = "0.1.0"
