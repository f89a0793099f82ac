"""
Structure-preserving finite-difference integrators for the Hunter-Saxton family.
"""

__version__ = "0.1.0"
