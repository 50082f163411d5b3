"""
digitop - A verification toolkit for digital topology on integer lattices.
"""

__version__ = "1.0.0"
__author__ = "digitop Team"
__description__ = "Check product adjacencies, digital continuity and digital-topological group structures by exact enumeration"
