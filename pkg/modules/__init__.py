"""
Lie Workbench - Module Package

Exact computations with free, free nilpotent and finitely presented Lie
algebras: Lyndon bases, structure constants, Chevalley-Eilenberg homology,
nilpotent quotients, subdirect and fibre sums, and the lief script runner.
"""

__version__ = "0.1.0"
__author__ = "Lie Workbench Development Team"
