"""
Lie Workbench - Test Package

Unit tests for the lief modules, the script runner and the command line.
"""
