"""
primesums - density versions of k-fold prime sums, as executable algorithms
"""

__version__ = "1.0.0"
