"""
Numerical lab for polarization, Steiner symmetrization and the symmetric
decreasing rearrangement.
"""
