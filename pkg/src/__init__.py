# uncertainty-lab - Numerical laboratory for uncertainty relations
"""
Robertson bounds for finite-dimensional observables, self-adjoint momentum
extensions on a box, and the C operator of PT-symmetric models.
"""

__version__ = "0.1.0"
