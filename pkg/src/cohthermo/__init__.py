"""Coherence and irreversibility in driven closed quantum systems.

Submodules
----------
linalg       states, Gibbs states, entropies, dephasing, coherence
dynamics     protocols, propagators, transition matrices, adiabatic state
thermo       work, irreversible entropy and its split, non-adiabaticity
fluctuation  two-point measurement statistics and fluctuation relations
models       driven qubit and quantum kicked rotor
cli          experiment runner
"""
from .config import DEFAULT_TOL, Tolerances
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
