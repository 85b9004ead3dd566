"""Post-processing toolkit for point defects in semiconductors: formation
thermodynamics, charged-cell corrections, spin Hamiltonians, C2v selection
rules and Stark-shift analysis."""

__version__ = "0.1.0"
