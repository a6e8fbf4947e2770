"""Numerical laboratory for Strichartz-type eigenfunction characterizations.

Spherical functions and multiplier symbols on radial functions of ``R^d``,
exact mode arithmetic, grid operators, a spherical Fourier transform pair and
the dichotomy classifier.
"""
from .special_fn import (Kind, MultiplierSpec, phi, phi_deriv, psi, psi_deriv,
                         symbol_deriv, symbol_value, threshold)
from .modes import (ModeExpansion, PlaneWaveExpansion, SequenceSpec, apply_multiplier,
                    decompose_eigen, make_sequence, radialize_planewaves, verify_recurrence)

__version__ = "0.1.0"

__all__ = [
    "Kind", "MultiplierSpec", "phi", "phi_deriv", "psi", "psi_deriv", "symbol_deriv",
    "symbol_value", "threshold", "ModeExpansion", "PlaneWaveExpansion", "SequenceSpec",
    "apply_multiplier", "decompose_eigen", "make_sequence", "radialize_planewaves",
    "verify_recurrence",
]
