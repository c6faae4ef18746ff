"""Computable invariants of 3-manifolds around symplectic instanton homology."""
from .errors import HsikitError
from .gradedab import GradedAbelianGroup
from .hsicalc import certify_minimal, euler_check, hsi
from .manifolds import (
    Brieskorn,
    ConnectedSum,
    DoubleBranchedCover,
    Lens,
    PlumbingTree,
    S2xS1,
    SurgeryOnTorusKnot,
    h1,
    pi1,
)

__version__ = "0.1.0"

__all__ = [
    "Brieskorn", "ConnectedSum", "DoubleBranchedCover", "GradedAbelianGroup", "HsikitError",
    "Lens", "PlumbingTree", "S2xS1", "SurgeryOnTorusKnot", "certify_minimal", "euler_check",
    "h1", "hsi", "pi1",
]
