"""Exact analysis of quotients of torus endomorphisms and their orbifolds."""
from ._kernels import BACKEND
from .errors import OrbifoldKitError
from .injectivity import compute_H, decide_pi_injectivity, make_injective, quotient_step
from .orbifold import Classification, RamifiedPortrait, classify, euler_characteristic, ramification
from .qote import QotePair, validate
from .torus import AffineEndo, RotationGroup, SpherePoint, TorusPoint

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AffineEndo",
    "Classification",
    "OrbifoldKitError",
    "QotePair",
    "RamifiedPortrait",
    "RotationGroup",
    "SpherePoint",
    "TorusPoint",
    "classify",
    "compute_H",
    "decide_pi_injectivity",
    "euler_characteristic",
    "make_injective",
    "quotient_step",
    "ramification",
    "validate",
]
