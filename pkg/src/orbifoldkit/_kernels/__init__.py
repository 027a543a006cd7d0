"""Hot torus kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it was built and ``ORBIFOLDKIT_PURE_PYTHON``
is unset (or ``0``).  ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels as pure

compiled = None
if os.environ.get("ORBIFOLDKIT_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

ROTATIONS = pure.ROTATIONS
POWERS = pure.POWERS
normalize = active.normalize
affine_apply = active.affine_apply
affine_preimages = active.affine_preimages
orbit_points = active.orbit_points
orbit_canonical = active.orbit_canonical
stabilizer_order = active.stabilizer_order
project = active.project
pi_fiber = active.pi_fiber
project_preimages = active.project_preimages
transversal_failure = active.transversal_failure

__all__ = [
    "BACKEND", "ROTATIONS", "POWERS", "normalize", "affine_apply",
    "affine_preimages", "orbit_points", "orbit_canonical", "stabilizer_order",
    "project", "pi_fiber", "project_preimages", "transversal_failure",
]
