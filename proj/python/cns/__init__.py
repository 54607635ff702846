"""Pseudo-spectral Navier-Stokes simulator and verification toolkit.

The compiled core lives in ``cns._cns``; everything it exports is re-exported
here. Fields move to and from numpy as ``(components, n, n, n)`` arrays.
"""

from ._cns import *  # noqa: F401,F403
from ._cns import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
