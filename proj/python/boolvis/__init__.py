"""Visibility in the Poisson Boolean model.

Thin wrapper over the compiled extension; everything lives in
:mod:`boolvis._boolvis`.
"""

from ._boolvis import *  # noqa: F401,F403
from ._boolvis import __version__  # noqa: F401
