"""Worm-domain Bergman kernel numerics: python bindings over the C++ core."""

from wormbergman._core import *  # noqa: F401,F403
from wormbergman._core import __version__  # noqa: F401
