"""Episodic memory sampling for noisy-label data streams."""

from ._ntd import *  # noqa: F401,F403
from ._ntd import __doc__ as _doc

__doc__ = _doc
