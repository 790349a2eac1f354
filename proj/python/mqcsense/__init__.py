"""Permutation-symmetric multiple-quantum coherence simulator."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, MqcError  # noqa: F401
