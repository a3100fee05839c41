"""Functional linear regression with derivatives."""

from flrd._core import *  # noqa: F401,F403
from flrd._core import __version__  # noqa: F401
