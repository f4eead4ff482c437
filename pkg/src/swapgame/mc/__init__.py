"""Monte Carlo oracle for the jump-diffusion game."""
from ._accel import backend_name
from .oracle import *  # noqa: F401,F403
from .oracle import __all__ as _oracle_all

__all__ = ["backend_name", *_oracle_all]
