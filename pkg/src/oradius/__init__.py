"""Certified numerical-radius computation and Orlicz-function radius inequalities."""

__version__ = "0.1.0"

from .errors import OradiusError  # noqa: E402,F401
