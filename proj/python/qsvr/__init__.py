"""Quantum-kernel SVR anomaly detection workbench."""

from ._qsvr import *  # noqa: F401,F403
from ._qsvr import __doc__  # noqa: F401
