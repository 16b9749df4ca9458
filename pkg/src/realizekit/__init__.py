"""Realizability workbench: computability models, an intuitionistic proof
checker, proof-to-program extraction, and a bounded realizability checker."""

from realizekit._backend import BACKEND_NAME, COMPILED

__version__ = "0.1.0"
__all__ = ["BACKEND_NAME", "COMPILED", "__version__"]
