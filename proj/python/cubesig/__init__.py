"""Mapping space signatures of gridded maps [0,1]^d -> R^n."""

try:
    from ._cubesig import *  # installed layout: extension inside the package
except ImportError:  # build-tree layout: extension next to the package dir
    from _cubesig import *

__version__ = "0.1.0"
