"""Lattice Green's functions for high-order Laplacian stencils."""
from .stencils import (MEHR_IDS, SPLIT_IDS, STENCIL_IDS, MehrstellenPair,
                       SplitStencil, get_stencil)

__version__ = "0.1.0"

__all__ = ["get_stencil", "SplitStencil", "MehrstellenPair", "STENCIL_IDS",
           "SPLIT_IDS", "MEHR_IDS", "__version__"]
