"""Computer algebra for p-typical formal group laws and their finite modules
over ramified extensions of the p-adic integers."""

from .dvr import DvrElement, Frac, RamConstants, RamifiedRing, make_ring, ram_constants
from .witt import scalar_witt_coords, witt_add_poly

__all__ = [
    "DvrElement", "Frac", "RamConstants", "RamifiedRing",
    "make_ring", "ram_constants", "scalar_witt_coords", "witt_add_poly",
]
