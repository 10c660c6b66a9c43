"""Characters, fusion rules and modular data for parafermion cosets of admissible-level affine sl(2)."""
from . import affine, coset, extension, minmod, modcheck, qseries
from .fusion import FusionElement
from .level import InvalidLevel, Level
from .qseries import QSeries, eta, eta_inverse

__all__ = [
    "FusionElement",
    "InvalidLevel",
    "Level",
    "QSeries",
    "affine",
    "coset",
    "eta",
    "eta_inverse",
    "extension",
    "minmod",
    "modcheck",
    "qseries",
]
