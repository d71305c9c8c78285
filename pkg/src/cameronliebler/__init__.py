"""Cameron-Liebler line classes with x = (q^2-1)/2 and affine two-intersection sets."""

from .affine import build_K, line_profile
from .clclass import LineClassBundle, build_bundle
from .gf import FieldElem, FieldTable, build_field
from .geometry import Tower
from .report import CertReport
from .verify import run_checks

__all__ = [
    "CertReport",
    "FieldElem",
    "FieldTable",
    "LineClassBundle",
    "Tower",
    "build_K",
    "build_bundle",
    "build_field",
    "line_profile",
    "run_checks",
]
__version__ = "0.1.0"
