"""Exact combinatorics of torus characters, rational series and strata for finite reductive groups."""

__version__ = "0.1.0"

from .errors import DLSeriesError
from .rootdatum import RootDatum, FrobeniusTwist, builtin_datum, named_twist, weyl_group
from .torus import finite_torus, characters, w_theta
from .series import series_partition, series_of

__all__ = [
    "__version__",
    "DLSeriesError",
    "RootDatum",
    "FrobeniusTwist",
    "builtin_datum",
    "named_twist",
    "weyl_group",
    "finite_torus",
    "characters",
    "w_theta",
    "series_partition",
    "series_of",
]
