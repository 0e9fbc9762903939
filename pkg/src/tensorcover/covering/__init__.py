"""Sphere coverings by spherical caps and their analysis."""

from .constructions import *  # noqa: F401,F403
from .constructions import __all__ as _built
from .discrepancy import CoverReport, estimate_tau, verify_cover
from .sets import (DEFAULT_BUDGET, HittingSet, Provenance, dedup_rows,
                   format_hitting_set, load_hitting_set, parse_hitting_set,
                   save_hitting_set)

__all__ = list(_built) + [
    "CoverReport", "DEFAULT_BUDGET", "HittingSet", "Provenance", "dedup_rows",
    "estimate_tau", "format_hitting_set", "load_hitting_set",
    "parse_hitting_set", "save_hitting_set", "verify_cover",
]
