"""Small sets with slow growth in SL(2,p): constructions, exact growth counts and search."""

from .constructions import (
    SubgroupSpec,
    build_subgroup,
    catalog,
    coset_core_set,
    evdlt_set,
    find_good_x,
    optimal_set,
    splus2,
)
from .field import Fp, FpElement
from .growth import ElementSet, GrowthReport, analyze, delta_ratio, generates, product, triple
from .perturb import PerturbationReport, perturb_add, perturb_remove, perturb_swap
from .search import SearchConfig, SearchResult, backtrack_search, verify_published_optimum
from .sl2 import GroupElement, GroupTable, enumerate_group

__version__ = "0.1.0"

__all__ = [
    "ElementSet", "Fp", "FpElement", "GroupElement", "GroupTable", "GrowthReport",
    "PerturbationReport", "SearchConfig", "SearchResult", "SubgroupSpec", "analyze",
    "backtrack_search", "build_subgroup", "catalog", "coset_core_set", "delta_ratio",
    "enumerate_group", "evdlt_set", "find_good_x", "generates", "optimal_set",
    "perturb_add", "perturb_remove", "perturb_swap", "product", "splus2", "triple",
    "verify_published_optimum",
]
