"""Exact invariants of multiparameter persistence modules on finite grids."""

from .field_matrix import GF2, QQ, Field, Matrix, Polynomial
from .grid_module import (
    Box,
    GridPoset,
    NatTransform,
    PersistenceModule,
    direct_sum,
    interval_module,
    is_equal,
    nat_check,
    random_module,
    restrict,
    shift,
    tensor,
    transition,
    validate,
    zero_module,
)
from .lnti import hom_basis, hom_space_dim, lnti_self, lnti_table, refine_grid
from .mbi import decompose, end_algebra, find_idempotent, mbi_signature, mbi_table, split, verify_idempotent
from .entropy import persistent_entropy, entropy_table, spectrum
from .rank_invariant import InvariantTable, betti_pointwise, rank_at, rank_table
from .interleaving import (
    InterleavingCertificate,
    interleaving_distance_upper,
    make_perturbed_pair,
    search_interleaving,
    verify_interleaving,
)
from .bifiltration import BifilteredComplex, PointCloud, build_bifiltration, homology_module
from .cli_io import export_module, import_module, load_module, save_module

__version__ = "0.1.0"
