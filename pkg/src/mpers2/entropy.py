"""Shannon entropy of a normalized per-box spectrum.

Two spectrum readings are implemented behind a source tag, selected by the
coefficient field: rational modules use the positive singular values of the
transition map (real embedding), GF(p) modules use weight 1 per
indecomposable summand of the restriction whose own transition across the
box is nonzero (a multiplicity reading).  Each covers the field where the
other is undefined.

Entropy uses the natural logarithm; rank-0 boxes have an empty spectrum and
entropy 0 by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .field_matrix import rank as matrix_rank, svd_real
from .grid_module import Box, PersistenceModule, restrict, transition
from .mbi import decompose
from .rank_invariant import InvariantTable

# singular values at or below this (relative to the largest) count as zero
_SVD_REL_TOL = 1e-10


@dataclass
class Spectrum:
    """Descending positive weights attached to a box, plus their origin."""

    values: list
    source: str  # "svd-of-transition" | "summand-weights"


def spectrum(M: PersistenceModule, a, b) -> Spectrum:
    """Per-box spectrum; empty when nothing persists across the box."""
    if not M.grid.leq(a, b):
        raise ValueError(f"spectrum needs a <= b, got {a} !<= {b}")
    if M.field.is_rational:
        vals = svd_real(transition(M, a, b))
        top = vals[0] if vals else 0.0
        cut = max(_SVD_REL_TOL * top, 1e-300)
        kept = [v for v in vals if v > cut]
        return Spectrum(kept, "svd-of-transition")
    sub = restrict(M, Box(a, b))
    origin = (0,) * M.grid.n
    corner = tuple(b[i] - a[i] for i in range(M.grid.n))
    weights = []
    for s in decompose(sub).summands:
        if matrix_rank(transition(s, origin, corner)) > 0:
            weights.append(1.0)
    return Spectrum(weights, "summand-weights")


def entropy_of_spectrum(spec: Spectrum) -> float:
    """Shannon entropy (nats) of the normalized spectrum; 0 for <= 1 atom."""
    vals = spec.values
    if len(vals) <= 1:
        return 0.0
    total = sum(vals)
    h = 0.0
    for v in vals:
        p = v / total
        h -= p * math.log(p)
    return h


def persistent_entropy(M: PersistenceModule, a, b) -> float:
    """Entropy of the per-box spectrum at (a, b), in nats."""
    return entropy_of_spectrum(spectrum(M, a, b))


def entropy_table(M: PersistenceModule, box: Box | None = None) -> InvariantTable:
    """Entropy for every comparable pair; pairs are independent."""
    entries = {}
    for a, b in M.grid.comparable_pairs(box):
        entries[(a, b)] = persistent_entropy(M, a, b)
    return InvariantTable(M.grid, entries)
