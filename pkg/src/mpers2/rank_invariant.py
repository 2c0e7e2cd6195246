"""Classical rank invariant and pointwise Betti numbers.

The rank of a composite map between two comparable grid points is the
baseline invariant that the hom-dimension tables must strictly refine; it is
also the cheapest consistency check for decompositions (block additivity).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field_matrix import rank as matrix_rank
from .grid_module import Box, GridPoset, PersistenceModule, transition


@dataclass
class InvariantTable:
    """Values attached to ordered comparable grid-point pairs (a, b).

    Keys are exactly the comparable pairs of the grid (or of a requested
    sub-range); iteration is always in lexicographic (a, b) order so any
    serialization of a table is deterministic.
    """

    grid: GridPoset
    entries: dict = dc_field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def items(self):
        return [(k, self.entries[k]) for k in sorted(self.entries)]

    def keys(self):
        return sorted(self.entries)

    def max_norm_diff(self, other: "InvariantTable") -> float:
        """Max absolute difference over shared keys (numeric tables only)."""
        shared = set(self.entries) & set(other.entries)
        if not shared:
            return 0.0
        return max(abs(self.entries[k] - other.entries[k]) for k in shared)

    def differing_pairs(self, other: "InvariantTable") -> list:
        shared = set(self.entries) & set(other.entries)
        return sorted(k for k in shared if self.entries[k] != other.entries[k])

    def __eq__(self, other):
        return (
            isinstance(other, InvariantTable)
            and self.grid == other.grid
            and self.entries == other.entries
        )

    def add_entrywise(self, other: "InvariantTable") -> "InvariantTable":
        if set(self.entries) != set(other.entries):
            raise ValueError("tables have different key sets")
        return InvariantTable(
            self.grid, {k: self.entries[k] + other.entries[k] for k in self.entries}
        )


def rank_at(m: PersistenceModule, a, b) -> int:
    """Rank of the composite map from the fiber at a to the fiber at b."""
    if not m.grid.leq(a, b):
        raise ValueError(f"rank_at needs a <= b, got {a} !<= {b}")
    return matrix_rank(transition(m, a, b))


def rank_table(m: PersistenceModule, box: Box | None = None) -> InvariantTable:
    """Rank of every comparable pair, optionally restricted to a box range."""
    entries = {}
    for a, b in m.grid.comparable_pairs(box):
        entries[(a, b)] = rank_at(m, a, b)
    return InvariantTable(m.grid, entries)


def betti_pointwise(m: PersistenceModule, t) -> int:
    """Dimension of the fiber at one grid point."""
    return m.dims[t]
