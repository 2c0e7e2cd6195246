"""Point cloud -> function-Rips bifiltration -> GF(2) homology module.

A simplex enters the complex at the smallest radius index covering its
diameter (Rips convention: all pairwise distances <= r) and at the smallest
density index at which every vertex clears the threshold.  The density axis
is superlevel (points enter as the threshold decreases); it is stored
reversed, as negated thresholds, so that both grid axes increase with
inclusion and the resulting persistence module keeps the uniform
"maps go up" convention.  The command-line layer reports the user-facing
threshold values.

Homology is computed over GF(2) with boundary-matrix reduction; induced
maps are obtained by re-expressing each basis cycle in the target point's
homology basis.  Deterministic simplex ordering (dimension, then vertex
lexicographic) makes modules reproducible byte for byte.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

from .field_matrix import GF2, Matrix, kernel_basis, solve, _forward_eliminate
from .grid_module import GridPoset, PersistenceModule, validate as module_validate


@dataclass
class PointCloud:
    """Euclidean points with an optional per-point density score.

    When no density is given, the distance to the k-th nearest neighbor is
    used as the score (0.0 for a single-point cloud).
    """

    points: list
    density: list | None = None

    def __post_init__(self):
        dims = {len(p) for p in self.points}
        if len(dims) > 1:
            raise ValueError("inconsistent ambient dimension in point cloud")
        if self.density is not None and len(self.density) != len(self.points):
            raise ValueError("density length does not match point count")

    def with_knn_density(self, k: int = 1) -> "PointCloud":
        dens = []
        for i, p in enumerate(self.points):
            dists = sorted(
                _dist(p, q) for j, q in enumerate(self.points) if j != i
            )
            if not dists:
                dens.append(0.0)
            else:
                dens.append(dists[min(k, len(dists)) - 1])
        return PointCloud(self.points, dens)


def _dist(p, q) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


@dataclass
class BifilteredComplex:
    """Simplices with minimal entry grades on a (radius, density) grid.

    ``grades`` maps a simplex (sorted vertex tuple) to its minimal grid cell
    (radius index, reversed-density index); faces enter no later than
    cofaces in both axes.
    """

    radii: list
    density_thresholds_desc: list  # thresholds in the stored (reversed) order
    max_dim: int
    grades: dict = dc_field(default_factory=dict)

    def grid(self) -> GridPoset:
        # density coordinates: negated thresholds, strictly increasing
        dens_axis = [-f for f in self.density_thresholds_desc]
        return GridPoset([list(self.radii), dens_axis])

    def simplices_at(self, cell) -> list:
        ri, fi = cell
        out = [s for s, (r, f) in self.grades.items() if r <= ri and f <= fi]
        out.sort(key=lambda s: (len(s), s))
        return out


def build_bifiltration(
    cloud: PointCloud, r_axis, f_axis, max_dim: int = 2, knn_k: int = 1
) -> BifilteredComplex:
    """Function-Rips bifiltration of a point cloud.

    r_axis and f_axis must be strictly increasing; a simplex is present at
    cell (i, j) iff its diameter is at most r_axis[i] and every vertex's
    density score is at least the j-th largest threshold.
    """
    r_axis = list(r_axis)
    f_axis = list(f_axis)
    if not r_axis or not f_axis:
        raise ValueError("empty filtration axes")
    if any(b <= a for a, b in zip(r_axis, r_axis[1:])) or any(
        b <= a for a, b in zip(f_axis, f_axis[1:])
    ):
        raise ValueError("filtration axes must be strictly increasing")
    if max_dim > 2:
        raise ValueError("simplices are built up to dimension 2")
    if cloud.density is None:
        cloud = cloud.with_knn_density(knn_k)
    thresholds_desc = sorted(f_axis, reverse=True)

    def density_grade(v: int) -> int | None:
        for j, thr in enumerate(thresholds_desc):
            if cloud.density[v] >= thr:
                return j
        return None

    def radius_grade(diam: float) -> int | None:
        for i, r in enumerate(r_axis):
            if diam <= r:
                return i
        return None

    n = len(cloud.points)
    grades = {}
    vgrade = {}
    for v in range(n):
        fg = density_grade(v)
        if fg is not None:
            vgrade[v] = fg
            grades[(v,)] = (0, fg)
    egrade = {}
    for u, v in itertools.combinations(sorted(vgrade), 2):
        rg = radius_grade(_dist(cloud.points[u], cloud.points[v]))
        if rg is None:
            continue
        egrade[(u, v)] = rg
        grades[(u, v)] = (rg, max(vgrade[u], vgrade[v]))
    if max_dim >= 2:
        for u, v, w in itertools.combinations(sorted(vgrade), 3):
            if (u, v) not in egrade or (u, w) not in egrade or (v, w) not in egrade:
                continue
            rg = max(egrade[(u, v)], egrade[(u, w)], egrade[(v, w)])
            grades[(u, v, w)] = (rg, max(vgrade[u], vgrade[v], vgrade[w]))
    return BifilteredComplex(r_axis, thresholds_desc, max_dim, grades)


def _boundary_matrix(k_simplices, km1_index) -> Matrix:
    """GF(2) boundary matrix: rows = (k-1)-simplices, cols = k-simplices."""
    rows = len(km1_index)
    cols = len(k_simplices)
    data = [[0] * cols for _ in range(rows)]
    for j, s in enumerate(k_simplices):
        if len(s) == 1:
            continue
        for omit in range(len(s)):
            face = s[:omit] + s[omit + 1 :]
            data[km1_index[face]][j] = 1
    return Matrix(GF2, rows, cols, data)


def _homology_basis(dk: Matrix, dk1: Matrix):
    """Representative cycles spanning ker(dk)/im(dk1), deterministic choice.

    Returns (reps, dk1) where reps is a matrix whose columns are the chosen
    cycle representatives.
    """
    cycles = kernel_basis(dk)
    ncols_chain = dk.cols
    # rank-profile selection: boundary columns first, then cycle columns
    cand = [c.col_list(0) for c in cycles]
    bnd = [dk1.col_list(j) for j in range(dk1.cols)]
    data = [list(col) for col in bnd] + [list(col) for col in cand]
    if not data:
        return Matrix.zeros(GF2, ncols_chain, 0)
    stacked = [[data[c][r] for c in range(len(data))] for r in range(ncols_chain)]
    work = [list(r) for r in stacked]
    pivots = _forward_eliminate(work, len(data), GF2)
    chosen = [c - len(bnd) for _, c in pivots if c >= len(bnd)]
    reps = [[cand[j][r] for j in chosen] for r in range(ncols_chain)]
    return Matrix(GF2, ncols_chain, len(chosen), reps)


def homology_module(bif: BifilteredComplex, k: int, check: bool = True) -> PersistenceModule:
    """Degree-k GF(2) homology of the bifiltration as a persistence module.

    Boundaries from missing (k+1)-simplices are zero, so with the dimension
    cap at 2 the degree-2 homology is just the cycle space.  The output
    always satisfies the square-commutativity validation (checked unless
    ``check=False``).
    """
    if k < 0:
        raise ValueError("homology degree must be nonnegative")
    grid = bif.grid()
    dims = {}
    reps = {}
    simplex_lists = {}
    for cell in grid.points():
        simps = bif.simplices_at(cell)
        by_dim = {d: [s for s in simps if len(s) == d + 1] for d in (k - 1, k, k + 1)}
        k_simps = by_dim[k]
        km1 = by_dim[k - 1]
        kp1 = by_dim[k + 1]
        km1_index = {s: i for i, s in enumerate(km1)}
        k_index = {s: i for i, s in enumerate(k_simps)}
        if k == 0:
            dk = Matrix.zeros(GF2, 0, len(k_simps))
        else:
            dk = _boundary_matrix(k_simps, km1_index)
        dk1 = _boundary_matrix(kp1, k_index) if kp1 else Matrix.zeros(GF2, len(k_simps), 0)
        h = _homology_basis(dk, dk1)
        dims[cell] = h.cols
        reps[cell] = (h, dk1, k_index)
        simplex_lists[cell] = k_simps
    edges = {}
    for t, axis in grid.covering_edges():
        head = t[:axis] + (t[axis] + 1,) + t[axis + 1 :]
        h_t, _, _ = reps[t]
        h_h, dk1_h, k_index_h = reps[head]
        src_simps = simplex_lists[t]
        rows_h = len(simplex_lists[head])
        # re-embed each source cycle into the head's chain indexing
        cols = []
        for j in range(h_t.cols):
            vec = [0] * rows_h
            for i, s in enumerate(src_simps):
                vec[k_index_h[s]] = h_t.data[i][j]
            cols.append(vec)
        if cols:
            emb = Matrix(GF2, rows_h, len(cols), [[c[r] for c in cols] for r in range(rows_h)])
        else:
            emb = Matrix.zeros(GF2, rows_h, 0)
        # express classes: [H | boundary] x = embedded cycle, keep H part
        from .mbi import _hstack

        sys_mat = _hstack(GF2, rows_h, [h_h, dk1_h])
        sol = solve(sys_mat, emb)
        if sol is None:
            raise RuntimeError("cycle image is not expressible in the target basis")
        edges[(t, axis)] = Matrix(
            GF2, h_h.cols, h_t.cols, [sol.data[i] for i in range(h_h.cols)]
        )
    mod = PersistenceModule(grid, GF2, dims, edges)
    if check:
        bad = module_validate(mod)
        if bad:
            raise RuntimeError(f"homology module failed validation: {bad[0]}")
    return mod
