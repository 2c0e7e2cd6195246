"""Dimension of natural-transformation spaces between restricted modules.

For two modules M, N on a shared grid and a box [a, b], the invariant is the
dimension of the space of natural transformations M|_[a,b] -> N|_[a,b].  In
the vector-space-valued setting the only 2-cells between fiberwise maps are
equalities, so the lax notion collapses to strict naturality; the invariant
is computed as the kernel dimension of a sparse linear constraint system
with one equation block per covering edge inside the box.

Covering edges suffice: naturality on longer transitions is implied by
functoriality, which the redundancy tests check exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field_matrix import (
    Matrix,
    multiply,
    sparse_kernel_basis,
    sparse_rank,
    sparse_reduce_row,
)
from .grid_module import (
    Box,
    NatTransform,
    PersistenceModule,
    _step,
    restrict,
    transition,
)
from .rank_invariant import InvariantTable


@dataclass
class HomConstraintSystem:
    """Sparse naturality constraint system over a box.

    One variable block per grid point in the box (entries of the component
    matrix at that point), one equation block per covering edge.  Each row
    touches at most the two variable blocks of its edge's endpoints.
    """

    box: Box
    offsets: dict
    n_vars: int
    rows: list
    field: object


def _block_layout(M: PersistenceModule, N: PersistenceModule, box: Box):
    offsets = {}
    n_vars = 0
    for t in M.grid.box_points(box):
        offsets[t] = n_vars
        n_vars += M.dims[t] * N.dims[t]
    return offsets, n_vars


def _edge_rows(Mmap: Matrix, Nmap: Matrix, off_tail, off_head, dM_tail, dM_head, field):
    """Constraint rows for one edge: eta_head . Mmap - Nmap . eta_tail = 0.

    One row per entry of the composite (dims_N(head) x dims_M(tail) of them,
    identically-zero equations included so counts match the block layout);
    head-block and tail-block columns never collide, so no cancellation
    happens inside a row.
    """
    rows = []
    dN_head = Nmap.rows
    zero = field.zero()
    for i in range(dN_head):
        nrow = Nmap.data[i]
        for j in range(dM_tail):
            row = {}
            for k in range(dM_head):
                v = Mmap.data[k][j]
                if v != zero:
                    row[off_head + i * dM_head + k] = v
            for l in range(len(nrow)):
                v = nrow[l]
                if v != zero:
                    row[off_tail + l * dM_tail + j] = field.neg(v)
            rows.append(row)
    return rows


def build_hom_system(
    M: PersistenceModule, N: PersistenceModule, box: Box | None = None, all_pairs: bool = False
) -> HomConstraintSystem:
    """Assemble the naturality system for transforms M|box -> N|box.

    With ``all_pairs=True`` every comparable pair inside the box contributes
    an equation block (redundant by functoriality; used for consistency
    checks only).
    """
    if M.grid != N.grid:
        raise ValueError("modules live on different grids")
    if M.field != N.field:
        raise ValueError("modules live over different fields")
    if box is None:
        box = M.grid.full_box()
    offsets, n_vars = _block_layout(M, N, box)
    rows = []
    field = M.field
    if all_pairs:
        for s, t in M.grid.comparable_pairs(box):
            if s == t:
                continue
            rows.extend(
                _edge_rows(
                    transition(M, s, t),
                    transition(N, s, t),
                    offsets[s],
                    offsets[t],
                    M.dims[s],
                    M.dims[t],
                    field,
                )
            )
    else:
        for t in M.grid.box_points(box):
            for axis in range(M.grid.n):
                head = _step(t, axis)
                if head[axis] > box.b[axis]:
                    continue
                rows.extend(
                    _edge_rows(
                        M.edge(t, axis),
                        N.edge(t, axis),
                        offsets[t],
                        offsets[head],
                        M.dims[t],
                        M.dims[head],
                        field,
                    )
                )
    return HomConstraintSystem(box, offsets, n_vars, rows, field)


def hom_space_dim(
    M: PersistenceModule, N: PersistenceModule, box: Box | None = None, all_pairs: bool = False
) -> int:
    """Dimension of the space of natural transformations M|box -> N|box.

    Degenerate boxes (a = b) have no edges, so the value is the full
    fiberwise hom dimension dims_N(a) * dims_M(a).
    """
    sys = build_hom_system(M, N, box, all_pairs=all_pairs)
    return sys.n_vars - sparse_rank(sys.rows, sys.field)


def hom_basis(M: PersistenceModule, N: PersistenceModule, box: Box | None = None) -> list[NatTransform]:
    """Basis of the natural-transformation space, as transforms between the
    restricted modules; every element passes nat_check by construction."""
    if box is None:
        box = M.grid.full_box()
    sys = build_hom_system(M, N, box)
    vecs = sparse_kernel_basis(sys.rows, sys.n_vars, sys.field)
    Mr = restrict(M, box)
    Nr = restrict(N, box)
    out = []
    for vec in vecs:
        comps = {}
        for t in M.grid.box_points(box):
            local = tuple(x - box.a[i] for i, x in enumerate(t))
            dM, dN = M.dims[t], N.dims[t]
            off = sys.offsets[t]
            data = [[vec[off + i * dM + j] for j in range(dM)] for i in range(dN)]
            comps[local] = Matrix(sys.field, dN, dM, data)
        out.append(NatTransform(Mr, Nr, comps))
    return out


def _chain_table_entries(M: PersistenceModule, N: PersistenceModule, lo: int, hi: int) -> dict:
    """All hom dimensions on sub-intervals of a 1-parameter grid.

    For each start a the constraint system is eliminated incrementally while
    the end b sweeps upward; new equation blocks only touch the last two
    variable blocks, so each (a, b) value costs amortized constant work and
    the whole table is quadratic in the number of grid points.
    """
    field = M.field
    entries = {}
    # absolute column offsets per point, shared by all sweeps
    offsets = []
    acc = 0
    for i in range(lo, hi + 1):
        offsets.append(acc)
        acc += M.dims[(i,)] * N.dims[(i,)]
    for ai, a in enumerate(range(lo, hi + 1)):
        pivots: dict = {}
        n_vars = M.dims[(a,)] * N.dims[(a,)]
        rank_acc = 0
        entries[((a,), (a,))] = n_vars
        for b in range(a + 1, hi + 1):
            bi = b - lo
            n_vars += M.dims[(b,)] * N.dims[(b,)]
            rows = _edge_rows(
                M.edge((b - 1,), 0),
                N.edge((b - 1,), 0),
                offsets[bi - 1],
                offsets[bi],
                M.dims[(b - 1,)],
                M.dims[(b,)],
                field,
            )
            for row in rows:
                res = sparse_reduce_row(dict(row), pivots, field)
                if res:
                    pivots[min(res)] = res
                    rank_acc += 1
            entries[((a,), (b,))] = n_vars - rank_acc
    return entries


def lnti_table(
    M: PersistenceModule, N: PersistenceModule, box: Box | None = None
) -> InvariantTable:
    """Hom dimension for every comparable grid pair (a, b) in the range.

    One-parameter grids use an incremental per-start sweep (identical values,
    quadratic total cost); higher-parameter grids compute each pair
    independently, which also makes the table embarrassingly parallel.
    """
    if M.grid != N.grid:
        raise ValueError("modules live on different grids")
    if M.field != N.field:
        raise ValueError("modules live over different fields")
    if box is None:
        box = M.grid.full_box()
    if M.grid.n == 1:
        entries = _chain_table_entries(M, N, box.a[0], box.b[0])
        return InvariantTable(M.grid, entries)
    entries = {}
    for a, b in M.grid.comparable_pairs(box):
        entries[(a, b)] = hom_space_dim(M, N, Box(a, b))
    return InvariantTable(M.grid, entries)


def lnti_self(M: PersistenceModule, box: Box | None = None) -> InvariantTable:
    """Self table: hom dimensions of M against itself."""
    return lnti_table(M, M, box)


def modification_violations(
    M: PersistenceModule,
    N: PersistenceModule,
    eta: NatTransform,
    gamma: NatTransform,
    alpha: dict,
) -> list[str]:
    """Coherence violations of a candidate modification family ``alpha``.

    alpha maps each grid point t to a square matrix on the fiber N(t); the
    checked equation on every covering edge s -> t is

        alpha_t . eta_t . M(s <= t)  =  N(s <= t) . alpha_s . eta_s
    """
    out = []
    for t in M.grid.points():
        a_t = alpha.get(t)
        if a_t is None:
            out.append(f"missing alpha component at {t}")
            continue
        if a_t.rows != N.dims[t] or a_t.cols != N.dims[t]:
            out.append(f"alpha at {t}: expected square of size {N.dims[t]}")
        g_t = gamma.components.get(t)
        if g_t is None or g_t.rows != N.dims[t] or g_t.cols != M.dims[t]:
            out.append(f"gamma at {t}: wrong shape")
        e_t = eta.components.get(t)
        if e_t is None or e_t.rows != N.dims[t] or e_t.cols != M.dims[t]:
            out.append(f"eta at {t}: wrong shape")
    if out:
        return out
    for s, axis in M.grid.covering_edges():
        t = _step(s, axis)
        lhs = multiply(alpha[t], multiply(eta.components[t], M.edge(s, axis)))
        rhs = multiply(N.edge(s, axis), multiply(alpha[s], eta.components[s]))
        if lhs != rhs:
            out.append(f"coherence fails on edge {s} -> {t} (axis {axis})")
    return out


def verify_modification(
    M: PersistenceModule,
    N: PersistenceModule,
    eta: NatTransform,
    gamma: NatTransform,
    alpha: dict,
) -> bool:
    """True iff the modification coherence equation holds on every edge."""
    return not modification_violations(M, N, eta, gamma, alpha)


def refine_grid(M: PersistenceModule, insertions) -> PersistenceModule:
    """Insert coordinate values, duplicating the nearest lower fiber.

    ``insertions`` is one list of new coordinate values per axis (values
    already on the axis are ignored).  A new point below the smallest old
    coordinate on some axis has no lower fiber and gets dimension 0.  Hom
    tables at pre-existing pairs are unchanged, which the refinement
    consistency tests verify.
    """
    g = M.grid
    if len(insertions) != g.n:
        raise ValueError("need one insertion list per axis")
    new_axes = []
    for i in range(g.n):
        merged = sorted(set(g.axes[i]) | set(insertions[i]))
        new_axes.append(merged)
    new_grid = type(g)(new_axes)

    # per-axis anchor: index of the largest old coordinate <= new coordinate
    anchors = []
    for i in range(g.n):
        amap = []
        for c in new_axes[i]:
            idx = None
            for k, oc in enumerate(g.axes[i]):
                if oc <= c:
                    idx = k
                else:
                    break
            amap.append(idx)
        anchors.append(amap)

    def anchor(t):
        out = []
        for i, x in enumerate(t):
            a = anchors[i][x]
            if a is None:
                return None
            out.append(a)
        return tuple(out)

    dims = {}
    for t in new_grid.points():
        a = anchor(t)
        dims[t] = M.dims[a] if a is not None else 0
    edges = {}
    for t, axis in new_grid.covering_edges():
        head = _step(t, axis)
        a_t, a_h = anchor(t), anchor(head)
        if a_t is None:
            edges[(t, axis)] = Matrix.zeros(M.field, dims[head], 0)
        else:
            edges[(t, axis)] = transition(M, a_t, a_h)
    return PersistenceModule(new_grid, M.field, dims, edges)
