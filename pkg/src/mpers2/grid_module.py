"""Persistence modules on finite parameter grids.

A module assigns a finite-dimensional fiber to every grid point and an exact
linear map to every covering edge; square (2-face) commutativity makes the
whole diagram functorial.  Everything is stored explicitly on covering edges
only; longer transitions are composed on demand.

Modules are treated as immutable after construction and all operations here
are pure, so values can be shared freely across threads.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .field_matrix import (
    Field,
    Matrix,
    add,
    direct_sum as matrix_direct_sum,
    kronecker,
    multiply,
    scale,
)

Point = tuple[int, ...]


class GridPoset:
    """Finite discretization of an n-dimensional parameter space.

    One strictly increasing list of real coordinates per axis; points are
    addressed by integer index tuples and ordered componentwise.
    """

    __slots__ = ("axes", "n", "shape")

    def __init__(self, axes):
        axes = [list(ax) for ax in axes]
        if not axes:
            raise ValueError("grid needs at least one axis")
        for i, ax in enumerate(axes):
            if not ax:
                raise ValueError(f"axis {i} is empty")
            if any(b <= a for a, b in zip(ax, ax[1:])):
                raise ValueError(f"axis {i} is not strictly increasing")
        self.axes = axes
        self.n = len(axes)
        self.shape = tuple(len(ax) for ax in axes)

    def points(self):
        """All grid points in lexicographic order (axis 0 most significant)."""
        return itertools.product(*(range(s) for s in self.shape))

    def contains(self, t: Point) -> bool:
        return len(t) == self.n and all(0 <= x < s for x, s in zip(t, self.shape))

    def leq(self, a: Point, b: Point) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def coords(self, t: Point) -> tuple:
        return tuple(self.axes[i][x] for i, x in enumerate(t))

    def index_of_coords(self, coords) -> Point:
        out = []
        for i, c in enumerate(coords):
            try:
                out.append(self.axes[i].index(c))
            except ValueError:
                raise ValueError(f"coordinate {c} is not on axis {i}") from None
        return tuple(out)

    def covering_edges(self):
        """All pairs (t, axis) with t + e_axis inside the grid, lex order."""
        for t in self.points():
            for axis in range(self.n):
                if t[axis] + 1 < self.shape[axis]:
                    yield t, axis

    def comparable_pairs(self, box: "Box | None" = None):
        """All pairs (a, b) with a <= b, in lexicographic (a, b) order."""
        if box is None:
            lo = (0,) * self.n
            hi = tuple(s - 1 for s in self.shape)
        else:
            lo, hi = box.a, box.b
        for a in itertools.product(*(range(lo[i], hi[i] + 1) for i in range(self.n))):
            for b in itertools.product(*(range(a[i], hi[i] + 1) for i in range(self.n))):
                yield a, b

    def box_points(self, box: "Box"):
        return itertools.product(*(range(box.a[i], box.b[i] + 1) for i in range(self.n)))

    def full_box(self) -> "Box":
        return Box((0,) * self.n, tuple(s - 1 for s in self.shape))

    def is_uniform(self, axis: int, rel_tol: float = 1e-9) -> bool:
        ax = self.axes[axis]
        if len(ax) < 2:
            return True
        d0 = ax[1] - ax[0]
        return all(abs((b - a) - d0) <= rel_tol * max(1.0, abs(d0)) for a, b in zip(ax, ax[1:]))

    def __eq__(self, other):
        return isinstance(other, GridPoset) and self.axes == other.axes

    def __hash__(self):
        return hash(tuple(tuple(ax) for ax in self.axes))

    def __repr__(self):
        return f"GridPoset(shape={self.shape})"


@dataclass(frozen=True)
class Box:
    """A pair of grid points a <= b; the restriction window for invariants."""

    a: Point
    b: Point

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("box corners have different lengths")
        if any(x > y for x, y in zip(self.a, self.b)):
            raise ValueError(f"box corners are not ordered: {self.a} !<= {self.b}")


class PersistenceModule:
    """Fibers and covering-edge maps on a grid, normalized at construction.

    Missing dims read as 0 and missing edge maps as zero matrices of the
    right shape; after normalization every point and covering edge has an
    explicit entry.
    """

    __slots__ = ("grid", "field", "dims", "edge_maps")

    def __init__(self, grid: GridPoset, field: Field, dims: dict, edge_maps: dict):
        norm_dims = {}
        for t in grid.points():
            d = dims.get(t, 0)
            if d < 0:
                raise ValueError(f"negative dimension at {t}")
            norm_dims[t] = d
        norm_edges = {}
        for t, axis in grid.covering_edges():
            head = _step(t, axis)
            mat = edge_maps.get((t, axis))
            if mat is None:
                mat = Matrix.zeros(field, norm_dims[head], norm_dims[t])
            norm_edges[(t, axis)] = mat
        self.grid = grid
        self.field = field
        self.dims = norm_dims
        self.edge_maps = norm_edges

    def dim(self, t: Point) -> int:
        return self.dims[t]

    def edge(self, t: Point, axis: int) -> Matrix:
        return self.edge_maps[(t, axis)]

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims.values())

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> tuple[int, ...]:
        return tuple(self.dims[t] for t in self.grid.points())

    def support(self) -> list[Point]:
        return [t for t in self.grid.points() if self.dims[t] > 0]

    def __repr__(self):
        return f"PersistenceModule({self.grid!r}, {self.field}, total_dim={self.total_dim()})"


def _step(t: Point, axis: int, k: int = 1) -> Point:
    out = list(t)
    out[axis] += k
    return tuple(out)


def validate(m: PersistenceModule) -> list[str]:
    """Shape and 2-face commutativity check; one message per violation."""
    out = []
    for (t, axis), mat in m.edge_maps.items():
        head = _step(t, axis)
        if mat.field != m.field:
            out.append(f"edge {t} axis {axis}: field {mat.field} != module field {m.field}")
        if mat.rows != m.dims[head] or mat.cols != m.dims[t]:
            out.append(
                f"edge {t} axis {axis}: shape {mat.rows}x{mat.cols} "
                f"!= expected {m.dims[head]}x{m.dims[t]}"
            )
    if out:
        return out
    for t in m.grid.points():
        for i in range(m.grid.n):
            if t[i] + 1 >= m.grid.shape[i]:
                continue
            for j in range(i + 1, m.grid.n):
                if t[j] + 1 >= m.grid.shape[j]:
                    continue
                via_i = multiply(m.edge(_step(t, i), j), m.edge(t, i))
                via_j = multiply(m.edge(_step(t, j), i), m.edge(t, j))
                if via_i != via_j:
                    out.append(f"face at {t} axes ({i},{j}): paths do not commute")
    return out


def transition(m: PersistenceModule, a: Point, b: Point) -> Matrix:
    """Composite map from the fiber at a to the fiber at b (a <= b).

    Composed along the axis-0-first staircase; by 2-face commutativity any
    monotone path gives the same matrix on a validated module.
    """
    if not m.grid.leq(a, b):
        raise ValueError(f"transition needs a <= b, got {a} !<= {b}")
    mat = Matrix.identity(m.field, m.dims[a])
    cur = list(a)
    for axis in range(m.grid.n):
        while cur[axis] < b[axis]:
            mat = multiply(m.edge(tuple(cur), axis), mat)
            cur[axis] += 1
    return mat


def restrict(m: PersistenceModule, box: Box) -> PersistenceModule:
    """Module on the sub-grid spanned by the box, with dims and maps copied."""
    g = m.grid
    if not (g.contains(box.a) and g.contains(box.b)):
        raise ValueError(f"box {box} is not inside the grid")
    new_axes = [g.axes[i][box.a[i] : box.b[i] + 1] for i in range(g.n)]
    sub = GridPoset(new_axes)
    dims = {}
    edges = {}
    for t in sub.points():
        orig = tuple(x + box.a[i] for i, x in enumerate(t))
        dims[t] = m.dims[orig]
    for t, axis in sub.covering_edges():
        orig = tuple(x + box.a[i] for i, x in enumerate(t))
        edges[(t, axis)] = m.edge(orig, axis)
    return PersistenceModule(sub, m.field, dims, edges)


def _check_compatible(m1: PersistenceModule, m2: PersistenceModule):
    if m1.grid != m2.grid:
        raise ValueError("modules live on different grids")
    if m1.field != m2.field:
        raise ValueError("modules live over different fields")


def direct_sum(m1: PersistenceModule, m2: PersistenceModule) -> PersistenceModule:
    _check_compatible(m1, m2)
    dims = {t: m1.dims[t] + m2.dims[t] for t in m1.grid.points()}
    edges = {
        key: matrix_direct_sum(m1.edge_maps[key], m2.edge_maps[key]) for key in m1.edge_maps
    }
    return PersistenceModule(m1.grid, m1.field, dims, edges)


def direct_sum_list(mods: list[PersistenceModule], grid: GridPoset, field: Field) -> PersistenceModule:
    """Direct sum of a list of modules; the empty sum is the zero module."""
    out = zero_module(grid, field)
    for m in mods:
        out = direct_sum(out, m)
    return out


def tensor(m1: PersistenceModule, m2: PersistenceModule) -> PersistenceModule:
    _check_compatible(m1, m2)
    dims = {t: m1.dims[t] * m2.dims[t] for t in m1.grid.points()}
    edges = {key: kronecker(m1.edge_maps[key], m2.edge_maps[key]) for key in m1.edge_maps}
    return PersistenceModule(m1.grid, m1.field, dims, edges)


def zero_module(grid: GridPoset, field: Field) -> PersistenceModule:
    return PersistenceModule(grid, field, {}, {})


def constant_module(grid: GridPoset, field: Field) -> PersistenceModule:
    """The rank-one constant module (tensor unit): dim 1 and identity maps."""
    return interval_module(grid, field, grid.full_box())


def _normalize_support(grid: GridPoset, support) -> frozenset:
    if isinstance(support, Box):
        return frozenset(grid.box_points(support))
    if callable(support):
        return frozenset(t for t in grid.points() if support(t))
    pts = frozenset(tuple(t) for t in support)
    for t in pts:
        if not grid.contains(t):
            raise ValueError(f"support point {t} is outside the grid")
    return pts


def interval_module(grid: GridPoset, field: Field, support) -> PersistenceModule:
    """Thin module: dim 1 on an order-convex support, identity maps inside.

    ``support`` may be a Box, an iterable of points, or a predicate.
    Staircase-shaped supports are allowed; non-order-convex supports are
    rejected because they cannot carry a commuting rank-one structure.
    """
    pts = _normalize_support(grid, support)
    pts_sorted = sorted(pts)
    for s in pts_sorted:
        for t in pts_sorted:
            if s != t and grid.leq(s, t):
                for u in itertools.product(*(range(s[i], t[i] + 1) for i in range(grid.n))):
                    if u not in pts:
                        raise ValueError(
                            f"support is not order-convex: {u} lies between {s} and {t}"
                        )
    dims = {t: 1 for t in pts}
    edges = {}
    one = Matrix.identity(field, 1)
    for t, axis in grid.covering_edges():
        if t in pts and _step(t, axis) in pts:
            edges[(t, axis)] = one
    return PersistenceModule(grid, field, dims, edges)


def shift(m: PersistenceModule, delta) -> PersistenceModule:
    """Reindexed module t -> m(t + delta) with clamping at the grid boundary.

    delta counts grid steps per axis (nonnegative ints); the grid must be
    uniformly spaced on every axis so that a step shift is a uniform shift
    of the parameter.  Indices past the edge reuse the last grid value.
    """
    g = m.grid
    delta = tuple(int(d) for d in delta)
    if len(delta) != g.n or any(d < 0 for d in delta):
        raise ValueError("delta must be a nonnegative per-axis step vector")
    for axis in range(g.n):
        if not g.is_uniform(axis):
            raise ValueError(f"axis {axis} is not uniformly spaced; shift is undefined")

    def clamp(t: Point) -> Point:
        return tuple(min(t[i] + delta[i], g.shape[i] - 1) for i in range(g.n))

    dims = {t: m.dims[clamp(t)] for t in g.points()}
    edges = {}
    for t, axis in g.covering_edges():
        edges[(t, axis)] = transition(m, clamp(t), clamp(_step(t, axis)))
    return PersistenceModule(g, m.field, dims, edges)


def _random_invertible(field: Field, n: int, rng: random.Random) -> Matrix:
    if n == 0:
        return Matrix.zeros(field, 0, 0)
    lo = Matrix.identity(field, n).copy()
    up = Matrix.identity(field, n).copy()
    for i in range(n):
        for j in range(i):
            lo.data[i][j] = field.coerce(rng.randrange(field.p) if field.p else rng.randint(-2, 2))
        for j in range(i + 1, n):
            up.data[i][j] = field.coerce(rng.randrange(field.p) if field.p else rng.randint(-2, 2))
        if field.p:
            up.data[i][i] = 1 + rng.randrange(field.p - 1)
        else:
            up.data[i][i] = field.coerce(rng.choice([1, -1, 2]))
    return multiply(lo, up)


def random_module(grid: GridPoset, field: Field, max_dim: int, seed: int) -> PersistenceModule:
    """Seeded random module: a sum of random box intervals, then an optional
    random change of basis at each point (keeps commutativity by construction).
    """
    rng = random.Random(seed)
    k = rng.randint(1, max(1, max_dim))
    mod = zero_module(grid, field)
    for _ in range(k):
        lo = tuple(rng.randrange(s) for s in grid.shape)
        hi = tuple(rng.randrange(l, s) for l, s in zip(lo, grid.shape))
        mod = direct_sum(mod, interval_module(grid, field, Box(lo, hi)))
    # change of basis: new_edge = P_head . edge . P_tail^{-1}
    from .field_matrix import inverse

    base = {}
    for t in grid.points():
        if rng.random() < 0.5:
            base[t] = _random_invertible(field, mod.dims[t], rng)
    if base:
        edges = {}
        for (t, axis), mat in mod.edge_maps.items():
            head = _step(t, axis)
            out = mat
            if t in base:
                out = multiply(out, inverse(base[t]))
            if head in base:
                out = multiply(base[head], out)
            edges[(t, axis)] = out
        mod = PersistenceModule(grid, field, dict(mod.dims), edges)
    return mod


def is_equal(m1: PersistenceModule, m2: PersistenceModule) -> bool:
    """Strict structural equality: same grid, field, dims and matrices."""
    return (
        m1.grid == m2.grid
        and m1.field == m2.field
        and m1.dims == m2.dims
        and m1.edge_maps == m2.edge_maps
    )


@dataclass
class NatTransform:
    """Family of fiberwise maps source(t) -> target(t) commuting with edges."""

    source: PersistenceModule
    target: PersistenceModule
    components: dict

    def component(self, t: Point) -> Matrix:
        return self.components[t]


def nat_check(eta: NatTransform) -> list[str]:
    """Naturality violations of a transform, one message per bad edge/shape."""
    m, n = eta.source, eta.target
    out = []
    if m.grid != n.grid:
        return ["source and target live on different grids"]
    for t in m.grid.points():
        comp = eta.components.get(t)
        if comp is None:
            out.append(f"missing component at {t}")
            continue
        if comp.rows != n.dims[t] or comp.cols != m.dims[t]:
            out.append(
                f"component at {t}: shape {comp.rows}x{comp.cols} "
                f"!= expected {n.dims[t]}x{m.dims[t]}"
            )
    if out:
        return out
    for t, axis in m.grid.covering_edges():
        head = _step(t, axis)
        lhs = multiply(eta.components[head], m.edge(t, axis))
        rhs = multiply(n.edge(t, axis), eta.components[t])
        if lhs != rhs:
            out.append(f"naturality fails on edge {t} -> {head} (axis {axis})")
    return out


def identity_transform(m: PersistenceModule) -> NatTransform:
    comps = {t: Matrix.identity(m.field, m.dims[t]) for t in m.grid.points()}
    return NatTransform(m, m, comps)


def zero_transform(m: PersistenceModule, n: PersistenceModule) -> NatTransform:
    comps = {t: Matrix.zeros(m.field, n.dims[t], m.dims[t]) for t in m.grid.points()}
    return NatTransform(m, n, comps)


def compose_transform(g: NatTransform, f: NatTransform) -> NatTransform:
    """g after f, componentwise matrix product."""
    comps = {t: multiply(g.components[t], f.components[t]) for t in f.components}
    return NatTransform(f.source, g.target, comps)


def add_transform(f: NatTransform, g: NatTransform) -> NatTransform:
    comps = {t: add(f.components[t], g.components[t]) for t in f.components}
    return NatTransform(f.source, f.target, comps)


def scale_transform(f: NatTransform, c) -> NatTransform:
    comps = {t: scale(f.components[t], c) for t in f.components}
    return NatTransform(f.source, f.target, comps)


def flatten_transform(eta: NatTransform) -> list:
    """Concatenated entries over lex-ordered points (linear-algebra view)."""
    out = []
    for t in eta.source.grid.points():
        for row in eta.components[t].data:
            out.extend(row)
    return out


def transform_equal(f: NatTransform, g: NatTransform) -> bool:
    return all(f.components[t] == g.components[t] for t in f.components)
