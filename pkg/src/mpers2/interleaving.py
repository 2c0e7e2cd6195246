"""Shift-interleaving certificates: verification, tiny-scale search, fixtures.

An interleaving at a per-axis step vector eps is a pair of natural maps
phi: M -> N[eps], psi: N -> M[eps] whose shifted composites equal the
internal 2*eps transitions.  Because shifted modules clamp at the grid
boundary, all checks are restricted to interior points (where no clamping
occurred); the triangle identities are required exactly there.

Search is exhaustive over the naturality-satisfying component families and
therefore complete at tiny scale; anything beyond the candidate budget is
reported as a distinguished "budget" outcome rather than absence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .field_matrix import Matrix, multiply
from .grid_module import (
    Box,
    NatTransform,
    PersistenceModule,
    add_transform,
    direct_sum_list,
    interval_module,
    scale_transform,
    shift,
    transition,
    zero_transform,
)
from .lnti import hom_basis
from .mbi import decompose


@dataclass
class InterleavingCertificate:
    epsilon: tuple
    phi: NatTransform  # M -> shift(N, eps)
    psi: NatTransform  # N -> shift(M, eps)


@dataclass
class SearchResult:
    status: str  # "found" | "none" | "budget"
    certificate: InterleavingCertificate | None = None


@dataclass
class DistanceBound:
    """Smallest uniform grid-aligned shift admitting a certificate, if known.

    ``minimal`` is True only when every smaller shift was searched to
    completion, i.e. the bound is the exact grid-aligned distance.
    """

    epsilon: tuple | None
    minimal: bool
    status: str  # "found" | "none_within_range" | "unknown"


def _interior_points(grid, eps, factor=1):
    for t in grid.points():
        if all(t[i] + factor * eps[i] <= grid.shape[i] - 1 for i in range(grid.n)):
            yield t


def interleaving_violations(
    M: PersistenceModule, N: PersistenceModule, cert: InterleavingCertificate
) -> list[str]:
    """Naturality and triangle failures on interior points, one per message."""
    g = M.grid
    out = []
    if g != N.grid:
        return ["modules live on different grids"]
    eps = tuple(int(e) for e in cert.epsilon)
    if len(eps) != g.n or any(e < 0 for e in eps):
        return [f"epsilon {cert.epsilon} is not a nonnegative per-axis step vector"]
    for axis in range(g.n):
        if not g.is_uniform(axis):
            return [f"axis {axis} is not uniformly spaced"]
    N_eps = shift(N, eps)
    M_eps = shift(M, eps)

    def check_nat(eta, src, tgt, label):
        msgs = []
        for t in _interior_points(g, eps):
            comp = eta.components.get(t)
            if comp is None or comp.rows != tgt.dims[t] or comp.cols != src.dims[t]:
                msgs.append(f"{label}: bad component at {t}")
        if msgs:
            return msgs
        for t in _interior_points(g, eps):
            for axis in range(g.n):
                head = t[:axis] + (t[axis] + 1,) + t[axis + 1 :]
                if head[axis] > g.shape[axis] - 1:
                    continue
                if any(head[i] + eps[i] > g.shape[i] - 1 for i in range(g.n)):
                    continue
                lhs = multiply(eta.components[head], src.edge(t, axis))
                rhs = multiply(tgt.edge(t, axis), eta.components[t])
                if lhs != rhs:
                    msgs.append(f"{label}: naturality fails on edge {t} -> {head}")
        return msgs

    out.extend(check_nat(cert.phi, M, N_eps, "phi"))
    out.extend(check_nat(cert.psi, N, M_eps, "psi"))
    if out:
        return out
    two_eps = tuple(2 * e for e in eps)
    for t in _interior_points(g, eps, factor=2):
        t_eps = tuple(t[i] + eps[i] for i in range(g.n))
        t_2eps = tuple(t[i] + two_eps[i] for i in range(g.n))
        tri1 = multiply(cert.psi.components[t_eps], cert.phi.components[t])
        if tri1 != transition(M, t, t_2eps):
            out.append(f"triangle M at {t}: psi[eps] . phi != internal transition")
        tri2 = multiply(cert.phi.components[t_eps], cert.psi.components[t])
        if tri2 != transition(N, t, t_2eps):
            out.append(f"triangle N at {t}: phi[eps] . psi != internal transition")
    return out


def verify_interleaving(
    M: PersistenceModule, N: PersistenceModule, cert: InterleavingCertificate
) -> bool:
    return not interleaving_violations(M, N, cert)


def search_interleaving(
    M: PersistenceModule, N: PersistenceModule, epsilon, budget: int = 1 << 16
) -> SearchResult:
    """Exhaustive certificate search at a fixed eps over GF(p).

    Candidates range over the full naturality-satisfying spaces
    Hom(M, N[eps]) x Hom(N, M[eps]); the search is complete within the
    budget (number of candidate pairs), so "none" certifies absence of a
    globally natural certificate.
    """
    field = M.field
    if field.p is None:
        raise ValueError("exhaustive search needs a finite field")
    eps = tuple(int(e) for e in epsilon)
    N_eps = shift(N, eps)
    M_eps = shift(M, eps)
    basis_phi = hom_basis(M, N_eps)
    basis_psi = hom_basis(N, M_eps)
    p = field.p
    n_candidates = p ** (len(basis_phi) + len(basis_psi))
    if n_candidates > budget:
        return SearchResult("budget")

    def combos(basis, src, tgt):
        if not basis:
            yield zero_transform(src, tgt)
            return
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            out = zero_transform(src, tgt)
            for c, b in zip(coeffs, basis):
                if c:
                    out = add_transform(out, scale_transform(b, c))
            yield out

    for phi in combos(basis_phi, M, N_eps):
        for psi in combos(basis_psi, N, M_eps):
            cert = InterleavingCertificate(eps, phi, psi)
            if verify_interleaving(M, N, cert):
                return SearchResult("found", cert)
    return SearchResult("none")


def interleaving_distance_upper(
    M: PersistenceModule, N: PersistenceModule, budget: int = 1 << 16
) -> DistanceBound:
    """Sweep uniform eps upward; first certified eps is an upper bound.

    The bound is minimal only when every smaller eps was searched to
    completion (no budget truncation below the found value).
    """
    g = M.grid
    max_steps = max(s - 1 for s in g.shape)
    all_complete = True
    for k in range(max_steps + 1):
        eps = (k,) * g.n
        res = search_interleaving(M, N, eps, budget)
        if res.status == "found":
            return DistanceBound(eps, all_complete, "found")
        if res.status == "budget":
            all_complete = False
    if all_complete:
        return DistanceBound(None, True, "none_within_range")
    return DistanceBound(None, False, "unknown")


def _interval_supports(M: PersistenceModule) -> list[Box]:
    """Recover box supports of a module built as a sum of box intervals."""
    boxes = []
    for s in decompose(M).summands:
        pts = s.support()
        if not pts or any(s.dims[t] > 1 for t in pts):
            raise ValueError("module is not a sum of thin box intervals")
        lo = tuple(min(t[i] for t in pts) for i in range(M.grid.n))
        hi = tuple(max(t[i] for t in pts) for i in range(M.grid.n))
        expect = set(M.grid.box_points(Box(lo, hi)))
        if expect != set(pts):
            raise ValueError("summand support is not a box")
        boxes.append(Box(lo, hi))
    return boxes


def make_perturbed_pair(
    M: PersistenceModule,
    delta,
    seed: int = 0,
    mode: str = "shift",
    intervals: list[Box] | None = None,
):
    """A certified delta-interleaved partner for M, for stability fixtures.

    mode="shift": N = shift(M, delta); phi is the internal transition into
    the doubly shifted module and psi the identity reindexing.

    mode="erode": M must be (or be given as) a sum of box intervals; one
    seeded summand has its upper corner eroded by delta grid steps (dropped
    if emptied).  Both maps are the canonical identity-on-overlap families.
    """
    import random

    g = M.grid
    d = tuple(int(x) for x in delta)
    if mode == "shift":
        N = shift(M, d)
        N_eps = shift(N, d)
        M_eps = shift(M, d)

        def clamp(t, steps):
            return tuple(min(t[i] + steps[i], g.shape[i] - 1) for i in range(g.n))

        phi = NatTransform(
            M, N_eps, {t: transition(M, t, clamp(clamp(t, d), d)) for t in g.points()}
        )
        psi = NatTransform(
            N, M_eps, {t: Matrix.identity(M.field, N.dims[t]) for t in g.points()}
        )
        return M, N, InterleavingCertificate(d, phi, psi)

    if mode != "erode":
        raise ValueError(f"unknown perturbation mode {mode!r}")
    if intervals is None:
        intervals = _interval_supports(M)
    # the blockwise maps below assume summand blocks ordered like `intervals`,
    # so rebuild the module canonically from them
    M = direct_sum_list([interval_module(g, M.field, bx) for bx in intervals], g, M.field)
    rng = random.Random(seed)
    which = rng.randrange(len(intervals)) if intervals else 0
    new_boxes: list[Box | None] = []
    for i, bx in enumerate(intervals):
        if i != which:
            new_boxes.append(bx)
            continue
        hi = tuple(bx.b[j] - d[j] for j in range(g.n))
        new_boxes.append(Box(bx.a, hi) if all(h >= a for h, a in zip(hi, bx.a)) else None)
    parts = [interval_module(g, M.field, bx) for bx in new_boxes if bx is not None]
    N = direct_sum_list(parts, g, M.field)
    N_eps = shift(N, d)
    M_eps = shift(M, d)

    # per original summand i, identity where both source and target are alive
    def alive_shift(bx: Box | None, t, steps) -> bool:
        if bx is None:
            return False
        u = tuple(min(t[i] + steps[i], g.shape[i] - 1) for i in range(g.n))
        return all(bx.a[i] <= u[i] <= bx.b[i] for i in range(g.n))

    def build(src_alive_per_box, tgt_alive_per_box, src_mod, tgt_mod):
        comps = {}
        for t in g.points():
            rows, cols = tgt_mod.dims[t], src_mod.dims[t]
            data = [[M.field.zero()] * cols for _ in range(rows)]
            r_off = 0
            c_off = 0
            for i in range(len(intervals)):
                src_a = src_alive_per_box[i](t)
                tgt_a = tgt_alive_per_box[i](t)
                if src_a and tgt_a:
                    data[r_off][c_off] = M.field.one()
                if src_a:
                    c_off += 1
                if tgt_a:
                    r_off += 1
            comps[t] = Matrix(M.field, rows, cols, data)
        return comps

    zero_steps = (0,) * g.n
    m_alive = [lambda t, bx=bx: alive_shift(bx, t, zero_steps) for bx in intervals]
    n_alive = [lambda t, bx=bx: alive_shift(bx, t, zero_steps) for bx in new_boxes]
    n_eps_alive = [lambda t, bx=bx: alive_shift(bx, t, d) for bx in new_boxes]
    m_eps_alive = [lambda t, bx=bx: alive_shift(bx, t, d) for bx in intervals]
    phi = NatTransform(M, N_eps, build(m_alive, n_eps_alive, M, N_eps))
    psi = NatTransform(N, M_eps, build(n_alive, m_eps_alive, N, M_eps))
    return M, N, InterleavingCertificate(d, phi, psi)
