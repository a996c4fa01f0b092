"""Simplicial and piecewise-linear maps.

A SimplicialMap is a validated vertex assignment.  A PLMap is the geometric
object: a subdivision trail of a nominal source whose vertices carry exact
rational image points inside the body of a geometric target, affine on each
source facet (the carrier facet of the image is stored per source facet).
Vertex-to-vertex maps are the special case with an `assignment`.

Construction helpers here: maps of prescribed degree on standard spheres,
pinch sums realizing the homotopy-group addition, composition under a
refinement contract, and simplicial approximation (used wherever a genuine
vertex-to-vertex map is needed, e.g. for mapping cylinders).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import (
    Complex,
    ComplexError,
    GeometricComplex,
    Subdivision,
    _face,
    _perm_sign,
    geometric_sphere,
    geometric_wedge,
    sphere_complex,
)
from .exact import barycentric, frac, solve, vsub, vadd, vscale


def facet_budget() -> int:
    try:
        return int(os.environ.get("WFORGE_BUDGET", "1000000"))
    except ValueError:
        return 1000000


class MapError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# simplicial maps


@dataclass(frozen=True)
class SimplicialMap:
    source: Complex
    target: Complex
    assignment: dict  # vertex -> vertex

    def image_face(self, face):
        return _face({self.assignment[v] for v in face})

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        if self.target is not other.source and self.target != other.source:
            raise MapError("composition needs matching complexes")
        return SimplicialMap(
            self.source,
            other.target,
            {v: other.assignment[self.assignment[v]] for v in self.source.vertices},
        )


def validate_simplicial_map(src: Complex, dst: Complex, assignment) -> SimplicialMap:
    """Accept iff every facet's image is a face of the target."""
    for v in src.vertices:
        if v not in assignment:
            raise MapError(f"assignment is not total: vertex {v} unmapped")
        if assignment[v] not in set(dst.vertices):
            raise MapError(f"vertex {v} maps outside the target vertex set")
    for f in src.facets:
        img = _face({assignment[v] for v in f})
        if not dst.has_face(img):
            raise MapError(f"face {f} maps to {img}, not a face of the target")
    return SimplicialMap(src, dst, dict(assignment))


# ---------------------------------------------------------------------------
# PL maps


@dataclass
class PLMap:
    source: Subdivision  # trail over the nominal source; carries coordinates
    target: Subdivision  # trail over the nominal target; usually splitless
    images: dict  # source vertex -> Vec in |target|
    assignment: dict | None = None  # vertex-to-vertex grade when available
    carriers: dict = field(default_factory=dict)  # source facet -> target facet
    meta: dict = field(default_factory=dict)

    @property
    def source_complex(self) -> Complex:
        return self.source.current

    @property
    def target_complex(self) -> Complex:
        return self.target.current

    def source_geometric(self) -> GeometricComplex:
        return self.source.geometric()

    def target_geometric(self) -> GeometricComplex:
        return self.target.geometric()

    def image_points(self, face):
        return [self.images[v] for v in face]

    def _solvers(self):
        key = ("solvers", self.source_complex)
        if self.meta.get("solver_key") != key:
            self.meta["solver_key"] = key
            self.meta["solvers"] = _facet_solvers(
                self.source_complex.facets, self.source.coordinates
            )
        return self.meta["solvers"]

    def evaluate(self, p):
        """Affine evaluation at a rational point of the source body."""
        p = tuple(map(frac, p))
        for f, solver in self._solvers():
            if not solver.in_box(p):
                continue
            bc = solver.coords(p)
            if bc is None or any(c < 0 for c in bc):
                continue
            img = tuple(Fraction(0) for _ in next(iter(self.images.values())))
            for v, c in zip(f, bc):
                img = vadd(img, vscale(c, self.images[v]))
            return img
        raise MapError("point lies outside the source body")

    def validate(self) -> "PLMap":
        """Find a carrier facet for every source facet image."""
        tgt = self.target
        tcoords = tgt.coordinates
        solvers = _facet_solvers(tgt.current.facets, tcoords)
        carriers = {}
        for f in self.source_complex.facets:
            pts = self.image_points(f)
            tau = _find_containing_facet(solvers, pts)
            if tau is None:
                raise MapError(f"image of facet {f} does not fit in one target facet")
            carriers[f] = tau
        self.carriers = carriers
        return self

    def is_vertex_to_vertex(self) -> bool:
        return self.assignment is not None


def _facet_solvers(facets, coords):
    from .exact import Bary

    return [(f, Bary([coords[v] for v in f])) for f in facets]


def _find_containing_facet(solvers, pts):
    for tau, solver in solvers:
        if all(solver.contains(p) for p in pts):
            return tau
    return None


def plmap_from_simplicial(
    source_trail: Subdivision, target_trail: Subdivision, assignment
) -> PLMap:
    sm = validate_simplicial_map(source_trail.current, target_trail.current, assignment)
    images = {v: target_trail.coordinates[assignment[v]] for v in source_trail.current.vertices}
    m = PLMap(source_trail, target_trail, images, dict(assignment))
    m.carriers = {
        f: _facet_of_target_containing_face(target_trail.current, sm.image_face(f))
        for f in source_trail.current.facets
    }
    return m


def _facet_of_target_containing_face(tgt: Complex, face):
    for f in tgt.facets:
        if set(face) <= set(f):
            return f
    raise MapError(f"{face} is not a face of the target")


def identity_map(gc: GeometricComplex) -> PLMap:
    tr = Subdivision.of(gc)
    tt = Subdivision.of(gc)
    return plmap_from_simplicial(tr, tt, {v: v for v in gc.complex.vertices})


# ---------------------------------------------------------------------------
# chart geometry for refinement


def _chart(points):
    """Affine chart (origin, basis) spanned by a simplex's vertex points."""
    origin = points[0]
    basis = [vsub(p, origin) for p in points[1:]]
    return origin, basis


def _chart_coords(chart, p):
    origin, basis = chart
    A = [[basis[j][i] for j in range(len(basis))] for i in range(len(origin))]
    rhs = list(vsub(p, origin))
    sol = solve(A, rhs)
    if sol is None:
        return None
    return sol[0]


def _wall_functional(chart, wall_pts):
    """Linear functional on the chart vanishing on the wall, or None."""
    cs = [_chart_coords(chart, p) for p in wall_pts]
    if any(c is None for c in cs):
        return None
    d = len(cs[0])
    rows = [list(vsub(c, cs[0])) for c in cs[1:]]
    sol = solve(rows, [0] * len(rows)) if rows else ((), [tuple([Fraction(1)] * d)])
    if sol is None:
        return None
    kernel = [k for k in sol[1]] if rows else [tuple(Fraction(1 if i == 0 else 0) for i in range(d))]
    if len(kernel) != 1:
        return None  # wall does not span a hyperplane of the chart
    n = kernel[0]
    c0 = cs[0]

    def s(p):
        pc = _chart_coords(chart, p)
        if pc is None:
            return None
        return sum(ni * (xi - yi) for ni, xi, yi in zip(n, pc, c0))

    return s


def refine_facets_to_cells(
    trail: Subdivision,
    vertex_point,
    cells_for_facet,
    facet_filter=None,
):
    """Split trail edges until each facet's points lie in one cell.

    vertex_point: vertex -> Vec (an affine function of the vertex position;
    must be defined for split-created vertices too).  cells_for_facet:
    facet -> (chart, [(key, Bary solver), ...]); all listed cells lie in the
    given affine chart.  Returns facet -> cell key for the final complex;
    resolved facets inherit their key to children, so the loop is
    worklist-driven.
    """
    from collections import deque

    budget = facet_budget()
    resolved = {}
    work = deque(f for f in trail.current.facets if facet_filter is None or facet_filter(f))
    guard = 0

    def residence(f):
        chart, cells = cells_for_facet(f)
        pts = [vertex_point(v) for v in f]
        for key, solver in cells:
            if all(solver.contains(p) for p in pts):
                return key
        return None

    live = set(trail.current.facets)
    while work:
        guard += 1
        if guard > 50 * budget:
            raise MapError("refinement did not converge")
        # FIFO order: a facet whose own split would retire a shared edge must
        # not be starved by the cascade children of its neighbours
        f = work.popleft()
        if f not in live or f in resolved:
            continue
        key = residence(f)
        if key is not None:
            resolved[f] = key
            continue
        chart, cells = cells_for_facet(f)
        pts = {v: vertex_point(v) for v in f}
        # split only along walls of cells that hold at least one point:
        # extended wall hyperplanes of far-away cells would otherwise build
        # a full ambient arrangement instead of the cell-partition pullback
        occupied = [
            (key, solver)
            for key, solver in cells
            if any(solver.contains(p) for p in pts.values())
        ]
        split_done = False
        for _key, solver in occupied or cells:
            if split_done:
                break
            corners = solver.pts
            k = len(corners)
            for drop in range(k):
                wall = [corners[i] for i in range(k) if i != drop]
                sfun = _wall_functional(chart, wall)
                if sfun is None:
                    continue
                vals = {v: sfun(p) for v, p in pts.items()}
                if any(x is None for x in vals.values()):
                    continue
                pos = [v for v, x in vals.items() if x > 0]
                neg = [v for v, x in vals.items() if x < 0]
                if not pos or not neg:
                    continue
                for u in pos:
                    for w in neg:
                        e = (u, w) if u < w else (w, u)
                        if trail.current.has_face(e):
                            su, sw = vals[u], vals[w]
                            t = su / (su - sw) if e == (u, w) else sw / (sw - su)
                            trail.split_edge(*e, t)
                            for parent, (a, b) in trail.last_children.items():
                                live.discard(parent)
                                live.update((a, b))
                                if parent in resolved:
                                    resolved[a] = resolved[b] = resolved.pop(parent)
                                elif facet_filter is None or facet_filter(a):
                                    # children inherit the parent's origin
                                    work.extend((a, b))
                            split_done = True
                if split_done:
                    break
        if not split_done:
            raise MapError(
                f"refinement stalled: facet {f} straddles cells with no splittable wall"
            )
        if len(trail.current.facets) > budget:
            raise BudgetError("facet budget exceeded during refinement")
    return resolved


# ---------------------------------------------------------------------------
# composition under the refinement contract


def compose_refined(f: PLMap, g: PLMap, siblings=()) -> PLMap:
    """Simplicial-grade or affine composition g after f.

    Requires f's nominal target to be g's nominal source (checked on the
    complex).  When g's source is subdivided, f's source is refined with
    exact crossing splits until every facet image lies in one affinity cell
    of g; the operation fails rather than approximating when that is
    impossible.  Image dicts of sibling maps sharing f's source trail are
    kept in sync through the refinement.
    """
    if f.target.base != g.source.base:
        raise MapError("incompatible: f's nominal target differs from g's nominal source")

    fast = (
        f.assignment is not None
        and g.assignment is not None
        and f.target.current == g.source.current
    )
    if fast:
        assignment = {v: g.assignment[f.assignment[v]] for v in f.source_complex.vertices}
        return plmap_from_simplicial(f.source, g.target, assignment)

    from .exact import Bary

    gcoords = g.source.coordinates
    tgt_base = f.target.base
    tcoords = f.target.coordinates
    base_solvers = _facet_solvers(tgt_base.facets, tcoords)
    base_carrier = {}

    def carrier_of(ff):
        # carrier among the *nominal* target facets, which index g's cells
        tau = base_carrier.get(ff)
        if tau is None:
            tau = _find_containing_facet(base_solvers, f.image_points(ff))
            if tau is None:
                raise MapError(f"image of facet {ff} does not fit in one target facet")
            base_carrier[ff] = tau
        return tau

    cell_cache = {}

    def cells_for_facet(ff):
        tau = carrier_of(ff)
        if tau not in cell_cache:
            chart = _chart([tcoords[v] for v in tau])
            cells = [
                (gf, Bary([gcoords[v] for v in gf]))
                for gf in g.source.refined_facets_of(tau)
            ]
            cell_cache[tau] = (chart, cells)
        return cell_cache[tau]

    _ensure_images_on_split(f, siblings)
    try:
        refine_facets_to_cells(f.source, lambda v: f.images[v], cells_for_facet)
    finally:
        _release_images_hook(f)

    g_solvers = _facet_solvers(g.source.current.facets, gcoords)

    def g_eval(p):
        for tau, solver in g_solvers:
            if not solver.in_box(p):
                continue
            bc = solver.coords(p)
            if bc is None or any(c < 0 for c in bc):
                continue
            img = tuple(Fraction(0) for _ in next(iter(g.images.values())))
            for v, c in zip(tau, bc):
                img = vadd(img, vscale(c, g.images[v]))
            return img
        raise MapError("composite image point escaped g's source body")

    images = {v: g_eval(f.images[v]) for v in f.source_complex.vertices}
    out = PLMap(f.source, g.target, images)
    out.validate()
    return out


def _ensure_images_on_split(f: PLMap, siblings=()):
    """Arrange for images of split-created vertices to appear automatically.

    siblings: further image dicts over the same source trail, kept in sync
    so several maps can share one subdividing source.
    """
    orig = f.source.split_edge
    dicts = [f.images] + [s.images if isinstance(s, PLMap) else s for s in siblings]

    def split_edge(u, v, t=Fraction(1, 2)):
        m = orig(u, v, t)
        uu, vv = (u, v) if u < v else (v, u)
        for d in dicts:
            d[m] = tuple(
                (1 - frac(t)) * a + frac(t) * b for a, b in zip(d[uu], d[vv])
            )
        if f.assignment is not None:
            f.assignment = None  # split vertices have no target vertex
        return m

    f.source.split_edge = split_edge
    f.source._orig_split = orig


def _release_images_hook(f: PLMap):
    if hasattr(f.source, "_orig_split"):
        f.source.split_edge = f.source._orig_split
        del f.source._orig_split


# ---------------------------------------------------------------------------
# degree maps on standard spheres


def _suspension_splits(trail: Subdivision, l: int):
    """Reduce the standard S^l to an iterated suspension over a triangle.

    Splitting edge (a, b) of a complete-complex sphere exhibits it as the
    suspension, with poles a and b, of the complete sphere on the remaining
    vertices plus the new one.  Iterating l-1 times leaves an equatorial
    triangle.  Returns (chain of new vertices, equator vertex triple).
    """
    chain = []
    a, b = l, l + 1
    for _ in range(l - 1):
        m = trail.split_edge(a, b)
        chain.append(m)
        a, b = a - 1, m
    equator = [0, 1, chain[-1]] if chain else [0, 1, 2]
    return chain, equator


def _subdivide_cycle(trail: Subdivision, cycle, pieces_per_edge):
    """Split each consecutive cycle edge into the given number of pieces."""
    out = []
    n = len(cycle)
    for idx in range(n):
        a, b = cycle[idx], cycle[(idx + 1) % n]
        seg = [a]
        cur = a
        for r in range(pieces_per_edge - 1):
            t = Fraction(1, pieces_per_edge - r)
            u, v = (cur, b) if cur < b else (b, cur)
            tt = t if cur < b else 1 - t
            m = trail.split_edge(u, v, tt)
            seg.append(m)
            cur = m
        out.extend(seg)
    return out


def degree_map(k: int, l: int) -> PLMap:
    """An explicit PL self-map of S^l of degree k.

    Degree 1 is the identity, 0 the constant map, -1 the reflection swapping
    the two last vertices; |k| >= 2 winds a subdivided equatorial circle k
    times around the target equator, suspended l-1 times.
    """
    if l < 1:
        raise MapError("degree_map needs l >= 1")
    base = geometric_sphere(l)
    src = Subdivision.of(base)
    tgt = Subdivision.of(base)
    ident = {v: v for v in base.complex.vertices}
    if k == 1:
        return plmap_from_simplicial(src, tgt, ident)
    if k == 0:
        return plmap_from_simplicial(src, tgt, {v: 0 for v in base.complex.vertices})
    if k == -1:
        refl = dict(ident)
        refl[l], refl[l + 1] = l + 1, l
        return plmap_from_simplicial(src, tgt, refl)
    return winding_family([k], l)[0]


def winding_family(ks, l: int, pieces: int | None = None):
    """Degree maps for several k on one shared suspended-winding source.

    The equatorial circle is cut into 3*pieces edges (pieces defaults to the
    lcm of the nonzero |k|); the k-th map winds it k times, pausing on
    degenerate edges where needed, so every map in the family is a
    vertex-to-vertex simplicial map from the same source trail.
    """
    ks = list(ks)
    import math

    sizes = [abs(k) for k in ks if k]
    if pieces is None:
        pieces = math.lcm(*sizes) if sizes else 1
    if any(abs(k) > pieces for k in ks):
        raise MapError("pieces must be at least max |k|")
    base = geometric_sphere(l)
    src = Subdivision.of(base)
    chain_s, eq_s = _suspension_splits(src, l)
    cycle = _subdivide_cycle(src, eq_s, pieces)
    n = len(cycle)  # 3 * pieces
    out = []
    for k in ks:
        tgt = Subdivision.of(base)
        chain_t, eq_t = _suspension_splits(tgt, l)
        assignment = {}
        for jj, m in enumerate(chain_s):
            assignment[m] = chain_t[jj]
        for i, w in enumerate(cycle):
            step = (i * abs(k)) // pieces
            pos = step % 3 if k > 0 else (-step) % 3
            assignment[w] = eq_t[pos]
        for v in base.complex.vertices:
            assignment.setdefault(v, v)
        out.append(plmap_from_simplicial(src, tgt, assignment))
    return out


def pullback_target_splits(f: PLMap, record):
    """Replay a target-subdivision record through a vertex-to-vertex map.

    `record` is a split list over f's nominal target.  f's target trail
    replays it verbatim (the id sequence matches a fresh replay); every
    source edge mapping onto a split target edge is split at the matching
    parameter, and the new source vertex is assigned the new target vertex.
    f stays vertex-to-vertex throughout.
    """
    if f.assignment is None:
        raise MapError("pullback needs a vertex-to-vertex map")
    for sp in record:
        u, v = sp.edge
        m_t = f.target.split_edge(u, v, sp.t)
        for a, b in list(f.source.current.edges()):
            ia, ib = f.assignment[a], f.assignment[b]
            if (ia, ib) == (u, v):
                t = sp.t
            elif (ia, ib) == (v, u):
                t = 1 - sp.t
            else:
                continue
            m_s = f.source.split_edge(a, b, t if a < b else t)
            f.assignment[m_s] = m_t
            f.images[m_s] = f.target.coordinates[m_t]
    return plmap_from_simplicial(f.source, f.target, f.assignment)


def constant_map(source: GeometricComplex, target: GeometricComplex, vertex) -> PLMap:
    src = Subdivision.of(source)
    tgt = Subdivision.of(target)
    return plmap_from_simplicial(src, tgt, {v: vertex for v in source.complex.vertices})


# ---------------------------------------------------------------------------
# pinch sum


def _collapse_hemisphere(trail, pole, target_ids, wedge_point_id, assignment, flip=False):
    """Assign the star of `pole` so the hemisphere wraps one sphere summand.

    target_ids: vertex ids 0..n+1 of the summand inside the wedge (index 0
    must be the wedge point).  Fills `assignment` for the pole and the ring
    created by splitting every spoke; equator vertices are left to the
    caller (they go to the wedge point).  `flip` reverses the wrap
    orientation (the two hemispheres of an oriented sphere are mirrored).
    """
    link = sorted({v for f in trail.current.facets if pole in f for v in f if v != pole})
    ring = [trail.split_edge(pole, w) for w in link]
    ring_facets = sorted(
        _face(v for v in f if v != pole) for f in trail.current.facets if pole in f
    )
    rho0 = ring_facets[0]
    n = len(target_ids) - 2
    assignment[pole] = target_ids[n + 1]
    for r in ring:
        assignment[r] = wedge_point_id
    for idx, v in enumerate(rho0):
        slot = idx + 1
        if flip:
            slot = {1: 2, 2: 1}.get(slot, slot)
        assignment[v] = target_ids[slot]


def pinch_sum(f: PLMap, g: PLMap) -> PLMap:
    """A PL representative of the homotopy sum of f and g.

    Collapses an equatorial sphere of the common nominal source to obtain a
    wedge, then maps the two summand spheres by f and g.  Requires both maps
    to share the nominal source and target models and to send the basepoint
    vertex 0 to the same point (all maps built by this package do).
    """
    if f.source.base != g.source.base:
        raise MapError("mismatched nominal sources")
    if f.target.base != g.target.base:
        raise MapError("mismatched nominal targets")
    base = f.source.base
    n = base.dimension
    std = sphere_complex(n)
    if base != std:
        raise MapError(
            "pinch_sum supports suspension-structured standard sphere sources only"
        )
    if f.images[0] != g.images[0]:
        raise MapError("summands disagree at the basepoint vertex")

    sphere = geometric_sphere(n)
    trail = Subdivision.of(sphere)
    wedge_gc, refs, vmaps = geometric_wedge([sphere, sphere], [0, 0])
    wp = vmaps[0][0]
    assignment = {}

    if n == 1:
        m = trail.split_edge(1, 2)
        xN = trail.split_edge(0, 1)
        xS = trail.split_edge(0, 2)
        a_ids = [vmaps[0][i] for i in range(3)]
        b_ids = [vmaps[1][i] for i in range(3)]
        assignment[0] = wp
        assignment[m] = wp
        assignment[1] = a_ids[2]
        assignment[xN] = a_ids[1]
        assignment[2] = b_ids[1]
        assignment[xS] = b_ids[2]
    else:
        m = trail.split_edge(n, n + 1)
        equator = sorted(set(range(n)) | {m})
        a_ids = [vmaps[0][i] for i in range(n + 2)]
        b_ids = [vmaps[1][i] for i in range(n + 2)]
        for v in equator:
            assignment[v] = wp
        _collapse_hemisphere(trail, n, a_ids, wp, assignment, flip=True)
        _collapse_hemisphere(trail, n + 1, b_ids, wp, assignment)

    pinch = plmap_from_simplicial(trail, Subdivision.of(wedge_gc), assignment)

    # assemble f v g on the wedge by replaying both source trails
    wtrail = Subdivision.of(wedge_gc)
    images = {}
    for part, (mp, vmap) in enumerate(((f, vmaps[0]), (g, vmaps[1]))):
        translate = dict(vmap)
        for sp in mp.source.splits:
            u, v = sp.edge
            uu, vv = translate[u], translate[v]
            e = (uu, vv) if uu < vv else (vv, uu)
            t = sp.t if uu < vv else 1 - sp.t
            translate[sp.new_vertex] = wtrail.split_edge(*e, t)
        for v, w in translate.items():
            images[w] = mp.images[v]
    # the summands may carry different target subdivisions; the assembled
    # map is validated against the nominal target, whose body is the same
    fg = PLMap(wtrail, Subdivision.of(f.target.geometric_base()), images)
    fg.validate()
    return compose_refined(pinch, fg)


# ---------------------------------------------------------------------------
# simplicial approximation


def simplicial_approximation(m: PLMap, siblings=()) -> PLMap:
    """A vertex-to-vertex map homotopic to m, into the unsubdivided target.

    Subdivides the source until every closed vertex star maps inside an
    open target vertex star (checked exactly through positive barycentric
    carrier coordinates), then assigns each source vertex that target
    vertex, preferring a vertex the image point hits exactly.  The
    straight-line homotopy inside stars connects the result to the input
    map, so all computable invariants agree.  Sibling image dicts sharing
    the source trail are kept in sync.
    """
    budget = facet_budget()
    tgt_base = m.target.base
    tcoords = {v: m.target.coordinates[v] for v in tgt_base.vertices}
    base_solvers = _facet_solvers(tgt_base.facets, tcoords)
    solver_of = dict(base_solvers)
    bc_cache = {}

    def bary(tau, v):
        key = (tau, v)
        if key not in bc_cache:
            bc_cache[key] = solver_of[tau].coords(m.images[v])
        return bc_cache[key]

    _ensure_images_on_split(m, siblings)
    try:
        for _round in range(60):
            base_carrier = {}
            bad_facets = []
            for f in m.source_complex.facets:
                tau = _find_containing_facet(base_solvers, m.image_points(f))
                if tau is None:
                    bad_facets.append(f)
                else:
                    base_carrier[f] = tau
            choice = {}
            bad_vertices = []
            if not bad_facets:
                stars = {}
                for f in m.source_complex.facets:
                    for v in f:
                        stars.setdefault(v, []).append(f)
                for v, fs in sorted(stars.items()):
                    cands = set(base_carrier[fs[0]])
                    for f in fs[1:]:
                        cands &= set(base_carrier[f])
                    exact = [u for u in sorted(cands) if tcoords[u] == m.images[v]]
                    found = None
                    for u in exact + [u for u in sorted(cands) if u not in exact]:
                        good = True
                        for f in fs:
                            tau = base_carrier[f]
                            upos = tau.index(u)
                            for w in f:
                                bc = bary(tau, w)
                                if bc is None or bc[upos] <= 0:
                                    good = False
                                    break
                            if not good:
                                break
                        if good:
                            found = u
                            break
                    if found is None:
                        bad_vertices.append(v)
                    else:
                        choice[v] = found
                if not bad_vertices:
                    return plmap_from_simplicial(
                        m.source, Subdivision.of(m.target.geometric_base()), choice
                    )
            to_split = set()
            for f in bad_facets:
                to_split.update(
                    (f[i], f[j]) for i in range(len(f)) for j in range(i + 1, len(f))
                )
            for v in bad_vertices:
                for f in m.source_complex.facets:
                    if v in f:
                        to_split.update(
                            (f[i], f[j]) for i in range(len(f)) for j in range(i + 1, len(f))
                        )
            bc_cache.clear()
            for e in sorted(to_split):
                if m.source.current.has_face(e):
                    m.source.split_edge(*e)
                if len(m.source.current.facets) > budget:
                    raise BudgetError("facet budget exceeded during approximation")
        raise MapError("simplicial approximation did not converge")
    finally:
        _release_images_hook(m)
