"""Exact geometric invariants of PL maps.

Degree by signed preimage counting, oriented preimage cycles of regular
values, transfer of cycles from a polytope-boundary sphere into Euclidean
space through a certified convex re-realization plus central (Schlegel)
projection, linking numbers by cone-intersection counting, and the Hopf /
wedge (Whitehead) invariants together with two-stage composite invariants.

All regular values come from a deterministic perturbation sequence and are
certified exactly against the forbidden skeleton images; every invariant is
recomputed at a second regular value (or apex) and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import Complex, ComplexError, GeometricComplex, Subdivision, _face, _propagate_orientation
from .exact import (
    barycentric,
    centroid,
    det,
    frac,
    in_convex_hull,
    in_simplex,
    solve,
    vadd,
    vscale,
    vsub,
)
from .plmaps import PLMap, MapError


class InvariantError(ValueError):
    pass


# ---------------------------------------------------------------------------
# orientations


def pseudo_orientation(cx: Complex):
    """Coherent facet signs per ridge-connected component (lex-first +1)."""
    comps = _facet_components(cx)
    orient = {}
    for comp in comps:
        sub = Complex(tuple(sorted({v for f in comp for v in f})), tuple(sorted(comp)))
        orient.update(_propagate_orientation(sub, closed=True))
    return orient


def _facet_components(cx: Complex):
    ridge_map = {}
    for f in cx.facets:
        for i in range(len(f)):
            ridge_map.setdefault(f[:i] + f[i + 1 :], []).append(f)
    seen = set()
    comps = []
    for f in cx.facets:
        if f in seen:
            continue
        comp = []
        stack = [f]
        seen.add(f)
        while stack:
            g = stack.pop()
            comp.append(g)
            for i in range(len(g)):
                for h in ridge_map[g[:i] + g[i + 1 :]]:
                    if h not in seen:
                        seen.add(h)
                        stack.append(h)
        comps.append(comp)
    return comps


def _relative_orientation_sign(sub_pts, parent_pts):
    """Orientation of a simplex relative to a same-plane parent simplex."""
    solver_pts = parent_pts
    bcs = [barycentric(solver_pts, p) for p in sub_pts]
    if any(b is None for b in bcs):
        raise InvariantError("sub-simplex does not lie in the parent's plane")
    rows = [list(vsub(b, bcs[0]))[1:] for b in bcs[1:]]
    d = det(rows)
    if d == 0:
        raise InvariantError("degenerate sub-simplex")
    return 1 if d > 0 else -1


def oriented_source_facets(m: PLMap):
    """Coherent facet signs of the source, aligned to the nominal model.

    Maps built on the directly triangulated product boundary are aligned to
    the canonical orientation of the staircase product sphere, so different
    subdivisions of the same nominal sphere always carry one global sign.
    """
    if m.meta.get("product_boundary"):
        key = ("aligned_orientation", m.source_complex)
        if m.meta.get("orient_key") == key:
            return m.meta["orientation"]
        from .complexes import product_sphere

        cur = m.source_complex
        orient = pseudo_orientation(cur)
        l = m.meta["l"]
        ps = product_sphere(l)
        nom_orient = pseudo_orientation(ps.boundary.as_complex())
        sigma = cur.facets[0]
        sub_pts = [m.source.coordinates[v] for v in sigma]
        parent = None
        for tau in ps.boundary.facets:
            tau_pts = [ps.product.coordinates[v] for v in tau]
            bcs = [barycentric(tau_pts, p) for p in sub_pts]
            if all(b is not None and all(c >= 0 for c in b) for b in bcs):
                parent = tau
                parent_pts = tau_pts
                break
        if parent is None:
            raise InvariantError("facet not contained in a nominal boundary facet")
        rel = _relative_orientation_sign(sub_pts, parent_pts)
        if orient[sigma] * rel != nom_orient[parent]:
            orient = {f: -s for f, s in orient.items()}
        m.meta["orient_key"] = key
        m.meta["orientation"] = orient
        return orient
    return m.source.oriented_facets(pseudo_orientation(m.source.base))


def oriented_target_facets(m: PLMap):
    return m.target.oriented_facets(pseudo_orientation(m.target.base))


# ---------------------------------------------------------------------------
# regular values


@dataclass(frozen=True)
class RegularValue:
    point: tuple
    facet: tuple  # target facet whose interior holds the point
    avoided_faces: int  # size of the certified forbidden skeleton


def _candidate_points(coords, facets, max_attempts=24):
    """Deterministic interior points: barycenters plus dyadic perturbations."""
    for attempt in range(max_attempts):
        for tau in facets:
            pts = [coords[v] for v in tau]
            k = len(pts)
            weights = [Fraction(64) + Fraction((i + 1) * attempt * (2 * i + 1), 8) for i in range(k)]
            tot = sum(weights)
            p = tuple(
                sum(w * pt[j] for w, pt in zip(weights, pts)) / tot
                for j in range(len(pts[0]))
            )
            yield tau, p


def _point_hits_face_image(pts, y):
    lo = [min(p[i] for p in pts) for i in range(len(y))]
    hi = [max(p[i] for p in pts) for i in range(len(y))]
    for i, x in enumerate(y):
        if x < lo[i] or x > hi[i]:
            return False
    return in_convex_hull(pts, y)


def iter_regular_values(m: PLMap, forbidden_dim: int, facet_filter=None):
    """Certified regular values for m, in deterministic order.

    A value must lie in the interior of one target facet and avoid the
    image of every `forbidden_dim`-face of the source subdivision.
    """
    coords = m.target.coordinates
    facets = [
        f for f in m.target_complex.facets if facet_filter is None or facet_filter(f)
    ]
    faces = m.source_complex.faces(forbidden_dim)
    face_pts = [[m.images[v] for v in g] for g in faces]
    seen = set()
    for tau, p in _candidate_points(coords, facets):
        bc = barycentric([coords[v] for v in tau], p)
        if bc is None or any(c <= 0 for c in bc):
            continue
        if p in seen:
            continue
        seen.add(p)
        if any(_point_hits_face_image(pts, p) for pts in face_pts):
            continue
        yield RegularValue(p, tau, len(faces))


def regular_values(m: PLMap, forbidden_dim: int, facet_filter=None, count=2):
    found = []
    for rv in iter_regular_values(m, forbidden_dim, facet_filter):
        found.append(rv)
        if len(found) == count:
            return found
    raise InvariantError(
        "no regular value found within the deterministic search sequence"
    )


# ---------------------------------------------------------------------------
# degree


def _affine_rank(pts):
    rows = [list(vsub(p, pts[0])) for p in pts[1:]]
    if not rows:
        return 0
    from .exact import rank

    return rank(rows)


def degree_of(phi: PLMap) -> int:
    """Signed preimage count of a regular value, for maps of oriented spheres.

    Computed at two independent regular values, which must agree.
    """
    l = phi.target.base.dimension
    if phi.source.base.dimension != l:
        raise InvariantError("degree needs equal-dimensional source and target spheres")
    src_or = oriented_source_facets(phi)
    tgt_or = oriented_target_facets(phi)
    vals = regular_values(phi, l - 1, count=2)
    degs = [_degree_at(phi, y, src_or, tgt_or) for y in vals]
    if degs[0] != degs[1]:
        raise InvariantError(f"degree disagrees across regular values: {degs}")
    return degs[0]


def _degree_at(phi: PLMap, y: RegularValue, src_or, tgt_or) -> int:
    tau = y.facet
    tpts = [phi.target.coordinates[v] for v in tau]
    t_chart = [vsub(p, tpts[0]) for p in tpts[1:]]
    total = 0
    for f in phi.source_complex.facets:
        W = phi.image_points(f)
        lo_hi_reject = False
        for i, x in enumerate(y.point):
            lo = min(p[i] for p in W)
            hi = max(p[i] for p in W)
            if x < lo or x > hi:
                lo_hi_reject = True
                break
        if lo_hi_reject:
            continue
        if _affine_rank(W) < len(tau) - 1:
            continue
        A = [[W[j][i] for j in range(len(W))] for i in range(len(y.point))]
        A.append([Fraction(1)] * len(W))
        sol = solve(A, list(y.point) + [Fraction(1)])
        if sol is None or sol[1]:
            continue
        lam = sol[0]
        if any(c < 0 for c in lam):
            continue
        if any(c == 0 for c in lam):
            raise InvariantError("regular value certificate violated on a facet boundary")
        # sign of the affine map in the oriented charts
        s_chart = [vsub(p, W[0]) for p in W[1:]]
        Mrows = []
        for svec in s_chart:
            coeffs = solve(
                [[t_chart[j][i] for j in range(len(t_chart))] for i in range(len(svec))],
                list(svec),
            )
            Mrows.append(coeffs[0])
        d = det(Mrows)
        if d == 0:
            continue
        total += src_or[f] * tgt_or[tau] * (1 if d > 0 else -1)
    return total


# ---------------------------------------------------------------------------
# preimage cycles


@dataclass
class PolytopalCycle:
    dimension: int  # cell dimension (l-1)
    cells: list  # (tail Vec, head Vec, source facet)
    ambient_dim: int

    def negate(self):
        return PolytopalCycle(
            self.dimension, [(q, p, f) for p, q, f in self.cells], self.ambient_dim
        )

    def is_closed(self) -> bool:
        bal = {}
        for p, q, _ in self.cells:
            bal[q] = bal.get(q, 0) + 1
            bal[p] = bal.get(p, 0) - 1
        return all(v == 0 for v in bal.values())

    def __len__(self):
        return len(self.cells)


def preimage_cycle(psi: PLMap, y: RegularValue, src_or=None, tgt_or=None) -> PolytopalCycle:
    """Oriented preimage of a regular value for psi: S^{2l-1} -> (l-complex).

    Implemented for l = 2: each contributing source facet yields one
    oriented segment; the union is verified to be a closed polygonal cycle.
    """
    tau = y.facet
    l = len(tau) - 1
    if l != 2:
        raise InvariantError("preimage cycles are implemented for l = 2")
    if src_or is None:
        src_or = oriented_source_facets(psi)
    if tgt_or is None:
        tgt_or = oriented_target_facets(psi)
    coords = psi.source.coordinates
    tpts = [psi.target.coordinates[v] for v in tau]
    # positively oriented frame of the target facet
    s1, s2 = vsub(tpts[1], tpts[0]), vsub(tpts[2], tpts[0])
    if tgt_or[tau] < 0:
        s1, s2 = s2, s1
    cells = []
    for f in psi.source_complex.facets:
        if psi.carriers and psi.carriers.get(f) != tau:
            continue
        W = psi.image_points(f)
        reject = False
        for i, x in enumerate(y.point):
            lo = min(p[i] for p in W)
            hi = max(p[i] for p in W)
            if x < lo or x > hi:
                reject = True
                break
        if reject:
            continue
        if _affine_rank(W) < l:
            continue
        # parameter space of the facet: x = u0 + sum mu_i (ui - u0)
        U = [coords[v] for v in f]
        L = [vsub(w, W[0]) for w in W[1:]]  # columns of the linear part
        A = [[L[j][i] for j in range(len(L))] for i in range(len(y.point))]
        rhs = list(vsub(y.point, W[0]))
        sol = solve(A, rhs)
        if sol is None:
            continue
        mu0, kernel = sol
        if len(kernel) != 1:
            continue  # rank below l: regularity keeps y off this image
        dvec = kernel[0]
        # clip mu0 + t*dvec to the simplex: mu_i >= 0 and sum mu <= 1
        feasible = True
        bounds = [(dvec[i], mu0[i]) for i in range(len(mu0))]  # d*t + m >= 0
        bounds.append((-sum(dvec), 1 - sum(mu0)))
        tlo, thi = None, None
        for d, m in bounds:
            if d == 0:
                if m < 0:
                    feasible = False
                    break
            elif d > 0:
                t0 = -m / d
                if tlo is None or t0 > tlo:
                    tlo = t0
            else:
                t0 = -m / d
                if thi is None or t0 < thi:
                    thi = t0
        if not feasible or tlo is None or thi is None or tlo >= thi:
            continue
        # orientation: solve L a_i = s_i and test det(d, a1, a2)
        a1 = solve(A, list(s1))
        a2 = solve(A, list(s2))
        if a1 is None or a2 is None:
            raise InvariantError("target frame is not in the image of the facet map")
        D = det([list(dvec), list(a1[0]), list(a2[0])])
        if D == 0:
            raise InvariantError("degenerate orientation determinant")
        positive = (D > 0) == (src_or[f] > 0)

        def point_at(t):
            mu = [m + t * d for m, d in zip(mu0, dvec)]
            x = U[0]
            for mi, ui in zip(mu, U[1:]):
                x = vadd(x, vscale(mi, vsub(ui, U[0])))
            return x

        p, q = point_at(tlo), point_at(thi)
        cells.append((p, q, f) if positive else ((q, p, f)))
    cyc = PolytopalCycle(l - 1, cells, len(next(iter(coords.values()))))
    if not cyc.is_closed():
        raise InvariantError("preimage is not a closed cycle")
    return cyc


# ---------------------------------------------------------------------------
# certified convex realization of a subdivided polytope-boundary sphere


class RealizationError(ValueError):
    pass


def convex_realization(trail: Subdivision, base_weights=None, eps0=Fraction(1, 8)):
    """Exact convex-position coordinates for a subdivided boundary sphere.

    base_weights maps base vertices to rational push weights (zero for a
    base already in convex position, the staircase lifting for a product
    boundary); the base realization pushes vertices radially by them, then
    every recorded edge split is replayed with its new vertex nudged
    outward.  The result is certified: every facet's hyperplane strictly
    supports all remaining vertices.
    """
    for outer in range(6):
        eps = eps0 / (2 ** outer)
        try:
            return _realize_once(trail, base_weights or {}, eps)
        except RealizationError:
            continue
    raise RealizationError("no certified convex realization found")


def staircase_weights(base_pairs):
    return {v: (i - j) ** 2 for v, (i, j) in base_pairs.items()}


def _realize_once(trail: Subdivision, base_weights, eps):
    base = trail.base
    o = centroid([trail.coordinates[v] for v in base.vertices])
    pos = {}
    for v in base.vertices:
        w = base_weights.get(v, 0)
        pos[v] = vadd(o, vscale(1 + eps * frac(w), vsub(trail.coordinates[v], o)))
    cur_facets = list(base.facets)
    _certify(cur_facets, pos, o)

    hp = {}

    def hyp(f):
        if f not in hp:
            hp[f] = _hyperplane(pos, f, o)
        return hp[f]

    for sp in trail.splits:
        u, v = sp.edge
        p = vadd(vscale(1 - sp.t, pos[u]), vscale(sp.t, pos[v]))
        star = [f for f in cur_facets if u in f and v in f]
        others = [f for f in cur_facets if not (u in f and v in f)]
        placed = None
        push = eps
        for _try in range(40):
            cand = vadd(o, vscale(1 + push, vsub(p, o)))
            # strictly beyond every star hyperplane, strictly beneath the rest
            ok = all(_dot(hyp(f)[0], cand) > hyp(f)[1] for f in star) and all(
                _dot(hyp(f)[0], cand) < hyp(f)[1] for f in others
            )
            if ok:
                placed = cand
                break
            push /= 2
        if placed is None:
            raise RealizationError(f"could not place split vertex {sp.new_vertex}")
        pos[sp.new_vertex] = placed
        m = sp.new_vertex
        new_facets = []
        for f in cur_facets:
            if u in f and v in f:
                hp.pop(f, None)
                new_facets.append(_face([x for x in f if x != v] + [m]))
                new_facets.append(_face([x for x in f if x != u] + [m]))
            else:
                new_facets.append(f)
        cur_facets = new_facets
    if set(cur_facets) != set(trail.current.facets):
        raise RealizationError("replayed facets disagree with the trail")
    _certify(cur_facets, pos, o)
    return pos


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _hyperplane(pos, f, o):
    pts = [pos[v] for v in f]
    # normal via cofactor expansion of [x - p0; basis]
    d = len(pts[0])
    basis = [vsub(p, pts[0]) for p in pts[1:]]
    n = []
    for i in range(d):
        rows = [[b[j] for j in range(d) if j != i] for b in basis]
        n.append((-1) ** i * det(rows))
    n = tuple(n)
    c = _dot(n, pts[0])
    if _dot(n, o) > c:
        n = tuple(-x for x in n)
        c = -c
    elif _dot(n, o) == c:
        raise RealizationError("degenerate facet hyperplane through the center")
    return n, c


def _certify(facets, pos, o):
    verts = sorted({v for f in facets for v in f})
    for f in facets:
        n, c = _hyperplane(pos, f, o)
        fs = set(f)
        for v in verts:
            if v in fs:
                continue
            if _dot(n, pos[v]) >= c:
                raise RealizationError(f"vertex {v} not strictly beneath facet {f}")


# ---------------------------------------------------------------------------
# Schlegel transfer


def realize_map_source(psi: PLMap):
    """Certified convex realization of a map's source sphere, cached."""
    key = ("realization", psi.source_complex)
    if psi.meta.get("realize_key") == key:
        pos = psi.meta["realization"]
        if pos is None:
            raise RealizationError("realization previously failed")
        return pos
    try:
        if psi.meta.get("product_boundary"):
            pos = _realize_product_subdivision(psi)
        else:
            pos = convex_realization(psi.source)
    except RealizationError:
        psi.meta["realize_key"] = key
        psi.meta["realization"] = None
        raise
    psi.meta["realize_key"] = key
    psi.meta["realization"] = pos
    return pos


def _pulled_lift(trail: Subdivision, eta=Fraction(1, 16)):
    """Heights certifying an edge-split trail as a pulled (regular) lift."""
    lift = {v: Fraction(0) for v in trail.base.vertices}
    depth = Fraction(1)
    for sp in trail.splits:
        depth *= eta
        u, v = sp.edge
        lift[sp.new_vertex] = (1 - sp.t) * lift[u] + sp.t * lift[v] - depth
    return lift


def _lex_functional(points):
    """Affine functional realizing coordinate-lexicographic order."""
    pts = sorted(set(points))
    R = Fraction(1)
    for a in pts:
        for b in pts:
            if a[0] != b[0]:
                slope = abs(a[1] - b[1]) / abs(a[0] - b[0])
                if slope >= R:
                    R = slope + 1
    vals = {p: p[0] * R + p[1] for p in pts}
    lo = min(vals.values())
    hi = max(vals.values())
    span = hi - lo if hi > lo else Fraction(1)
    return {p: (v - lo) / span for p, v in vals.items()}


def _realize_product_subdivision(psi: PLMap):
    """Convex realization of the directly triangulated product boundary.

    The triangulation is the staircase of refined factor cells in the
    coordinate-lex orders, so the certified search runs over weights of the
    classical form: dominant pulled lifts of the factor subdivisions plus
    an affine-order staircase term.
    """
    trail = psi.source
    pair_of = psi.meta["factor_pairs"]
    lifts = None
    if "factor_trails" in psi.meta:
        t1, t2 = psi.meta["factor_trails"]
        lifts = (_pulled_lift(t1), _pulled_lift(t2))
    ids1 = sorted({i for (i, _j) in pair_of.values()})
    ids2 = sorted({j for (_i, j) in pair_of.values()})
    c1 = {v: trail.coordinates[v][:2] for v in trail.base.vertices}
    c2 = {v: trail.coordinates[v][2:] for v in trail.base.vertices}
    phi1 = _lex_functional([c1[v] for v in trail.base.vertices])
    phi2 = _lex_functional([c2[v] for v in trail.base.vertices])

    def norm(lift, ids):
        if lift is None:
            return {i: Fraction(0) for i in ids}
        mx = max((abs(lift.get(i, Fraction(0))) for i in ids), default=Fraction(1))
        mx = mx if mx else Fraction(1)
        return {i: lift.get(i, Fraction(0)) / mx for i in ids}

    L1 = norm(lifts[0] if lifts else None, ids1)
    L2 = norm(lifts[1] if lifts else None, ids2)

    for alpha in (Fraction(-1), Fraction(-1, 16), Fraction(-16)):
        for beta in (
            alpha * 16,
            alpha,
            alpha / 16,
            -alpha,
            -alpha * 16,
            Fraction(0),
        ):
            weights = {}
            for v in trail.base.vertices:
                i, j = pair_of[v]
                stair = alpha * (phi1[c1[v]] - phi2[c2[v]]) ** 2
                weights[v] = stair + beta * (L1[i] + L2[j])
            for eps in (Fraction(1, 8), Fraction(1, 64)):
                try:
                    return _realize_once(trail, weights, eps)
                except RealizationError:
                    continue
    raise RealizationError("no certified realization of the product subdivision")


def schlegel_transfer(psi: PLMap, cycles, tau):
    """Move cycles from the boundary sphere into R^{2l-1}.

    Realizes the subdivided sphere in certified convex position, picks a
    rational point just beyond the avoided facet tau, and projects centrally
    onto tau's hyperplane; the map is projective on each facet and bijective
    on the complement of tau's interior, so cycles keep their structure and
    linking.  Errors out when a cycle touches tau.
    """
    pos = realize_map_source(psi)
    return _schlegel_with_pos(psi.source, pos, cycles, tau)


def _schlegel_with_pos(trail: Subdivision, pos, cycles, tau):
    coords = trail.coordinates
    if not trail.current.has_face(tau) or len(tau) != trail.current.dimension + 1:
        raise InvariantError("tau must be a facet of the sphere complex")
    o = centroid([pos[v] for v in trail.base.vertices])
    taupts = [pos[v] for v in tau]

    def transport(p, f):
        bc = barycentric([coords[v] for v in f], p)
        x = tuple(Fraction(0) for _ in range(len(taupts[0])))
        for c, v in zip(bc, f):
            x = vadd(x, vscale(c, pos[v]))
        return x

    # cycles must avoid the closed body of tau
    moved = []
    for cyc in cycles:
        segs = []
        for p, q, f in cyc.cells:
            if f == tau:
                raise InvariantError("a cycle touches the avoided facet")
            P, Q = transport(p, f), transport(q, f)
            for X in (P, Q):
                if in_simplex(taupts, X):
                    raise InvariantError("a cycle touches the avoided facet")
            segs.append((P, Q, f))
        moved.append(segs)

    n, c = _hyperplane(pos, tau, o)
    bary = centroid(taupts)
    nn = _dot(n, n)
    z = None
    delta = Fraction(1, 4)
    for _ in range(40):
        cand = vadd(bary, vscale(delta / nn, n))
        beyond_others = False
        for f in trail.current.facets:
            if f == tau:
                continue
            nf, cf = _hyperplane(pos, f, o)
            if _dot(nf, cand) >= cf:
                beyond_others = True
                break
        if not beyond_others and _dot(n, cand) > c:
            z = cand
            break
        delta /= 2
    if z is None:
        raise InvariantError("no valid projection point beyond tau")

    b1, b2, b3 = (vsub(taupts[i], taupts[0]) for i in (1, 2, 3))
    if det([list(b1), list(b2), list(b3), list(n)]) < 0:
        b1, b2 = b2, b1

    def project(x):
        hx, hz = _dot(n, x), _dot(n, z)
        s = (c - hz) / (hx - hz)
        y = vadd(z, vscale(s, vsub(x, z)))
        rel = vsub(y, taupts[0])
        sol = solve(
            [[b[i] for b in (b1, b2, b3)] for i in range(len(rel))], list(rel)
        )
        return tuple(sol[0])

    out = []
    for segs in moved:
        cyc3 = PolytopalCycle(1, [(project(p), project(q), f) for p, q, f in segs], 3)
        out.append(cyc3)
    return out


# ---------------------------------------------------------------------------
# linking in the ambient R^{2l}: intersection of bounding cones

_AMBIENT_APEX_OFFSETS = [
    (Fraction(0), Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(1, 64), Fraction(-1, 128), Fraction(1, 256), Fraction(-1, 512)),
    (Fraction(-1, 96), Fraction(1, 160), Fraction(-1, 224), Fraction(1, 288)),
    (Fraction(1, 72), Fraction(1, 144), Fraction(-1, 216), Fraction(-1, 360)),
    (Fraction(-1, 80), Fraction(-1, 112), Fraction(1, 176), Fraction(1, 240)),
]


def linking_number_ambient(A: PolytopalCycle, B: PolytopalCycle, center) -> int:
    """lk of disjoint 1-cycles on a sphere around `center` in R^4.

    Counts signed intersections of the cones over A and B from two interior
    apices: the cones bound the cycles inside the ball, so their signed
    intersection is the linking form evaluated on the pair.  Two independent
    apex pairs must agree.
    """
    if A.ambient_dim != 4 or B.ambient_dim != 4:
        raise InvariantError("ambient linking expects cycles in R^4")
    values = []
    for k in range(len(_AMBIENT_APEX_OFFSETS) - 1):
        o1 = vadd(center, _AMBIENT_APEX_OFFSETS[k])
        o2 = vadd(center, _AMBIENT_APEX_OFFSETS[k + 1])
        try:
            values.append(_cone_cone_count(A, B, o1, o2))
        except _ApexDegenerate:
            continue
        if len(values) == 2:
            if values[0] != values[1]:
                raise InvariantError(f"ambient linking disagrees: {values}")
            return values[0]
    raise InvariantError("no generic apex pair for ambient linking")


def _cone_cone_count(A, B, o1, o2) -> int:
    total = 0
    rhs0 = vsub(o2, o1)
    for p, q, _f in A.cells:
        u1, u2 = vsub(p, o1), vsub(q, o1)
        for x, y, _g in B.cells:
            w1, w2 = vsub(x, o2), vsub(y, o2)
            M = [[u1[i], u2[i], -w1[i], -w2[i]] for i in range(4)]
            D = det(M)
            if D == 0:
                if solve(M, list(rhs0)) is not None:
                    raise _ApexDegenerate()
                continue
            (a, b, c, d), kernel = solve(M, list(rhs0))
            inside = a > 0 and b > 0 and c > 0 and d > 0 and a + b < 1 and c + d < 1
            on_boundary = (
                a >= 0
                and b >= 0
                and c >= 0
                and d >= 0
                and a + b <= 1
                and c + d <= 1
                and not inside
            )
            if on_boundary:
                raise _ApexDegenerate()
            if inside:
                total += 1 if D > 0 else -1
    return total


# ---------------------------------------------------------------------------
# linking numbers in R^3


_APEX_SEQUENCE = [
    (Fraction(101), Fraction(57, 2), Fraction(-23, 3)),
    (Fraction(-89, 2), Fraction(71), Fraction(31, 5)),
    (Fraction(43, 3), Fraction(-97), Fraction(61)),
    (Fraction(-67), Fraction(-41, 4), Fraction(-103, 2)),
    (Fraction(113, 4), Fraction(83, 7), Fraction(97)),
    (Fraction(59), Fraction(107, 3), Fraction(-79, 6)),
]


class _ApexDegenerate(Exception):
    pass


def _segments_intersect(a, b):
    (p, q), (x, y) = a, b
    d1, d2 = vsub(q, p), vsub(y, x)
    A = [[d1[i], -d2[i]] for i in range(3)]
    rhs = list(vsub(x, p))
    sol = solve(A, rhs)
    if sol is None:
        return False
    part, kernel = sol
    if kernel:
        # collinear directions: check overlap along the common line
        for cand in (x, y):
            bc = barycentric([p, q], cand)
            if bc is not None and all(cc >= 0 for cc in bc):
                return True
        for cand in (p, q):
            bc = barycentric([x, y], cand)
            if bc is not None and all(cc >= 0 for cc in bc):
                return True
        return False
    t, s = part
    return 0 <= t <= 1 and 0 <= s <= 1


def linking_number(A: PolytopalCycle, B: PolytopalCycle) -> int:
    """lk of two disjoint oriented polygonal cycles in R^3.

    Counts signed crossings of B through the cone over A from a generic
    rational apex; two independent apices must agree.
    """
    if A.ambient_dim != 3 or B.ambient_dim != 3:
        raise InvariantError("linking_number expects cycles in R^3")
    if not (A.is_closed() and B.is_closed()):
        raise InvariantError("linking_number expects closed cycles")
    for ca in A.cells:
        for cb in B.cells:
            if _segments_intersect((ca[0], ca[1]), (cb[0], cb[1])):
                raise InvariantError("cycles intersect")
    values = []
    for apex in _APEX_SEQUENCE:
        try:
            values.append(_lk_with_apex(A, B, apex))
        except _ApexDegenerate:
            continue
        if len(values) == 2:
            if values[0] != values[1]:
                raise InvariantError(f"linking count disagrees across apices: {values}")
            return values[0]
    raise InvariantError("no generic apex found for the linking computation")


def _lk_with_apex(A, B, apex) -> int:
    total = 0
    for p, q, _f in A.cells:
        pc, qc = vsub(p, apex), vsub(q, apex)
        for x, y, _g in B.cells:
            d = vsub(y, x)
            M = [[pc[i], qc[i], -d[i]] for i in range(3)]
            Dm = det(M)
            rhs = list(vsub(x, apex))
            if Dm == 0:
                sol = solve(M, rhs)
                if sol is not None:
                    raise _ApexDegenerate()
                continue
            sol = solve(M, rhs)
            alpha, beta, t = sol[0]
            inside = alpha > 0 and beta > 0 and alpha + beta < 1 and 0 < t < 1
            boundary = (
                (alpha == 0 or beta == 0 or alpha + beta == 1 or t in (0, 1))
                and alpha >= 0
                and beta >= 0
                and alpha + beta <= 1
                and 0 <= t <= 1
            )
            if boundary:
                raise _ApexDegenerate()
            if inside:
                sgn = det([list(vsub(p, apex)), list(vsub(q, apex)), list(d)])
                total += 1 if sgn > 0 else -1
    return total


# ---------------------------------------------------------------------------
# Hopf and wedge invariants


def _target_component_filters(psi: PLMap):
    comps = sorted(_facet_components(psi.target_complex), key=lambda c: min(c))
    return [set(c) for c in comps]


def _cycle_avoiding_facet(psi: PLMap, cycles, pos):
    """First facet whose closed realized body misses every cycle."""
    from .exact import Bary

    used = set()
    pts = []
    for cyc in cycles:
        for p, q, f in cyc.cells:
            used.add(f)
            pts.append((p, f))
            pts.append((q, f))
    coords = psi.source.coordinates
    for tau in psi.source_complex.facets:
        if tau in used:
            continue
        solver = Bary([pos[v] for v in tau])
        hit = False
        for p, f in pts:
            bc = barycentric([coords[v] for v in f], p)
            x = tuple(Fraction(0) for _ in range(4))
            for c, v in zip(bc, f):
                x = vadd(x, vscale(c, pos[v]))
            if solver.contains(x):
                hit = True
                break
        if not hit:
            return tau
    raise InvariantError("no facet avoided by all cycles")


def _linked_value(psi: PLMap, cycles, prefer_transfer=True):
    """lk of two cycles on the source sphere, by transfer or ambient cones."""
    if prefer_transfer:
        try:
            pos = realize_map_source(psi)
            tau = _cycle_avoiding_facet(psi, cycles, pos)
            moved = _schlegel_with_pos(psi.source, pos, cycles, tau)
            return linking_number(moved[0], moved[1]), "schlegel"
        except (RealizationError, InvariantError):
            pass
    center = centroid([psi.source.coordinates[v] for v in psi.source.base.vertices])
    return (
        linking_number_ambient(cycles[0], cycles[1], center),
        "ambient",
    )


def hopf_like(psi: PLMap, mode: str) -> int:
    """Hopf invariant H (sphere target) or wedge invariant H_vee.

    Picks regular values (one per wedge summand for H_vee), extracts the
    oriented preimage cycles, moves them to R^3, and links them; the whole
    computation runs twice with independent regular values and must agree.
    """
    l = psi.meta.get("l", psi.target.base.dimension)
    if l != 2:
        raise InvariantError("hopf invariants are computed for l = 2")
    src_or = oriented_source_facets(psi)
    tgt_or = oriented_target_facets(psi)
    if mode not in ("H", "H_vee"):
        raise InvariantError(f"unknown mode {mode!r}")
    if mode == "H_vee":
        filters = _target_component_filters(psi)
        if len(filters) < 2:
            raise InvariantError("H_vee needs a wedge target")
        vals1 = regular_values(psi, l - 1, facet_filter=lambda f: f in filters[0], count=2)
        vals2 = regular_values(psi, l - 1, facet_filter=lambda f: f in filters[1], count=2)
        pairs = [(vals1[0], vals2[0]), (vals1[1], vals2[1])]
    else:
        vals = regular_values(psi, l - 1, count=4)
        pairs = [(vals[0], vals[1]), (vals[2], vals[3])]
    results = []
    for y1, y2 in pairs:
        A = preimage_cycle(psi, y1, src_or, tgt_or)
        B = preimage_cycle(psi, y2, src_or, tgt_or)
        val, _how = _linked_value(psi, [A, B])
        results.append(val)
    if results[0] != results[1]:
        raise InvariantError(f"invariant disagrees across regular values: {results}")
    return results[0]


# ---------------------------------------------------------------------------
# two-stage composite invariants


def _signed_point_preimages(kappa: PLMap, y: RegularValue, src_or, tgt_or):
    """Signed preimage points of a regular value for an l -> l map."""
    tau = y.facet
    tpts = [kappa.target.coordinates[v] for v in tau]
    t_chart = [vsub(p, tpts[0]) for p in tpts[1:]]
    out = []
    coords = kappa.source.coordinates
    for f in kappa.source_complex.facets:
        W = kappa.image_points(f)
        reject = False
        for i, x in enumerate(y.point):
            lo = min(p[i] for p in W)
            hi = max(p[i] for p in W)
            if x < lo or x > hi:
                reject = True
                break
        if reject:
            continue
        A = [[W[j][i] for j in range(len(W))] for i in range(len(y.point))]
        A.append([Fraction(1)] * len(W))
        sol = solve(A, list(y.point) + [Fraction(1)])
        if sol is None or sol[1]:
            continue
        lam = sol[0]
        if any(c < 0 for c in lam):
            continue
        if any(c == 0 for c in lam):
            raise InvariantError("regular value hits a facet boundary")
        s_chart = [vsub(p, W[0]) for p in W[1:]]
        Mrows = []
        for svec in s_chart:
            coeffs = solve(
                [[t_chart[j][i] for j in range(len(t_chart))] for i in range(len(svec))],
                list(svec),
            )
            Mrows.append(coeffs[0])
        d = det(Mrows)
        if d == 0:
            continue
        x = tuple(
            sum(lam[k] * coords[v][i] for k, v in enumerate(f))
            for i in range(len(coords[f[0]]))
        )
        out.append((x, src_or[f] * tgt_or[tau] * (1 if d > 0 else -1)))
    return out


def composite_invariant(kappa: PLMap, f: PLMap, mode: str = "H") -> int:
    """Invariant of kappa o f without materializing the composite.

    kappa: V^l_s -> Y with finitely many signed preimage points over each
    of two regular values; f: S^{2l-1} -> V^l_s.  The cycle over a value y
    is the signed union of f's preimage cycles over kappa's preimage points
    of y, and the invariant is the linking number of the two such cycles.
    The computation runs at two regular-value choices and must agree.
    """
    l = f.meta.get("l", 2)
    if l != 2:
        raise InvariantError("composite invariants are computed for l = 2")
    if kappa.source.base != f.target.base:
        raise InvariantError("kappa's source must be f's target wedge")
    k_src_or = oriented_source_facets(kappa)
    k_tgt_or = oriented_target_facets(kappa)
    f_src_or = oriented_source_facets(f)
    f_tgt_or = oriented_target_facets(f)

    if mode == "H":
        stream = iter_regular_values(kappa, l - 1)

        def next_pair():
            return next(stream), next(stream)

    else:
        filters = _target_component_filters(kappa)
        s1 = iter_regular_values(kappa, l - 1, facet_filter=lambda g: g in filters[0])
        s2 = iter_regular_values(kappa, l - 1, facet_filter=lambda g: g in filters[1])

        def next_pair():
            return next(s1), next(s2)

    results = []
    for _attempt in range(12):
        try:
            y1, y2 = next_pair()
        except StopIteration:
            break
        big = []
        ok = True
        for y in (y1, y2):
            pts = _signed_point_preimages(kappa, y, k_src_or, k_tgt_or)
            cells = []
            for x, s in pts:
                xval = _regular_point_for(f, x)
                if xval is None:
                    ok = False
                    break
                cyc = preimage_cycle(f, xval, f_src_or, f_tgt_or)
                if s > 0:
                    cells.extend(cyc.cells)
                else:
                    cells.extend((q, p, ff) for p, q, ff in cyc.cells)
            if not ok:
                break
            combined = PolytopalCycle(l - 1, cells, 4)
            if not combined.is_closed():
                raise InvariantError("combined preimage is not a closed cycle")
            big.append(combined)
        if not ok:
            continue
        val, _how = _linked_value(f, big)
        results.append(val)
        if len(results) == 2:
            break
    if len(results) < 2:
        raise InvariantError("genericity failure after deterministic perturbation attempts")
    if results[0] != results[1]:
        raise InvariantError(f"composite invariant disagrees: {results}")
    return results[0]


def _regular_point_for(f: PLMap, x):
    """Certify the point x as a regular value of f; returns a RegularValue."""
    coords = f.target.coordinates
    tau = None
    from .exact import Bary

    for cand in f.target_complex.facets:
        solver = Bary([coords[v] for v in cand])
        if solver.contains(x, strict=True):
            tau = cand
            break
    if tau is None:
        return None
    faces = f.source_complex.faces(1)
    for g in faces:
        pts = [f.images[v] for v in g]
        if _point_hits_face_image(pts, x):
            return None
    return RegularValue(tuple(x), tau, len(faces))
