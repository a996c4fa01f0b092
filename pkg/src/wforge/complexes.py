"""Abstract and geometric simplicial complexes.

A complex is stored by its maximal faces (facets); face membership is a
subset query, so the exponential face collection stays implicit.  The
subdivision primitive is the single-edge split; a Subdivision trail records
a finite composition of splits together with carrier data, which is what
every piecewise-linear construction in the package is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .exact import Vec, barycentric, frac, lerp, vsub, rank as mat_rank

Face = tuple  # sorted tuple of vertex ids


def _face(vs) -> Face:
    return tuple(sorted(set(vs)))


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Complex:
    vertices: tuple
    facets: tuple  # sorted tuples, pairwise non-nested, lexicographically ordered

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def has_face(self, face) -> bool:
        face = _face(face)
        if not face:
            return True
        s = set(face)
        return any(s.issubset(f) for f in self.facets)

    def faces(self, d: int):
        """All d-dimensional faces, sorted."""
        out = set()
        for f in self.facets:
            if len(f) >= d + 1:
                out.update(combinations(f, d + 1))
        return sorted(out)

    def all_faces(self):
        out = set()
        for f in self.facets:
            for k in range(1, len(f) + 1):
                out.update(combinations(f, k))
        return sorted(out, key=lambda g: (len(g), g))

    def edges(self):
        return self.faces(1)

    def euler_characteristic(self) -> int:
        chi = 0
        for d in range(self.dimension + 1):
            chi += (-1) ** d * len(self.faces(d))
        return chi

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1


def make_complex(vertices, faces) -> Complex:
    """Build a Complex from any face collection, keeping maximal ones."""
    vertices = tuple(sorted(set(vertices)))
    vs = set(vertices)
    faces = sorted({_face(f) for f in faces if f}, key=len, reverse=True)
    for f in faces:
        if not set(f).issubset(vs):
            raise ComplexError(f"facet {f} uses vertices outside the vertex set")
    maximal = []
    for f in faces:
        fs = set(f)
        if not any(fs < set(g) or fs == set(g) for g in maximal):
            maximal.append(f)
    return Complex(vertices, tuple(sorted(maximal)))


@dataclass(frozen=True)
class SubcomplexRef:
    parent: Complex
    facets: tuple  # maximal faces of the subcomplex, each a face of parent

    def as_complex(self) -> Complex:
        verts = sorted({v for f in self.facets for v in f})
        return make_complex(verts, self.facets)

    def has_face(self, face) -> bool:
        face = _face(face)
        s = set(face)
        return any(s.issubset(f) for f in self.facets)

    @property
    def vertex_set(self):
        return {v for f in self.facets for v in f}


def subcomplex(parent: Complex, faces) -> SubcomplexRef:
    faces = [_face(f) for f in faces]
    for f in faces:
        if not parent.has_face(f):
            raise ComplexError(f"{f} is not a face of the parent complex")
    maximal = []
    for f in sorted(set(faces), key=len, reverse=True):
        if not any(set(f) <= set(g) for g in maximal):
            maximal.append(f)
    return SubcomplexRef(parent, tuple(sorted(maximal)))


@dataclass(frozen=True)
class GeometricComplex:
    complex: Complex
    coordinates: dict  # vertex id -> Vec of Fraction
    checked: bool = False

    @property
    def ambient_dim(self) -> int:
        return len(next(iter(self.coordinates.values())))

    def coords(self, f) -> list:
        return [self.coordinates[v] for v in f]

    def facet_containing(self, p, candidates=None):
        from .exact import in_simplex

        for f in candidates if candidates is not None else self.complex.facets:
            if in_simplex(self.coords(f), p):
                return f
        return None


def geometric(cx: Complex, coordinates, check_pairs: bool | None = None) -> GeometricComplex:
    """Attach exact coordinates; verifies affine independence per facet.

    Pairwise proper-intersection checks are O(facets^2) exact LPs, so they
    run by default only on small complexes; derived constructions inherit
    properness from the base and set check_pairs=False.
    """
    coordinates = {v: tuple(map(frac, coordinates[v])) for v in cx.vertices}
    for f in cx.facets:
        pts = [coordinates[v] for v in f]
        rows = [list(vsub(p, pts[0])) for p in pts[1:]]
        if rows and mat_rank(rows) != len(f) - 1:
            raise ComplexError(f"facet {f} is affinely degenerate")
    gc = GeometricComplex(cx, coordinates)
    if check_pairs is None:
        check_pairs = len(cx.facets) <= 40
    if check_pairs:
        _check_proper_intersections(gc)
        gc = GeometricComplex(cx, coordinates, checked=True)
    return gc


def _check_proper_intersections(gc: GeometricComplex):
    """Bodies of two faces must meet exactly in their common face."""
    from .exact import in_convex_hull

    cx = gc.complex
    for f, g in combinations(cx.facets, 2):
        common = tuple(sorted(set(f) & set(g)))
        # a vertex of one facet inside the other must belong to the common face
        for v in f:
            if v in common:
                continue
            if in_convex_hull(gc.coords(g), gc.coordinates[v]):
                raise ComplexError(f"improper intersection: vertex {v} of {f} lies in {g}")
        for v in g:
            if v in common:
                continue
            if in_convex_hull(gc.coords(f), gc.coordinates[v]):
                raise ComplexError(f"improper intersection: vertex {v} of {g} lies in {f}")


# ---------------------------------------------------------------------------
# standard models


def complete_complex(n: int, k: int) -> Complex:
    """All (k+1)-element subsets of an n-element vertex set.

    (n, 0) is the point cloud [n]; (k+1, k) the disk D^k; (k+2, k) the
    sphere S^k.
    """
    if n < 1:
        raise ComplexError("need at least one vertex")
    if k < 0 or k >= n:
        raise ComplexError(f"dimension k={k} needs 0 <= k <= n-1={n - 1}")
    verts = tuple(range(n))
    return Complex(verts, tuple(combinations(verts, k + 1)))


def sphere_complex(k: int) -> Complex:
    return complete_complex(k + 2, k)


def disk_complex(k: int) -> Complex:
    return complete_complex(k + 1, k)


def unit_basis_coords(n: int, ambient: int):
    out = {}
    for i in range(n):
        out[i] = tuple(Fraction(1 if j == i else 0) for j in range(ambient))
    return out


def geometric_sphere(k: int) -> GeometricComplex:
    """S^k as the boundary of the standard (k+1)-simplex, unit-basis coords."""
    return geometric(sphere_complex(k), unit_basis_coords(k + 2, k + 2))


def simplex_vertex_coords(l: int):
    """Vertex i of the l-simplex at 0 (i=0) or e_i in R^l."""
    out = {0: tuple(Fraction(0) for _ in range(l))}
    for i in range(1, l + 1):
        out[i] = tuple(Fraction(1 if j == i - 1 else 0) for j in range(l))
    return out


def geometric_disk(l: int) -> GeometricComplex:
    return geometric(disk_complex(l), simplex_vertex_coords(l))


# ---------------------------------------------------------------------------
# wedge


def wedge(parts, basepoints):
    """Glue complexes at one chosen vertex each.

    Returns (Complex, [SubcomplexRef per part], vertex_maps) where
    vertex_maps[q] sends part-q vertex ids into the wedge.  The identified
    basepoint keeps the smallest relabeled id among the basepoint images.
    """
    if not parts:
        raise ComplexError("wedge of no parts")
    raw = [p.complex if isinstance(p, GeometricComplex) else p for p in parts]
    for p, b in zip(raw, basepoints):
        if b not in p.vertices:
            raise ComplexError(f"basepoint {b} not a vertex")
    offset = 0
    vmaps = []
    for p in raw:
        vmaps.append({v: v + offset for v in p.vertices})
        offset += (max(p.vertices) + 1) if p.vertices else 0
    base_id = min(vm[b] for vm, b in zip(vmaps, basepoints))
    for vm, b in zip(vmaps, basepoints):
        vm[b] = base_id
    facets = []
    for p, vm in zip(raw, vmaps):
        facets.extend(_face(vm[v] for v in f) for f in p.facets)
    verts = sorted({v for f in facets for v in f})
    cx = make_complex(verts, facets)
    refs = [
        subcomplex(cx, [_face(vm[v] for v in f) for f in p.facets])
        for p, vm in zip(raw, vmaps)
    ]
    return cx, refs, vmaps


def geometric_wedge(parts, basepoints):
    """Wedge of geometric complexes, placed in block-diagonal coordinates.

    Part q occupies its own coordinate block, translated so every basepoint
    sits at the origin; bodies of distinct parts then meet only there.
    """
    cx, refs, vmaps = wedge(parts, basepoints)
    dims = [p.ambient_dim for p in parts]
    total = sum(dims)
    coords = {}
    start = 0
    for p, b, vm, d in zip(parts, basepoints, vmaps, dims):
        bp = p.coordinates[b]
        for v in p.complex.vertices:
            rel = vsub(p.coordinates[v], bp)
            coords[vm[v]] = (
                tuple(Fraction(0) for _ in range(start))
                + rel
                + tuple(Fraction(0) for _ in range(total - start - d))
            )
        start += d
    return geometric(cx, coords, check_pairs=False), refs, vmaps


# ---------------------------------------------------------------------------
# subdivision trails


@dataclass
class EdgeSplit:
    edge: tuple
    t: Fraction
    new_vertex: int


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass
class Subdivision:
    """A finite composition of edge splits applied to a base complex."""

    base: Complex
    current: Complex = None
    splits: list = field(default_factory=list)
    coordinates: dict = None  # maintained when the base is geometric
    origin: dict = None  # current facet -> base facet
    rel_sign: dict = None  # current facet -> +-1 orientation vs base facet order
    vertex_carrier: dict = None  # vertex -> base face whose body contains it

    def __post_init__(self):
        if self.current is None:
            self.current = self.base
        if self.origin is None:
            self.origin = {f: f for f in self.base.facets}
            self.rel_sign = {f: 1 for f in self.base.facets}
        if self.vertex_carrier is None:
            self.vertex_carrier = {v: (v,) for v in self.base.vertices}

    @classmethod
    def of(cls, gc):
        if isinstance(gc, GeometricComplex):
            return cls(gc.complex, coordinates=dict(gc.coordinates))
        return cls(gc)

    def geometric(self) -> GeometricComplex:
        if self.coordinates is None:
            raise ComplexError("subdivision of an abstract complex has no coordinates")
        return GeometricComplex(self.current, dict(self.coordinates))

    def geometric_base(self) -> GeometricComplex:
        if self.coordinates is None:
            raise ComplexError("subdivision of an abstract complex has no coordinates")
        return GeometricComplex(self.base, {v: self.coordinates[v] for v in self.base.vertices})

    def fresh_vertex(self) -> int:
        return max(self.current.vertices) + 1

    def split_edge(self, u, v, t=Fraction(1, 2)):
        """Split edge (u, v) at parameter t from u; returns the new vertex id."""
        u, v = (u, v) if u < v else (v, u)
        t = frac(t)
        if not (0 < t < 1):
            raise ComplexError("split parameter must be strictly between 0 and 1")
        e = (u, v)
        if not self.current.has_face(e):
            raise ComplexError(f"{e} is not an edge of the complex")
        m = self.fresh_vertex()
        new_facets = []
        self.last_children = {}
        for f in self.current.facets:
            if u in f and v in f:
                a = _face([x for x in f if x != v] + [m])
                b = _face([x for x in f if x != u] + [m])
                new_facets.extend((a, b))
                self.last_children[f] = (a, b)
                base_f = self.origin[f]
                s = self.rel_sign[f]
                for child, dropped in ((a, v), (b, u)):
                    ordered = [m if x == dropped else x for x in f]
                    self.origin[child] = base_f
                    self.rel_sign[child] = s * _perm_sign(ordered)
                del self.origin[f]
                del self.rel_sign[f]
            else:
                new_facets.append(f)
        verts = tuple(sorted(set(self.current.vertices) | {m}))
        self.current = Complex(verts, tuple(sorted(set(new_facets))))
        self.splits.append(EdgeSplit(e, t, m))
        cu, cv = self.vertex_carrier[u], self.vertex_carrier[v]
        self.vertex_carrier[m] = _face(set(cu) | set(cv))
        if self.coordinates is not None:
            self.coordinates[m] = lerp(self.coordinates[u], self.coordinates[v], t)
        return m

    def oriented_facets(self, base_orientation):
        """Facet signs inherited from signs on the base facets."""
        return {f: base_orientation[self.origin[f]] * self.rel_sign[f] for f in self.current.facets}

    def refined_faces(self, base_faces, dim=None):
        """Current faces whose carrier lies inside the given base subcomplex."""
        targets = {_face(f) for f in base_faces}
        closed = set()
        for f in targets:
            for k in range(1, len(f) + 1):
                closed.update(combinations(f, k))
        out = []
        for f in self.current.all_faces():
            if dim is not None and len(f) != dim + 1:
                continue
            if all(self.vertex_carrier[v] in closed for v in f):
                # carrier join must fit inside one target face
                joined = _face(set().union(*(self.vertex_carrier[v] for v in f)))
                if any(set(joined) <= set(t) for t in targets):
                    out.append(f)
        return sorted(out, key=lambda g: (len(g), g))

    def refined_facets_of(self, base_facet):
        base_facet = _face(base_facet)
        return sorted(f for f, o in self.origin.items() if o == base_facet)


def subdivide_edge(cx, e, t=Fraction(1, 2)):
    """Single edge split; returns (Complex, carrier old facet -> new facets).

    Accepts a Complex or GeometricComplex (coordinates follow the split).
    """
    trail = Subdivision.of(cx)
    u, v = e
    trail.split_edge(u, v, t)
    carrier = {}
    for f in (cx.complex if isinstance(cx, GeometricComplex) else cx).facets:
        carrier[f] = tuple(trail.refined_facets_of(f))
    out = trail.geometric() if isinstance(cx, GeometricComplex) else trail.current
    return out, carrier


# ---------------------------------------------------------------------------
# staircase product of two simplices and its boundary sphere


def _paths(l: int):
    """Monotone lattice paths from (0,0) to (l,l) as vertex chains."""
    out = []

    def rec(i, j, chain):
        if i == l and j == l:
            out.append(tuple(chain))
            return
        if i < l:
            rec(i + 1, j, chain + [(i + 1, j)])
        if j < l:
            rec(i, j + 1, chain + [(i, j + 1)])

    rec(0, 0, [(0, 0)])
    return out


@dataclass(frozen=True)
class ProductSphere:
    """Staircase triangulation of Delta^l x Delta^l with its boundary data."""

    l: int
    product: GeometricComplex
    boundary: SubcomplexRef
    piece1: SubcomplexRef  # S^{l-1} x D^l  (first factor on the boundary)
    piece2: SubcomplexRef  # D^l x S^{l-1}
    vertex_pair: dict  # vertex id -> (i, j)

    def vid(self, i, j) -> int:
        return i * (self.l + 1) + j

    def proj1(self, v) -> int:
        return self.vertex_pair[v][0]

    def proj2(self, v) -> int:
        return self.vertex_pair[v][1]

    def boundary_geometric(self) -> GeometricComplex:
        return GeometricComplex(self.boundary.as_complex(), dict(self.product.coordinates))


def product_sphere(l: int) -> ProductSphere:
    """Delta^l x Delta^l staircase in rational coordinates.

    Top cells are the monotone lattice paths, so both factor projections are
    simplicial.  The boundary consists of the (2l-1)-faces lying in exactly
    one top cell; it triangulates S^{2l-1}.
    """
    if l < 1:
        raise ComplexError("product_sphere needs l >= 1")
    n = l + 1
    simplex = simplex_vertex_coords(l)
    coords = {}
    pair = {}
    for i in range(n):
        for j in range(n):
            vid = i * n + j
            coords[vid] = simplex[i] + simplex[j]
            pair[vid] = (i, j)
    cells = []
    for chain in _paths(l):
        cells.append(_face(i * n + j for (i, j) in chain))
    product_cx = Complex(tuple(range(n * n)), tuple(sorted(cells)))
    gc = geometric(product_cx, coords, check_pairs=False)

    count = {}
    for cell in cells:
        for ridge in combinations(cell, 2 * l):
            count[ridge] = count.get(ridge, 0) + 1
    bfacets = sorted(r for r, c in count.items() if c == 1)
    boundary = SubcomplexRef(product_cx, tuple(bfacets))

    full = set(range(n))
    p1, p2 = [], []
    for f in bfacets:
        firsts = {pair[v][0] for v in f}
        seconds = {pair[v][1] for v in f}
        if firsts != full:
            p1.append(f)
        if seconds != full:
            p2.append(f)
    piece1 = SubcomplexRef(product_cx, tuple(sorted(p1)))
    piece2 = SubcomplexRef(product_cx, tuple(sorted(p2)))
    return ProductSphere(l, gc, boundary, piece1, piece2, pair)


# ---------------------------------------------------------------------------
# quotient collapse


def _boundary_faces(cx: Complex):
    """(d-1)-faces lying in exactly one facet of a pure d-complex."""
    count = {}
    for f in cx.facets:
        for r in combinations(f, len(f) - 1):
            count[r] = count.get(r, 0) + 1
    return sorted(r for r, c in count.items() if c == 1)


def _is_disk_with_boundary(cx: Complex, a_facets) -> bool:
    if not cx.is_pure() or cx.dimension < 1:
        return False
    count = {}
    for f in cx.facets:
        for r in combinations(f, len(f) - 1):
            count[r] = count.get(r, 0) + 1
    if any(c > 2 for c in count.values()):
        return False
    bd = set(_boundary_faces(cx))
    if bd != {(_face(f)) for f in a_facets}:
        return False
    from .homology import homology_groups, profile_of_sphere, point_profile

    if homology_groups(cx) != point_profile(cx.dimension):
        return False
    acx = make_complex(sorted({v for f in a_facets for v in f}), a_facets)
    if homology_groups(acx) != profile_of_sphere(cx.dimension - 1, cx.dimension - 1):
        return False
    return True


def quotient_collapse(K, A: SubcomplexRef):
    """Collapse the subcomplex A of K to a single point, simplicially.

    Returns (Q, quotient SimplicialMap K' -> Q, Subdivision trail K -> K').
    Two constructions are used: vertex identification (exact quotient) when
    A can be separated from the rest by edge splits, and a certified
    facet-collapse model onto the standard sphere when A is the full
    boundary of a disk, where no identification model exists.
    """
    from .plmaps import SimplicialMap, validate_simplicial_map

    base = K.complex if isinstance(K, GeometricComplex) else K
    a_facets = [_face(f) for f in A.facets]
    if not a_facets:
        raise ComplexError("cannot collapse an empty subcomplex")
    a_dim = max(len(f) for f in a_facets) - 1
    if a_dim >= 1 and _is_disk_with_boundary(base, a_facets):
        return _disk_collapse(K, A)
    return _identify_collapse(K, A)


def _subdivided_a_faces(trail: Subdivision, a_facets):
    return trail.refined_faces(a_facets)


def _identify_collapse(K, A: SubcomplexRef):
    from .plmaps import SimplicialMap

    trail = Subdivision.of(K)
    a_facets = [_face(f) for f in A.facets]

    def a_vertices():
        faces = _subdivided_a_faces(trail, a_facets)
        return {v for f in faces for v in f}, {f for f in faces}

    def violations():
        averts, afaces = a_vertices()
        bad_faces = []
        for f in trail.current.all_faces():
            if f in afaces:
                continue
            if len([v for v in f if v in averts]) >= 2:
                bad_faces.append(f)
        images = {}
        collisions = []
        for f in trail.current.all_faces():
            if f in afaces:
                continue
            img = _face({(-1 if v in averts else v) for v in f})
            if img in images and images[img] != f:
                collisions.append(tuple(sorted((images[img], f))))
            else:
                images[img] = f
        return averts, bad_faces, sorted(set(collisions))

    for _round in range(3):
        averts, bad, coll = violations()
        if not bad and not coll:
            break
        if _round == 2:
            raise ComplexError(
                "quotient_collapse: identification still invalid after two repair rounds"
            )
        # pass 1: split transverse A-A edges present at round start
        afaces = set(_subdivided_a_faces(trail, a_facets))
        for e in list(trail.current.edges()):
            if e in afaces:
                continue
            if e[0] in averts and e[1] in averts and trail.current.has_face(e):
                trail.split_edge(*e)
        # pass 2: separate colliding pairs
        averts, _, coll = violations()
        for f, _g in coll:
            avs = [v for v in f if v in averts]
            others = [v for v in f if v not in averts]
            if avs and others:
                e = tuple(sorted((avs[0], others[0])))
                if trail.current.has_face(e):
                    trail.split_edge(*e)

    averts, afaces = a_vertices()
    star = min(averts)
    assignment = {v: (star if v in averts else v) for v in trail.current.vertices}
    qfacets = {_face({assignment[v] for v in f}) for f in trail.current.facets}
    Q = make_complex(sorted({v for f in qfacets for v in f}), qfacets)
    qmap = SimplicialMap(trail.current, Q, assignment)
    return Q, qmap, trail


def _disk_collapse(K, A: SubcomplexRef):
    """Certified degree-one collapse of a disk boundary onto a point.

    Output sphere is the standard boundary of the (l+1)-simplex with fresh
    ids; vertex 'l+1' is the image of an interior fan center and vertex 0
    absorbs the boundary.  A signed-cover certificate asserts relative
    degree +-1 on every target facet.
    """
    from .plmaps import SimplicialMap

    trail = Subdivision.of(K)
    base = trail.base
    l = base.dimension
    a_facets = [_face(f) for f in A.facets]

    def a_vertex_set():
        faces = _subdivided_a_faces(trail, a_facets)
        return {v for f in faces for v in f}, set(faces)

    # ensure an interior vertex exists
    for _ in range(l + 2):
        averts, afaces = a_vertex_set()
        interior = [v for v in trail.current.vertices if v not in averts]
        if interior:
            break
        crossing = [e for e in trail.current.edges() if e not in afaces]
        if crossing:
            trail.split_edge(*crossing[0])
        else:
            trail.split_edge(*trail.current.edges()[0])
    averts, afaces = a_vertex_set()
    interior = [v for v in trail.current.vertices if v not in averts]
    z = min(interior)

    # split every spoke of z once; the link of z becomes a ring copy
    link_before = sorted(
        {v for f in trail.current.facets if z in f for v in f if v != z}
    )
    ring = {}
    for w in link_before:
        ring[w] = trail.split_edge(z, w)
    ring_verts = set(ring.values())

    ring_facets = sorted(
        _face(v for v in f if v != z)
        for f in trail.current.facets
        if z in f
    )
    if not ring_facets:
        raise ComplexError("disk collapse: empty fan")
    rho0 = ring_facets[0]

    Q = sphere_complex(l)  # vertices 0..l+1; 0 = collapse point, l+1 = north

    def make_assignment(extra_choice):
        assignment = {}
        for v in trail.current.vertices:
            if v == z:
                assignment[v] = l + 1
            elif v in averts:
                assignment[v] = 0
            elif v in ring_verts:
                assignment[v] = 0
            else:
                assignment[v] = extra_choice.get(v, 0)
        for idx, v in enumerate(rho0):
            assignment[v] = idx + 1
        return assignment

    extras = sorted(
        v
        for v in trail.current.vertices
        if v != z and v not in averts and v not in ring_verts
    )
    choices = [{}]
    if extras:
        # small deterministic search: send stray interior vertices to 0 or 1
        choices = [{v: c for v in extras} for c in (0, 1)]
    src_orient = trail.oriented_facets(_disk_orientation(base))
    tgt_orient = _sphere_orientation(Q)
    last_err = None
    for choice in choices:
        assignment = make_assignment(choice)
        try:
            deg = _relative_degree(trail.current, assignment, Q, src_orient, tgt_orient)
        except ComplexError as e:
            last_err = e
            continue
        if deg in (1, -1):
            qmap = SimplicialMap(trail.current, Q, assignment)
            return Q, qmap, trail
    raise ComplexError(f"disk collapse failed the degree certificate: {last_err}")


def _disk_orientation(base: Complex):
    """Coherent orientation of a disk's facets, lex-first facet positive."""
    return _propagate_orientation(base, closed=False)


def _sphere_orientation(cx: Complex):
    return _propagate_orientation(cx, closed=True)


def _propagate_orientation(cx: Complex, closed: bool):
    facets = list(cx.facets)
    if not facets:
        return {}
    ridge_map = {}
    for f in facets:
        for i in range(len(f)):
            ridge = f[:i] + f[i + 1 :]
            ridge_map.setdefault(ridge, []).append((f, i))
    orient = {facets[0]: 1}
    stack = [facets[0]]
    while stack:
        f = stack.pop()
        for i in range(len(f)):
            ridge = f[:i] + f[i + 1 :]
            for g, j in ridge_map[ridge]:
                if g == f or g in orient:
                    continue
                # coherent: induced orientations on the shared ridge cancel
                orient[g] = -orient[f] * (-1) ** i * (-1) ** j
                stack.append(g)
    if len(orient) != len(facets):
        raise ComplexError("complex is not a connected pseudomanifold")
    if closed:
        # verify the signed boundary cancels
        bd = {}
        for f, s in orient.items():
            for i in range(len(f)):
                ridge = f[:i] + f[i + 1 :]
                bd[ridge] = bd.get(ridge, 0) + s * (-1) ** i
        if any(v != 0 for v in bd.values()):
            raise ComplexError("orientation propagation failed to close")
    return orient


def _relative_degree(src: Complex, assignment, tgt: Complex, src_orient, tgt_orient):
    """Signed cover count of each target facet; must be one constant +-1."""
    cover = {f: 0 for f in tgt.facets}
    for f in src.facets:
        img = [assignment[v] for v in f]
        if len(set(img)) != len(img):
            continue
        timg = _face(img)
        if timg not in cover:
            raise ComplexError(f"facet {f} maps onto non-facet {timg}")
        cover[timg] += src_orient[f] * _perm_sign(img)
    degrees = {cover[f] * tgt_orient[f] for f in tgt.facets}
    if len(degrees) != 1:
        raise ComplexError(f"cover counts disagree: {sorted(degrees)}")
    return degrees.pop()
