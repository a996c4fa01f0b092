"""Whitehead maps and generalized Whitehead products.

The sphere S^{2l-1} is the boundary of the staircase product of two
l-simplices, split into the two pieces where one factor sits on its
boundary.  A map [f, g] sends the first piece through the second-factor
projection, the boundary contraction of the disk, and f; the second piece
goes through the first-factor projection, the contraction, and g; both
pieces collapse the middle torus to the basepoint, so the union is a valid
PL map.  The family W2(a) = [inc o deg_a, incj], W(b) = fold o W2(b), and
the wedge assemblies built from these drive the whole reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import (
    Complex,
    GeometricComplex,
    Subdivision,
    geometric_disk,
    geometric_sphere,
    geometric_wedge,
    quotient_collapse,
    subcomplex,
)
from .plmaps import (
    PLMap,
    compose_refined,
    degree_map,
    plmap_from_simplicial,
)


class WhiteheadError(ValueError):
    pass


@dataclass(frozen=True)
class WhiteheadSpec:
    l: int
    kind: str  # 'w' | 'W2' | 'W'
    coefficient: int = 1

    def __post_init__(self):
        if self.l < 1:
            raise WhiteheadError("spec needs l >= 1")
        if self.kind not in ("w", "W2", "W"):
            raise WhiteheadError(f"unknown kind {self.kind!r}")


# ---------------------------------------------------------------------------
# boundary contraction of the disk


def boundary_contraction(l: int) -> PLMap:
    """The collapse D^l -> S^l sending the whole boundary to vertex 0."""
    disk = geometric_disk(l)
    bd = subcomplex(disk.complex, [f for f in disk.complex.faces(l - 1)])
    Q, qmap, trail = quotient_collapse(disk, bd)
    target = geometric_sphere(l)
    if Q != target.complex:
        raise WhiteheadError("contraction target is not the standard sphere model")
    return plmap_from_simplicial(trail, Subdivision.of(target), qmap.assignment)


def twisted_contraction(a: int, l: int) -> PLMap:
    """deg_a composed after the boundary contraction: D^l -> S^l."""
    c = boundary_contraction(l)
    if a == 1:
        return c
    return compose_refined(c, degree_map(a, l))


# ---------------------------------------------------------------------------
# wedge targets and structural maps


def standard_wedge(l: int, count: int = 2):
    """Wedge of `count` standard l-spheres at their 0 vertices."""
    spheres = [geometric_sphere(l) for _ in range(count)]
    return geometric_wedge(spheres, [0] * count)


def wedge_inclusion(sphere: GeometricComplex, wedge_gc: GeometricComplex, vmap) -> PLMap:
    return plmap_from_simplicial(
        Subdivision.of(sphere), Subdivision.of(wedge_gc), dict(vmap)
    )


def fold_map(wedge_gc: GeometricComplex, vmaps, sphere: GeometricComplex) -> PLMap:
    """id v id: both wedge summands map identically onto the sphere."""
    assignment = {}
    for vm in vmaps:
        for v, w in vm.items():
            assignment[w] = v
    return plmap_from_simplicial(
        Subdivision.of(wedge_gc), Subdivision.of(sphere), assignment
    )


def wedge_hat(xs, l: int, wedge_gc=None, vmaps=None) -> PLMap:
    """The map V^l_s -> S^l restricting to deg_{x_j} on the j-th sphere."""
    xs = list(xs)
    if wedge_gc is None:
        wedge_gc, _refs, vmaps = standard_wedge(l, len(xs))
    sphere = geometric_sphere(l)
    trail = Subdivision.of(wedge_gc)
    images = {}
    for x, vm in zip(xs, vmaps):
        hat = degree_map(x, l)
        translate = dict(vm)
        for sp in hat.source.splits:
            u, v = sp.edge
            uu, vv = translate[u], translate[v]
            e, t = ((uu, vv), sp.t) if uu < vv else ((vv, uu), 1 - sp.t)
            translate[sp.new_vertex] = trail.split_edge(*e, t)
        # each summand's images live in its own target subdivision of the
        # same nominal sphere, so the wedge map is validated against that
        for v, w in translate.items():
            images[w] = hat.images[v]
    out = PLMap(trail, Subdivision.of(sphere), images, None)
    out.validate()
    out.meta["degrees"] = xs
    return out


# ---------------------------------------------------------------------------
# the generalized Whitehead product [f, g]


def _monotone_chains(rows, cols):
    """All monotone lattice chains through the rows x cols grid."""
    out = []

    def rec(i, j, chain):
        if i == len(rows) - 1 and j == len(cols) - 1:
            out.append(tuple(chain))
            return
        if i < len(rows) - 1:
            rec(i + 1, j, chain + [(rows[i + 1], cols[j])])
        if j < len(cols) - 1:
            rec(i, j + 1, chain + [(rows[i], cols[j + 1])])

    rec(0, 0, [(rows[0], cols[0])])
    return out


def _product_piece_cells(circle_edges, disk_facets, row_key, col_key):
    """Staircase tetrahedra of (circle edge) x (disk triangle) cells.

    Vertex orders come from fixed linear functionals on the two factors
    (coordinate-lexicographic order), so the triangulations of shared faces
    agree across neighbouring cells and across the two pieces, and the
    triangulation is induced by an affine staircase lift.
    """
    cells = []
    for e in circle_edges:
        rows = sorted(e, key=row_key)
        for K in disk_facets:
            cols = sorted(K, key=col_key)
            for chain in _monotone_chains(rows, cols):
                cells.append(tuple(sorted(chain)))
    return cells


def assemble_on_product(pairs, l: int = 2):
    """Several Whitehead-style maps on one shared product-boundary sphere.

    pairs: list of (chi1, chi2, target_geometric); all chi1 share a source
    disk trail (the second-factor contractions of the piece with the first
    factor on its boundary), all chi2 likewise for the mirrored piece.
    Returns the list of assembled PLMaps, one per pair, over one sphere.
    """
    if l != 2:
        raise WhiteheadError("the geometric engine builds Whitehead maps for l = 2")
    disk1 = pairs[0][0].source
    disk2 = pairs[0][1].source
    for chi1, chi2, _t in pairs:
        if chi1.source is not disk1 or chi2.source is not disk2:
            raise WhiteheadError("piece maps must share the two disk trails")

    def boundary_circle(disk):
        from .complexes import _boundary_faces

        return sorted(_boundary_faces(disk.current))

    circle1 = boundary_circle(disk1)
    circle2 = boundary_circle(disk2)
    if circle1 != circle2:
        raise WhiteheadError("contraction boundaries disagree between the two pieces")

    def key1(i):  # order of the first factor (disk2 vertex space)
        return tuple(disk2.coordinates[i])

    def key2(j):  # order of the second factor (disk1 vertex space)
        return tuple(disk1.coordinates[j])

    piece1_cells = _product_piece_cells(circle1, disk1.current.facets, key1, key2)
    piece2_flip = _product_piece_cells(circle2, disk2.current.facets, key2, key1)
    # piece2 lives as (disk point, circle point): swap the pair roles
    piece2_cells = [tuple(sorted((j, i) for (i, j) in cell)) for cell in piece2_flip]

    enc = {}
    coords = {}
    dcoords1 = disk1.coordinates
    dcoords2 = disk2.coordinates

    def vid(i, j):
        # i indexes the first factor (disk2 vertex space), j the second
        if (i, j) not in enc:
            enc[(i, j)] = len(enc)
            coords[enc[(i, j)]] = tuple(dcoords2[i]) + tuple(dcoords1[j])
        return enc[(i, j)]

    facets = []
    piece1_set = set()
    for cell in piece1_cells:
        fa = tuple(sorted(vid(i, j) for (i, j) in cell))
        facets.append(fa)
        piece1_set.add(fa)
    for cell in piece2_cells:
        facets.append(tuple(sorted(vid(i, j) for (i, j) in cell)))

    sphere_cx = Complex(tuple(sorted(coords)), tuple(sorted(set(facets))))
    _assert_closed_pseudomanifold(sphere_cx)
    trail = Subdivision(sphere_cx, coordinates=coords)

    pair_of = {v: ij for ij, v in enc.items()}
    p1_verts = {v for fa in piece1_set for v in fa}
    p2_verts = {v for fa in set(sphere_cx.facets) - piece1_set for v in fa}

    out = []
    for chi1, chi2, target in pairs:
        ttrail = target if isinstance(target, Subdivision) else Subdivision.of(target)
        images = {}
        assignment = {} if (chi1.assignment and chi2.assignment) else None
        for v in sphere_cx.vertices:
            i, j = pair_of[v]
            if v in p1_verts and v in p2_verts:
                if chi1.images[j] != chi2.images[i]:
                    raise WhiteheadError("piece maps disagree on the middle torus")
                images[v] = chi1.images[j]
            elif v in p1_verts:
                images[v] = chi1.images[j]
            else:
                images[v] = chi2.images[i]
            if assignment is not None:
                a1 = chi1.assignment[j] if v in p1_verts else None
                a2 = chi2.assignment[i] if v in p2_verts else None
                if a1 is not None and a2 is not None and a1 != a2:
                    raise WhiteheadError("piece assignments disagree on the middle torus")
                assignment[v] = a1 if a1 is not None else a2
        if assignment is not None:
            m = plmap_from_simplicial(trail, ttrail, assignment)
        else:
            m = PLMap(trail, ttrail, images)
            m.validate()
        m.meta["l"] = l
        m.meta["product_boundary"] = True
        m.meta["piece1"] = frozenset(piece1_set)
        m.meta["factor_pairs"] = pair_of
        m.meta["factor_trails"] = (disk2, disk1)  # keyed like the (i, j) pairs
        out.append(m)
    return out


def product_map(f: PLMap, g: PLMap, l: int | None = None) -> PLMap:
    """[f, g]: S^{2l-1} -> X for f, g: S^l -> X with a common target model.

    The source sphere is the boundary of the simplex product, triangulated
    directly as staircase products: the piece with the first factor on the
    boundary is (boundary circle) x (cells of c twisted by f) and maps by
    f o c o proj2; the other piece is mirrored and maps by g o c o proj1.
    Both pieces send the middle torus to the shared basepoint value.
    """
    if f.target.base != g.target.base:
        raise WhiteheadError("factors need the same nominal target")
    if f.source.base != g.source.base:
        raise WhiteheadError("factors need the same nominal source sphere")
    if l is None:
        l = f.source.base.dimension
    if f.images[0] != g.images[0]:
        raise WhiteheadError("factors disagree at the basepoint vertex")

    chi1 = compose_refined(boundary_contraction(l), f)
    chi2 = compose_refined(boundary_contraction(l), g)
    return assemble_on_product([(chi1, chi2, f.target.geometric_base())], l)[0]


def _assert_closed_pseudomanifold(cx: Complex):
    count = {}
    for fa in cx.facets:
        for i in range(len(fa)):
            r = fa[:i] + fa[i + 1 :]
            count[r] = count.get(r, 0) + 1
    bad = [r for r, c in count.items() if c != 2]
    if bad:
        raise WhiteheadError(f"assembled sphere is not closed: ridge {bad[0]} in {count[bad[0]]} cells")


# ---------------------------------------------------------------------------
# the Whitehead family


def whitehead_family(spec: WhiteheadSpec) -> PLMap:
    """w, the twisted W2(a), or the sphere-target W(b) = fold o W2(b)."""
    l = spec.l
    wedge_gc, refs, vmaps = standard_wedge(l, 2)
    inc = wedge_inclusion(geometric_sphere(l), wedge_gc, vmaps[0])
    incj = wedge_inclusion(geometric_sphere(l), wedge_gc, vmaps[1])
    if spec.kind == "w" or (spec.kind == "W2" and spec.coefficient == 1):
        left = inc
    else:
        left = compose_refined(degree_map(spec.coefficient, l), inc)
    w2 = product_map(left, incj, l)
    w2.meta["wedge_vmaps"] = vmaps
    if spec.kind in ("w", "W2"):
        w2.meta["spec"] = spec
        return w2
    fold = fold_map(wedge_gc, vmaps, geometric_sphere(l))
    wb = compose_refined(w2, fold)
    wb.meta.update(w2.meta)
    wb.meta["spec"] = spec
    return wb


# ---------------------------------------------------------------------------
# wedge assemblies W_s(a) on V^{2l-1}_m


@dataclass
class WedgeAssembly:
    """W_s(a): V^{2l-1}_m -> V^l_s, stored one source sphere at a time.

    components[q] is a PLMap from the q-th product-boundary sphere into the
    full wedge V^l_s; the assembled simplicial object for cylinder building
    is produced by `reduction.build_cylinder_map`.
    """

    l: int
    s: int
    coefficients: list  # per q: dict (i, j) -> integer a^{i,j}_q
    target: GeometricComplex
    target_refs: list
    target_vmaps: list
    components: list  # per q: PLMap

    @property
    def m(self) -> int:
        return len(self.components)


def _pair_inclusion(l, s, i, j, wedge_gc, vmaps):
    """Inclusion of S^l_i v S^l_j into V^l_s as a PLMap."""
    pair_gc, _refs, pair_vmaps = standard_wedge(l, 2)
    assignment = {}
    for v, w in pair_vmaps[0].items():
        assignment[w] = vmaps[i][v]
    for v, w in pair_vmaps[1].items():
        assignment[w] = vmaps[j][v]
    return plmap_from_simplicial(
        Subdivision.of(pair_gc), Subdivision.of(wedge_gc), assignment
    ), pair_gc


def wedge_assembly(a, l: int, s: int | None = None) -> WedgeAssembly:
    """Assemble W_s(a) from the pair maps W2(a^{i,j}_q).

    `a` is a list (one entry per source sphere q) of dicts (i, j) -> int
    with 0 <= i < j < s.  Zero summands drop out of the homotopy sum; at
    most one nonzero summand per source sphere is constructible without a
    pinch on the product sphere, which this artifact does not build.
    """
    coeffs = [dict(aq) for aq in a]
    if s is None:
        s = max((max(i, j) for aq in coeffs for (i, j) in aq), default=1) + 1
    if s < 2:
        raise WhiteheadError("wedge assembly needs s >= 2")
    wedge_gc, refs, vmaps = standard_wedge(l, s)
    components = []
    for q, aq in enumerate(coeffs):
        nonzero = sorted((ij, c) for ij, c in aq.items() if c)
        if len(nonzero) > 1:
            raise WhiteheadError(
                "sums of several nonzero Whitehead summands on one source sphere "
                "need a pinch of the product sphere, which is not constructed"
            )
        if not nonzero:
            (i, j), c = (0, 1), 0
        else:
            (i, j), c = nonzero[0]
        w2 = whitehead_family(WhiteheadSpec(l, "W2", c))
        incl, _pg = _pair_inclusion(l, s, i, j, wedge_gc, vmaps)
        comp = compose_refined(w2, incl)
        comp.meta.update(w2.meta)
        comp.meta["pair"] = (i, j)
        comp.meta["coefficient"] = c
        components.append(comp)
    return WedgeAssembly(l, s, coeffs, wedge_gc, refs, vmaps, components)
