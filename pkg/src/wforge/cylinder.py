"""Simplicial mapping cylinders, gluing, and the double cylinder.

Cyl g interpolates between copies of P and Q: its facets are the facets of
Q together with, for each facet s of P, the join of s with its image g(s)
(duplicate image vertices collapsed).  The retraction sends the P-copy
through g and fixes Q.  Every built cylinder is validated by the homology
surrogate (Cyl g deformation-retracts to Q) and the retraction identity;
on failure the source is subdivided once and the construction retried.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    Complex,
    ComplexError,
    Subdivision,
    SubcomplexRef,
    _face,
    make_complex,
    subcomplex,
)
from .homology import homology_groups
from .plmaps import SimplicialMap, validate_simplicial_map


class CylinderError(ValueError):
    pass


@dataclass
class CylinderTriple:
    cylinder: Complex
    P_ref: SubcomplexRef
    Q_ref: SubcomplexRef
    retraction: SimplicialMap  # cylinder -> Q
    p_vertex_map: dict  # P vertex -> cylinder vertex
    q_vertex_map: dict  # Q vertex -> cylinder vertex
    g: SimplicialMap


def _build_cylinder(g: SimplicialMap):
    P, Q = g.source, g.target
    offset = max(Q.vertices) + 1
    pmap = {v: v + offset for v in P.vertices}
    qmap = {v: v for v in Q.vertices}
    facets = list(Q.facets)
    for s in P.facets:
        joined = _face([pmap[v] for v in s] + [g.assignment[v] for v in s])
        facets.append(joined)
    verts = sorted({v for f in facets for v in f})
    cyl = make_complex(verts, facets)
    p_ref = subcomplex(cyl, [_face(pmap[v] for v in s) for s in P.facets])
    q_ref = subcomplex(cyl, list(Q.facets))
    assignment = {}
    for v in P.vertices:
        assignment[pmap[v]] = g.assignment[v]
    for v in Q.vertices:
        assignment[v] = v
    ret = validate_simplicial_map(cyl, Q, assignment)
    return CylinderTriple(cyl, p_ref, q_ref, ret, pmap, qmap, g)


def mapping_cylinder(g: SimplicialMap) -> CylinderTriple:
    """Cyl g with its P and Q copies and the retraction onto Q.

    The join construction is validated: the cylinder must have the homology
    of Q and the retraction restricted to the P copy must equal g.  If
    validation fails the source is edge-subdivided once and the
    construction retried before giving up.
    """
    attempt = g
    for round_ in range(2):
        triple = _build_cylinder(attempt)
        ok = True
        for v in attempt.source.vertices:
            if triple.retraction.assignment[triple.p_vertex_map[v]] != attempt.assignment[v]:
                ok = False
        if ok and homology_groups(triple.cylinder) != homology_groups(attempt.target):
            ok = False
        if ok:
            return triple
        if round_ == 1:
            break
        # one full edge-subdivision pass of the source, then retry
        trail = Subdivision(attempt.source)
        assignment = dict(attempt.assignment)
        for e in list(attempt.source.edges()):
            u, v = e
            if not trail.current.has_face(e):
                continue
            m = trail.split_edge(u, v)
            # send the fresh vertex to either endpoint image; both are in
            # the image face, so the map stays simplicial
            assignment[m] = assignment[u]
        attempt = validate_simplicial_map(trail.current, attempt.target, assignment)
    raise CylinderError("cylinder validation failed even after subdividing the source")


def glue_over(X: Complex, A: SubcomplexRef, C: Complex, A2: SubcomplexRef, iso: dict) -> Complex:
    """Pushout of X and C along an isomorphism A -> A2 of subcomplexes.

    iso maps A's vertices to A2's vertices and must carry faces of A
    bijectively onto faces of A2; the result identifies the two copies and
    contains both originals as subcomplexes.
    """
    averts = A.vertex_set
    if set(iso) != averts:
        raise ComplexError("iso must be defined exactly on the subcomplex vertices")
    if sorted(iso[v] for v in iso) != sorted(A2.vertex_set):
        raise ComplexError("iso is not a bijection onto the second subcomplex")
    a_faces = {_face(iso[v] for v in f) for f in A.facets}
    if a_faces != {(_face(f)) for f in A2.facets}:
        raise ComplexError("iso does not carry facets onto facets")
    inv = {w: v for v, w in iso.items()}
    offset = max(X.vertices) + 1
    cmap = {}
    for v in C.vertices:
        cmap[v] = inv[v] if v in inv else v + offset
    facets = list(X.facets) + [_face(cmap[v] for v in f) for f in C.facets]
    verts = sorted({v for f in facets for v in f})
    return make_complex(verts, facets), cmap


def double_cylinder(cyl_g: CylinderTriple, cyl_h: CylinderTriple):
    """Union of two mapping cylinders over their common source copy.

    Both cylinders must be built over the same source complex P; the result
    identifies the two P copies, so it contains both targets and both
    cylinders as subcomplexes.
    """
    if cyl_g.g.source != cyl_h.g.source:
        raise CylinderError("double cylinder needs a common source complex")
    P = cyl_g.g.source
    A = subcomplex(cyl_g.cylinder, [
        _face(cyl_g.p_vertex_map[v] for v in s) for s in P.facets
    ])
    A2 = subcomplex(cyl_h.cylinder, [
        _face(cyl_h.p_vertex_map[v] for v in s) for s in P.facets
    ])
    iso = {cyl_g.p_vertex_map[v]: cyl_h.p_vertex_map[v] for v in P.vertices}
    glued, cmap = glue_over(cyl_h.cylinder, A2, cyl_g.cylinder, A,
                            {w: v for v, w in iso.items()})
    return glued, cmap
