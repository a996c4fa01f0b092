from fractions import Fraction

import pytest

from wforge.complexes import Subdivision, geometric_sphere
from wforge.exact import vec
from wforge.invariants import (
    InvariantError,
    PolytopalCycle,
    convex_realization,
    linking_number,
    linking_number_ambient,
    _schlegel_with_pos,
    preimage_cycle,
    regular_values,
)


def cyc(points, facet=None):
    cells = []
    for a, b in zip(points, points[1:] + points[:1]):
        cells.append((vec(*a), vec(*b), facet))
    return PolytopalCycle(1, cells, len(points[0]))


def test_linking_standard_hopf_link():
    # triangle in the z=0 plane around the origin, and a loop through it
    A = cyc([(1, 0, 0), (-1, 1, 0), (-1, -1, 0)])
    B = cyc([(0, 0, 1), (0, 3, 1), (0, 3, -1), (0, 0, -1)])
    assert abs(linking_number(A, B)) == 1


def test_linking_split_pair_is_zero():
    A = cyc([(1, 0, 0), (-1, 1, 0), (-1, -1, 0)])
    B = cyc([(5, 0, 1), (5, 1, 0), (5, 0, -1), (5, -1, 0)])
    assert linking_number(A, B) == 0


def test_linking_orientation_reversal_negates():
    A = cyc([(1, 0, 0), (-1, 1, 0), (-1, -1, 0)])
    B = cyc([(0, 0, 1), (0, 3, 1), (0, 3, -1), (0, 0, -1)])
    val = linking_number(A, B)
    assert linking_number(A.negate(), B) == -val
    assert linking_number(A, B.negate()) == -val


def test_linking_symmetry_for_curves():
    A = cyc([(1, 0, 0), (-1, 1, 0), (-1, -1, 0)])
    B = cyc([(0, 0, 1), (0, 3, 1), (0, 3, -1), (0, 0, -1)])
    assert linking_number(A, B) == linking_number(B, A)


def test_linking_rejects_intersecting_cycles():
    A = cyc([(1, 0, 0), (-1, 1, 0), (-1, -1, 0)])
    B = cyc([(1, 0, 0), (0, 2, 1), (0, 2, -1)])
    with pytest.raises(InvariantError):
        linking_number(A, B)


def _hopf_pair_on_join_sphere():
    """The join-structure Hopf link on the standard S^3 = d(Delta^4).

    A is a shrunk copy of the (0,1,2) triangle, B a quadrilateral through
    the complementary (3,4) edge; both lie on facet bodies of the sphere.
    """
    gs = geometric_sphere(3)
    e = gs.coordinates
    d = Fraction(1, 8)

    def mix(main, others, w=d):
        pt = tuple((1 - len(others) * w) * x for x in e[main])
        for o in others:
            pt = tuple(a + w * b for a, b in zip(pt, e[o]))
        return pt

    a0 = mix(0, [1, 2])
    a1 = mix(1, [0, 2])
    a2 = mix(2, [0, 1])
    A = PolytopalCycle(1, [(a0, a1, (0, 1, 2, 3)), (a1, a2, (0, 1, 2, 3)), (a2, a0, (0, 1, 2, 3))], 5)
    b0 = mix(3, [0, 1])
    c1 = tuple((x + y) / 2 for x, y in zip(mix(3, [0, 1]), mix(4, [0, 1])))
    b1 = mix(4, [0, 1])
    c2 = tuple((x + y) / 2 for x, y in zip(mix(3, [1, 2]), mix(4, [1, 2])))
    B = PolytopalCycle(
        1,
        [
            (b0, c1, (0, 1, 3, 4)),
            (c1, b1, (0, 1, 3, 4)),
            (b1, c2, (1, 2, 3, 4)),
            (c2, b0, (1, 2, 3, 4)),
        ],
        5,
    )
    return gs, A, B


def test_schlegel_transfer_preserves_cell_counts_and_links():
    gs, A, B = _hopf_pair_on_join_sphere()
    trail = Subdivision.of(gs)
    pos = convex_realization(trail)
    taus = [f for f in trail.current.facets if f not in {(0, 1, 2, 3), (0, 1, 3, 4), (1, 2, 3, 4)}]
    values = []
    for tau in taus[:2]:
        A3, B3 = _schlegel_with_pos(trail, pos, [A, B], tau)
        assert len(A3) == len(A) and len(B3) == len(B)
        assert A3.is_closed() and B3.is_closed()
        values.append(linking_number(A3, B3))
    # lk agrees across two different avoided facets
    assert values[0] == values[1]
    assert abs(values[0]) == 1


def test_schlegel_transfer_rejects_touching_cycle():
    gs, A, B = _hopf_pair_on_join_sphere()
    trail = Subdivision.of(gs)
    pos = convex_realization(trail)
    with pytest.raises(InvariantError):
        _schlegel_with_pos(trail, pos, [A, B], (0, 1, 2, 3))


def test_ambient_linking_agrees_with_schlegel_on_join_link():
    gs, A, B = _hopf_pair_on_join_sphere()
    trail = Subdivision.of(gs)
    pos = convex_realization(trail)
    tau = next(
        f for f in trail.current.facets if f not in {(0, 1, 2, 3), (0, 1, 3, 4), (1, 2, 3, 4)}
    )
    A3, B3 = _schlegel_with_pos(trail, pos, [A, B], tau)
    lk3 = linking_number(A3, B3)
    # cone-cone count in the ambient R^5 ball needs ambient dim 4; here we
    # restrict to the hyperplane sum(x) = 1 by dropping the last coordinate
    def drop(cycle):
        return PolytopalCycle(1, [(p[:4], q[:4], f) for p, q, f in cycle.cells], 4)

    center = tuple(Fraction(1, 5) for _ in range(4))
    lk4 = linking_number_ambient(drop(A), drop(B), center)
    assert abs(lk4) == abs(lk3) == 1


def test_regular_values_avoid_edge_images():
    from wforge.plmaps import degree_map

    m = degree_map(3, 2)
    vals = regular_values(m, 1, count=2)
    assert vals[0].point != vals[1].point
    assert vals[0].avoided_faces == len(m.source_complex.faces(1))


def test_preimage_cycle_closed_and_oriented():
    from wforge.whitehead import WhiteheadSpec, whitehead_family
    from wforge.invariants import oriented_source_facets, oriented_target_facets

    w = whitehead_family(WhiteheadSpec(2, "w"))
    src_or = oriented_source_facets(w)
    tgt_or = oriented_target_facets(w)
    vals = regular_values(w, 1, count=2)
    cyc = preimage_cycle(w, vals[0], src_or, tgt_or)
    assert cyc.is_closed()
    assert len(cyc) > 0
    # reversing the target orientation negates the cycle orientation
    flipped = {f: -s for f, s in tgt_or.items()}
    cyc2 = preimage_cycle(w, vals[0], src_or, flipped)
    heads = sorted(q for _p, q, _f in cyc.cells)
    tails2 = sorted(p for p, _q, _f in cyc2.cells)
    assert heads == tails2


def test_preimage_cycle_empty_off_image():
    # a map through one wedge summand has empty preimages over the other
    from wforge.whitehead import WhiteheadSpec, whitehead_family
    from wforge.invariants import oriented_source_facets, oriented_target_facets, _target_component_filters

    w2 = whitehead_family(WhiteheadSpec(2, "W2", 0))
    src_or = oriented_source_facets(w2)
    tgt_or = oriented_target_facets(w2)
    comps = _target_component_filters(w2)
    vals = regular_values(w2, 1, facet_filter=lambda f: f in comps[0], count=1)
    cyc = preimage_cycle(w2, vals[0], src_or, tgt_or)
    # the twisted side is constant for coefficient zero, so the first-sphere
    # preimage collapses to nothing
    assert len(cyc) == 0
