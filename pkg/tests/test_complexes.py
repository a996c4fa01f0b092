import pytest
from itertools import combinations

from wforge.complexes import (
    ComplexError,
    Subdivision,
    complete_complex,
    disk_complex,
    geometric_disk,
    geometric_sphere,
    make_complex,
    product_sphere,
    quotient_collapse,
    sphere_complex,
    subcomplex,
    subdivide_edge,
    wedge,
)
from wforge.homology import homology_groups, point_profile, profile_of_sphere


def test_complete_complex_triangle_boundary():
    s1 = complete_complex(3, 1)
    assert s1.facets == ((0, 1), (0, 2), (1, 2))
    assert s1.euler_characteristic() == 0


def test_complete_complex_points_model():
    pts = complete_complex(5, 0)
    assert len(pts.facets) == 5
    assert pts.dimension == 0


def test_complete_complex_tetrahedron_euler():
    s2 = complete_complex(4, 2)
    # chi = 4 - 6 + 4 = 2
    assert s2.euler_characteristic() == 2


def test_complete_complex_rejects_bad_dimension():
    with pytest.raises(ComplexError):
        complete_complex(3, 3)


def test_downward_closure_matches_enumeration():
    # membership queries agree with explicit subset enumeration
    for cx in (sphere_complex(2), complete_complex(5, 2), disk_complex(3)):
        explicit = set()
        for f in cx.facets:
            for k in range(1, len(f) + 1):
                explicit.update(combinations(f, k))
        for face in explicit:
            assert cx.has_face(face)
        assert not cx.has_face((97, 98))


def test_wedge_of_two_circles():
    s1 = sphere_complex(1)
    cx, refs, _ = wedge([s1, s1], [0, 0])
    assert len(cx.vertices) == 5
    assert len(cx.faces(1)) == 6
    assert homology_groups(cx).betti(1) == 2


def test_wedge_single_part_is_identity_like():
    s1 = sphere_complex(1)
    cx, refs, vmaps = wedge([s1], [0])
    assert cx == s1


def test_wedge_four_three_spheres():
    s3 = sphere_complex(3)
    cx, refs, _ = wedge([s3] * 4, [0, 0, 0, 0])
    prof = homology_groups(cx)
    assert prof.betti(0) == 1  # connected
    assert prof.betti(3) == 4


def test_wedge_bad_basepoint():
    with pytest.raises(ComplexError):
        wedge([sphere_complex(1)], [7])


def test_subdivide_edge_circle():
    s1 = sphere_complex(1)
    out, carrier = subdivide_edge(s1, (0, 1))
    assert len(out.vertices) == 4
    assert len(out.facets) == 4
    assert homology_groups(out) == profile_of_sphere(1)
    assert carrier[(0, 1)] == ((0, 3), (1, 3))


def test_subdivide_edge_preserves_euler():
    s2 = sphere_complex(2)
    out, _ = subdivide_edge(s2, (2, 3))
    assert out.euler_characteristic() == 2
    assert len(out.vertices) == 5


def test_subdivide_path_repeatedly():
    path = make_complex([0, 1], [(0, 1)])
    trail = Subdivision(path)
    for _ in range(4):
        e = trail.current.edges()[0]
        trail.split_edge(*e)
    assert len(trail.current.edges()) == 5


def test_subdivide_rejects_non_edge():
    with pytest.raises(ComplexError):
        subdivide_edge(sphere_complex(1), (0, 5))


def test_product_sphere_l1():
    ps = product_sphere(1)
    assert len(ps.product.complex.facets) == 2  # two triangles
    assert len(ps.boundary.facets) == 4  # 4-edge cycle
    assert homology_groups(ps.boundary.as_complex()) == profile_of_sphere(1)


def test_product_sphere_l2_counts_and_homology():
    ps = product_sphere(2)
    assert len(ps.product.complex.facets) == 6  # C(4, 2) shuffles
    bc = ps.boundary.as_complex()
    assert homology_groups(bc) == profile_of_sphere(3)
    p1 = ps.piece1.as_complex()
    p2 = ps.piece2.as_complex()
    assert len(p1.facets) + len(p2.facets) == len(bc.facets)
    # the two pieces meet in a torus
    shared = [f for f in p1.all_faces() if p2.has_face(f)]
    torus = make_complex(sorted({v for f in shared for v in f}), shared)
    prof = homology_groups(torus)
    assert (prof.betti(0), prof.betti(1), prof.betti(2)) == (1, 2, 1)


def test_product_sphere_projections_are_simplicial():
    ps = product_sphere(2)
    for f in ps.product.complex.facets:
        firsts = {ps.proj1(v) for v in f}
        seconds = {ps.proj2(v) for v in f}
        assert len(firsts) <= 3 and len(seconds) <= 3


def test_quotient_interval_mod_endpoints_is_circle():
    path = make_complex([0, 1], [(0, 1)])
    ends = subcomplex(path, [(0,), (1,)])
    Q, qmap, trail = quotient_collapse(path, ends)
    assert homology_groups(Q) == profile_of_sphere(1)
    assert len(trail.current.edges()) == 3  # three edges suffice


def test_quotient_disk_mod_boundary():
    for l in (1, 2, 3):
        disk = disk_complex(l)
        bd = subcomplex(disk, disk.faces(l - 1))
        Q, qmap, trail = quotient_collapse(disk, bd)
        assert homology_groups(Q) == profile_of_sphere(l), l
        # the collapse vertex absorbs the boundary; any extra preimage
        # vertices are interior ring padding (forced: a degree-one wrap of
        # the interior ring must pass through the collapse vertex)
        averts = {v for f in trail.refined_faces(bd.facets) for v in f}
        zero_preimage = {v for v, img in qmap.assignment.items() if img == 0}
        assert averts <= zero_preimage
        assert not (zero_preimage - averts) & averts


def test_quotient_single_vertex_is_identity_like():
    s1 = sphere_complex(1)
    A = subcomplex(s1, [(0,)])
    Q, qmap, trail = quotient_collapse(s1, A)
    assert homology_groups(Q) == profile_of_sphere(1)
    assert len(Q.facets) == len(s1.facets)


def test_geometric_disk_and_sphere_models():
    gd = geometric_disk(2)
    gs = geometric_sphere(2)
    assert gd.ambient_dim == 2
    assert gs.ambient_dim == 4
