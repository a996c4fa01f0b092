import random

import pytest

from wforge.complexes import make_complex, sphere_complex, subdivide_edge
from wforge.homology import (
    HomologyError,
    HomologyProfile,
    IntegerChain,
    all_faces_set,
    bound_cycle,
    boundary_matrix,
    collapse_core,
    fundamental_cycle,
    homology_groups,
    point_profile,
    profile_of_sphere,
    smith_diagonal,
    smith_normal_form,
)


def mat_mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def det_int(M):
    from fractions import Fraction

    m = [list(map(Fraction, r)) for r in M]
    n = len(m)
    sign, acc = 1, Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        acc *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for cc in range(c, n):
                m[r][cc] -= f * m[c][cc]
    return sign * acc


def test_boundary_matrix_circle_rank():
    M, rows, cols = boundary_matrix(sphere_complex(1), 1)
    assert len(rows) == 3 and len(cols) == 3
    assert len(smith_diagonal(M)) == 2  # rank 2


def test_boundary_matrix_single_edge():
    cx = make_complex([0, 1], [(0, 1)])
    M, rows, cols = boundary_matrix(cx, 1)
    assert [M[i][0] for i in range(2)] == [-1, 1]


def test_boundary_squared_is_zero():
    s2 = sphere_complex(2)
    M2, _, _ = boundary_matrix(s2, 2)
    M1, _, _ = boundary_matrix(s2, 1)
    prod = mat_mul(M1, M2)
    assert all(all(x == 0 for x in row) for row in prod)


def test_snf_already_diagonal():
    D, U, V = smith_normal_form([[2, 0], [0, 6]])
    assert [D[0][0], D[1][1]] == [2, 6]


def test_snf_divisibility_fixup():
    # invariant factors of diag(2,3) are gcd = 1 and |det| = 6
    D, U, V = smith_normal_form([[2, 0], [0, 3]])
    assert [D[0][0], D[1][1]] == [1, 6]


def test_snf_zero_matrix():
    D, U, V = smith_normal_form([[0, 0], [0, 0]])
    assert all(D[i][j] == 0 for i in range(2) for j in range(2))
    assert U == [[1, 0], [0, 1]] and V == [[1, 0], [0, 1]]


@pytest.mark.parametrize("seed", range(6))
def test_snf_randomized_certificates(seed):
    rng = random.Random(seed)
    nr, nc = rng.randint(1, 8), rng.randint(1, 8)
    M = [[rng.randint(-20, 20) for _ in range(nc)] for _ in range(nr)]
    D, U, V = smith_normal_form(M)
    assert mat_mul(mat_mul(U, M), V) == D
    assert abs(det_int(U)) == 1 and abs(det_int(V)) == 1
    diag = [D[i][i] for i in range(min(nr, nc))]
    for a, b in zip(diag, diag[1:]):
        if a:
            assert b % a == 0
        else:
            assert b == 0


def test_homology_of_spheres_up_to_four():
    for k in range(5):
        assert homology_groups(sphere_complex(k)) == profile_of_sphere(k)


def test_homology_wedge_of_circles():
    cx = make_complex(range(5), [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
    assert homology_groups(cx).betti(1) == 2


def test_fundamental_cycle_circle():
    z = fundamental_cycle(sphere_complex(1))
    assert set(z.coefficients) == {(0, 1), (0, 2), (1, 2)}
    assert all(abs(c) == 1 for c in z.coefficients.values())
    assert z.boundary().is_zero()
    assert z.coefficients[(0, 1)] == 1  # lex-first positive


def test_fundamental_cycle_tetrahedron():
    z = fundamental_cycle(sphere_complex(2))
    assert len(z.coefficients) == 4
    assert z.boundary().is_zero()


def test_fundamental_cycle_rejects_disjoint_spheres():
    two = make_complex(range(6), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    with pytest.raises(HomologyError):
        fundamental_cycle(two)


def test_bound_cycle_equator():
    z = IntegerChain.from_items(1, [((0, 1), 1), ((1, 2), 1), ((0, 2), -1)])
    C = bound_cycle(sphere_complex(2), z)
    assert (C.boundary() + (-z)).is_zero()


def test_bound_cycle_zero():
    C = bound_cycle(sphere_complex(2), IntegerChain(1))
    assert C.is_zero()


def test_bound_cycle_rejects_nonbounding():
    z = fundamental_cycle(sphere_complex(1))
    with pytest.raises(HomologyError):
        bound_cycle(sphere_complex(1), z)


def test_collapse_preserves_homology():
    for k in (1, 2, 3):
        cx = sphere_complex(k)
        core = collapse_core(all_faces_set(cx))
        from wforge.homology import _homology_of_faces

        assert _homology_of_faces(core) == profile_of_sphere(k)


def test_subdivision_keeps_homology():
    cx = sphere_complex(2)
    for e in [(0, 1), (1, 2)]:
        cx, _ = subdivide_edge(cx, e)
    assert homology_groups(cx) == profile_of_sphere(2)
