"""Integer chains, boundary matrices, Smith normal form, homology.

Boundary matrices carry the alternating-sign convention on ascending vertex
tuples.  Smith normal form runs over arbitrary-precision integers; homology
profiles are the betti numbers plus the divisibility-ordered torsion
coefficients per dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class HomologyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# chains


def canonical_simplex(vs):
    """Sort a vertex tuple, returning (sorted tuple, permutation sign)."""
    vs = list(vs)
    sign = 1
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if vs[i] > vs[j]:
                vs[i], vs[j] = vs[j], vs[i]
                sign = -sign
            elif vs[i] == vs[j]:
                return tuple(vs), 0
    return tuple(vs), sign


@dataclass
class IntegerChain:
    dimension: int
    coefficients: dict = field(default_factory=dict)  # ascending tuple -> int

    @classmethod
    def from_items(cls, dimension, items):
        chain = cls(dimension)
        for vs, c in items:
            chain.add_simplex(vs, c)
        return chain

    def add_simplex(self, vs, c=1):
        key, sign = canonical_simplex(vs)
        if sign == 0 or c == 0:
            return
        new = self.coefficients.get(key, 0) + sign * c
        if new:
            self.coefficients[key] = new
        else:
            self.coefficients.pop(key, None)

    def __add__(self, other):
        out = IntegerChain(self.dimension, dict(self.coefficients))
        for k, c in other.coefficients.items():
            out.add_simplex(k, c)
        return out

    def __neg__(self):
        return IntegerChain(self.dimension, {k: -c for k, c in self.coefficients.items()})

    def scale(self, c: int):
        if c == 0:
            return IntegerChain(self.dimension)
        return IntegerChain(self.dimension, {k: c * v for k, v in self.coefficients.items()})

    def boundary(self) -> "IntegerChain":
        out = IntegerChain(self.dimension - 1)
        for vs, c in self.coefficients.items():
            for i in range(len(vs)):
                out.add_simplex(vs[:i] + vs[i + 1 :], c * (-1) ** i)
        return out

    def dot(self, other) -> int:
        """Evaluation pairing of two equal-dimensional chains."""
        if self.dimension != other.dimension:
            raise HomologyError("pairing needs equal dimensions")
        small, big = self.coefficients, other.coefficients
        if len(big) < len(small):
            small, big = big, small
        return sum(c * big.get(k, 0) for k, c in small.items())

    def is_zero(self) -> bool:
        return not self.coefficients


# ---------------------------------------------------------------------------
# boundary matrices


def boundary_matrix(cx, d: int):
    """Rows index (d-1)-faces, columns d-faces, entries from d(sigma)."""
    if d < 1 or d > cx.dimension:
        raise HomologyError(f"dimension {d} out of range 1..{cx.dimension}")
    rows = cx.faces(d - 1)
    cols = cx.faces(d)
    ri = {f: i for i, f in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, f in enumerate(cols):
        for i in range(len(f)):
            M[ri[f[:i] + f[i + 1 :]]][j] = (-1) ** i
    return M, rows, cols


# ---------------------------------------------------------------------------
# Smith normal form


def _min_abs_pivot(M, k, nr, nc):
    best = None
    for i in range(k, nr):
        row = M[i]
        for j in range(k, nc):
            v = row[j]
            if v:
                a = abs(v)
                if best is None or a < best[0]:
                    best = (a, i, j)
                    if a == 1:
                        return best
    return best


def smith_normal_form(M):
    """Exact SNF: returns (D, U, V) with U * M * V = D.

    D is diagonal with nonnegative entries in divisibility order; U and V
    are unimodular.  Pivots are chosen with minimal absolute value.
    """
    nr = len(M)
    nc = len(M[0]) if nr else 0
    A = [list(map(int, row)) for row in M]
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, q):  # row i -= q * row j
        Ai, Aj = A[i], A[j]
        for c in range(nc):
            Ai[c] -= q * Aj[c]
        Ui, Uj = U[i], U[j]
        for c in range(nr):
            Ui[c] -= q * Uj[c]

    def col_op(i, j, q):  # col i -= q * col j
        for r in range(nr):
            A[r][i] -= q * A[r][j]
        for r in range(nc):
            V[r][i] -= q * V[r][j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for r in range(nr):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(nc):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    k = 0
    while True:
        piv = _min_abs_pivot(A, k, nr, nc)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != k:
            row_swap(pi, k)
        if pj != k:
            col_swap(pj, k)
        while True:
            done = True
            for i in range(k + 1, nr):
                if A[i][k]:
                    q = A[i][k] // A[k][k]
                    row_op(i, k, q)
                    if A[i][k]:
                        row_swap(i, k)
                        done = False
            for j in range(k + 1, nc):
                if A[k][j]:
                    q = A[k][j] // A[k][k]
                    col_op(j, k, q)
                    if A[k][j]:
                        col_swap(j, k)
                        done = False
            if done:
                break
        if A[k][k] < 0:
            A[k] = [-x for x in A[k]]
            U[k] = [-x for x in U[k]]
        k += 1
        if k >= min(nr, nc):
            break

    # enforce the divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if b % a != 0:
                # fold entry b into row i via one mixed step
                col_op(i, i + 1, -1)  # col i gains col i+1
                while True:
                    piv = A[i][i]
                    q = A[i + 1][i] // piv
                    row_op(i + 1, i, q)
                    if A[i + 1][i] == 0:
                        break
                    row_swap(i, i + 1)
                q = A[i][i + 1] // A[i][i]
                col_op(i + 1, i, q)
                if A[i][i] < 0:
                    A[i] = [-x for x in A[i]]
                    U[i] = [-x for x in U[i]]
                if A[i + 1][i + 1] < 0:
                    A[i + 1] = [-x for x in A[i + 1]]
                    U[i + 1] = [-x for x in U[i + 1]]
                changed = True
    return A, U, V


def smith_diagonal(M):
    """Invariant factors only, via sparse unit-pivot elimination first."""
    rows = {}
    for i, row in enumerate(M):
        entries = {j: v for j, v in enumerate(row) if v}
        if entries:
            rows[i] = entries
    cols = {}
    for i, row in rows.items():
        for j in cols_update(row):
            cols.setdefault(j, set()).add(i)
    ones = 0
    while True:
        pivot = None
        for i in sorted(rows):
            for j, v in rows[i].items():
                if v in (1, -1):
                    cand = (len(cols[j]), i, j)
                    if pivot is None or cand < pivot:
                        pivot = cand
            if pivot and pivot[0] <= 2:
                break
        if pivot is None:
            break
        _, pi, pj = pivot
        pv = rows[pi][pj]
        prow = rows.pop(pi)
        for j in prow:
            cols[j].discard(pi)
        for i in list(cols.get(pj, ())):
            r = rows.get(i)
            if r is None or pj not in r:
                continue
            f = r[pj] * pv  # pv in {1,-1}
            for j, v in prow.items():
                nv = r.get(j, 0) - f * v
                if nv:
                    if j not in r:
                        cols.setdefault(j, set()).add(i)
                    r[j] = nv
                else:
                    if j in r:
                        del r[j]
                        cols[j].discard(i)
            if not r:
                del rows[i]
        ones += 1
    if not rows:
        return [1] * ones
    live_rows = sorted(rows)
    live_cols = sorted({j for r in rows.values() for j in r})
    cidx = {j: a for a, j in enumerate(live_cols)}
    dense = [[0] * len(live_cols) for _ in live_rows]
    for a, i in enumerate(live_rows):
        for j, v in rows[i].items():
            dense[a][cidx[j]] = v
    D, _, _ = smith_normal_form(dense)
    rest = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i] != 0]
    return [1] * ones + rest


def cols_update(row):
    return row.keys()


# ---------------------------------------------------------------------------
# homology profiles


@dataclass(frozen=True)
class HomologyProfile:
    entries: tuple  # per dimension: (betti, torsion tuple)

    @classmethod
    def make(cls, pairs):
        pairs = [(int(b), tuple(int(t) for t in tor)) for b, tor in pairs]
        while pairs and pairs[-1] == (0, ()):
            pairs.pop()
        return cls(tuple(pairs))

    def betti(self, d: int) -> int:
        return self.entries[d][0] if d < len(self.entries) else 0

    def torsion(self, d: int):
        return self.entries[d][1] if d < len(self.entries) else ()

    def __str__(self):
        out = []
        for d, (b, tor) in enumerate(self.entries):
            parts = ["Z"] * b + [f"Z/{t}" for t in tor]
            out.append(f"H_{d} = " + (" + ".join(parts) if parts else "0"))
        return "\n".join(out) if out else "H_0 = 0"


def point_profile(_dim=None) -> HomologyProfile:
    return HomologyProfile.make([(1, ())])


def profile_of_sphere(k: int, _dim=None) -> HomologyProfile:
    if k == 0:
        return HomologyProfile.make([(2, ())])
    return HomologyProfile.make([(1, ())] + [(0, ())] * (k - 1) + [(1, ())])


def all_faces_set(cx) -> set:
    from itertools import combinations

    out = set()
    for f in cx.facets:
        for k in range(1, len(f) + 1):
            out.update(combinations(f, k))
    return out


def collapse_core(faces: set) -> set:
    """Remove free pairs (elementary collapses) until none remain.

    A face sigma whose only strict coface is one maximal face tau of the
    next dimension is free; removing the pair preserves the homotopy type,
    so homology can be read off the (usually much smaller) core.
    """
    faces = set(faces)
    cofaces = {f: set() for f in faces}
    for tau in faces:
        if len(tau) < 2:
            continue
        for i in range(len(tau)):
            cofaces[tau[:i] + tau[i + 1 :]].add(tau)
    free = [s for s, cs in cofaces.items() if len(cs) == 1]

    def drop(gen):
        faces.discard(gen)
        if len(gen) < 2:
            return
        for i in range(len(gen)):
            sub = gen[:i] + gen[i + 1 :]
            cs2 = cofaces.get(sub)
            if cs2 is None:
                continue
            cs2.discard(gen)
            if sub not in faces:
                continue
            if len(cs2) == 1:
                free.append(sub)
            elif not cs2:
                # sub became maximal: unblock its count-one subfaces
                for k in range(len(sub)):
                    s3 = sub[:k] + sub[k + 1 :]
                    if s3 in faces and len(cofaces.get(s3, ())) == 1:
                        free.append(s3)

    while free:
        sigma = free.pop()
        if sigma not in faces:
            continue
        cs = cofaces.get(sigma)
        if not cs or len(cs) != 1:
            continue
        (tau,) = tuple(cs)
        if tau not in faces or cofaces.get(tau):
            continue  # the coface must be maximal
        drop(tau)
        drop(sigma)
        cofaces.pop(sigma, None)
        cofaces.pop(tau, None)
    return faces


def _homology_of_faces(faces: set) -> HomologyProfile:
    by_dim = {}
    for f in faces:
        by_dim.setdefault(len(f) - 1, []).append(f)
    dim = max(by_dim) if by_dim else 0
    factors = {}
    ranks = {0: 0, dim + 1: 0}
    for d in range(1, dim + 1):
        rows = sorted(by_dim.get(d - 1, []))
        cols = sorted(by_dim.get(d, []))
        ri = {f: i for i, f in enumerate(rows)}
        M = [[0] * len(cols) for _ in rows]
        for j, f in enumerate(cols):
            for i in range(len(f)):
                M[ri[f[:i] + f[i + 1 :]]][j] = (-1) ** i
        factors[d] = smith_diagonal(M) if M and M[0] else []
        ranks[d] = len(factors[d])
    pairs = []
    for d in range(dim + 1):
        betti = len(by_dim.get(d, [])) - ranks.get(d, 0) - ranks.get(d + 1, 0)
        torsion = tuple(t for t in factors.get(d + 1, []) if t > 1)
        pairs.append((betti, torsion))
    return HomologyProfile.make(pairs)


def homology_groups(cx) -> HomologyProfile:
    """Integral simplicial homology from Smith normal forms.

    Large complexes are first reduced by elementary collapses, which
    preserve the homotopy type and shrink mapping-cylinder-style inputs by
    orders of magnitude.
    """
    if hasattr(cx, "complex"):
        cx = cx.complex
    approx_faces = sum(2 ** len(f) - 1 for f in cx.facets)
    if approx_faces > 30000:
        return _homology_of_faces(collapse_core(all_faces_set(cx)))
    dim = cx.dimension
    n_faces = [len(cx.faces(d)) for d in range(dim + 1)]
    factors = {}
    ranks = {0: 0, dim + 1: 0}
    for d in range(1, dim + 1):
        M, _, _ = boundary_matrix(cx, d)
        if not M or not M[0]:
            factors[d] = []
        else:
            factors[d] = smith_diagonal(M)
        ranks[d] = len(factors.get(d, []))
    pairs = []
    for d in range(dim + 1):
        betti = n_faces[d] - ranks.get(d, 0) - ranks.get(d + 1, 0)
        torsion = tuple(t for t in factors.get(d + 1, []) if t > 1)
        pairs.append((betti, torsion))
    return HomologyProfile.make(pairs)


# ---------------------------------------------------------------------------
# fundamental cycles and bounding chains


def fundamental_cycle(cx, d: int | None = None) -> IntegerChain:
    """Coherent orientation of a closed pseudomanifold, as a top cycle.

    The lexicographically smallest facet gets coefficient +1.  Raises when
    the top boundary kernel does not have rank one (e.g. disjoint spheres).
    """
    from .complexes import _propagate_orientation, ComplexError

    if hasattr(cx, "complex"):
        cx = cx.complex
    if d is None:
        d = cx.dimension
    if not cx.is_pure() or cx.dimension != d:
        raise HomologyError("fundamental cycle needs a pure complex of the stated dimension")
    try:
        orient = _propagate_orientation(cx, closed=True)
    except ComplexError as e:
        raise HomologyError(f"kernel rank != 1: {e}") from e
    chain = IntegerChain(d, {f: s for f, s in orient.items()})
    if not chain.boundary().is_zero():
        raise HomologyError("orientation is not coherent")
    return chain


def bound_cycle(cx, z: IntegerChain) -> IntegerChain:
    """Integral chain C with boundary(C) = z, via Smith normal form."""
    if not z.boundary().is_zero():
        raise HomologyError("input chain is not a cycle")
    d = z.dimension + 1
    if z.is_zero():
        return IntegerChain(d)
    M, rows, cols = boundary_matrix(cx, d)
    ri = {f: i for i, f in enumerate(rows)}
    b = [0] * len(rows)
    for f, c in z.coefficients.items():
        if f not in ri:
            raise HomologyError(f"cycle simplex {f} is not a face of the complex")
        b[ri[f]] = c
    D, U, V = smith_normal_form(M)
    ub = [sum(U[i][j] * b[j] for j in range(len(b))) for i in range(len(U))]
    y = [0] * len(cols)
    r = min(len(rows), len(cols))
    for i in range(len(ub)):
        di = D[i][i] if i < r else 0
        if di == 0:
            if ub[i] != 0:
                raise HomologyError(
                    f"cycle is not a boundary: obstruction in coordinate {i} (value {ub[i]})"
                )
        else:
            if ub[i] % di != 0:
                raise HomologyError(
                    f"cycle is not a boundary: torsion obstruction {ub[i]} mod {di}"
                )
            y[i] = ub[i] // di
    x = [sum(V[i][j] * y[j] for j in range(len(y))) for i in range(len(cols))]
    C = IntegerChain(d, {f: xi for f, xi in zip(cols, x) if xi})
    if not (C.boundary() + (-z)).is_zero():
        raise HomologyError("internal error: solved chain does not bound the cycle")
    return C
