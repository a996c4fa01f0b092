"""Exact linear algebra over the rationals.

Everything downstream (barycentric coordinates, regular-value checks,
preimage slicing, linking counts) runs on `fractions.Fraction`, so all
predicates here are exact: there are no tolerances anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

Vec = tuple  # tuple of Fraction


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(*xs) -> Vec:
    return tuple(frac(x) for x in xs)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Vec) -> Vec:
    c = frac(c)
    return tuple(c * x for x in a)


def vdot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def lerp(a: Vec, b: Vec, t) -> Vec:
    t = frac(t)
    return tuple((1 - t) * x + t * y for x, y in zip(a, b))


def centroid(points) -> Vec:
    points = list(points)
    n = len(points)
    acc = points[0]
    for p in points[1:]:
        acc = vadd(acc, p)
    return vscale(Fraction(1, n), acc)


def det(rows) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    m = [list(map(frac, r)) for r in rows]
    n = len(m)
    sign = 1
    acc = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        acc *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return sign * acc


def solve(A, b):
    """Solve A x = b exactly.

    A is a list of rows, b a list.  Returns (particular, kernel_basis) or
    None when the system is inconsistent.  `particular` has free variables
    set to zero; `kernel_basis` spans the solution space of A x = 0.
    """
    rows = [list(map(frac, r)) + [frac(bb)] for r, bb in zip(A, b)]
    if not rows:
        return (), []
    ncols = len(rows[0]) - 1
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols] != 0:
            return None
    free = [c for c in range(ncols) if c not in pivots]
    part = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        part[c] = rows[i][ncols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc]
        basis.append(tuple(v))
    return tuple(part), basis


def rank(A) -> int:
    if not A:
        return 0
    sol = solve(A, [0] * len(A))
    return len(A[0]) - len(sol[1])


def barycentric(simplex_pts, p):
    """Barycentric coordinates of p in the simplex with the given vertices.

    Returns a tuple of Fractions summing to 1, or None when p is outside
    the affine hull or the vertices are affinely dependent.
    """
    pts = list(simplex_pts)
    dim = len(pts[0])
    A = [[pts[j][i] for j in range(len(pts))] for i in range(dim)]
    A.append([Fraction(1)] * len(pts))
    b = list(p) + [Fraction(1)]
    sol = solve(A, b)
    if sol is None:
        return None
    part, basis = sol
    if basis:
        return None  # affinely dependent vertex set: coordinates not unique
    return tuple(part)


def in_simplex(simplex_pts, p, strict=False) -> bool:
    bc = barycentric(simplex_pts, p)
    if bc is None:
        return False
    if strict:
        return all(c > 0 for c in bc)
    return all(c >= 0 for c in bc)


class Bary:
    """Barycentric-coordinate evaluator with precomputed elimination.

    For a fixed affinely independent simplex this turns repeated membership
    tests into one small matrix-vector product plus consistency checks.
    """

    __slots__ = ("pts", "idx", "inv", "resid", "lo", "hi")

    def __init__(self, pts):
        self.pts = [tuple(map(frac, p)) for p in pts]
        k = len(self.pts)
        dim = len(self.pts[0])
        rows = [[self.pts[j][i] for j in range(k)] for i in range(dim)]
        rows.append([Fraction(1)] * k)
        # choose k independent rows by elimination
        chosen = []
        work = []
        for ridx, row in enumerate(rows):
            cand = list(row)
            for prow, pcol in work:
                f = cand[pcol]
                if f:
                    cand = [a - f * b for a, b in zip(cand, prow)]
            piv = next((j for j, a in enumerate(cand) if a), None)
            if piv is None:
                continue
            cand = [a / cand[piv] for a in cand]
            work.append((cand, piv))
            chosen.append(ridx)
            if len(chosen) == k:
                break
        if len(chosen) < k:
            raise ValueError("degenerate simplex")
        self.idx = chosen
        S = [rows[i] for i in chosen]
        self.inv = _invert(S)
        self.resid = [(i, rows[i]) for i in range(len(rows)) if i not in chosen]
        self.lo = tuple(min(p[i] for p in self.pts) for i in range(dim))
        self.hi = tuple(max(p[i] for p in self.pts) for i in range(dim))

    def in_box(self, p) -> bool:
        for x, a, b in zip(p, self.lo, self.hi):
            if x < a or x > b:
                return False
        return True

    def coords(self, p):
        p = tuple(map(frac, p))
        full = list(p) + [Fraction(1)]
        b = [full[i] for i in self.idx]
        lam = [sum(r * x for r, x in zip(row, b)) for row in self.inv]
        for i, row in self.resid:
            if sum(r * x for r, x in zip(row, lam)) != full[i]:
                return None
        return tuple(lam)

    def contains(self, p, strict=False) -> bool:
        if not self.in_box(p):
            return False
        lam = self.coords(p)
        if lam is None:
            return False
        if strict:
            return all(c > 0 for c in lam)
        return all(c >= 0 for c in lam)


def _invert(S):
    n = len(S)
    M = [list(map(frac, row)) + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(S)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def affinely_independent(pts) -> bool:
    pts = list(pts)
    if len(pts) == 1:
        return True
    rows = [list(vsub(p, pts[0])) for p in pts[1:]]
    return rank(rows) == len(pts) - 1


def in_convex_hull(points, y) -> bool:
    """Exact membership of y in conv(points), via Caratheodory subsets."""
    pts = list(points)
    if not pts:
        return False
    dim = len(pts[0])
    for k in range(1, min(len(pts), dim + 1) + 1):
        for sub in combinations(pts, k):
            if not affinely_independent(sub):
                continue
            bc = barycentric(sub, y)
            if bc is not None and all(c >= 0 for c in bc):
                return True
    return False


def simplex_contains_points(simplex_pts, points) -> bool:
    """True when every point (hence conv(points)) lies in the simplex."""
    for p in points:
        if not in_simplex(simplex_pts, p):
            return False
    return True
