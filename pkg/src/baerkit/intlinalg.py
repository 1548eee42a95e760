"""Exact integer matrix normal forms and lattice arithmetic.

Everything here runs over Python's arbitrary-precision integers: Hermite and
Smith normal forms with their unimodular transforms, membership of a vector
in the row lattice of an echelon matrix, and the canonical invariants of a
finitely generated abelian group given by a relation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd, prod


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = x*a + y*b and g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class IntMatrix:
    """Rectangular matrix of Python ints, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, cols: int | None = None):
        data = [list(map(int, row)) for row in data]
        width = len(data[0]) if data else (0 if cols is None else cols)
        if any(len(row) != width for row in data):
            raise ValueError("rows have unequal length")
        if cols is not None and data and cols != width:
            raise ValueError("explicit column count disagrees with row data")
        self.rows = len(data)
        self.cols = width
        self.data = data

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    def copy(self) -> "IntMatrix":
        return IntMatrix([row[:] for row in self.data], cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.cols == other.cols and self.data == other.data

    def __repr__(self):
        return f"IntMatrix({self.data!r})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        out = []
        for row in self.data:
            out.append([
                sum(row[k] * other.data[k][j] for k in range(self.cols))
                for j in range(other.cols)
            ])
        return IntMatrix(out, cols=other.cols)

    def nonzero_rows(self) -> list[list[int]]:
        return [row[:] for row in self.data if any(row)]

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [row[:] for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def _negate_row(mat, i):
    mat[i] = [-x for x in mat[i]]


def _sub_row(mat, i, q, j):
    """mat[i] -= q * mat[j]"""
    ri, rj = mat[i], mat[j]
    mat[i] = [a - q * b for a, b in zip(ri, rj)]


def hnf(matrix: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U @ matrix == H, H in row echelon form
    with positive pivots and entries above each pivot reduced into
    [0, pivot).  Zero rows, if any, sit at the bottom.  Pivot rows are chosen
    by minimal absolute value to limit entry growth.
    """
    a = [row[:] for row in matrix.data]
    r, c = matrix.rows, matrix.cols
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    top = 0
    for col in range(c):
        if top == r:
            break
        placed = False
        while True:
            live = [i for i in range(top, r) if a[i][col]]
            if not live:
                break
            i0 = min(live, key=lambda i: abs(a[i][col]))
            if i0 != top:
                a[top], a[i0] = a[i0], a[top]
                u[top], u[i0] = u[i0], u[top]
            if a[top][col] < 0:
                _negate_row(a, top)
                _negate_row(u, top)
            p = a[top][col]
            rest = [i for i in range(top + 1, r) if a[i][col]]
            if not rest:
                placed = True
                break
            for i in rest:
                q = a[i][col] // p
                if q:
                    _sub_row(a, i, q, top)
                    _sub_row(u, i, q, top)
        if placed:
            p = a[top][col]
            for i in range(top):
                q = a[i][col] // p
                if q:
                    _sub_row(a, i, q, top)
                    _sub_row(u, i, q, top)
            top += 1
    return IntMatrix(a, cols=c), IntMatrix(u, cols=r)


def snf(matrix: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: (D, U, V) with U @ matrix @ V == D diagonal,
    U and V unimodular, and each diagonal entry dividing the next."""
    a = [row[:] for row in matrix.data]
    r, c = matrix.rows, matrix.cols
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def sub_col(i, q, j):
        """column i -= q * column j"""
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def pivot_search(t):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x and (best is None or abs(x) < abs(best[2])):
                    best = (i, j, x)
        return best

    t = 0
    while t < min(r, c):
        found = pivot_search(t)
        if found is None:
            break
        i, j, _ = found
        swap_rows(t, i)
        swap_cols(t, j)
        if a[t][t] < 0:
            _negate_row(a, t)
            _negate_row(u, t)
        # Clear row and column t; a remainder smaller than the pivot becomes
        # the new pivot, so |a[t][t]| strictly decreases and the loop ends.
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        _sub_row(a, i, q, t)
                        _sub_row(u, i, q, t)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, c):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        sub_col(j, q, t)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if not dirty:
                break
        # Pivot must divide every remaining entry; if not, fold the offending
        # row into row t and redo this position.
        p = a[t][t]
        offender = None
        for i in range(t + 1, r):
            for j in range(t + 1, c):
                if a[i][j] % p:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _sub_row(a, t, -1, offender)
            _sub_row(u, t, -1, offender)
            continue
        t += 1
    return IntMatrix(a, cols=c), IntMatrix(u, cols=r), IntMatrix(v, cols=c)


@dataclass(frozen=True)
class Membership:
    """Outcome of reducing a vector against an echelon row basis."""

    member: bool
    coordinates: tuple[int, ...] | None = None
    residue: tuple[int, ...] | None = None


def lattice_membership(vector, basis: IntMatrix) -> Membership:
    """Decide whether `vector` lies in the row lattice of `basis`.

    `basis` must be in row echelon form (e.g. the H of `hnf`); zero rows are
    ignored.  On success the coordinates express the vector in the nonzero
    rows of the basis, in order; on failure the partially reduced residue is
    reported as of the first pivot whose division fails.
    """
    vector = list(map(int, vector))
    rows = basis.nonzero_rows()
    if basis.cols != len(vector) and rows:
        raise ValueError("vector length does not match basis width")
    coords = []
    for row in rows:
        p = next(i for i, x in enumerate(row) if x)
        b = vector[p]
        if b == 0:
            coords.append(0)
            continue
        if b % row[p]:
            return Membership(False, None, tuple(vector))
        q = b // row[p]
        coords.append(q)
        vector = [x - q * y for x, y in zip(vector, row)]
    if any(vector):
        return Membership(False, None, tuple(vector))
    return Membership(True, tuple(coords), None)


def solve_echelon(vector, rows: list[dict]) -> list[int] | None:
    """Exact integer solve against sparse echelon rows.

    Each row is a dict keyed by column label with a designated pivot: the
    smallest key, whose coefficient must divide during reduction.  Rows are
    assumed sorted by pivot and pairwise echelon (a later row never touches
    an earlier pivot).  Returns coordinates in row order, or None when the
    vector is outside the integer row span.
    """
    v = {k: c for k, c in vector.items() if c}
    coords = []
    for row in rows:
        pivot = min(row)
        b = v.get(pivot, 0)
        a = row[pivot]
        if b % a:
            return None
        q = b // a
        coords.append(q)
        if q:
            for k, c in row.items():
                s = v.get(k, 0) - q * c
                if s:
                    v[k] = s
                else:
                    v.pop(k, None)
    return None if v else coords


@dataclass(frozen=True)
class AbelianInvariants:
    """Canonical form of a finitely generated abelian group: free rank plus
    a torsion divisor chain d1 | d2 | ... with every entry >= 2."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion entries must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion is not a divisor chain")

    @classmethod
    def trivial(cls) -> "AbelianInvariants":
        return cls(0, ())

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return prod(self.torsion) if self.torsion else 1

    def describe(self) -> str:
        torsion = ",".join(str(d) for d in self.torsion)
        return f"free_rank={self.free_rank} torsion=[{torsion}]"

    def __str__(self):
        return self.describe()


def abelian_invariants(gen_count: int, relations) -> AbelianInvariants:
    """Invariants of the abelian group on `gen_count` generators subject to
    the relation rows (each row: exponents of one relation)."""
    if isinstance(relations, IntMatrix):
        rel = relations
    else:
        rel = IntMatrix(relations, cols=gen_count)
    if rel.rows and rel.cols != gen_count:
        raise ValueError("relation width does not match generator count")
    d, _, _ = snf(rel)
    diag = [d.data[i][i] for i in range(min(d.rows, d.cols))]
    nonzero = [x for x in diag if x]
    torsion = [x for x in nonzero if x > 1]
    return AbelianInvariants(gen_count - len(nonzero), tuple(torsion))


def determinant_divisor(matrix: IntMatrix, k: int) -> int:
    """gcd of all k x k minors (0 for none); brute force, for cross-checks."""
    g = 0
    for rows in combinations(range(matrix.rows), k):
        for cols in combinations(range(matrix.cols), k):
            sub = IntMatrix([[matrix.data[i][j] for j in cols] for i in rows])
            g = gcd(g, sub.det())
    return g
