"""Exact integer linear algebra on small dense matrices.

Everything runs over arbitrary-precision Python ints; there is not a
single float in this module.  Smith normal form is the engine behind
quotient lattices (with torsion), integer kernels, and solvability of
``A x = b`` over the integers.  Matrices here are tiny (ambient rank is
capped at 4 by the geometry layer, test matrices go up to 6x6), so the
implementation favours clarity and verifiability over asymptotics.

All values are immutable after construction and every function is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

Vec = tuple[int, ...]


class NotASubquotient(Exception):
    """No canonical surjection exists between the given quotients."""


def as_vec(v: Iterable[int]) -> Vec:
    return tuple(int(x) for x in v)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise ValueError(f"dot of length {len(u)} with length {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def vec_add(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a + b for a, b in zip(u, v))

def vec_sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a - b for a, b in zip(u, v))

def vec_neg(u: Sequence[int]) -> Vec:
    return tuple(-a for a in u)

def vec_scale(k: int, u: Sequence[int]) -> Vec:
    return tuple(k * a for a in u)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


class IntMatrix:
    """Immutable integer matrix, stored row-major as nested tuples."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        rows = tuple(as_vec(r) for r in rows)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != width:
                raise ValueError(f"declared {ncols} columns, rows have {width}")
            ncols = width
        elif ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n
        )

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    def row(self, i: int) -> Vec:
        return self.rows[i]

    def column(self, j: int) -> Vec:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.column(j) for j in range(other.ncols)]
        return IntMatrix(
            [[dot(r, c) for c in cols] for r in self.rows], ncols=other.ncols
        )

    def apply(self, v: Sequence[int]) -> Vec:
        """Matrix times column vector."""
        if len(v) != self.ncols:
            raise ValueError(f"vector length {len(v)}, matrix has {self.ncols} cols")
        return tuple(dot(r, v) for r in self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in r) for r in self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]}, ncols={self.ncols})"


def stack_rows(mats: Iterable[IntMatrix | Sequence[Sequence[int]]], ncols: int) -> IntMatrix:
    rows: list[Vec] = []
    for m in mats:
        rows.extend(m.rows if isinstance(m, IntMatrix) else (as_vec(r) for r in m))
    return IntMatrix(rows, ncols=ncols)


def det(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if a.nrows != a.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = a.nrows
    if n == 0:
        return 1
    m = [list(r) for r in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


class _SmithWorkspace:
    """Mutable state for the Smith reduction, tracking U, V and inverses.

    Invariants maintained by every operation:
        u @ a0 @ v == d,   uinv @ u == I,   v @ vinv == I.
    """

    def __init__(self, a: IntMatrix):
        self.m, self.n = a.nrows, a.ncols
        self.d = [list(r) for r in a.rows]
        self.u = _eye(self.m)
        self.uinv = _eye(self.m)
        self.v = _eye(self.n)
        self.vinv = _eye(self.n)

    def row_block(self, i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        """Left-multiply rows (i, j) of d by ((p,q),(r,s)); det must be +-1."""
        e = p * s - q * r
        assert e in (1, -1)
        for mat in (self.d, self.u):
            ri, rj = mat[i], mat[j]
            for c in range(len(ri)):
                ri[c], rj[c] = p * ri[c] + q * rj[c], r * ri[c] + s * rj[c]
        # uinv <- uinv @ block^{-1}, block^{-1} = e * ((s,-q),(-r,p))
        for row in self.uinv:
            ci, cj = row[i], row[j]
            row[i] = e * (s * ci - r * cj)
            row[j] = e * (-q * ci + p * cj)

    def col_block(self, i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        """Right-multiply cols (i, j) of d by ((p,q),(r,s)); det must be +-1."""
        e = p * s - q * r
        assert e in (1, -1)
        for mat in (self.d, self.v):
            for row in mat:
                ci, cj = row[i], row[j]
                row[i] = p * ci + r * cj
                row[j] = q * ci + s * cj
        # vinv <- block^{-1} @ vinv
        ri, rj = self.vinv[i], self.vinv[j]
        for c in range(len(ri)):
            a, b = ri[c], rj[c]
            ri[c] = e * (s * a - q * b)
            rj[c] = e * (-r * a + p * b)

    def negate_row(self, i: int) -> None:
        self.d[i] = [-x for x in self.d[i]]
        self.u[i] = [-x for x in self.u[i]]
        for row in self.uinv:
            row[i] = -row[i]

    def clear_col_entry(self, t: int, k: int) -> None:
        a, b = self.d[t][t], self.d[k][t]
        if a != 0 and b % a == 0:
            # elementary op keeps the pivot row untouched (no oscillation)
            self.row_block(t, k, 1, 0, -b // a, 1)
        else:
            g, x, y = xgcd(a, b)
            self.row_block(t, k, x, y, -b // g, a // g)

    def clear_row_entry(self, t: int, k: int) -> None:
        a, b = self.d[t][t], self.d[t][k]
        if a != 0 and b % a == 0:
            self.col_block(t, k, 1, -b // a, 0, 1)
        else:
            g, x, y = xgcd(a, b)
            self.col_block(t, k, x, -b // g, y, a // g)


def smith_with_inverses(
    a: IntMatrix,
) -> tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with transform inverses.

    Returns (U, D, V, Uinv, Vinv) with U*a*V = D, D diagonal with
    d1 | d2 | ... and di >= 0, U and V unimodular.
    """
    ws = _SmithWorkspace(a)
    m, n = ws.m, ws.n
    d = ws.d

    t = 0
    while t < min(m, n):
        # pick the smallest-magnitude nonzero pivot to limit entry swell
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] != 0 and (pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            ws.row_block(t, pi, 0, 1, 1, 0)
        if pj != t:
            ws.col_block(t, pj, 0, 1, 1, 0)
        while True:
            for k in range(t + 1, m):
                if d[k][t] != 0:
                    ws.clear_col_entry(t, k)
            for k in range(t + 1, n):
                if d[t][k] != 0:
                    ws.clear_row_entry(t, k)
            if all(d[k][t] == 0 for k in range(t + 1, m)) and all(
                d[t][k] == 0 for k in range(t + 1, n)
            ):
                break
        t += 1

    # enforce the divisibility chain d1 | d2 | ... by adjacent passes
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            a_i, b_i = d[i][i], d[i + 1][i + 1]
            if b_i % a_i != 0:
                changed = True
                ws.col_block(i, i + 1, 1, 0, 1, 1)  # col_i += col_{i+1}
                while d[i + 1][i] != 0 or d[i][i + 1] != 0:
                    if d[i + 1][i] != 0:
                        ws.clear_col_entry(i, i + 1)
                    if d[i][i + 1] != 0:
                        ws.clear_row_entry(i, i + 1)

    for i in range(t):
        if d[i][i] < 0:
            ws.negate_row(i)

    return (
        IntMatrix(ws.u, ncols=m),
        IntMatrix(ws.d, ncols=n),
        IntMatrix(ws.v, ncols=n),
        IntMatrix(ws.uinv, ncols=m),
        IntMatrix(ws.vinv, ncols=n),
    )


def snf(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: U*a*V = D, D diagonal, d1 | d2 | ..., di >= 0."""
    u, d, v, _, _ = smith_with_inverses(a)
    return u, d, v


def diagonal(d: IntMatrix) -> list[int]:
    return [d.rows[i][i] for i in range(min(d.nrows, d.ncols))]


def hnf(a: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form with zero rows dropped.

    Pivots are positive, entries below a pivot are zero, entries above
    are reduced into [0, pivot).
    """
    m, n = a.nrows, a.ncols
    rows = [list(r) for r in a.rows]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if rows[i][c] != 0 and (piv is None or abs(rows[i][c]) < abs(rows[piv][c])):
                piv = i
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, m):
            while rows[i][c] != 0:
                a_, b_ = rows[r][c], rows[i][c]
                g, x, y = xgcd(a_, b_)
                rr = [x * p + y * q for p, q in zip(rows[r], rows[i])]
                ri = [(-b_ // g) * p + (a_ // g) * q for p, q in zip(rows[r], rows[i])]
                rows[r], rows[i] = rr, ri
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [p - q * s for p, s in zip(rows[i], rows[r])]
        r += 1
    return IntMatrix(rows[:r], ncols=n)


def rank(a: IntMatrix) -> int:
    return hnf(a).nrows


def kernel(a: IntMatrix) -> IntMatrix:
    """Rows generate {x : a @ x = 0}; the result is a basis of a saturated
    sublattice of Z^ncols (possibly with zero rows, i.e. trivial kernel)."""
    _, d, v, _, _ = smith_with_inverses(a)
    m, n = a.nrows, a.ncols
    # column j of V is in the kernel iff the diagonal entry d_j is
    # absent (j >= nrows) or zero
    free = [j for j in range(n) if j >= min(m, n) or d.rows[j][j] == 0]
    return IntMatrix([v.column(j) for j in free], ncols=n)


def solve(a: IntMatrix, b: Sequence[int]) -> Optional[Vec]:
    """Any integer solution x of a @ x = b, or None when there is none."""
    if len(b) != a.nrows:
        raise ValueError(f"rhs length {len(b)}, matrix has {a.nrows} rows")
    u, d, v, _, _ = smith_with_inverses(a)
    m, n = a.nrows, a.ncols
    c = u.apply(b)
    y = [0] * n
    for i in range(m):
        di = d.rows[i][i] if i < min(m, n) else 0
        if di != 0:
            if c[i] % di != 0:
                return None
            y[i] = c[i] // di
        elif c[i] != 0:
            return None
    return v.apply(y)


def in_row_span(a: IntMatrix, v: Sequence[int]) -> bool:
    """Is v an integer combination of the rows of a?"""
    return solve(a.transpose(), v) is not None


@dataclass(frozen=True)
class Lattice:
    """The free abelian group Z^rank with its standard basis."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")

    def dual(self) -> "Lattice":
        return Lattice(self.rank)

    def zero(self) -> Vec:
        return (0,) * self.rank


class QuotientLattice:
    """Z^n modulo the subgroup generated by the rows of ``relations``.

    Normal-form coordinates are torsion coordinates (one per invariant
    factor > 1, reduced into [0, d_i)) followed by free coordinates, so
    equality of quotient elements is plain tuple comparison.  ``projection``
    maps ambient vectors onto raw coordinates (reduce afterwards);
    ``section`` is a right inverse used to lift coordinates back to the
    ambient lattice.
    """

    __slots__ = (
        "ambient",
        "relations",
        "invariant_factors",
        "free_rank",
        "projection",
        "section",
    )

    def __init__(
        self,
        ambient: Lattice,
        relations: IntMatrix,
        invariant_factors: tuple[int, ...],
        free_rank: int,
        projection: IntMatrix,
        section: IntMatrix,
    ):
        self.ambient = ambient
        self.relations = relations
        self.invariant_factors = invariant_factors
        self.free_rank = free_rank
        self.projection = projection
        self.section = section

    @property
    def coords_len(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def is_free(self) -> bool:
        return not self.invariant_factors

    @property
    def is_zero(self) -> bool:
        return self.coords_len == 0

    def zero(self) -> Vec:
        return (0,) * self.coords_len

    def reduce(self, coords: Sequence[int]) -> Vec:
        if len(coords) != self.coords_len:
            raise ValueError("bad coordinate length")
        t = len(self.invariant_factors)
        return tuple(
            c % d for c, d in zip(coords[:t], self.invariant_factors)
        ) + tuple(coords[t:])

    def project(self, v: Sequence[int]) -> Vec:
        return self.reduce(self.projection.apply(v))

    def lift(self, coords: Sequence[int]) -> Vec:
        """An ambient vector mapping to the given coordinates."""
        return self.section.apply(coords)

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return self.reduce(vec_add(a, b))

    def neg(self, a: Sequence[int]) -> Vec:
        return self.reduce(vec_neg(a))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return self.reduce(vec_sub(a, b))

    def scale(self, k: int, a: Sequence[int]) -> Vec:
        return self.reduce(vec_scale(k, a))

    def free_part(self, coords: Sequence[int]) -> Vec:
        return tuple(coords[len(self.invariant_factors):])

    def is_relation(self, v: Sequence[int]) -> bool:
        return self.project(v) == self.zero()

    def elements(self):
        """All elements (torsion groups only)."""
        if self.free_rank:
            raise ValueError("infinite quotient")
        return [tuple(c) for c in product(*(range(d) for d in self.invariant_factors))]

    def _key(self):
        return (
            self.ambient,
            self.relations,
            self.invariant_factors,
            self.free_rank,
            self.projection,
            self.section,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, QuotientLattice) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        return "QuotientLattice(" + (" + ".join(parts) if parts else "0") + ")"


def quotient(ambient: Lattice, relations: IntMatrix) -> QuotientLattice:
    """The quotient of Z^n by the subgroup generated by the relation rows."""
    if relations.ncols != ambient.rank:
        raise ValueError(
            f"relations have {relations.ncols} columns, ambient rank is {ambient.rank}"
        )
    n, r = ambient.rank, relations.nrows
    u, d, _, uinv, _ = smith_with_inverses(relations.transpose())
    k = min(n, r)
    diag = [d.rows[i][i] for i in range(k)]
    torsion_idx = [i for i in range(k) if diag[i] > 1]
    free_idx = [i for i in range(n) if i >= k or diag[i] == 0]
    kept = torsion_idx + free_idx
    projection = IntMatrix([u.row(i) for i in kept], ncols=n)
    section = IntMatrix(
        [[uinv.rows[row][i] for i in kept] for row in range(n)], ncols=len(kept)
    )
    return QuotientLattice(
        ambient,
        relations,
        tuple(diag[i] for i in torsion_idx),
        len(free_idx),
        projection,
        section,
    )


class QuotientSurjection:
    """A surjection between quotients of the same ambient lattice,
    expressed in normal-form coordinates, with a splitting when the
    target is free."""

    __slots__ = ("source", "target", "matrix", "splitting")

    def __init__(
        self,
        source: QuotientLattice,
        target: QuotientLattice,
        matrix: IntMatrix,
        splitting: IntMatrix | None,
    ):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.splitting = splitting

    def apply(self, coords: Sequence[int]) -> Vec:
        return self.target.reduce(self.matrix.apply(coords))

    def lift(self, coords: Sequence[int]) -> Vec:
        if self.splitting is None:
            raise ValueError("no splitting stored (target is not free)")
        return self.source.reduce(self.splitting.apply(coords))

    def kernel_basis(self) -> IntMatrix:
        """Generators of {c in source coords : apply(c) = 0}, free targets only."""
        return kernel(self.matrix)

    def maps_equal(self, other: "QuotientSurjection") -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        m = self.source.coords_len
        for j in range(m):
            e = tuple(1 if i == j else 0 for i in range(m))
            if self.apply(e) != other.apply(e):
                return False
        return True

    def __repr__(self) -> str:
        return f"QuotientSurjection({self.source!r} -> {self.target!r})"


def identity_surjection(q: QuotientLattice) -> QuotientSurjection:
    n = q.coords_len
    eye = IntMatrix.identity(n)
    return QuotientSurjection(q, q, eye, eye if q.is_free else None)


def canonical_surjection(
    source: QuotientLattice, target: QuotientLattice
) -> QuotientSurjection:
    """The map M/S -> M/S' induced by the identity of M, for S <= S'.

    Raises NotASubquotient when the source relations do not lie in the
    subgroup generated by the target relations.
    """
    if source.ambient != target.ambient:
        raise NotASubquotient("different ambient lattices")
    for row in source.relations.rows:
        if not in_row_span(target.relations, row):
            raise NotASubquotient(f"relation {row} not in target relations")
    matrix = target.projection @ source.section
    splitting = None
    if target.is_free:
        splitting = source.projection @ target.section
        assert (matrix @ splitting) == IntMatrix.identity(target.coords_len)
    phi = QuotientSurjection(source, target, matrix, splitting)
    # cross-check: phi . source.project == target.project on the ambient basis
    n = source.ambient.rank
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        assert phi.apply(source.project(e)) == target.project(e)
    return phi


def compose(outer: QuotientSurjection, inner: QuotientSurjection) -> QuotientSurjection:
    """outer . inner (inner applied first)."""
    if inner.target != outer.source:
        raise ValueError("surjections do not compose")
    matrix = outer.matrix @ inner.matrix
    splitting = None
    if inner.splitting is not None and outer.splitting is not None:
        splitting = inner.splitting @ outer.splitting
    return QuotientSurjection(inner.source, outer.target, matrix, splitting)
