"""Exact integer and rational linear algebra.

Everything downstream (axiom checks, homotopy searches, cohomology of hom
complexes, spectral sequences) reduces to computations with integer
matrices: Smith and Hermite normal forms, integer kernels, lattice
membership, and canonical forms of finitely generated abelian groups.
All arithmetic uses Python's arbitrary-precision integers; rationals
(``fractions.Fraction``) appear only in the trace / rational-coefficient
paths.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence


class StructuralError(ValueError):
    """Malformed input: shape mismatches, bad schema, illegal degrees."""


class HypothesisFailure(RuntimeError):
    """A mathematical hypothesis required by an operation does not hold."""


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense matrix over the integers.

    Acts on column vectors: an ``r x c`` matrix maps Z^c -> Z^r.
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise StructuralError("negative matrix dimensions")
        if len(self.entries) != self.rows:
            raise StructuralError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise StructuralError("column count mismatch")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        r = len(rows)
        if r == 0:
            if cols is None:
                cols = 0
            return IntMatrix(0, cols, ())
        c = len(rows[0]) if cols is None else cols
        return IntMatrix(r, c, tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def diagonal(diag: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        r = len(diag) if rows is None else rows
        c = len(diag) if cols is None else cols
        return IntMatrix(r, c, tuple(tuple(diag[i] if i == j and i < len(diag) else 0 for j in range(c)) for i in range(r)))

    @staticmethod
    def column(vec: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(vec), 1, tuple((int(x),) for x in vec))

    @staticmethod
    def from_columns(columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        if not columns:
            return IntMatrix.zero(rows or 0, 0)
        r = len(columns[0]) if rows is None else rows
        return IntMatrix(r, len(columns), tuple(tuple(int(col[i]) for col in columns) for i in range(r)))

    # -- basic accessors ----------------------------------------------

    def __getitem__(self, idx: tuple[int, int]) -> int:
        return self.entries[idx[0]][idx[1]]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-a for a in row) for row in self.entries))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in row) for row in self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise StructuralError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = other.transpose()
        return IntMatrix(self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ot.entries)
            for row in self.entries))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise StructuralError("vector length mismatch")
        return tuple(sum(a * x for a, x in zip(row, vec)) for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise StructuralError("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols, tuple(
            ra + rb for ra, rb in zip(self.entries, other.entries)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise StructuralError("vstack column mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(row_idx), len(col_idx), tuple(
            tuple(self.entries[i][j] for j in col_idx) for i in row_idx))

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise StructuralError("shape mismatch")

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


def block_matrix(blocks: Sequence[Sequence[Optional[IntMatrix]]],
                 row_sizes: Sequence[int], col_sizes: Sequence[int]) -> IntMatrix:
    """Assemble a matrix from a grid of blocks; ``None`` means a zero block."""
    rows = sum(row_sizes)
    cols = sum(col_sizes)
    data = [[0] * cols for _ in range(rows)]
    r0 = 0
    for bi, rsz in enumerate(row_sizes):
        c0 = 0
        for bj, csz in enumerate(col_sizes):
            blk = blocks[bi][bj]
            if blk is not None:
                if blk.rows != rsz or blk.cols != csz:
                    raise StructuralError("block size mismatch")
                for i in range(rsz):
                    for j in range(csz):
                        data[r0 + i][c0 + j] = blk.entries[i][j]
            c0 += csz
        r0 += rsz
    return IntMatrix.from_rows(data, cols)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with unimodular transforms.

    Returns ``(S, U, V)`` with ``U @ m @ V == S``, ``S`` diagonal with a
    divisibility chain ``d_1 | d_2 | ...`` of nonnegative entries, and
    ``det(U), det(V) = +-1``.  Pivot selection takes a least |value| entry,
    which keeps intermediate growth tame at these problem sizes.
    """
    a = [list(row) for row in m.entries]
    rows, cols = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

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

    def add_row(src, dst, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while True:
        # locate smallest nonzero entry in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(a[i][j])
                if x != 0 and (best is None or x < best):
                    best = x
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t
        while True:
            progress = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t] != 0:  # remainder smaller than pivot: swap up
                        swap_rows(t, i)
                        progress = True
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        progress = True
            if not progress:
                clean = all(a[i][t] == 0 for i in range(t + 1, rows)) and \
                    all(a[t][j] == 0 for j in range(t + 1, cols))
                if clean:
                    break
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce the divisibility chain
    n = min(rows, cols)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if y != 0 and x != 0 and y % x != 0:
                # standard trick: fold entry (i+1,i+1) into position (i,i)
                add_col(i + 1, i, 1)
                # re-reduce the 2x2 corner
                while a[i + 1][i] != 0:
                    q = a[i][i] // a[i + 1][i] if a[i + 1][i] != 0 else 0
                    if a[i][i] != 0 and abs(a[i + 1][i]) <= abs(a[i][i]):
                        q = a[i][i] // a[i + 1][i]
                        add_row(i + 1, i, -q)
                    if a[i][i] == 0:
                        swap_rows(i, i + 1)
                        continue
                    if a[i + 1][i] != 0:
                        q = a[i + 1][i] // a[i][i]
                        add_row(i, i + 1, -q)
                        if a[i + 1][i] != 0:
                            swap_rows(i, i + 1)
                # clear the (i, i+1) entry created by the column op
                if a[i][i + 1] != 0:
                    q = a[i][i + 1] // a[i][i]
                    add_col(i, i + 1, -q)
                if a[i][i] < 0:
                    negate_row(i)
                if a[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    S = IntMatrix.from_rows(a, cols)
    U = IntMatrix.from_rows(u, rows)
    V = IntMatrix.from_rows(v, cols)
    return S, U, V


def _row_hnf(m: IntMatrix) -> IntMatrix:
    """Row Hermite normal form (row-style echelon, positive pivots,
    entries above each pivot reduced into ``[0, pivot)``)."""
    a = [list(row) for row in m.entries]
    rows, cols = m.rows, m.cols
    r = 0
    for c in range(cols):
        # find pivot
        piv = None
        for i in range(r, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        # eliminate below via gcd steps
        for i in range(r + 1, rows):
            while a[i][c] != 0:
                q = a[r][c] // a[i][c]
                a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                a[r], a[i] = a[i], a[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    # drop zero rows
    nz = [row for row in a if any(row)]
    return IntMatrix.from_rows(nz, cols)


def column_hnf(m: IntMatrix) -> IntMatrix:
    """Canonical basis of the column lattice of ``m`` (columns of result)."""
    return _row_hnf(m.transpose()).transpose()


def kernel(m: IntMatrix) -> IntMatrix:
    """Canonical basis (columns) of the integer kernel ``{x : m x = 0}``."""
    S, _, V = smith_normal_form(m)
    n = min(m.rows, m.cols)
    free = [j for j in range(m.cols) if j >= n or S.entries[j][j] == 0]
    if not free:
        return IntMatrix.zero(m.cols, 0)
    cols = [V.col(j) for j in free]
    return column_hnf(IntMatrix.from_columns(cols, m.cols))


def image_membership(m: IntMatrix, v: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Solve ``m x = v`` over the integers; a witness ``x`` or ``None``."""
    if len(v) != m.rows:
        raise StructuralError("vector length does not match row count")
    S, U, V = smith_normal_form(m)
    w = U.apply(v)
    n = min(m.rows, m.cols)
    y = [0] * m.cols
    for i in range(m.rows):
        d = S.entries[i][i] if i < n else 0
        if d == 0:
            if w[i] != 0:
                return None
        else:
            if w[i] % d != 0:
                return None
            y[i] = w[i] // d
    return V.apply(y)


def solve_modulo(m: IntMatrix, v: Sequence[int], relations: Optional[IntMatrix]) -> Optional[tuple[int, ...]]:
    """Solve ``m x = v`` modulo the column lattice of ``relations``.

    Returns the ``x`` part of a witness of ``m x + relations y = v``.
    """
    if relations is None or relations.cols == 0:
        return image_membership(m, v)
    big = m.hstack(relations)
    sol = image_membership(big, v)
    if sol is None:
        return None
    return sol[: m.cols]


def lattice_sum(rows: int, mats: Iterable[IntMatrix]) -> IntMatrix:
    """Canonical basis of the lattice spanned by all columns of ``mats``."""
    acc = IntMatrix.zero(rows, 0)
    for m in mats:
        if m.rows != rows:
            raise StructuralError("lattice generator height mismatch")
        acc = acc.hstack(m)
    return column_hnf(acc)


def lattice_contains(lat: IntMatrix, vec: Sequence[int]) -> bool:
    return image_membership(lat, vec) is not None


def lattices_equal(a: IntMatrix, b: IntMatrix) -> bool:
    return column_hnf(a).entries == column_hnf(b).entries


def preimage_lattice(m: IntMatrix, target: IntMatrix) -> IntMatrix:
    """Basis of ``{x : m x in column-lattice(target)}``."""
    if target.cols == 0:
        return kernel(m)
    stacked = m.hstack(target.scale(-1))
    ker = kernel(stacked)
    xs = ker.submatrix(range(m.cols), range(ker.cols))
    return column_hnf(xs)


def coordinates_in(basis: IntMatrix, vec: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of ``vec`` in the column basis; raises if not in the span."""
    sol = image_membership(basis, vec)
    if sol is None:
        raise StructuralError("vector not contained in the given lattice")
    return sol


def reduce_mod_lattice(vec: Sequence[int], lattice: IntMatrix) -> tuple[int, ...]:
    """Canonical representative of ``vec`` modulo the column lattice.

    Uses the column HNF of the lattice: each pivot row is reduced into
    ``[0, pivot)`` from the bottom pivot up, which yields a unique
    representative per residue class.
    """
    if lattice.cols == 0:
        return tuple(int(x) for x in vec)
    h = column_hnf(lattice)
    v = list(vec)
    # pivot row of each HNF column = first nonzero entry; columns are
    # staircase-shaped, so reducing pivot rows in increasing order leaves
    # earlier pivots untouched and the representative is unique.
    pivots = []
    for j in range(h.cols):
        col = h.col(j)
        piv = min(i for i in range(len(col)) if col[i] != 0)
        pivots.append((piv, j))
    for piv, j in sorted(pivots):
        p = h.entries[piv][j]
        q = v[piv] // p
        if q:
            for i in range(len(v)):
                v[i] -= q * h.entries[i][j]
    return tuple(v)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FGAbGroup:
    """Canonical form of a finitely generated abelian group.

    ``torsion`` is the chain of invariant factors d_1 | d_2 | ... with each
    d_i >= 2.  The canonical form is a complete isomorphism invariant.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise StructuralError("negative free rank")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise StructuralError("invariant factors must be >= 2")
            if i and self.torsion[i - 1] != 0 and d % self.torsion[i - 1] != 0:
                raise StructuralError("invariant factors must form a divisibility chain")

    @staticmethod
    def trivial() -> "FGAbGroup":
        return FGAbGroup(0, ())

    @staticmethod
    def free(rank: int) -> "FGAbGroup":
        return FGAbGroup(rank, ())

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, other: "FGAbGroup") -> "FGAbGroup":
        if not self.torsion and not other.torsion:
            return FGAbGroup(self.free_rank + other.free_rank, ())
        diag = list(self.torsion) + list(other.torsion)
        rel = IntMatrix.diagonal(diag, rows=len(diag), cols=len(diag))
        inner = group_from_presentation(len(diag), rel)
        return FGAbGroup(self.free_rank + other.free_rank + inner.free_rank, inner.torsion)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def group_from_presentation(n_generators: int, relations: IntMatrix) -> FGAbGroup:
    """The group ``Z^n / column-lattice(relations)`` in canonical form."""
    if relations.rows != n_generators:
        raise StructuralError("relation matrix height mismatch")
    if relations.cols == 0:
        return FGAbGroup(n_generators, ())
    S, _, _ = smith_normal_form(relations)
    n = min(relations.rows, relations.cols)
    diag = [S.entries[i][i] for i in range(n)]
    nonzero = [d for d in diag if d != 0]
    torsion = tuple(d for d in nonzero if d >= 2)
    return FGAbGroup(n_generators - len(nonzero), torsion)


def hom_group_is_zero(a: FGAbGroup, b: FGAbGroup) -> bool:
    """Whether Hom(a, b) = 0 for f.g. abelian groups in canonical form."""
    b_trivial = b.is_trivial()
    if a.free_rank > 0 and not b_trivial:
        return False
    for d in a.torsion:
        # Hom(Z/d, b) = b[d]
        if b.free_rank > 0:
            pass  # free part has no d-torsion
        for e in b.torsion:
            if gcd(d, e) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# Complexes of (presented) abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FGAbComplex:
    """Bounded cochain complex of based free Z-modules, degree +1 differential.

    ``ranks[i]`` is the rank in degree ``lo + i``; ``diffs[i]`` maps degree
    ``lo + i`` to ``lo + i + 1`` (its shape is ranks[i+1] x ranks[i]; the top
    differential maps to 0 and is omitted).  ``relations`` optionally carries
    a per-degree column lattice that all computations work modulo; the
    default (all ``None``) is the plain free case.  Consecutive differentials
    compose to zero (modulo relations when present).
    """

    lo: int
    hi: int
    ranks: tuple[int, ...]
    diffs: tuple[IntMatrix, ...]
    relations: tuple[Optional[IntMatrix], ...] = ()

    def __post_init__(self) -> None:
        n = self.hi - self.lo + 1
        if self.hi < self.lo - 1:
            raise StructuralError("bad degree range")
        if len(self.ranks) != n:
            raise StructuralError("rank list length mismatch")
        if len(self.diffs) != max(n - 1, 0):
            raise StructuralError("differential list length mismatch")
        if self.relations and len(self.relations) != n:
            raise StructuralError("relations list length mismatch")
        for i, d in enumerate(self.diffs):
            if d.cols != self.ranks[i] or d.rows != self.ranks[i + 1]:
                raise StructuralError(f"differential shape mismatch at degree {self.lo + i}")

    @staticmethod
    def zero() -> "FGAbComplex":
        return FGAbComplex(0, -1, (), ())

    @staticmethod
    def concentrated(degree: int, rank: int, relation: Optional[IntMatrix] = None) -> "FGAbComplex":
        rel = (relation,) if relation is not None else ()
        return FGAbComplex(degree, degree, (rank,), (), rel)

    def rank(self, degree: int) -> int:
        if degree < self.lo or degree > self.hi:
            return 0
        return self.ranks[degree - self.lo]

    def diff(self, degree: int) -> IntMatrix:
        """Differential out of ``degree`` (zero matrix outside the range)."""
        if self.lo <= degree < self.hi:
            return self.diffs[degree - self.lo]
        return IntMatrix.zero(self.rank(degree + 1), self.rank(degree))

    def relation(self, degree: int) -> Optional[IntMatrix]:
        if not self.relations or degree < self.lo or degree > self.hi:
            return None
        rel = self.relations[degree - self.lo]
        if rel is not None and rel.cols == 0:
            return None
        return rel

    def has_relations(self) -> bool:
        return any(self.relation(d) is not None for d in range(self.lo, self.hi + 1))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def d_squared_is_zero(self) -> bool:
        for i in range(self.lo, self.hi - 1):
            comp = self.diff(i + 1) @ self.diff(i)
            rel = self.relation(i + 2)
            if rel is None:
                if not comp.is_zero():
                    return False
            else:
                for j in range(comp.cols):
                    if not lattice_contains(rel, comp.col(j)):
                        return False
        return True

    def validate(self) -> None:
        if not self.d_squared_is_zero():
            raise StructuralError("differential does not square to zero")


def cohomology(x: FGAbComplex) -> dict[int, FGAbGroup]:
    """Degreewise cohomology in canonical invariant-factor form."""
    out: dict[int, FGAbGroup] = {}
    for deg in x.degrees():
        out[deg] = cohomology_at(x, deg)
    return out


def _cycles_at(x: FGAbComplex, deg: int) -> IntMatrix:
    """Basis of {v in degree deg : d v = 0 modulo relations above}."""
    d = x.diff(deg)
    rel_above = x.relation(deg + 1)
    if rel_above is None:
        return kernel(d)
    return preimage_lattice(d, rel_above)


def _boundaries_at(x: FGAbComplex, deg: int) -> IntMatrix:
    """Generators (not reduced) of the boundary-plus-relation lattice."""
    n = x.rank(deg)
    gens: list[IntMatrix] = []
    if deg - 1 >= x.lo:
        gens.append(x.diff(deg - 1))
    rel = x.relation(deg)
    if rel is not None:
        gens.append(rel)
    if not gens:
        return IntMatrix.zero(n, 0)
    return lattice_sum(n, gens)


def cohomology_at(x: FGAbComplex, deg: int) -> FGAbGroup:
    z = _cycles_at(x, deg)
    b = _boundaries_at(x, deg)
    # express boundaries in cycle coordinates
    rel_cols = []
    for j in range(b.cols):
        rel_cols.append(coordinates_in(z, b.col(j)))
    rel = IntMatrix.from_columns(rel_cols, z.cols)
    return group_from_presentation(z.cols, rel)


@dataclass(frozen=True)
class Subquotient:
    """A subquotient ``span(cycles)/span(boundaries)`` of some Z^n.

    Carries enough structure to canonicalize elements of the quotient and to
    express induced maps: ``cycles`` is a column basis of the subgroup,
    ``boundaries`` gives the divided-out sublattice in cycle coordinates.
    """

    ambient_rank: int
    cycles: IntMatrix       # n x k, basis of the subgroup
    boundaries: IntMatrix   # k x m, relations in cycle coordinates

    @property
    def n_generators(self) -> int:
        return self.cycles.cols

    def group(self) -> FGAbGroup:
        return group_from_presentation(self.cycles.cols, self.boundaries)

    def classify(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Cycle-coordinates of an ambient vector (must lie in the subgroup)."""
        return coordinates_in(self.cycles, vec)

    def is_zero_class(self, vec: Sequence[int]) -> bool:
        coords = self.classify(vec)
        return image_membership(self.boundaries, coords) is not None

    def classes_equal(self, v: Sequence[int], w: Sequence[int]) -> bool:
        return self.is_zero_class([a - b for a, b in zip(v, w)])

    def lift(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Ambient representative of a class given in cycle coordinates."""
        return self.cycles.apply(coords)


def subquotient_at(x: FGAbComplex, deg: int) -> Subquotient:
    z = _cycles_at(x, deg)
    b = _boundaries_at(x, deg)
    rel_cols = [coordinates_in(z, b.col(j)) for j in range(b.cols)]
    return Subquotient(x.rank(deg), z, IntMatrix.from_columns(rel_cols, z.cols))


def induced_map(source: Subquotient, target: Subquotient, ambient_map: IntMatrix) -> IntMatrix:
    """Matrix of the map induced on subquotients by ``ambient_map``.

    Requires that the map send cycles to cycles; boundaries are allowed to
    land anywhere in the target boundary lattice.
    """
    cols = []
    for j in range(source.cycles.cols):
        image = ambient_map.apply(source.cycles.col(j))
        cols.append(target.classify(image))
    return IntMatrix.from_columns(cols, target.cycles.cols)


def induced_map_is_iso(source: Subquotient, target: Subquotient, ambient_map: IntMatrix) -> bool:
    """Whether the induced map of subquotients is an isomorphism."""
    f = induced_map(source, target, ambient_map)
    # surjective: image of f plus target boundaries spans all generators
    span = lattice_sum(target.n_generators, [f, target.boundaries])
    for i in range(target.n_generators):
        e = [1 if r == i else 0 for r in range(target.n_generators)]
        if not lattice_contains(span, e):
            return False
    # injective: preimage of target boundaries is contained in source boundaries
    pre = preimage_lattice(f, target.boundaries)
    for j in range(pre.cols):
        if image_membership(source.boundaries, pre.col(j)) is None:
            return False
    return True


def euler_characteristic(x: FGAbComplex) -> int:
    total = 0
    for deg in x.degrees():
        rel = x.relation(deg)
        if rel is not None:
            raise StructuralError("euler characteristic needs a free complex")
        total += (-1) ** deg * x.rank(deg)
    return total


def mapping_cone(maps: dict[int, IntMatrix], a: FGAbComplex, b: FGAbComplex) -> FGAbComplex:
    """Mapping cone of a chain map ``a -> b`` given by per-degree matrices.

    Cone^n = A^{n+1} (+) B^n with differential [[-d_A, 0], [f, d_B]].
    """
    if a.hi < a.lo and b.hi < b.lo:
        return FGAbComplex.zero()
    lo = min(a.lo - 1, b.lo)
    hi = max(a.hi - 1, b.hi)
    ranks = []
    rels: list[Optional[IntMatrix]] = []
    for n in range(lo, hi + 1):
        ranks.append(a.rank(n + 1) + b.rank(n))
        ra = a.relation(n + 1)
        rb = b.relation(n)
        if ra is None and rb is None:
            rels.append(None)
        else:
            ra_m = ra if ra is not None else IntMatrix.zero(a.rank(n + 1), 0)
            rb_m = rb if rb is not None else IntMatrix.zero(b.rank(n), 0)
            rels.append(block_matrix([[ra_m, None], [None, rb_m]],
                                     [a.rank(n + 1), b.rank(n)], [ra_m.cols, rb_m.cols]))
    diffs = []
    for n in range(lo, hi):
        f_n = maps.get(n + 1, IntMatrix.zero(b.rank(n + 1), a.rank(n + 1)))
        blk = block_matrix(
            [[a.diff(n + 1).scale(-1), None], [f_n, b.diff(n)]],
            [a.rank(n + 2), b.rank(n + 1)], [a.rank(n + 1), b.rank(n)])
        diffs.append(blk)
    use_rels = tuple(rels) if any(r is not None for r in rels) else ()
    return FGAbComplex(lo, hi, tuple(ranks), tuple(diffs), use_rels)


def is_acyclic(x: FGAbComplex) -> bool:
    return all(g.is_trivial() for g in cohomology(x).values())


# ---------------------------------------------------------------------------
# Rational linear algebra (trace and Q-coefficient paths only)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QMatrix:
    """Immutable dense matrix over the rationals."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Fraction | int]], cols: Optional[int] = None) -> "QMatrix":
        r = len(rows)
        if r == 0:
            return QMatrix(0, cols or 0, ())
        c = len(rows[0]) if cols is None else cols
        return QMatrix(r, c, tuple(tuple(Fraction(x) for x in row) for row in rows))

    @staticmethod
    def from_int(m: IntMatrix) -> "QMatrix":
        return QMatrix.from_rows(m.entries, m.cols)

    @staticmethod
    def identity(n: int) -> "QMatrix":
        return QMatrix(n, n, tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise StructuralError("shape mismatch")
        ot = list(zip(*other.entries)) if other.entries else [()] * other.cols
        return QMatrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in ot)
            for row in self.entries))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def rank(self) -> int:
        a = [list(row) for row in self.entries]
        r = 0
        for c in range(self.cols):
            piv = None
            for i in range(r, self.rows):
                if a[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
            for i in range(self.rows):
                if i != r and a[i][c] != 0:
                    factor = a[i][c]
                    a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == self.rows:
                break
        return r

    def solve(self, v: Sequence[Fraction | int]) -> Optional[tuple[Fraction, ...]]:
        """One rational solution of ``self @ x = v`` (or None)."""
        a = [list(row) + [Fraction(val)] for row, val in zip(self.entries, (Fraction(x) for x in v))]
        if self.rows == 0:
            return tuple(Fraction(0) for _ in range(self.cols))
        rows, cols = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(cols):
            piv = None
            for i in range(r, rows):
                if a[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
            for i in range(rows):
                if i != r and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        for i in range(r, rows):
            if a[i][cols] != 0:
                return None
        x = [Fraction(0)] * cols
        for i, c in enumerate(pivots):
            x[c] = a[i][cols]
        return tuple(x)


def rational_trace(m: QMatrix | IntMatrix) -> Fraction:
    """Trace of a square matrix over Q."""
    if m.rows != m.cols:
        raise StructuralError("trace requires a square matrix")
    return sum((Fraction(m.entries[i][i]) for i in range(m.rows)), Fraction(0))
