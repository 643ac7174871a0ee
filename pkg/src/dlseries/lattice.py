"""Exact integer lattice arithmetic.

Matrices are immutable :class:`IntMatrix` values holding Python integers, so
nothing ever overflows.  The Smith normal form is the workhorse: cokernels,
membership tests, kernels, intersections and bases of sublattices are all read
off from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, prod
from typing import Iterable, Iterator, Sequence

from .errors import InfiniteCokernel, NotContained, RankMismatch

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """A rows x cols integer matrix stored row-major as nested tuples."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise RankMismatch(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        cols = tuple(tuple(int(x) for x in c) for c in columns)
        for c in cols:
            if len(c) != rows:
                raise RankMismatch("column length does not match row count")
        return cls(rows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls(n, n, tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries[ij[0]][ij[1]]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(self.columns()))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise RankMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = other.columns()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries),
        )

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise RankMismatch("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def _same_shape(self, other: IntMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise RankMismatch("matrix shapes differ")

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise RankMismatch("row counts differ")
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(r + s for r, s in zip(self.entries, other.entries)))

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise RankMismatch("column counts differ")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def block_diag(self, other: IntMatrix) -> IntMatrix:
        top = self.hstack(IntMatrix.zeros(self.rows, other.cols))
        bottom = IntMatrix.zeros(other.rows, self.cols).hstack(other)
        return top.vstack(bottom)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __pow__(self, k: int) -> IntMatrix:
        if k < 0:
            return inverse_unimodular(self) ** (-k)
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.entries) + "]"


def determinant(M: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    if not M.is_square():
        raise RankMismatch("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return 1
    a = [list(r) for r in M.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------- SNF


@dataclass(frozen=True)
class SnfDecomposition:
    """U @ M @ V == D with U, V unimodular and diag(D) a divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(M: IntMatrix) -> SnfDecomposition:
    m, n = M.rows, M.cols
    a = [list(r) for r in M.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            a[i], a[j] = a[j], a[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, c: int) -> None:  # row_dst += c * row_src
        if c:
            a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, c: int) -> None:  # col_dst += c * col_src
        if c:
            for r in a:
                r[dst] += c * r[src]
            for r in V:
                r[dst] += c * r[src]

    for t in range(min(m, n)):
        pivot = _smallest_entry(a, t, t, m, n)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                # a remainder survived: move the smallest entry of row/column t to the pivot
                cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, pi, pj = min(cands)
                swap_rows(t, pi)
                swap_cols(t, pj)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return SnfDecomposition(IntMatrix.from_rows(U, m), IntMatrix.from_rows(a, n), IntMatrix.from_rows(V, n))


def _smallest_entry(a: list[list[int]], r0: int, c0: int, m: int, n: int) -> tuple[int, int] | None:
    best: tuple[int, int, int] | None = None
    for i in range(r0, m):
        for j in range(c0, n):
            if a[i][j] and (best is None or abs(a[i][j]) < best[0]):
                best = (abs(a[i][j]), i, j)
    return None if best is None else (best[1], best[2])


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    """Inverse of a square matrix with determinant +-1."""
    snf = smith_normal_form(M)
    if not M.is_square() or any(d != 1 for d in snf.diagonal):
        raise ValueError("matrix is not unimodular")
    # U M V = I  =>  M^{-1} = V U
    return snf.V @ snf.U


def solve_rational(M: IntMatrix, b: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Some rational solution x of M x = b, or None."""
    snf = smith_normal_form(M)
    c = snf.U.apply(b)
    diag = snf.diagonal
    r = snf.rank
    if any(c[i] != 0 for i in range(r, M.rows)):
        return None
    y = [Fraction(c[i], diag[i]) if i < r else Fraction(0) for i in range(M.cols)]
    return tuple(sum((snf.V[i, j] * y[j] for j in range(M.cols)), Fraction(0)) for i in range(M.cols))


def solve_integral(M: IntMatrix, b: Sequence[int]) -> Vector | None:
    """Some integer solution x of M x = b, or None when b is not in the image."""
    x = solve_rational(M, b)
    if x is None or any(v.denominator != 1 for v in x):
        return None
    return tuple(int(v) for v in x)


def kernel_basis(M: IntMatrix) -> list[Vector]:
    """A Z-basis of {x : M x = 0}; the kernel is saturated so this is exact."""
    snf = smith_normal_form(M)
    r = snf.rank
    return [snf.V.column(j) for j in range(r, M.cols)]


# --------------------------------------------------------------- finite groups


def reduce_qz(x: Fraction | int) -> Fraction:
    """Representative of x in Q/Z lying in [0, 1)."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """prod Z/d_i presented as a quotient of a lattice.

    ``projection`` maps a vector of the ambient lattice (in the coordinates of
    ``lattice_basis`` when that is given, else standard coordinates of Z^n) to
    generator coordinates, to be read modulo the invariant factors.
    """

    invariant_factors: tuple[int, ...]
    projection: IntMatrix
    ambient_rank: int
    lattice_basis: IntMatrix | None = None

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def reduce(self, coords: Sequence[int]) -> Vector:
        return tuple(c % d for c, d in zip(coords, self.invariant_factors))

    def project(self, vec: Sequence[int]) -> Vector:
        """Image of an ambient lattice vector in the group."""
        if len(vec) != self.ambient_rank:
            raise RankMismatch("vector does not live in the ambient lattice")
        if self.lattice_basis is not None:
            coords = solve_integral(self.lattice_basis, vec)
            if coords is None:
                raise NotContained(f"{tuple(vec)} is not in the lattice being quotiented")
            vec = coords
        return self.reduce(self.projection.apply(vec))

    def add(self, g: Sequence[int], h: Sequence[int]) -> Vector:
        return self.reduce([a + b for a, b in zip(g, h)])

    def element_order(self, g: Sequence[int]) -> int:
        o = 1
        for c, d in zip(g, self.invariant_factors):
            k = d // gcd(c, d)
            o = o * k // gcd(o, k)
        return o

    def elements(self) -> Iterator[Vector]:
        return product(*(range(d) for d in self.invariant_factors))

    def generator_lift(self, k: int) -> Vector:
        """An ambient vector projecting to the k-th generator."""
        target = [int(i == k) for i in range(len(self.invariant_factors))]
        # projection is surjective onto prod Z/d_i; extend by the relations to solve exactly
        rel = IntMatrix.diagonal(list(self.invariant_factors)) if self.invariant_factors else None
        big = self.projection if rel is None else self.projection.hstack(rel)
        sol = solve_integral(big, target)
        if sol is None:
            raise ValueError("projection is not surjective")
        x = sol[: self.projection.cols]
        if self.lattice_basis is not None:
            x = self.lattice_basis.apply(x)
        return tuple(x)

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def _cokernel_parts(M: IntMatrix) -> tuple[list[int], IntMatrix, int]:
    snf = smith_normal_form(M)
    diag = list(snf.diagonal) + [0] * (M.rows - min(M.rows, M.cols))
    keep = [i for i, d in enumerate(diag) if d != 1]
    torsion = [i for i in keep if diag[i] != 0]
    free = len(keep) - len(torsion)
    proj = IntMatrix.from_rows([snf.U.row(i) for i in torsion], M.rows)
    return [diag[i] for i in torsion], proj, free


def cokernel(M: IntMatrix, require_finite: bool = True) -> FiniteAbelianGroup:
    """Z^rows / image(M).  With ``require_finite=False`` the free part is discarded."""
    factors, proj, free = _cokernel_parts(M)
    if free and require_finite:
        raise InfiniteCokernel(f"cokernel has free rank {free}")
    return FiniteAbelianGroup(tuple(factors), proj, M.rows)


def cokernel_structure(M: IntMatrix) -> tuple[tuple[int, ...], int]:
    """(torsion invariant factors, free rank) of Z^rows / image(M)."""
    factors, _, free = _cokernel_parts(M)
    return tuple(factors), free


def hom_group_elements(G: FiniteAbelianGroup) -> list[tuple[Fraction, ...]]:
    """All homomorphisms G -> Q/Z as their values on the generators, in lexicographic order."""
    return [tuple(Fraction(c, d) for c, d in zip(cs, G.invariant_factors)) for cs in G.elements()]


# ------------------------------------------------------------------ sublattices


@dataclass(frozen=True)
class Sublattice:
    """The subgroup of Z^ambient_rank spanned by ``generators``."""

    ambient_rank: int
    generators: tuple[Vector, ...]

    def __post_init__(self) -> None:
        for g in self.generators:
            if len(g) != self.ambient_rank:
                raise RankMismatch(f"generator {g} not in Z^{self.ambient_rank}")

    @classmethod
    def of(cls, ambient_rank: int, gens: Iterable[Sequence[int]]) -> Sublattice:
        return cls(ambient_rank, tuple(tuple(int(x) for x in g) for g in gens))

    @classmethod
    def full(cls, n: int) -> Sublattice:
        return cls.of(n, IntMatrix.identity(n).columns())

    @classmethod
    def zero(cls, n: int) -> Sublattice:
        return cls(n, ())

    @classmethod
    def image(cls, M: IntMatrix) -> Sublattice:
        return cls.of(M.rows, M.columns())

    def matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.generators, self.ambient_rank)

    def basis(self) -> tuple[Vector, ...]:
        """A Z-basis: the nonzero columns of U^{-1} D for the SNF U G V = D."""
        if not self.generators:
            return ()
        snf = smith_normal_form(self.matrix())
        Uinv = inverse_unimodular(snf.U)
        return tuple(tuple(d * x for x in Uinv.column(i)) for i, d in enumerate(snf.diagonal) if d)

    def basis_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.basis(), self.ambient_rank)

    @property
    def rank(self) -> int:
        return len(self.basis())

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.ambient_rank:
            raise RankMismatch("vector rank mismatch")
        if not any(x):
            return True
        if not self.generators:
            return False
        return solve_integral(self.matrix(), x) is not None

    def contains_lattice(self, other: Sublattice) -> bool:
        return all(self.contains(g) for g in other.generators)

    def same_as(self, other: Sublattice) -> bool:
        return self.contains_lattice(other) and other.contains_lattice(self)

    def saturation(self) -> Sublattice:
        """(Q-span of self) intersected with Z^n."""
        if not self.generators:
            return self
        snf = smith_normal_form(self.matrix())
        Uinv = inverse_unimodular(snf.U)
        return Sublattice.of(self.ambient_rank, [Uinv.column(i) for i in range(snf.rank)])

    def index_in_saturation(self) -> int:
        return prod(d for d in smith_normal_form(self.matrix()).diagonal if d) if self.generators else 1

    def map(self, M: IntMatrix) -> Sublattice:
        if M.cols != self.ambient_rank:
            raise RankMismatch("map does not start at the ambient lattice")
        return Sublattice.of(M.rows, [M.apply(g) for g in self.generators])

    def __str__(self) -> str:
        return "<" + ", ".join(str(b) for b in self.basis()) + ">"


def sublattice_sum(A: Sublattice, B: Sublattice) -> Sublattice:
    if A.ambient_rank != B.ambient_rank:
        raise RankMismatch("sublattices live in different ambient lattices")
    return Sublattice.of(A.ambient_rank, A.basis() + B.basis())


def sublattice_intersection(A: Sublattice, B: Sublattice) -> Sublattice:
    """A ∩ B via the kernel of [A | -B]."""
    if A.ambient_rank != B.ambient_rank:
        raise RankMismatch("sublattices live in different ambient lattices")
    a, b = A.basis(), B.basis()
    if not a or not b:
        return Sublattice.zero(A.ambient_rank)
    n = A.ambient_rank
    Am = IntMatrix.from_columns(a, n)
    stacked = Am.hstack(IntMatrix.from_columns(b, n).scale(-1))
    gens = [Am.apply(k[: len(a)]) for k in kernel_basis(stacked)]
    return Sublattice.of(n, gens)


def preimage(M: IntMatrix, L: Sublattice) -> Sublattice:
    """{x in Z^cols : M x in L}."""
    if M.rows != L.ambient_rank:
        raise RankMismatch("target of map is not the ambient lattice of L")
    basis = L.basis()
    stacked = M.hstack(IntMatrix.from_columns(basis, M.rows).scale(-1)) if basis else M
    return Sublattice.of(M.cols, [k[: M.cols] for k in kernel_basis(stacked)])


def quotient_by(sub1: Sublattice, sub2: Sublattice) -> FiniteAbelianGroup:
    """The finite group sub1 / sub2.

    ``sub2`` must be contained in ``sub1`` (otherwise :class:`NotContained`) and of
    the same rank (otherwise :class:`InfiniteCokernel`).  When ``sub1`` is the
    whole ambient lattice the returned projection acts on standard coordinates;
    otherwise ``project`` first expresses a vector in a basis of ``sub1``.
    """
    if sub1.ambient_rank != sub2.ambient_rank:
        raise RankMismatch("sublattices live in different ambient lattices")
    if not sub1.contains_lattice(sub2):
        raise NotContained("sub2 is not contained in sub1")
    n = sub1.ambient_rank
    b1 = sub1.basis()
    full = len(b1) == n and abs(determinant(IntMatrix.from_columns(b1, n))) == 1
    if full:
        rel = sub2.matrix() if sub2.generators else IntMatrix.zeros(n, 0)
        g = cokernel(rel)
        return g
    B1 = IntMatrix.from_columns(b1, n)
    coords = [solve_integral(B1, x) for x in sub2.generators]
    rel = IntMatrix.from_columns(coords, len(b1)) if coords else IntMatrix.zeros(len(b1), 0)
    g = cokernel(rel)
    return FiniteAbelianGroup(g.invariant_factors, g.projection, n, B1)
