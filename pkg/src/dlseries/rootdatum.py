"""Based root data, Frobenius twists, Weyl groups and the auxiliary data.

Conventions
-----------
* X and Y are Z^n with the dot product as pairing.
* Simple reflections are numbered 1..l in words and sequences; 0 stands for
  the identity in a sequence over S-bar.
* The Weyl group acts on Y through the matrices stored on :class:`WeylElement`
  and on X through the inverse transpose.
* A twist ``tau`` is a matrix on Y; the Frobenius acts on Y as ``q * tau`` and
  on X as ``q * tau^T``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import (
    CapExceeded,
    InvalidCartan,
    InvalidTwist,
    NonCrystallographic,
    NotComparable,
    TwistNotLiftable,
    UnknownType,
)
from .lattice import (
    IntMatrix,
    Sublattice,
    Vector,
    cokernel_structure,
    inverse_unimodular,
    kernel_basis,
    smith_normal_form,
    solve_integral,
)

DEFAULT_WEYL_CAP = 10**6
Seq = tuple[int, ...]


def pair(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(x, y))


# ------------------------------------------------------------------ root data


@dataclass(frozen=True)
class RootDatum:
    """Roots and coroots are aligned; the first ``len(simple)`` of each are simple.

    Positive roots come first (simple ones leading), negatives follow in the same
    order.  ``name`` is descriptive only and ignored by equality.
    """

    rank: int
    roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    simple: tuple[int, ...]
    name: str = field(default="", compare=False)

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple)

    @property
    def n_positive(self) -> int:
        return len(self.roots) // 2

    @property
    def positive(self) -> range:
        return range(self.n_positive)

    def simple_root(self, i: int) -> Vector:
        """The i-th simple root, 1-based."""
        return self.roots[self.simple[i - 1]]

    def simple_coroot(self, i: int) -> Vector:
        return self.coroots[self.simple[i - 1]]

    @cached_property
    def cartan(self) -> tuple[tuple[int, ...], ...]:
        l = self.semisimple_rank
        return tuple(tuple(pair(self.simple_root(i), self.simple_coroot(j)) for j in range(1, l + 1))
                     for i in range(1, l + 1))

    def reflection_Y(self, k: int) -> IntMatrix:
        """Matrix on Y of the reflection attached to root index k: lam -> lam - <a, lam> a_check."""
        a, ac = self.roots[k], self.coroots[k]
        n = self.rank
        return IntMatrix.from_rows([[int(i == j) - ac[i] * a[j] for j in range(n)] for i in range(n)], n)

    @cached_property
    def simple_reflections(self) -> tuple[IntMatrix, ...]:
        return tuple(self.reflection_Y(k) for k in self.simple)

    def root_index(self, alpha: Sequence[int]) -> int:
        return self._root_pos[tuple(alpha)]

    def coroot_index(self, alpha_check: Sequence[int]) -> int:
        return self._coroot_pos[tuple(alpha_check)]

    @cached_property
    def _root_pos(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def _coroot_pos(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.coroots)}

    def is_positive(self, k: int) -> bool:
        return k < self.n_positive

    def __str__(self) -> str:
        return self.name or f"RootDatum(rank={self.rank}, |Phi|={len(self.roots)})"


def build_root_datum(simple_roots: Sequence[Sequence[int]], simple_coroots: Sequence[Sequence[int]],
                     rank: int | None = None, name: str = "", max_roots: int = 10**4) -> RootDatum:
    """Close the simple roots/coroots under the simple reflections and validate."""
    sr = [tuple(int(x) for x in a) for a in simple_roots]
    sc = [tuple(int(x) for x in a) for a in simple_coroots]
    if len(sr) != len(sc):
        raise InvalidCartan("different numbers of simple roots and simple coroots")
    if rank is None:
        if not sr:
            raise InvalidCartan("rank must be given for a datum without roots")
        rank = len(sr[0])
    if any(len(v) != rank for v in sr + sc):
        raise InvalidCartan(f"root or coroot not of length {rank}")
    l = len(sr)
    A = [[pair(sr[i], sc[j]) for j in range(l)] for i in range(l)]
    _check_cartan(A)

    # BFS over (root, coroot, coefficients in the simple roots)
    found: dict[Vector, tuple[Vector, Vector]] = {}
    order: list[Vector] = []
    queue: deque[tuple[Vector, Vector, Vector]] = deque()
    for i in range(l):
        c = tuple(int(j == i) for j in range(l))
        found[sr[i]] = (sc[i], c)
        order.append(sr[i])
        queue.append((sr[i], sc[i], c))
    while queue:
        a, ac, c = queue.popleft()
        for i in range(l):
            k = pair(a, sc[i])
            if k == 0:
                continue
            b = tuple(x - k * y for x, y in zip(a, sr[i]))
            kc = pair(sr[i], ac)
            bc = tuple(x - kc * y for x, y in zip(ac, sc[i]))
            cb = tuple(x - (k if j == i else 0) for j, x in enumerate(c))
            if b in found:
                if found[b][0] != bc:
                    raise InvalidCartan("roots and coroots are not compatibly aligned")
                continue
            found[b] = (bc, cb)
            order.append(b)
            queue.append((b, bc, cb))
            if len(found) > max_roots:
                raise InvalidCartan("root closure does not terminate; Cartan matrix not of finite type")
    pos = [a for a in order if all(x >= 0 for x in found[a][1])]
    neg = [a for a in order if all(x <= 0 for x in found[a][1])]
    if len(pos) + len(neg) != len(order) or len(pos) != len(neg):
        raise InvalidCartan("roots are not split into positive and negative ones")
    neg_sorted = [tuple(-x for x in a) for a in pos]
    if set(neg_sorted) != set(neg):
        raise InvalidCartan("root system is not symmetric")
    for a in pos:
        if tuple(2 * x for x in a) in found:
            raise InvalidCartan("root system is not reduced")
    roots = tuple(pos + neg_sorted)
    coroots = tuple(found[a][0] for a in roots)
    for a, ac in zip(roots, coroots):
        if pair(a, ac) != 2:
            raise InvalidCartan("<alpha, alpha_check> != 2")
    return RootDatum(rank, roots, coroots, tuple(range(l)), name)


def _check_cartan(A: list[list[int]]) -> None:
    l = len(A)
    for i in range(l):
        if A[i][i] != 2:
            raise InvalidCartan("diagonal Cartan entries must equal 2")
        for j in range(l):
            if i != j:
                if A[i][j] > 0:
                    raise InvalidCartan("off-diagonal Cartan entries must be <= 0")
                if (A[i][j] == 0) != (A[j][i] == 0):
                    raise InvalidCartan("Cartan matrix has asymmetric zero pattern")
                if A[i][j] * A[j][i] > 3:
                    raise NonCrystallographic("bond multiplicity above 3 is not of finite crystallographic type")
    # symmetrize and apply Sylvester's criterion
    d: list[Fraction | None] = [None] * l
    for start in range(l):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(l):
                if j != i and A[i][j]:
                    dj = d[i] * A[i][j] / A[j][i]
                    if d[j] is None:
                        d[j] = dj
                        stack.append(j)
                    elif d[j] != dj:
                        raise InvalidCartan("Cartan matrix is not symmetrizable")
    B = [[d[i] * A[i][j] for j in range(l)] for i in range(l)]
    for k in range(1, l + 1):
        if _fraction_det([row[:k] for row in B[:k]]) <= 0:
            raise InvalidCartan("Cartan matrix is not of finite type")


def _fraction_det(M: list[list[Fraction]]) -> Fraction:
    M = [list(r) for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def validate_root_set(rd: RootDatum, roots: Sequence[Sequence[int]], coroots: Sequence[Sequence[int]]) -> None:
    """Check a user-supplied full root list against the closure of the simple ones."""
    given = {tuple(a): tuple(c) for a, c in zip(roots, coroots)}
    if len(given) != len(roots):
        raise InvalidCartan("duplicate roots in spec")
    mine = dict(zip(rd.roots, rd.coroots))
    if set(given) != set(mine):
        raise InvalidCartan("listed roots are not the closure of the simple roots under W")
    if any(mine[a] != c for a, c in given.items()):
        raise InvalidCartan("listed coroots are not aligned with their roots")


# ------------------------------------------------------------------- twists


@dataclass(frozen=True)
class FrobeniusTwist:
    p: int
    a: int
    tau: IntMatrix

    @property
    def q(self) -> int:
        return self.p**self.a

    @property
    def F_Y(self) -> IntMatrix:
        return self.tau.scale(self.q)

    @property
    def tau_X(self) -> IntMatrix:
        return self.tau.T

    @property
    def F_X(self) -> IntMatrix:
        return self.tau.T.scale(self.q)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def make_twist(rd: RootDatum, p: int, a: int = 1, tau: IntMatrix | None = None) -> FrobeniusTwist:
    tw = FrobeniusTwist(p, a, IntMatrix.identity(rd.rank) if tau is None else tau)
    validate_twist(rd, tw)
    return tw


def validate_twist(rd: RootDatum, tw: FrobeniusTwist) -> None:
    if not is_prime(tw.p):
        raise InvalidTwist(f"p = {tw.p} is not prime")
    if tw.a < 1:
        raise InvalidTwist("the exponent a must be positive")
    t = tw.tau
    if (t.rows, t.cols) != (rd.rank, rd.rank):
        raise InvalidTwist("tau has the wrong size")
    matrix_order(t)
    phi_permutation(rd, tw)


def matrix_order(M: IntMatrix, bound: int = 10**4) -> int:
    n = M.rows
    I = IntMatrix.identity(n)
    P = M
    for k in range(1, bound + 1):
        if P == I:
            return k
        P = P @ M
        if any(abs(x) > 10**6 for r in P.entries for x in r):
            break
    raise InvalidTwist("tau is not of finite order")


def phi_permutation(rd: RootDatum, tw: FrobeniusTwist) -> tuple[int, ...]:
    """phi as a tuple: phi[i-1] = j when tau(simple coroot i) = simple coroot j (1-based)."""
    simple_co = {rd.simple_coroot(j): j for j in range(1, rd.semisimple_rank + 1)}
    simple_r = {rd.simple_root(j): j for j in range(1, rd.semisimple_rank + 1)}
    phi = []
    for i in range(1, rd.semisimple_rank + 1):
        img = tw.tau.apply(rd.simple_coroot(i))
        if img not in simple_co:
            raise InvalidTwist("tau does not permute the simple coroots")
        phi.append(simple_co[img])
    if {tw.tau_X.apply(a) for a in simple_r} != set(simple_r):
        raise InvalidTwist("tau^T does not permute the simple roots")
    if sorted(phi) != list(range(1, rd.semisimple_rank + 1)):
        raise InvalidTwist("tau does not permute the simple coroots")
    return tuple(phi)


# ------------------------------------------------------------------- Weyl group


@dataclass(frozen=True)
class WeylElement:
    """``word`` is the lexicographically least reduced word; equality is by matrix."""

    word: tuple[int, ...] = field(compare=False)
    matrix: IntMatrix

    @property
    def length(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return "".join(f"s{i}" for i in self.word) or "1"


class WeylGroup:
    """All elements of W, enumerated by BFS over lengths."""

    def __init__(self, rd: RootDatum, cap: int = DEFAULT_WEYL_CAP) -> None:
        self.rd = rd
        gens = rd.simple_reflections
        I = IntMatrix.identity(rd.rank)
        # lex-least reduced word of w = min over left descents i of (i,) + word(s_i w)
        self.elements: list[WeylElement] = [WeylElement((), I)]
        self._index: dict[IntMatrix, int] = {I: 0}
        frontier = [self.elements[0]]
        while frontier:
            found: dict[IntMatrix, tuple[int, ...]] = {}
            for e in frontier:
                for i, s in enumerate(gens, start=1):
                    m = s @ e.matrix
                    if m in self._index:
                        continue
                    word = (i,) + e.word
                    if m not in found or word < found[m]:
                        found[m] = word
            if len(self.elements) + len(found) > cap:
                raise CapExceeded(f"|W| exceeds the cap {cap}")
            frontier = sorted((WeylElement(w, m) for m, w in found.items()), key=lambda x: x.word)
            for e in frontier:
                self._index[e.matrix] = len(self.elements)
                self.elements.append(e)

    def left_descents_matrix(self, m: IntMatrix) -> list[int]:
        """Indices i with l(s_i w) < l(w)."""
        lw = self.elements[self._index[m]].length
        return [i for i, s in enumerate(self.rd.simple_reflections, start=1)
                if self.elements[self._index[s @ m]].length < lw]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, m: IntMatrix) -> int:
        return self._index[m]

    def element(self, m: IntMatrix) -> WeylElement:
        return self.elements[self._index[m]]

    def from_word(self, word: Sequence[int]) -> WeylElement:
        return self.element(word_matrix(self.rd, word))

    @property
    def identity(self) -> WeylElement:
        return self.elements[0]

    def mul(self, x: WeylElement, y: WeylElement) -> WeylElement:
        return self.element(x.matrix @ y.matrix)

    def inv(self, x: WeylElement) -> WeylElement:
        return self.element(inverse_unimodular(x.matrix))

    def longest(self) -> WeylElement:
        return self.elements[-1]

    def subgroup(self, gens: Sequence[WeylElement]) -> frozenset[IntMatrix]:
        """Matrices of the subgroup generated by ``gens``."""
        I = IntMatrix.identity(self.rd.rank)
        seen = {I}
        frontier = [I]
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    x = g.matrix @ m
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        return frozenset(seen)

    def parabolic(self, I: Sequence[int]) -> frozenset[IntMatrix]:
        return self.subgroup([self.from_word((i,)) for i in I])


@lru_cache(maxsize=64)
def weyl_group(rd: RootDatum, cap: int = DEFAULT_WEYL_CAP) -> WeylGroup:
    return WeylGroup(rd, cap)


def enumerate_weyl(rd: RootDatum, cap: int = DEFAULT_WEYL_CAP) -> list[WeylElement]:
    return list(weyl_group(rd, cap).elements)


def word_matrix(rd: RootDatum, word: Sequence[int]) -> IntMatrix:
    m = IntMatrix.identity(rd.rank)
    for i in word:
        if i:
            m = m @ rd.simple_reflections[i - 1]
    return m


def X_action(m: IntMatrix) -> IntMatrix:
    """Contragredient action on X of a Weyl matrix on Y."""
    return inverse_unimodular(m).T


def inversion_count(rd: RootDatum, w: WeylElement) -> int:
    """|{alpha > 0 : w(alpha) < 0}| computed on coroots."""
    return sum(1 for k in rd.positive if not rd.is_positive(rd.coroot_index(w.matrix.apply(rd.coroots[k]))))


def frobenius_on_W(tw: FrobeniusTwist, m: IntMatrix) -> IntMatrix:
    """F(w) = tau w tau^{-1} on Y."""
    return tw.tau @ m @ inverse_unimodular(tw.tau)


def bruhat_leq(W: WeylGroup, v: WeylElement, w: WeylElement) -> bool:
    """Bruhat order by the lifting property, recursing on a left descent of w."""
    if w.length == 0:
        return v.length == 0
    if v.length > w.length:
        return False
    s = w.word[0]
    sm = W.rd.simple_reflections[s - 1]
    sw = W.element(sm @ w.matrix)
    if s in W.left_descents_matrix(v.matrix):
        return bruhat_leq(W, W.element(sm @ v.matrix), sw)
    return bruhat_leq(W, v, sw)


# ---------------------------------------------------------------- sequences


def seq_length(w: Seq) -> int:
    return sum(1 for x in w if x)


def seq_leq(v: Seq, w: Seq) -> bool:
    if len(v) != len(w):
        raise NotComparable("sequences of different lengths")
    return all(a == 0 or a == b for a, b in zip(v, w))


def check_leq(v: Seq, w: Seq) -> None:
    if not seq_leq(v, w):
        raise NotComparable(f"{format_seq(v)} is not below {format_seq(w)}")


def seqs_below(w: Seq) -> list[Seq]:
    """All v <= w, ordered by length then lexicographically."""
    choices = [(0,) if x == 0 else (0, x) for x in w]
    out = list(itertools.product(*choices))
    out.sort(key=lambda v: (seq_length(v), v))
    return out


def seq_join(a: Seq, b: Seq) -> Seq:
    """Least upper bound of two sequences below a common one."""
    return tuple(x or y for x, y in zip(a, b))


def seq_product_matrix(rd: RootDatum, w: Seq) -> IntMatrix:
    return word_matrix(rd, w)


def format_seq(w: Seq) -> str:
    return "(" + ",".join(f"s{x}" if x else "1" for x in w) + ")"


def parse_seq(text: str, l: int | None = None) -> Seq:
    """Parse '1,s1,s2' or 's1s2' (the latter as one entry per letter)."""
    text = text.strip().strip("()")
    if not text:
        return ()
    if "," in text:
        parts = [t.strip() for t in text.split(",")]
    else:
        parts = ["s" + t for t in text.split("s") if t] if text.startswith("s") else [text]
    out = []
    for t in parts:
        if t in ("1", "0", "e"):
            out.append(0)
        elif t.startswith("s") and t[1:].isdigit():
            out.append(int(t[1:]))
        else:
            raise ValueError(f"cannot parse sequence entry {t!r}")
    if l is not None and any(x > l for x in out):
        raise ValueError(f"simple reflection index out of range 1..{l}")
    return tuple(out)


# ------------------------------------------------------------ Levi subdata


def levi_datum(rd: RootDatum, I: Sequence[int]) -> RootDatum:
    """The datum with the same lattices and simple roots indexed by I (1-based)."""
    I = tuple(I)
    return build_root_datum([rd.simple_root(i) for i in I], [rd.simple_coroot(i) for i in I],
                            rank=rd.rank, name=f"{rd.name}_L{list(I)}")


# ---------------------------------------------------------------- duality


def dual_datum(rd: RootDatum, tw: FrobeniusTwist | None = None):
    """Swap roots and coroots; the dual twist is tau^T acting on the new Y = X."""
    l = rd.semisimple_rank
    d = build_root_datum([rd.simple_coroot(i) for i in range(1, l + 1)],
                         [rd.simple_root(i) for i in range(1, l + 1)], rank=rd.rank,
                         name=f"dual({rd.name})" if rd.name else "")
    if tw is None:
        return d
    return d, FrobeniusTwist(tw.p, tw.a, tw.tau.T)


def same_lattice_invariants(a: RootDatum, b: RootDatum) -> bool:
    """Necessary condition for isomorphism: equal rank, Cartan matrix, X/ZPhi and Y/ZPhi-check."""
    if a.rank != b.rank or a.cartan != b.cartan:
        return False
    return (torsion_of_X_mod_roots(a), torsion_of_Y_mod_coroots(a)) == \
        (torsion_of_X_mod_roots(b), torsion_of_Y_mod_coroots(b))


# --------------------------------------------------- regular embedding (G-tilde)


@dataclass(frozen=True)
class RegularEmbedding:
    datum: RootDatum
    twist: FrobeniusTwist
    inclusion: IntMatrix  # Y -> Y-tilde
    restriction: IntMatrix  # X-tilde -> X, the transpose of the inclusion


def _signed_permutations(k: int):
    for perm in itertools.permutations(range(k)):
        for signs in itertools.product((1, -1), repeat=k):
            yield IntMatrix.from_rows([[signs[i] if perm[i] == j else 0 for j in range(k)] for i in range(k)], k)


def regular_embedding(rd: RootDatum, tw: FrobeniusTwist) -> RegularEmbedding:
    """Make X/ZPhi torsion-free by a fiber product with a free cover of its torsion."""
    n, l = rd.rank, rd.semisimple_rank
    A = IntMatrix.from_columns([rd.simple_root(i) for i in range(1, l + 1)], n) if l else IntMatrix.zeros(n, 0)
    snf = smith_normal_form(A)
    diag = list(snf.diagonal)
    tors = [i for i, d in enumerate(diag) if d > 1]
    if not tors:
        return RegularEmbedding(rd, tw, IntMatrix.identity(n), IntMatrix.identity(n))
    k = len(tors)
    ds = [diag[i] for i in tors]
    P = IntMatrix.from_rows([snf.U.row(i) for i in tors], n)  # X -> torsion coordinates

    gens = [tuple(IntMatrix.identity(n).column(j)) + P.column(j) for j in range(n)]
    gens += [(0,) * n + tuple(d if t == i else 0 for t in range(k)) for i, d in enumerate(ds)]
    B = IntMatrix.from_columns(Sublattice.of(n + k, gens).basis(), n + k)
    Binv_rows = _rational_inverse(B)

    # lift tau_X: find a signed permutation sigma with P tau_X = sigma P mod d
    tX = tw.tau_X
    sigma = None
    PtX = P @ tX
    for cand in _signed_permutations(k):
        if any(ds[i] != ds[j] for i in range(k) for j in range(k) if cand[i, j]):
            continue
        SP = cand @ P
        if all((PtX[i, j] - SP[i, j]) % ds[i] == 0 for i in range(k) for j in range(n)):
            sigma = cand
            break
    if sigma is None:
        raise TwistNotLiftable("tau does not permute the chosen generators of the torsion of X/ZPhi")
    big = tX.block_diag(sigma)
    tXt = _int_matrix(_rmul(Binv_rows, big @ B))

    def to_new(v: Sequence[int]) -> Vector:
        x = _rmul(Binv_rows, IntMatrix.from_columns([v], n + k))
        return tuple(int(r[0]) for r in x)

    R = IntMatrix.from_rows([B.row(i) for i in range(n)], n + k)  # X-tilde -> X
    roots = [to_new(tuple(rd.simple_root(i)) + (0,) * k) for i in range(1, l + 1)]
    coroots = [R.T.apply(rd.simple_coroot(i)) for i in range(1, l + 1)]
    rdt = build_root_datum(roots, coroots, rank=n + k, name=f"{rd.name}~" if rd.name else "")
    twt = FrobeniusTwist(tw.p, tw.a, tXt.T)
    validate_twist(rdt, twt)
    return RegularEmbedding(rdt, twt, R.T, R)


def _rational_inverse(M: IntMatrix) -> list[list[Fraction]]:
    n = M.rows
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.entries)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def _rmul(A: list[list[Fraction]], M: IntMatrix) -> list[list[Fraction]]:
    cols = M.columns()
    return [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in cols] for r in A]


def _int_matrix(A: list[list[Fraction]]) -> IntMatrix:
    if any(x.denominator != 1 for r in A for x in r):
        raise TwistNotLiftable("lifted twist is not integral")
    return IntMatrix.from_rows([[int(x) for x in r] for r in A], len(A[0]) if A else 0)


@dataclass(frozen=True)
class CorootCover:
    datum: RootDatum
    twist: FrobeniusTwist
    projection: IntMatrix  # Y-hat -> Y
    central_kernel: Sublattice  # Y(C) inside Y-hat


def injective_coroots_cover(rd: RootDatum, tw: FrobeniusTwist) -> CorootCover:
    drd, dtw = dual_datum(rd, tw)
    emb = regular_embedding(drd, dtw)
    hat, hat_tw = dual_datum(emb.datum, emb.twist)
    proj = emb.restriction  # X-tilde of the dual is Y-hat; restriction lands in Y
    ker = Sublattice.of(hat.rank, kernel_basis(proj))
    return CorootCover(hat, hat_tw, proj, ker)


def torsion_of_X_mod_roots(rd: RootDatum) -> tuple[int, ...]:
    l = rd.semisimple_rank
    A = IntMatrix.from_columns([rd.simple_root(i) for i in range(1, l + 1)], rd.rank) if l else \
        IntMatrix.zeros(rd.rank, 0)
    return cokernel_structure(A)[0]


def torsion_of_Y_mod_coroots(rd: RootDatum) -> tuple[int, ...]:
    l = rd.semisimple_rank
    A = IntMatrix.from_columns([rd.simple_coroot(i) for i in range(1, l + 1)], rd.rank) if l else \
        IntMatrix.zeros(rd.rank, 0)
    return cokernel_structure(A)[0]


# ------------------------------------------------------------ Cartan types


def cartan_matrix(letter: str, l: int) -> list[list[int]]:
    """A_ij = <alpha_i, alpha_j_check> in Bourbaki numbering."""
    A = [[2 if i == j else 0 for j in range(l)] for i in range(l)]

    def bond(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        A[i - 1][j - 1], A[j - 1][i - 1] = aij, aji

    if letter == "A" and l >= 1:
        for i in range(1, l):
            bond(i, i + 1)
    elif letter in "BC" and l >= 2:
        for i in range(1, l - 1):
            bond(i, i + 1)
        if letter == "B":
            bond(l - 1, l, -2, -1)
        else:
            bond(l - 1, l, -1, -2)
    elif letter == "D" and l >= 3:
        for i in range(1, l - 1):
            bond(i, i + 1)
        bond(l - 2, l)
    elif letter == "G" and l == 2:
        bond(1, 2, -1, -3)
    elif letter == "F" and l == 4:
        bond(1, 2)
        bond(2, 3, -2, -1)
        bond(3, 4)
    elif letter == "E" and l in (6, 7, 8):
        bond(1, 3)
        bond(2, 4)
        for i in range(3, l):
            bond(i, i + 1)
    else:
        raise UnknownType(f"no Cartan type {letter}{l}")
    return A


def cartan_components(A: Sequence[Sequence[int]]) -> list[list[int]]:
    l = len(A)
    seen: set[int] = set()
    comps = []
    for s in range(l):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(l):
                if j not in seen and A[i][j]:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def recognize_component(A: Sequence[Sequence[int]], comp: Sequence[int]) -> tuple[str, int]:
    l = len(comp)
    edges = {(i, j): A[i][j] * A[j][i] for i in comp for j in comp if i < j and A[i][j]}
    deg = {i: sum(1 for e in edges if i in e) for i in comp}
    if len(edges) != l - 1 or any(d > 3 for d in deg.values()):
        raise UnknownType("Dynkin diagram is not a tree of finite type")
    mults = sorted(edges.values())
    if l == 1:
        return ("A", 1)
    if 3 in mults:
        if l == 2:
            return ("G", 2)
        raise UnknownType("triple bond outside G2")
    if 2 in mults:
        if mults.count(2) > 1 or any(d > 2 for d in deg.values()):
            raise UnknownType("unrecognized multiply laced diagram")
        (i, j), = [e for e, m in edges.items() if m == 2]
        if l == 2:
            return ("B", 2)
        if deg[i] == 2 and deg[j] == 2:
            if l == 4:
                return ("F", 4)
            raise UnknownType("double bond in the middle of a long chain")
        inner, end = (i, j) if deg[j] == 1 else (j, i)
        return ("B", l) if A[inner][end] == -2 else ("C", l)
    branch = [i for i, d in deg.items() if d == 3]
    if not branch:
        return ("A", l)
    if len(branch) > 1:
        raise UnknownType("more than one branch node")
    c = branch[0]
    arms = []
    for nb in [j for j in comp if j != c and A[c][j]]:
        length, prev, cur = 1, c, nb
        while True:
            nxt = [j for j in comp if j not in (prev, cur) and A[cur][j]]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", l)
    if arms == [1, 2, 2]:
        return ("E", 6)
    if arms == [1, 2, 3]:
        return ("E", 7)
    if arms == [1, 2, 4]:
        return ("E", 8)
    raise UnknownType(f"simply laced diagram with arms {arms}")


def cartan_type(rd: RootDatum) -> list[tuple[str, int]]:
    A = rd.cartan
    return sorted(recognize_component(A, c) for c in cartan_components(A))


# ------------------------------------------------------------ builtin catalog


def simply_connected(A: Sequence[Sequence[int]], name: str = "") -> RootDatum:
    l = len(A)
    return build_root_datum([list(A[i]) for i in range(l)], [[int(i == j) for i in range(l)] for j in range(l)],
                            rank=l, name=name)


def adjoint(A: Sequence[Sequence[int]], name: str = "") -> RootDatum:
    l = len(A)
    return build_root_datum([[int(i == j) for j in range(l)] for i in range(l)],
                            [[A[i][j] for i in range(l)] for j in range(l)], rank=l, name=name)


def general_linear(n: int) -> RootDatum:
    e = [[int(i == j) for j in range(n)] for i in range(n)]
    simple = [[e[i][k] - e[i + 1][k] for k in range(n)] for i in range(n - 1)]
    return build_root_datum(simple, simple, rank=n, name=f"GL{n}")


def _block_sum(mats: Sequence[Sequence[Sequence[int]]]) -> list[list[int]]:
    size = sum(len(m) for m in mats)
    out = [[0] * size for _ in range(size)]
    off = 0
    for m in mats:
        for i, r in enumerate(m):
            for j, x in enumerate(r):
                out[off + i][off + j] = x
        off += len(m)
    return out


def _parse_type(t: str) -> list[list[int]]:
    """'A2', 'B2', 'A1xA1' -> Cartan matrix."""
    mats = []
    for part in t.split("x"):
        letter, num = part[0].upper(), part[1:]
        if not num.isdigit():
            raise UnknownType(f"cannot parse Cartan type {t!r}")
        mats.append(cartan_matrix(letter, int(num)))
    return _block_sum(mats)


BUILTIN_HELP = "GL, SL, PGL (with --n), Sp4, or <type>-sc / <type>-ad such as A2-sc, B2-ad, G2-sc, A1xA1-ad"


def builtin_datum(name: str, n: int | None = None) -> RootDatum:
    key = name.strip()
    up = key.upper()
    if up in ("GL", "SL", "PGL"):
        if n is None or n < 1:
            raise InvalidCartan(f"{key} needs a positive n")
        if up == "GL":
            return general_linear(n)
        if n < 2:
            raise InvalidCartan(f"{key}{n} has no roots; use n >= 2")
        A = cartan_matrix("A", n - 1)
        return simply_connected(A, f"SL{n}") if up == "SL" else adjoint(A, f"PGL{n}")
    for prefix in ("GL", "SL", "PGL"):
        if up.startswith(prefix) and up[len(prefix):].isdigit():
            return builtin_datum(prefix, int(up[len(prefix):]))
    if up == "SP4":
        return simply_connected(cartan_matrix("C", 2), "Sp4")
    if "-" in key:
        t, form = key.rsplit("-", 1)
        A = _parse_type(t)
        if form.lower() == "sc":
            return simply_connected(A, key)
        if form.lower() == "ad":
            return adjoint(A, key)
    raise InvalidCartan(f"unknown builtin datum {name!r}; expected {BUILTIN_HELP}")


def graph_twist(rd: RootDatum) -> IntMatrix:
    """The nontrivial diagram automorphism, for GL_n and for the sc/ad catalogue forms."""
    n, l = rd.rank, rd.semisimple_rank
    A = [list(r) for r in rd.cartan]
    perm = _diagram_automorphism(A)
    if perm is None:
        raise InvalidTwist(f"{rd} has no nontrivial diagram automorphism handled here")
    # look for tau permuting simple coroots according to perm, among signed permutation matrices
    target = [rd.simple_coroot(perm[i] + 1) for i in range(l)]
    src = IntMatrix.from_columns([rd.simple_coroot(i + 1) for i in range(l)], n)
    for cand in _signed_permutations(n):
        tw = FrobeniusTwist(2, 1, cand)
        if [cand.apply(c) for c in src.columns()] == target:
            try:
                validate_twist(rd, tw)
            except InvalidTwist:
                continue
            return cand
    raise InvalidTwist(f"no signed-permutation twist realizes the diagram automorphism of {rd}")


def _diagram_automorphism(A: list[list[int]]) -> list[int] | None:
    l = len(A)
    for perm in itertools.permutations(range(l)):
        if list(perm) == list(range(l)):
            continue
        if all(A[perm[i]][perm[j]] == A[i][j] for i in range(l) for j in range(l)):
            if all(perm[perm[i]] == i for i in range(l)):
                return list(perm)
    return None


def named_twist(rd: RootDatum, p: int, a: int, twist: str = "split") -> FrobeniusTwist:
    t = twist.lower()
    if t == "split":
        tau = IntMatrix.identity(rd.rank)
    elif t in ("graph", "twisted"):
        tau = graph_twist(rd)
    else:
        raise InvalidTwist(f"unknown twist {twist!r}; use 'split' or 'graph'")
    return make_twist(rd, p, a, tau)


# -------------------------------------------------------------- spec files


SPEC_KEYS = ("name", "rank", "roots", "coroots", "simple", "p", "a", "tau")


def parse_spec_text(text: str) -> tuple[RootDatum, FrobeniusTwist | None]:
    """Parse the key = value format documented in the README."""
    import json

    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidCartan(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SPEC_KEYS:
            raise InvalidCartan(f"line {lineno}: unknown key {key!r}")
        if key == "name":
            values[key] = val.strip("\"'")
            continue
        try:
            values[key] = json.loads(val)
        except json.JSONDecodeError as exc:
            raise InvalidCartan(f"line {lineno}: {exc}") from None
    for key in ("rank", "roots", "coroots", "simple"):
        if key not in values:
            raise InvalidCartan(f"missing key {key!r}")
    rank = values["rank"]
    roots, coroots, simple = values["roots"], values["coroots"], values["simple"]
    for arr in (roots, coroots):
        if not isinstance(arr, list) or any(not isinstance(v, list) for v in arr):
            raise InvalidCartan("roots and coroots must be lists of integer vectors")
        if any(not isinstance(x, int) for v in arr for x in v):
            raise NonCrystallographic("root and coroot coordinates must be integers")
    if len(roots) != len(coroots):
        raise InvalidCartan("roots and coroots must be aligned")
    if not isinstance(rank, int) or any(len(v) != rank for v in roots + coroots):
        raise InvalidCartan("vector length does not match rank")
    rd = build_root_datum([roots[i] for i in simple], [coroots[i] for i in simple], rank=rank,
                          name=str(values.get("name", "")))
    validate_root_set(rd, roots, coroots)
    tw = None
    if "p" in values:
        tau = values.get("tau")
        tau_m = IntMatrix.from_rows(tau, rank) if tau is not None else None
        tw = make_twist(rd, int(values["p"]), int(values.get("a", 1)), tau_m)
    return rd, tw
