"""Geometric conjugacy, rational series, elementary moves and regularity.

A pair (w, theta) has w in W and theta a character of T^{wF}.  Its dual vector
s in X (x) Q/Z satisfies theta(N_w(mu)) = <mu, s>.  Geometric classes are
W-orbits of dual vectors.  Rational classes use the regular embedding: two
pairs are rationally conjugate when some of their extensions to the bigger
torus are geometrically conjugate there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .errors import InvalidLeviTwist, InvariantViolation, PreconditionError
from .lattice import IntMatrix, inverse_unimodular, reduce_qz
from .rootdatum import (
    FrobeniusTwist,
    RootDatum,
    Seq,
    WeylElement,
    WeylGroup,
    X_action,
    format_seq,
    is_prime,
    phi_permutation,
    regular_embedding,
    weyl_group,
    word_matrix,
)
from .torus import (
    QZ,
    FiniteTorus,
    TorusCharacter,
    character_from_dual,
    characters,
    dual_vector,
    finite_torus,
    fmt_qz,
    splitting_exponent,
    w_theta,
)


@dataclass(frozen=True)
class Pair:
    w: WeylElement
    theta: TorusCharacter

    def sort_key(self) -> tuple:
        return (self.w.length, self.w.word, self.theta.values)

    def __str__(self) -> str:
        return f"({self.w}, {self.theta})"


@dataclass(frozen=True)
class DualSS:
    s: QZ
    fixing_w: WeylElement


def reduce_vec(v: Iterable[Fraction]) -> QZ:
    return tuple(reduce_qz(x) for x in v)


def act_qz(M: IntMatrix, s: Sequence[Fraction]) -> QZ:
    return reduce_vec(sum((Fraction(a) * b for a, b in zip(row, s)), Fraction(0)) for row in M.entries)


# ------------------------------------------------------------------ context


class SeriesContext:
    """Per-(datum, twist) caches: Weyl group, X-actions, the regular embedding."""

    def __init__(self, rd: RootDatum, tw: FrobeniusTwist) -> None:
        self.rd, self.tw = rd, tw
        self.W: WeylGroup = weyl_group(rd)
        self.X_mats = [X_action(e.matrix) for e in self.W]
        self.tau_inv = inverse_unimodular(tw.tau)
        self._ext: dict[int, dict[QZ, frozenset]] = {}
        self._orbit: dict[QZ, QZ] = {}

    # -- tori and pairs
    def torus(self, w: WeylElement) -> FiniteTorus:
        return finite_torus(self.rd, self.tw, w.word)

    def pairs(self, w: WeylElement | None = None) -> list[Pair]:
        ws = self.W.elements if w is None else [w]
        return [Pair(x, th) for x in ws for th in characters(self.torus(x))]

    def dual(self, p: Pair) -> QZ:
        return dual_vector(self.torus(p.w), p.theta)

    # -- geometric
    def orbit_key(self, s: QZ) -> QZ:
        key = self._orbit.get(s)
        if key is None:
            key = min(act_qz(M, s) for M in self.X_mats)
            self._orbit[s] = key
        return key

    def stabilizer(self, s: QZ) -> list[WeylElement]:
        return [e for e, M in zip(self.W, self.X_mats) if act_qz(M, s) == s]

    def F_of(self, m: IntMatrix) -> IntMatrix:
        return self.tw.tau @ m @ self.tau_inv

    # -- rational
    @property
    def embedding(self):
        if not hasattr(self, "_emb"):
            self._emb = regular_embedding(self.rd, self.tw)
            self._tctx = context(self._emb.datum, self._emb.twist)
        return self._emb

    def rational_keys(self, p: Pair) -> frozenset:
        """Geometric classes (in the regular embedding) of all extensions of theta."""
        return self.rational_keys_s(p.w, self.dual(p))

    def rational_keys_s(self, w: WeylElement, s: QZ) -> frozenset:
        emb = self.embedding
        k = self.W.index(w.matrix)
        table = self._ext.get(k)
        if table is None:
            big = self._tctx
            Tt = finite_torus(emb.datum, emb.twist, w.word)
            groups: dict[QZ, set] = {}
            for th in characters(Tt):
                st = dual_vector(Tt, th)
                groups.setdefault(act_qz(emb.restriction, st), set()).add(big.orbit_key(st))
            table = {key: frozenset(v) for key, v in groups.items()}
            self._ext[k] = table
        keys = table.get(s)
        if not keys:
            raise InvariantViolation("a torus character has no extension to the regular embedding")
        return keys


@lru_cache(maxsize=64)
def context(rd: RootDatum, tw: FrobeniusTwist) -> SeriesContext:
    return SeriesContext(rd, tw)


def make_pair(rd: RootDatum, tw: FrobeniusTwist, w: WeylElement | Sequence[int], values: Sequence) -> Pair:
    W = weyl_group(rd)
    we = w if isinstance(w, WeylElement) else W.from_word(w)
    T = finite_torus(rd, tw, we.word)
    return Pair(we, TorusCharacter(tuple(reduce_qz(Fraction(v)) for v in values), T.group.invariant_factors))


# ------------------------------------------------------------ dual elements


def dual_ss(rd: RootDatum, tw: FrobeniusTwist, p: Pair) -> DualSS:
    ctx = context(rd, tw)
    s = ctx.dual(p)
    FX = (p.w.matrix @ tw.F_Y).T
    if act_qz(FX, s) != s:
        raise InvariantViolation("dual vector is not fixed by (wF)^T")
    return DualSS(s, p.w)


def geometric_key(rd: RootDatum, tw: FrobeniusTwist, p: Pair) -> QZ:
    ctx = context(rd, tw)
    return ctx.orbit_key(ctx.dual(p))


def geometrically_conjugate_dual(rd: RootDatum, tw: FrobeniusTwist, p1: Pair, p2: Pair) -> bool:
    return geometric_key(rd, tw, p1) == geometric_key(rd, tw, p2)


def geometrically_conjugate(rd: RootDatum, tw: FrobeniusTwist, p1: Pair, p2: Pair) -> bool:
    """Definition: theta_i o N_{F^d / w_i F} as characters of Y/(q^d - 1)Y, compared up to W.

    Characters are evaluated through the norm maps on Y directly; no dual vector and
    no transpose action is involved.
    """
    ctx = context(rd, tw)
    d = splitting_exponent(rd, tw)
    N = tw.q**d - 1
    T1, T2 = ctx.torus(p1.w), ctx.torus(p2.w)
    n = rd.rank
    basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    chi2 = [p2.theta(T2.norm(e)) for e in basis]
    for chi in (chi2, [p1.theta(T1.norm(e)) for e in basis]):
        if any((N * v).denominator != 1 for v in chi):
            raise InvariantViolation("norm composite does not factor through Y/(q^d - 1)Y")
    for x in ctx.W:
        xinv = inverse_unimodular(x.matrix)
        if all(p1.theta(T1.norm(xinv.apply(e))) == c for e, c in zip(basis, chi2)):
            return True
    return False


def rationally_conjugate(rd: RootDatum, tw: FrobeniusTwist, p1: Pair, p2: Pair) -> bool:
    ctx = context(rd, tw)
    return bool(ctx.rational_keys(p1) & ctx.rational_keys(p2))


# --------------------------------------------------------------- partitions


@dataclass(frozen=True)
class SeriesId:
    representative: Pair
    members: tuple[Pair, ...]
    geometric_key: QZ
    dual: QZ

    @property
    def size(self) -> int:
        return len(self.members)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)


def ell_prime_part(theta: TorusCharacter, ell: int) -> TorusCharacter:
    """theta_{l'}: multiply by a = n_l * (n_l^{-1} mod n_l'), where the order is n_l * n_l'."""
    n = theta.order
    nl = 1
    while n % (nl * ell) == 0:
        nl *= ell
    nlp = n // nl
    a = nl * pow(nl, -1, nlp) if nlp > 1 else 0
    return theta.scale(a)


def series_partition(rd: RootDatum, tw: FrobeniusTwist, mode: str = "K", ell: int | None = None,
                     trivial_only: bool = False) -> list[SeriesId]:
    """Rational series of single-element pairs, with deterministic order."""
    ctx = context(rd, tw)
    if mode not in ("K", "brauer"):
        raise PreconditionError("mode must be 'K' or 'brauer'")
    if mode == "brauer":
        if ell is None or not is_prime(ell) or ell == tw.p:
            raise PreconditionError("Brauer mode needs a prime ell different from p")
    pairs = [p for p in ctx.pairs() if not trivial_only or p.theta.is_trivial()]
    uf = _UnionFind()
    for i, p in enumerate(pairs):
        target = p if mode == "K" else Pair(p.w, ell_prime_part(p.theta, ell))
        uf.find(("pair", i))
        for key in ctx.rational_keys(target):
            uf.union(("pair", i), ("key", key))
    blocks: dict = {}
    for i, p in enumerate(pairs):
        blocks.setdefault(uf.find(("pair", i)), []).append(p)
    out = []
    for members in blocks.values():
        members.sort(key=Pair.sort_key)
        if mode == "brauer":
            reps = [m for m in members if ell_prime_part(m.theta, ell) == m.theta]
            rep = reps[0]
        else:
            rep = members[0]
        s = ctx.dual(rep)
        out.append(SeriesId(rep, tuple(members), ctx.orbit_key(s), s))
    out.sort(key=lambda sid: sid.representative.sort_key())
    return out


def geometric_partition(rd: RootDatum, tw: FrobeniusTwist) -> list[list[Pair]]:
    ctx = context(rd, tw)
    blocks: dict[QZ, list[Pair]] = {}
    for p in ctx.pairs():
        blocks.setdefault(ctx.orbit_key(ctx.dual(p)), []).append(p)
    return sorted((sorted(b, key=Pair.sort_key) for b in blocks.values()), key=lambda b: b[0].sort_key())


def series_of(rd: RootDatum, tw: FrobeniusTwist, p: Pair, partition: list[SeriesId] | None = None) -> SeriesId:
    for sid in partition or series_partition(rd, tw):
        if any(m.w == p.w and m.theta == p.theta for m in sid.members):
            return sid
    raise PreconditionError("pair not found in the partition")


# ---------------------------------------------------------------- moves


UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SeqPair:
    """A sequence over S-bar with a character of T^{wF}, stored by its dual vector."""

    w: Seq
    s: QZ

    def __str__(self) -> str:
        return f"({format_seq(self.w)}, ({','.join(fmt_qz(x) for x in self.s)}))"


def seq_pair(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter) -> SeqPair:
    return SeqPair(tuple(w), dual_vector(finite_torus(rd, tw, w), theta))


def all_sequences(l: int, bound: int, over_S: bool = False) -> list[Seq]:
    letters = range(1, l + 1) if over_S else range(l + 1)
    out: list[Seq] = []
    for r in range(1, bound + 1):
        out.extend(product(letters, repeat=r))
    return out


@lru_cache(maxsize=32)
def _seqs_by_product(rd: RootDatum, bound: int) -> dict[IntMatrix, tuple[Seq, ...]]:
    out: dict[IntMatrix, list[Seq]] = {}
    for w in all_sequences(rd.semisimple_rank, bound):
        out.setdefault(word_matrix(rd, w), []).append(w)
    return {k: tuple(v) for k, v in out.items()}


def _character_or_none(rd: RootDatum, tw: FrobeniusTwist, w: Seq, s: QZ) -> TorusCharacter | None:
    try:
        return character_from_dual(finite_torus(rd, tw, w), s)
    except PreconditionError:
        return None


def elementary_moves(rd: RootDatum, tw: FrobeniusTwist, sp: SeqPair, bound: int = 3) -> list[SeqPair]:
    """One-step neighbours of ``sp`` among sequences of length <= bound, in both directions.

    Move (1): w' with prod(w') = v prod(w) F(v)^{-1}, and s' = v.s.
    Move (2): for w with all entries in S, w' = w_theta with the same s (theta_{w_theta}
    has the same dual vector); backwards, every u over S with u_theta = w.
    """
    ctx = context(rd, tw)
    seqs = _seqs_by_product(rd, bound)
    P = word_matrix(rd, sp.w)
    out: set[SeqPair] = set()
    for v, VX in zip(ctx.W, ctx.X_mats):
        target = v.matrix @ P @ inverse_unimodular(ctx.F_of(v.matrix))
        s2 = act_qz(VX, sp.s)
        for w2 in seqs.get(target, ()):
            out.add(SeqPair(w2, s2))
    if all(sp.w):
        th = _character_or_none(rd, tw, sp.w, sp.s)
        if th is None:
            raise PreconditionError("s is not a character of T^{wF}")
        out.add(SeqPair(w_theta(rd, tw, sp.w, th), sp.s))
    zeros = [i for i, x in enumerate(sp.w) if x == 0]
    if zeros:
        for fill in product(range(1, rd.semisimple_rank + 1), repeat=len(zeros)):
            u = list(sp.w)
            for i, f in zip(zeros, fill):
                u[i] = f
            u = tuple(u)
            th = _character_or_none(rd, tw, u, sp.s)
            if th is not None and w_theta(rd, tw, u, th) == sp.w:
                out.add(SeqPair(u, sp.s))
    out.discard(sp)
    return sorted(out, key=lambda x: (len(x.w), x.w, x.s))


@lru_cache(maxsize=32)
def _move_components(rd: RootDatum, tw: FrobeniusTwist, bound: int) -> _UnionFind:
    """Union-find over (W index, s) of the closure of the moves with sequences of length <= bound.

    Move (1) with v = 1 identifies all sequences with the same product, so the node of a
    sequence is its product together with s; single-element pairs ((w), theta) are the
    same nodes.
    """
    ctx = context(rd, tw)
    uf = _UnionFind()
    for p in ctx.pairs():
        s = ctx.dual(p)
        k = ctx.W.index(p.w.matrix)
        uf.find((k, s))
        for v, VX in zip(ctx.W, ctx.X_mats):
            target = v.matrix @ p.w.matrix @ inverse_unimodular(ctx.F_of(v.matrix))
            uf.union((k, s), (ctx.W.index(target), act_qz(VX, s)))
    for u in all_sequences(rd.semisimple_rank, bound, over_S=True):
        T = finite_torus(rd, tw, u)
        ku = ctx.W.index(word_matrix(rd, u))
        for th in characters(T):
            s = dual_vector(T, th)
            wt = w_theta(rd, tw, u, th)
            uf.union((ku, s), (ctx.W.index(word_matrix(rd, wt)), s))
    return uf


def sim_w_equivalent(rd: RootDatum, tw: FrobeniusTwist, a: SeqPair, b: SeqPair, bound: int = 3):
    """True when connected by moves through sequences of length <= bound, else UNKNOWN."""
    ctx = context(rd, tw)
    uf = _move_components(rd, tw, bound)
    ka = (ctx.W.index(word_matrix(rd, a.w)), a.s)
    kb = (ctx.W.index(word_matrix(rd, b.w)), b.s)
    return True if uf.find(ka) == uf.find(kb) else UNKNOWN


def seq_pair_rational_keys(rd: RootDatum, tw: FrobeniusTwist, sp: SeqPair) -> frozenset:
    """Series keys of the single-element pair with the same product and character."""
    ctx = context(rd, tw)
    return ctx.rational_keys_s(ctx.W.element(word_matrix(rd, sp.w)), sp.s)


# ------------------------------------------------------------- minimal pairs


def minimal_pairs(rd: RootDatum, tw: FrobeniusTwist, sid: SeriesId) -> list[Pair]:
    m = min(p.w.length for p in sid.members)
    return [p for p in sid.members if p.w.length == m]


def conjugation_witness(rd: RootDatum, tw: FrobeniusTwist, p1: Pair, p2: Pair) -> WeylElement | None:
    """x in W with w2 = x w1 F(x)^{-1} and s2 = x.s1, if any."""
    ctx = context(rd, tw)
    s1, s2 = ctx.dual(p1), ctx.dual(p2)
    for x, XX in zip(ctx.W, ctx.X_mats):
        if x.matrix @ p1.w.matrix @ inverse_unimodular(ctx.F_of(x.matrix)) == p2.w.matrix \
                and act_qz(XX, s1) == s2:
            return x
    return None


def check_minimality_lemma(rd: RootDatum, tw: FrobeniusTwist, sid: SeriesId) -> list[tuple[Pair, Pair, WeylElement]]:
    """Witnesses relating the first minimal pair to every other one; raises if one is missing."""
    mins = minimal_pairs(rd, tw, sid)
    out = []
    for p in mins:
        x = conjugation_witness(rd, tw, mins[0], p)
        if x is None:
            raise InvariantViolation(f"minimal pairs {mins[0]} and {p} are not W-conjugate")
        out.append((mins[0], p, x))
    return out


# ---------------------------------------------------------------- regularity


def standard_levi_pairs(rd: RootDatum, tw: FrobeniusTwist) -> list[tuple[tuple[int, ...], WeylElement]]:
    """All (I, v) with I a subset of the simple indices and v(phi(I)) = I."""
    from itertools import combinations

    W = weyl_group(rd)
    l = rd.semisimple_rank
    out = []
    for k in range(l + 1):
        for I in combinations(range(1, l + 1), k):
            for v in W:
                if levi_twist_ok(rd, tw, I, v):
                    out.append((I, v))
    return out


def levi_twist_ok(rd: RootDatum, tw: FrobeniusTwist, I: Sequence[int], v: WeylElement) -> bool:
    phi = phi_permutation(rd, tw)
    target = {rd.simple_coroot(i) for i in I}
    return {v.matrix.apply(rd.simple_coroot(phi[i - 1])) for i in I} == target


def _check_levi(rd: RootDatum, tw: FrobeniusTwist, I: Sequence[int], v: WeylElement) -> None:
    if not levi_twist_ok(rd, tw, I, v):
        raise InvalidLeviTwist(f"v = {v} does not satisfy v.phi(I) = I for I = {list(I)}")


def _levi_root_indices(rd: RootDatum, I: Sequence[int]) -> set[int]:
    """Roots in the span of the simple roots indexed by I."""
    from .lattice import Sublattice

    L = Sublattice.of(rd.rank, [rd.simple_coroot(i) for i in I])
    return {k for k, c in enumerate(rd.coroots) if L.contains(c)} if I else set()


def killed_coroots(rd: RootDatum, tw: FrobeniusTwist, wv: WeylElement, theta: TorusCharacter) -> set[int]:
    """Root indices k with theta(N_{wv}(alpha_k check)) = 0."""
    T = finite_torus(rd, tw, wv.word)
    return {k for k, c in enumerate(rd.coroots) if theta(T.norm(c)) == 0}


def is_regular(rd: RootDatum, tw: FrobeniusTwist, I: Sequence[int], v: WeylElement, p: Pair) -> bool:
    """Condition (R) for a pair whose w already includes v, i.e. theta lives on T^{wvF}."""
    _check_levi(rd, tw, I, v)
    return killed_coroots(rd, tw, p.w, p.theta) <= _levi_root_indices(rd, I)


def full_stabilizer(rd: RootDatum, tw: FrobeniusTwist, p: Pair) -> list[WeylElement]:
    """x in W with theta o N o x = theta o N on Y, tested on a basis of Y."""
    T = finite_torus(rd, tw, p.w.word)
    n = rd.rank
    basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    base = [p.theta(T.norm(e)) for e in basis]
    return [x for x in weyl_group(rd) if [p.theta(T.norm(x.matrix.apply(e))) for e in basis] == base]


def is_super_regular(rd: RootDatum, tw: FrobeniusTwist, I: Sequence[int], v: WeylElement, p: Pair) -> bool:
    _check_levi(rd, tw, I, v)
    WI = weyl_group(rd).parabolic(I)
    return all(x.matrix in WI for x in full_stabilizer(rd, tw, p))


@dataclass(frozen=True)
class StabilizerData:
    phi_w_theta: frozenset[int]
    w_group: frozenset[IntMatrix]
    full_stab: frozenset[IntMatrix]


def stabilizer_data(rd: RootDatum, tw: FrobeniusTwist, p: Pair) -> StabilizerData:
    killed = killed_coroots(rd, tw, p.w, p.theta)
    W = weyl_group(rd)
    gens = [W.element(rd.reflection_Y(k)) for k in killed]
    return StabilizerData(frozenset(killed), W.subgroup(gens),
                          frozenset(x.matrix for x in full_stabilizer(rd, tw, p)))
