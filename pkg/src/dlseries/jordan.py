"""Centralizers of dual semisimple elements, Levi subsystems and the Jordan datum.

A dual element s is a vector of X (x) Q/Z, i.e. a point of the dual torus.
Centralizer data are read on the dual datum, whose roots are the coroots of G.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .errors import CapExceeded, InvariantViolation, PreconditionError, UnknownType
from .lattice import IntMatrix, Sublattice, inverse_unimodular
from .rootdatum import (
    FrobeniusTwist,
    RootDatum,
    WeylElement,
    X_action,
    cartan_type,
    frobenius_on_W,
    dual_datum,
    levi_datum,
    torsion_of_X_mod_roots,
    weyl_group,
)
from .series import Pair, act_qz, context, levi_twist_ok, rationally_conjugate, reduce_vec
from .torus import QZ, TorusCharacter, character_from_dual, finite_torus

LEVI_RANK_CAP = 4

BAD_PRIMES = {"A": set(), "B": {2}, "C": {2}, "D": {2}, "G": {2, 3}, "F": {2, 3}, "E": {2, 3}}


def bad_primes(rd: RootDatum) -> set[int]:
    out: set[int] = set()
    for letter, l in cartan_type(rd):
        if letter not in BAD_PRIMES:
            raise UnknownType(f"no bad-prime entry for type {letter}{l}")
        out |= BAD_PRIMES[letter]
        if letter == "E" and l == 8:
            out.add(5)
    return out


def center_component_order(rd: RootDatum) -> int:
    """|Z(G)/Z(G)^o| = order of the torsion of X/ZPhi."""
    o = 1
    for d in torsion_of_X_mod_roots(rd):
        o *= d
    return o


def prime_factors(n: int) -> set[int]:
    out, k = set(), 2
    while k * k <= n:
        while n % k == 0:
            out.add(k)
            n //= k
        k += 1
    if n > 1:
        out.add(n)
    return out


def pi_set(rd: RootDatum, tw: FrobeniusTwist | None = None) -> set[int]:
    return bad_primes(rd) | prime_factors(center_component_order(rd))


# ---------------------------------------------------------------- centralizers


@dataclass(frozen=True)
class CentralizerData:
    phi_s: frozenset[int]  # root indices of the datum passed in
    w_connected: frozenset[IntMatrix]
    w_full: frozenset[IntMatrix]

    @property
    def connected(self) -> bool:
        return self.w_connected == self.w_full


def centralizer_data(rdd: RootDatum, s: Sequence[Fraction]) -> CentralizerData:
    """Centralizer of s in the group with datum ``rdd``; s is read in Y(rdd) (x) Q/Z."""
    s = reduce_vec(Fraction(x) for x in s)
    W = weyl_group(rdd)
    phi_s = frozenset(k for k, a in enumerate(rdd.roots) if sum((Fraction(x) * y for x, y in zip(a, s)), Fraction(0)).denominator == 1)
    conn = W.subgroup([W.element(rdd.reflection_Y(k)) for k in phi_s])
    full = frozenset(e.matrix for e in W if act_qz(e.matrix, s) == s)
    if not conn <= full:
        raise InvariantViolation("reflections of Phi_s do not fix s")
    return CentralizerData(phi_s, conn, full)


@dataclass(frozen=True)
class LeviSubsystem:
    roots: frozenset[int]
    conjugator: WeylElement  # x with x(roots) = Phi_J
    J: tuple[int, ...]

    @property
    def is_torus(self) -> bool:
        return not self.roots


@lru_cache(maxsize=32)
def levi_subsystems(rdd: RootDatum, cap_rank: int = LEVI_RANK_CAP) -> tuple[LeviSubsystem, ...]:
    """All W-conjugates of standard parabolic subsystems, each with a conjugator to standard form."""
    if rdd.semisimple_rank > cap_rank:
        raise CapExceeded(f"Levi enumeration is capped at semisimple rank {cap_rank}")
    W = weyl_group(rdd)
    l = rdd.semisimple_rank
    seen: dict[frozenset[int], LeviSubsystem] = {}
    for k in range(l + 1):
        for J in combinations(range(1, l + 1), k):
            span = Sublattice.of(rdd.rank, [rdd.simple_root(j) for j in J])
            std = frozenset(i for i, a in enumerate(rdd.roots) if J and span.contains(a))
            for x in W:
                # x^{-1} acts on X(rdd) by the transpose of the Y-matrix of x
                Xinv = x.matrix.T
                conj = frozenset(rdd.root_index(Xinv.apply(rdd.roots[i])) for i in std)
                if conj not in seen:
                    seen[conj] = LeviSubsystem(conj, x, J)
    return tuple(sorted(seen.values(), key=lambda L: (len(L.roots), sorted(L.roots))))


def reflection_group(rdd: RootDatum, roots: frozenset[int]) -> frozenset[IntMatrix]:
    W = weyl_group(rdd)
    return W.subgroup([W.element(rdd.reflection_Y(k)) for k in roots])


def minimal_levi(rdd: RootDatum, s: Sequence[Fraction]) -> LeviSubsystem:
    """A smallest Levi subsystem Psi with Phi_s in Psi and W_s inside W_Psi."""
    cd = centralizer_data(rdd, s)
    for L in levi_subsystems(rdd):
        if cd.phi_s <= L.roots and cd.w_full <= reflection_group(rdd, L.roots):
            return L
    raise InvariantViolation("the full root system should always qualify")


def is_quasi_isolated(rdd: RootDatum, s: Sequence[Fraction]) -> bool:
    return len(minimal_levi(rdd, s).roots) == len(rdd.roots)


def is_isolated(rdd: RootDatum, s: Sequence[Fraction]) -> bool:
    cd = centralizer_data(rdd, s)
    for L in levi_subsystems(rdd):
        if cd.phi_s <= L.roots:
            return len(L.roots) == len(rdd.roots)
    return True


def is_levi_subsystem(rdd: RootDatum, roots: frozenset[int]) -> LeviSubsystem | None:
    for L in levi_subsystems(rdd):
        if L.roots == roots:
            return L
    return None


# ------------------------------------------------------------------ Jordan


@dataclass(frozen=True)
class NotLevi:
    reason: str
    pi: frozenset[int]


@dataclass(frozen=True)
class JordanDatum:
    I: tuple[int, ...]
    v: WeylElement
    conjugator: WeylElement  # x with x.s having centralizer of standard type I
    s_standard: QZ
    levi: RootDatum
    levi_twist: FrobeniusTwist

    def psi(self, rd: RootDatum, u: WeylElement, theta: TorusCharacter) -> Pair:
        """Push a Levi pair (u over W_I, theta on T^{u v F}) to the pair (u v, theta) of G."""
        W = weyl_group(rd)
        return Pair(W.element(u.matrix @ self.v.matrix), theta)


def _coset_min(W, WI: frozenset[IntMatrix], m: IntMatrix) -> WeylElement:
    """The minimal length element of W_I m."""
    return min((W.element(u @ m) for u in WI), key=lambda e: (e.length, e.word))


def jordan_datum(rd: RootDatum, tw: FrobeniusTwist, s: Sequence[Fraction], w: WeylElement | None = None):
    """Standard pair (I', v') for C(s) when it is a Levi, else a :class:`NotLevi`."""
    s = reduce_vec(Fraction(x) for x in s)
    rdd = dual_datum(rd)
    W = weyl_group(rd)
    if w is None:
        w = fixing_element(rd, tw, s)
    pis = frozenset(pi_set(rd, tw))
    cd = centralizer_data(rdd, s)
    if not cd.connected:
        return NotLevi("disconnected centralizer", pis)
    L = is_levi_subsystem(rdd, cd.phi_s)
    if L is None:
        return NotLevi("centralizer is not a Levi subgroup (bad prime)", pis)
    # the dual datum's Y-action of a word is the X-action of the same word in G
    x = W.from_word(L.conjugator.word)
    s_std = act_qz(X_action(x.matrix), s)
    I = L.J
    if centralizer_data(rdd, s_std).phi_s != _standard_roots(rdd, I):
        raise InvariantViolation("conjugator does not standardize the centralizer")
    w2 = x.matrix @ w.matrix @ inverse_unimodular(frobenius_on_W(tw, x.matrix))
    WI = W.parabolic(I)
    v = _coset_min(W, WI, w2)
    if not levi_twist_ok(rd, tw, I, v):
        raise InvariantViolation("coset representative does not normalize I")
    levi = levi_datum(rd, I)
    ltw = FrobeniusTwist(tw.p, tw.a, v.matrix @ tw.tau)
    return JordanDatum(I, v, x, s_std, levi, ltw)


def _standard_roots(rdd: RootDatum, I: Sequence[int]) -> frozenset[int]:
    if not I:
        return frozenset()
    span = Sublattice.of(rdd.rank, [rdd.simple_root(j) for j in I])
    return frozenset(i for i, a in enumerate(rdd.roots) if span.contains(a))


def fixing_element(rd: RootDatum, tw: FrobeniusTwist, s: Sequence[Fraction]) -> WeylElement:
    """The first w (in length-lex order) with (wF)^T s = s."""
    s = reduce_vec(Fraction(x) for x in s)
    for w in weyl_group(rd):
        if act_qz((w.matrix @ tw.F_Y).T, s) == s:
            return w
    raise PreconditionError("s is not fixed by any (wF)^T, so it is not the dual of a torus character")


def pair_from_dual(rd: RootDatum, tw: FrobeniusTwist, w: WeylElement, s: Sequence[Fraction]) -> Pair:
    T = finite_torus(rd, tw, w.word)
    return Pair(w, character_from_dual(T, reduce_vec(Fraction(x) for x in s)))


def check_psi(rd: RootDatum, tw: FrobeniusTwist, s: Sequence[Fraction], jd: JordanDatum) -> list[tuple[Pair, Pair]]:
    """Push every Levi pair in the Levi series of s_standard and check it lands in the series of s.

    Returns the (levi pair, image) list; raises InvariantViolation on a miss.
    """
    w = fixing_element(rd, tw, s)
    target = pair_from_dual(rd, tw, w, s)
    lctx = context(jd.levi, jd.levi_twist)
    base = None
    for u in lctx.W:
        T = finite_torus(jd.levi, jd.levi_twist, u.word)
        try:
            th = character_from_dual(T, jd.s_standard)
        except PreconditionError:
            continue
        base = Pair(u, th)
        break
    if base is None:
        raise InvariantViolation("standardized s is not the dual of any Levi pair")
    out = []
    for lp in lctx.pairs():
        if not rationally_conjugate(jd.levi, jd.levi_twist, lp, base):
            continue
        img = jd.psi(rd, lp.w, lp.theta)
        if not rationally_conjugate(rd, tw, img, target):
            raise InvariantViolation(f"psi image {img} left the series of s")
        out.append((lp, img))
    return out
