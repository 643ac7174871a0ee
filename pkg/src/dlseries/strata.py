"""Stratum posets of compactified varieties, ramification and monodromy multiplicities."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from .errors import PreconditionError
from .rootdatum import FrobeniusTwist, RootDatum, Seq, WeylElement, seq_join, seq_leq, seq_length, seqs_below
from .torus import TorusCharacter, in_interval_by_definition, w_theta


@dataclass(frozen=True)
class StratumPoset:
    w: Seq
    strata: tuple[Seq, ...]
    hasse: tuple[tuple[Seq, Seq], ...]  # (lower, upper) covering pairs

    def codim(self, v: Seq) -> int:
        return seq_length(self.w) - seq_length(v)

    def closure(self, y: Seq) -> list[Seq]:
        return [v for v in self.strata if seq_leq(v, y)]

    def divisors(self) -> list[Seq]:
        return [v for v in self.strata if self.codim(v) == 1]


def covers(v: Seq) -> list[Seq]:
    """Sequences obtained from v by replacing one nonidentity entry with 1."""
    return [v[:i] + (0,) + v[i + 1:] for i, x in enumerate(v) if x]


def stratum_poset(w: Seq) -> StratumPoset:
    strata = tuple(seqs_below(w))
    hasse = tuple((u, v) for v in strata for u in covers(v))
    return StratumPoset(tuple(w), strata, hasse)


def variety_dimension(w: Seq) -> int:
    """dim X(w) = l(w); also dim Y(n) = l(n) for n with image w."""
    return seq_length(w)


def levi_variety_dimension(v: WeylElement) -> int:
    return v.length


def ramifies_along(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter,
                   x: Seq, v: Seq, v_prime: Seq) -> bool:
    """Whether the rank one sheaf attached to theta on X(v) ramifies along the divisor X(v').

    Requires w_theta <= v <= x in I(w, theta) and v' below v in codimension one.  The
    two cases are: v is the join of v' and w_theta (ramified), or w_theta <= v'
    (unramified).  In codimension one these cover everything.
    """
    bottom = w_theta(rd, tw, w, theta)
    if not in_interval_by_definition(rd, tw, w, theta, x):
        raise PreconditionError("x is not in I(w, theta)")
    if not (seq_leq(bottom, v) and seq_leq(v, x)):
        raise PreconditionError("need w_theta <= v <= x")
    if not seq_leq(v_prime, v) or seq_length(v) - seq_length(v_prime) != 1:
        raise PreconditionError("v' must lie below v in codimension one")
    if seq_leq(bottom, v_prime):
        return False
    if seq_join(v_prime, bottom) == v:
        return True
    raise PreconditionError("configuration covered by neither ramification case")


@dataclass(frozen=True)
class MonodromyTable:
    w: Seq
    rows: tuple[tuple[Seq, tuple[int, ...]], ...]  # (v, multiplicities for i = 0..l(w))

    def row(self, v: Seq) -> tuple[int, ...]:
        for u, r in self.rows:
            if u == v:
                return r
        raise KeyError(v)

    def multiplicity(self, v: Seq, i: int) -> int:
        r = self.row(v)
        return r[i] if 0 <= i < len(r) else 0


def monodromy_table(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter) -> MonodromyTable:
    bottom = w_theta(rd, tw, w, theta)
    lw = seq_length(w)
    rows = []
    for v in seqs_below(w):
        c = lw - seq_length(v)
        inside = seq_leq(bottom, v)
        rows.append((v, tuple(comb(c, i) if inside else 0 for i in range(lw + 1))))
    return MonodromyTable(tuple(w), tuple(rows))


def maximal_chains(top: Seq, bottom: Seq) -> Iterator[list[Seq]]:
    """All saturated chains top > ... > bottom."""
    if top == bottom:
        yield [top]
        return
    for u in covers(top):
        if seq_leq(bottom, u):
            for rest in maximal_chains(u, bottom):
                yield [top] + rest


def chain_is_unramified(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter, chain: list[Seq]) -> bool:
    """Walk down the chain; False at the first ramified divisor."""
    bottom = w_theta(rd, tw, w, theta)
    for upper, lower in zip(chain, chain[1:]):
        if not seq_leq(bottom, upper):
            return False
        if ramifies_along(rd, tw, w, theta, w, upper, lower):
            return False
    return True
