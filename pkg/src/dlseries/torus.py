"""Finite tori T^{wF}, norm maps, the lattices Y_{w,v} and torus characters.

T^{wF} is *defined* as the cokernel of wF - 1 on Y, and the norm map N_w is
the cokernel projection.  A character theta of T^{wF} is stored by its values
in Q/Z on the invariant-factor generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

from .errors import CharacterDomainMismatch, NotInInterval, InvariantViolation, PreconditionError
from .lattice import (
    FiniteAbelianGroup,
    IntMatrix,
    Sublattice,
    Vector,
    cokernel,
    hom_group_elements,
    kernel_basis,
    preimage,
    quotient_by,
    reduce_qz,
    sublattice_intersection,
    sublattice_sum,
)
from .rootdatum import (
    FrobeniusTwist,
    RootDatum,
    Seq,
    check_leq,
    injective_coroots_cover,
    matrix_order,
    seq_leq,
    seqs_below,
    weyl_group,
    word_matrix,
)

QZ = tuple[Fraction, ...]


@dataclass(frozen=True)
class FiniteTorus:
    w_action: IntMatrix
    group: FiniteAbelianGroup

    @property
    def order(self) -> int:
        return self.group.order

    def norm(self, lam: Sequence[int]) -> Vector:
        """N_w(lam) in generator coordinates."""
        return self.group.project(lam)


@dataclass(frozen=True)
class TorusCharacter:
    """theta : T^{wF} -> Q/Z; ``factors`` records the domain's invariant factors."""

    values: QZ
    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.factors):
            raise CharacterDomainMismatch("one value per invariant factor is required")
        for v, d in zip(self.values, self.factors):
            if not (0 <= v < 1) or d % v.denominator:
                raise CharacterDomainMismatch(f"value {v} is not a character of Z/{d}")

    @property
    def order(self) -> int:
        o = 1
        for v in self.values:
            o = lcm(o, v.denominator)
        return o

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.values)

    def __call__(self, g: Sequence[int]) -> Fraction:
        return reduce_qz(sum((v * c for v, c in zip(self.values, g)), Fraction(0)))

    def scale(self, a: int) -> TorusCharacter:
        return TorusCharacter(tuple(reduce_qz(a * v) for v in self.values), self.factors)

    def __str__(self) -> str:
        return "(" + ",".join(fmt_qz(v) for v in self.values) + ")"


def fmt_qz(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}" if v else "0"


def check_domain(T: FiniteTorus, theta: TorusCharacter) -> None:
    if theta.factors != T.group.invariant_factors:
        raise CharacterDomainMismatch(
            f"character on {theta.factors} evaluated on a torus with factors {T.group.invariant_factors}")


# ------------------------------------------------------------------ tori


@lru_cache(maxsize=4096)
def finite_torus(rd: RootDatum, tw: FrobeniusTwist, w: Seq) -> FiniteTorus:
    """T^{wF} for a sequence (or reduced word) w over S-bar."""
    W = word_matrix(rd, w)
    M = W @ tw.F_Y - IntMatrix.identity(rd.rank)
    return FiniteTorus(W, cokernel(M))


def characters(T: FiniteTorus) -> list[TorusCharacter]:
    f = T.group.invariant_factors
    return [TorusCharacter(v, f) for v in hom_group_elements(T.group)]


def trivial_character(T: FiniteTorus) -> TorusCharacter:
    return TorusCharacter(tuple(Fraction(0) for _ in T.group.invariant_factors), T.group.invariant_factors)


def splitting_exponent(rd: RootDatum, tw: FrobeniusTwist) -> int:
    d = 1
    for e in weyl_group(rd):
        d = lcm(d, matrix_order(e.matrix @ tw.tau))
    return d


def theta_on_Y(T: FiniteTorus, theta: TorusCharacter, lam: Sequence[int]) -> Fraction:
    """theta(N_w(lam))."""
    check_domain(T, theta)
    return theta(T.norm(lam))


# --------------------------------------------------- dual vectors in X (x) Q/Z


def dual_vector(T: FiniteTorus, theta: TorusCharacter) -> QZ:
    """s with theta(N_w(mu)) = <mu, s> for all mu in Y."""
    n = T.group.ambient_rank
    return tuple(theta_on_Y(T, theta, [int(i == j) for i in range(n)]) for j in range(n))


def character_from_dual(T: FiniteTorus, s: Sequence[Fraction]) -> TorusCharacter:
    """Inverse of :func:`dual_vector`; s must be fixed by (wF)^T."""
    vals = []
    for k, d in enumerate(T.group.invariant_factors):
        lift = T.group.generator_lift(k)
        v = reduce_qz(sum((Fraction(a) * b for a, b in zip(lift, s)), Fraction(0)))
        if d % v.denominator:
            raise PreconditionError("the vector is not fixed by (wF)^T, so it is no character of T^{wF}")
        vals.append(v)
    theta = TorusCharacter(tuple(vals), T.group.invariant_factors)
    if dual_vector(T, theta) != tuple(reduce_qz(x) for x in s):
        raise PreconditionError("the vector is not fixed by (wF)^T, so it is no character of T^{wF}")
    return theta


# ------------------------------------------------------------ Y_{w,v}


@dataclass(frozen=True)
class CorootFrame:
    w: Seq
    v: Seq
    alpha_w: tuple[Vector, ...]  # alpha_{w,i} check (zero where w_i = 1)
    alpha_wv: tuple[Vector, ...]  # alpha_{w,v,i} check (zero off I_{w,v})
    beta_w: tuple[Vector, ...]
    beta_wv: tuple[Vector, ...]
    index_set: tuple[int, ...]  # I_{w,v}, 0-based positions


def _prefix_apply(rd: RootDatum, prefix: Seq, lam: Vector) -> Vector:
    return word_matrix(rd, prefix).apply(lam)


def coroot_frame(rd: RootDatum, w: Seq, v: Seq) -> CorootFrame:
    check_leq(v, w)
    n = rd.rank
    zero = (0,) * n
    aw, awv, bw, bwv, idx = [], [], [], [], []
    for i, (wi, vi) in enumerate(zip(w, v)):
        a = rd.simple_coroot(wi) if wi else zero
        aw.append(a)
        b = _prefix_apply(rd, w[:i], a) if wi else zero
        bw.append(b)
        if wi != vi:
            idx.append(i)
            awv.append(a)
            bwv.append(b)
        else:
            awv.append(zero)
            bwv.append(zero)
    return CorootFrame(w, v, tuple(aw), tuple(awv), tuple(bw), tuple(bwv), tuple(idx))


def Y_wv(rd: RootDatum, w: Seq, v: Seq) -> Sublattice:
    fr = coroot_frame(rd, w, v)
    return Sublattice.of(rd.rank, [fr.beta_wv[i] for i in fr.index_set])


def Y_wv_alternative(rd: RootDatum, w: Seq, v: Seq, y: Seq) -> Sublattice:
    """The family t_1 ... t_{i-1}(alpha_{w,v,i}) for any v <= y <= w."""
    check_leq(v, y)
    check_leq(y, w)
    fr = coroot_frame(rd, w, v)
    return Sublattice.of(rd.rank, [_prefix_apply(rd, y[:i], fr.alpha_wv[i]) for i in fr.index_set])


def image_of_wF_minus_1(rd: RootDatum, tw: FrobeniusTwist, y: Seq) -> Sublattice:
    M = word_matrix(rd, y) @ tw.F_Y - IntMatrix.identity(rd.rank)
    return Sublattice.image(M)


def quotient_torus(rd: RootDatum, tw: FrobeniusTwist, w: Seq, v: Seq, y: Seq | None = None) -> FiniteAbelianGroup:
    """Y / ((yF - 1)Y + Y_{w,v}) for v <= y <= w (y defaults to w)."""
    y = w if y is None else y
    check_leq(v, y)
    check_leq(y, w)
    L = sublattice_sum(image_of_wF_minus_1(rd, tw, y), Y_wv(rd, w, v))
    return quotient_by(Sublattice.full(rd.rank), L)


@dataclass(frozen=True)
class GroupHom:
    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    images: tuple[Vector, ...]  # image of each source generator

    def __call__(self, g: Sequence[int]) -> Vector:
        acc = [0] * len(self.target.invariant_factors)
        for c, img in zip(g, self.images):
            acc = [a + c * b for a, b in zip(acc, img)]
        return self.target.reduce(acc)

    def is_bijective(self) -> bool:
        if self.source.order != self.target.order:
            return False
        seen = {self(g) for g in self.source.elements()}
        return len(seen) == self.target.order

    def is_homomorphism(self) -> bool:
        # each generator's order must be respected
        for d, img in zip(self.source.invariant_factors, self.images):
            if any(x for x in self.target.reduce([d * c for c in img])):
                return False
        return True


def canonical_iso(rd: RootDatum, tw: FrobeniusTwist, w: Seq, y: Seq, v: Seq) -> GroupHom:
    """T^{wF}/N_w(Y_{w,v}) -> T^{yF}/N_y(Y_{w,v}) induced by the identity of Y."""
    src = quotient_torus(rd, tw, w, v, w)
    tgt = quotient_torus(rd, tw, w, v, y)
    images = tuple(tgt.project(src.generator_lift(k)) for k in range(len(src.invariant_factors)))
    hom = GroupHom(src, tgt, images)
    if not hom.is_homomorphism():
        raise InvariantViolation("identity of Y does not descend to the quotients")
    return hom


# ------------------------------------------------------------ w_theta


def w_theta(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter) -> Seq:
    T = finite_torus(rd, tw, w)
    check_domain(T, theta)
    fr = coroot_frame(rd, w, w)
    return tuple(0 if (wi == 0 or theta(T.norm(fr.beta_w[i])) == 0) else wi for i, wi in enumerate(w))


def interval(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter) -> list[Seq]:
    bottom = w_theta(rd, tw, w, theta)
    return [x for x in seqs_below(w) if seq_leq(bottom, x)]


def in_interval_by_definition(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter, x: Seq) -> bool:
    """x <= w and theta vanishes on N_w(Y_{w,x})."""
    if not seq_leq(x, w):
        return False
    T = finite_torus(rd, tw, w)
    check_domain(T, theta)
    return all(theta(T.norm(g)) == 0 for g in Y_wv(rd, w, x).generators)


def theta_on_y(rd: RootDatum, tw: FrobeniusTwist, w: Seq, theta: TorusCharacter, y: Seq) -> TorusCharacter:
    """The character theta_y of T^{yF} with theta_y o N_y = theta o N_w."""
    if not in_interval_by_definition(rd, tw, w, theta, y):
        raise NotInInterval(f"y is not in I(w, theta)")
    Tw, Ty = finite_torus(rd, tw, w), finite_torus(rd, tw, y)
    vals = tuple(theta(Tw.norm(Ty.group.generator_lift(k))) for k in range(len(Ty.group.invariant_factors)))
    out = TorusCharacter(vals, Ty.group.invariant_factors)
    # defining relation on a basis of Y
    n = rd.rank
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        if out(Ty.norm(e)) != theta(Tw.norm(e)):
            raise InvariantViolation("theta_y o N_y differs from theta o N_w")
    return out


# ------------------------------------------------------------ pi_0 of S_{w,v}


def _p_prime_part(factors: Sequence[int], p: int) -> tuple[int, ...]:
    out = []
    for d in factors:
        while d % p == 0:
            d //= p
        if d > 1:
            out.append(d)
    return tuple(out)


def pi0_S(rd: RootDatum, tw: FrobeniusTwist, w: Seq, v: Seq) -> FiniteAbelianGroup:
    """pi_0 of S_{w,v} / (S_{w,v}^o . C^F), computed from character lattices inside the cover.

    The r-fold torus T' = T-hat^r carries wF' with blocks s_i in position (i, i+1) and
    s_r F in position (r, 1).  S is the preimage of T'' = prod Im(alpha_{w,v,i}) under
    wF' - 1, so X(S) = X(T') / (wF' - 1)^T Ann(Y(T'')).  Characters of the finite
    quotient are the torsion classes that also kill the diagonal copy of C^F.
    """
    check_leq(v, w)
    r = len(w)
    if r == 0:
        raise PreconditionError("pi0_S needs a nonempty sequence")
    cov = injective_coroots_cover(rd, tw)
    hat, htw = cov.datum, cov.twist
    m = hat.rank
    N = m * r

    blocks = [[IntMatrix.zeros(m, m) for _ in range(r)] for _ in range(r)]
    for i in range(r):
        s = word_matrix(hat, (w[i],))
        blocks[i][(i + 1) % r] = s @ htw.F_Y if i == r - 1 else s
    M = _assemble(blocks, m)
    f_star = (M - IntMatrix.identity(N)).T

    # Y(T''): alpha_{w,v,i} in the i-th slot; coroots of the cover are primitive
    gens = []
    for i in range(r):
        if w[i] != v[i]:
            a = hat.simple_coroot(w[i])
            gens.append((0,) * (m * i) + a + (0,) * (m * (r - 1 - i)))
    if gens:
        ann = kernel_basis(IntMatrix.from_rows(gens, N))
    else:
        ann = [IntMatrix.identity(N).column(j) for j in range(N)]
    K0 = Sublattice.of(N, [f_star.apply(x) for x in ann])
    torsion = K0.saturation()

    # diagonal C^F: phi(chi) = sum_i Bc^T chi_i, read modulo (Fc^T - 1)
    Bc = cov.central_kernel.basis()
    c = len(Bc)
    if c:
        BcM = IntMatrix.from_columns(Bc, m)
        Fc = IntMatrix.from_columns(
            [_solve_exact(BcM, htw.F_Y.apply(b)) for b in Bc], c)
        phi = BcM.T
        for _ in range(r - 1):
            phi = phi.hstack(BcM.T)
        rel = Sublattice.image(Fc.T - IntMatrix.identity(c))
        allowed = preimage(phi, rel)
        chars = sublattice_intersection(torsion, allowed)
    else:
        chars = torsion
    G = quotient_by(chars, K0)
    factors = _p_prime_part(G.invariant_factors, tw.p)
    return FiniteAbelianGroup(factors, IntMatrix.zeros(len(factors), 0), 0)


def _solve_exact(M: IntMatrix, b: Vector) -> Vector:
    from .lattice import solve_integral

    x = solve_integral(M, b)
    if x is None:
        raise InvariantViolation("central torus is not F-stable")
    return x


def _assemble(blocks: list[list[IntMatrix]], m: int) -> IntMatrix:
    r = len(blocks)
    rows = []
    for bi in range(r):
        for i in range(m):
            row: list[int] = []
            for bj in range(r):
                row.extend(blocks[bi][bj].row(i))
            rows.append(row)
    return IntMatrix.from_rows(rows, m * r)
