from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dlseries.errors import InvalidLeviTwist, PreconditionError
from dlseries.rootdatum import builtin_datum, named_twist, weyl_group
from dlseries.series import (
    SeqPair,
    UNKNOWN,
    check_minimality_lemma,
    context,
    ell_prime_part,
    elementary_moves,
    geometric_partition,
    geometrically_conjugate,
    geometrically_conjugate_dual,
    is_regular,
    is_super_regular,
    make_pair,
    minimal_pairs,
    rationally_conjugate,
    series_of,
    series_partition,
    sim_w_equivalent,
    stabilizer_data,
    standard_levi_pairs,
)
from dlseries.torus import TorusCharacter

F = Fraction


def setup(name, q=3, twist="split"):
    rd = builtin_datum(name) if "-" in name else builtin_datum(name[:-1], int(name[-1]))
    return rd, named_twist(rd, q, 1, twist)


# -------------------------------------------------------------- oracles


@pytest.mark.parametrize("name,q,n_pairs,n_rat,n_geo", [
    ("GL2", 3, 12, 6, 6),
    ("SL2", 3, 6, 4, 3),
    ("PGL2", 3, 6, 3, 3),
    ("A2-sc", 3, 54, 9, 9),
    ("B2-sc", 3, 72, 12, 9),
    ("GL3", 3, None, 18, 18),
])
def test_series_counts(name, q, n_pairs, n_rat, n_geo):
    rd, tw = setup(name, q)
    pairs = context(rd, tw).pairs()
    if n_pairs is not None:
        assert len(pairs) == n_pairs
    part = series_partition(rd, tw)
    assert len(part) == n_rat
    assert len({sid.geometric_key for sid in part}) == n_geo == len(geometric_partition(rd, tw))
    assert sum(sid.size for sid in part) == len(pairs)


def test_sl2_split_series():
    rd, tw = setup("SL2")
    part = series_partition(rd, tw)
    half = [sid for sid in part if sid.dual == (F(1, 2),)]
    assert len(half) == 2 and all(sid.size == 1 for sid in half)
    a, b = half[0].representative, half[1].representative
    assert geometrically_conjugate(rd, tw, a, b)
    assert not rationally_conjugate(rd, tw, a, b)


def test_brauer_and_trivial_filters():
    rd, tw = setup("SL2")
    assert len(series_partition(rd, tw, "brauer", 2)) == 1
    assert len(series_partition(rd, tw, trivial_only=True)) == 1
    with pytest.raises(PreconditionError):
        series_partition(rd, tw, "brauer", 3)
    with pytest.raises(PreconditionError):
        series_partition(rd, tw, "other")


def test_ell_prime_part():
    th = TorusCharacter((F(1, 8),), (8,))
    assert ell_prime_part(th, 2).is_trivial()
    th = TorusCharacter((F(1, 6),), (6,))
    lp = ell_prime_part(th, 2)
    assert lp.order == 3 and ell_prime_part(lp, 2) == lp


@pytest.mark.parametrize("name", ["GL2", "SL2", "A2-sc"])
@pytest.mark.parametrize("ell", [2, 5])
def test_k_mode_refines_brauer(name, ell):
    rd, tw = setup(name)
    brauer = series_partition(rd, tw, "brauer", ell)
    for sid in series_partition(rd, tw):
        blocks = {id(b) for m in sid.members for b in brauer if m in b.members}
        assert len(blocks) == 1


def test_representative_is_canonical():
    rd, tw = setup("GL2")
    for sid in series_partition(rd, tw):
        assert sid.representative == min(sid.members, key=lambda p: p.sort_key())
        assert series_of(rd, tw, sid.representative) == sid


def test_minimal_pairs_witness():
    for name in ("SL2", "GL2", "B2-sc"):
        rd, tw = setup(name)
        for sid in series_partition(rd, tw):
            for a, b, x in check_minimality_lemma(rd, tw, sid):
                assert a in minimal_pairs(rd, tw, sid) and b in sid.members


def test_moves_and_reachability():
    rd, tw = setup("SL2")
    ctx = context(rd, tw)
    part = series_partition(rd, tw)
    sid = next(s for s in part if s.size == 2 and s.dual == (F(0),))
    a, b = sid.members
    assert sim_w_equivalent(rd, tw, SeqPair(a.w.word or (0,), ctx.dual(a)), SeqPair(b.w.word or (0,), ctx.dual(b)))
    half = [s for s in part if s.dual == (F(1, 2),)]
    x, y = half[0].representative, half[1].representative
    res = sim_w_equivalent(rd, tw, SeqPair(x.w.word or (0,), ctx.dual(x)), SeqPair(y.w.word or (0,), ctx.dual(y)))
    assert res == UNKNOWN
    nbs = elementary_moves(rd, tw, SeqPair((1,), (F(0),)))
    assert SeqPair((0,), (F(0),)) in nbs


def test_regularity_examples():
    rd, tw = setup("A2-sc")
    W = weyl_group(rd)
    triv = make_pair(rd, tw, W.identity, (F(0), F(0)))
    # the trivial character is regular only for the whole group
    assert is_regular(rd, tw, (1, 2), W.identity, triv)
    assert not is_regular(rd, tw, (), W.identity, triv)
    assert is_super_regular(rd, tw, (1, 2), W.identity, triv)
    with pytest.raises(InvalidLeviTwist):
        is_regular(rd, tw, (1,), W.from_word((2,)), triv)
    sd = stabilizer_data(rd, tw, triv)
    assert len(sd.full_stab) == 6 and sd.w_group == sd.full_stab


def test_standard_levi_pairs_count():
    rd, tw = setup("A2-sc")
    pairs = standard_levi_pairs(rd, tw)
    assert ((), weyl_group(rd).identity) in pairs
    assert all(len(I) != 2 or v.length == 0 for I, v in pairs)


# -------------------------------------------------------------- properties


@st.composite
def pair_of_pairs(draw):
    name = draw(st.sampled_from(["SL2", "PGL2", "GL2", "A2-sc", "B2-sc"]))
    rd, tw = setup(name)
    pairs = context(rd, tw).pairs()
    return rd, tw, draw(st.sampled_from(pairs)), draw(st.sampled_from(pairs)), draw(st.sampled_from(pairs))


@settings(max_examples=120, deadline=None)
@given(pair_of_pairs())
def test_conjugacy_relations(case):
    rd, tw, a, b, c = case
    assert rationally_conjugate(rd, tw, a, a)
    assert rationally_conjugate(rd, tw, a, b) == rationally_conjugate(rd, tw, b, a)
    if rationally_conjugate(rd, tw, a, b):
        assert geometrically_conjugate_dual(rd, tw, a, b)
    assert geometrically_conjugate(rd, tw, a, b) == geometrically_conjugate_dual(rd, tw, a, b)
    if geometrically_conjugate_dual(rd, tw, a, b) and geometrically_conjugate_dual(rd, tw, b, c):
        assert geometrically_conjugate_dual(rd, tw, a, c)


@settings(max_examples=60, deadline=None)
@given(pair_of_pairs())
def test_super_regular_implies_regular(case):
    rd, tw, p, _, _ = case
    for I, v in standard_levi_pairs(rd, tw):
        if is_super_regular(rd, tw, I, v, p):
            assert is_regular(rd, tw, I, v, p)
