import pytest
from hypothesis import given, settings, strategies as st

from dlseries.errors import CapExceeded, InvalidCartan, InvalidTwist, NonCrystallographic, UnknownType
from dlseries.lattice import IntMatrix, Sublattice
from dlseries.rootdatum import (
    build_root_datum,
    bruhat_leq,
    builtin_datum,
    cartan_type,
    dual_datum,
    enumerate_weyl,
    format_seq,
    frobenius_on_W,
    injective_coroots_cover,
    inversion_count,
    levi_datum,
    make_twist,
    named_twist,
    parse_seq,
    parse_spec_text,
    phi_permutation,
    regular_embedding,
    same_lattice_invariants,
    seq_join,
    seq_leq,
    seq_length,
    seqs_below,
    torsion_of_X_mod_roots,
    torsion_of_Y_mod_coroots,
    weyl_group,
    word_matrix,
)

CATALOGUE = {"A1-sc": 2, "A2-sc": 6, "A1xA1-ad": 4, "B2-sc": 8, "G2-sc": 12, "A3-sc": 24, "B3-ad": 48, "D4-sc": 192}
SMALL = ["A1-sc", "A1-ad", "A1xA1-sc", "A2-sc", "A2-ad", "B2-sc", "B2-ad", "G2-sc"]


@pytest.mark.parametrize("name,order", CATALOGUE.items())
def test_weyl_orders(name, order):
    rd = builtin_datum(name)
    W = weyl_group(rd)
    assert len(W) == order
    assert len(rd.roots) == 2 * max(e.length for e in W)


@pytest.mark.parametrize("name", SMALL)
def test_inversion_count_is_length(name):
    rd = builtin_datum(name)
    for e in weyl_group(rd):
        assert inversion_count(rd, e) == e.length
        assert word_matrix(rd, e.word) == e.matrix


def test_words_are_lex_least():
    rd = builtin_datum("A2-sc")
    W = weyl_group(rd)
    assert W.longest().word == (1, 2, 1)
    assert sorted(e.word for e in W) == [(), (1,), (1, 2), (1, 2, 1), (2,), (2, 1)]


def test_centres_and_types():
    assert torsion_of_X_mod_roots(builtin_datum("SL", 2)) == (2,)
    assert torsion_of_X_mod_roots(builtin_datum("PGL", 2)) == ()
    assert torsion_of_Y_mod_coroots(builtin_datum("PGL", 3)) == (3,)
    assert torsion_of_X_mod_roots(builtin_datum("GL", 3)) == ()
    assert cartan_type(builtin_datum("Sp4")) == [("B", 2)]
    assert cartan_type(builtin_datum("G2-sc")) == [("G", 2)]
    assert cartan_type(builtin_datum("A1xA1-sc")) == [("A", 1), ("A", 1)]


def test_gl_datum():
    rd = builtin_datum("GL", 3)
    assert rd.rank == 3 and rd.semisimple_rank == 2
    assert rd.simple_root(1) == (1, -1, 0) == rd.simple_coroot(1)


def test_builtin_name_errors():
    with pytest.raises(InvalidCartan):
        builtin_datum("nonsense")
    with pytest.raises(InvalidCartan):
        builtin_datum("SL", 1)
    with pytest.raises(UnknownType):
        builtin_datum("Az-sc")


def test_invalid_cartan_inputs():
    with pytest.raises(InvalidCartan):
        build_root_datum([(1, 0)], [(1, 0)])  # <a, a_check> = 1
    with pytest.raises(NonCrystallographic):
        build_root_datum([(2, 0), (0, 2)], [(1, -1), (-1, 1)])
    with pytest.raises(InvalidCartan):
        build_root_datum([(2, -1), (-1, 2)], [(1, 0), (0, 1)], rank=3)


def test_twists():
    rd = builtin_datum("A2-sc")
    tw = named_twist(rd, 2, 1, "graph")
    assert phi_permutation(rd, tw) == (2, 1)
    assert tw.q == 2
    with pytest.raises(InvalidTwist):
        named_twist(builtin_datum("B2-sc"), 3, 1, "graph")
    with pytest.raises(InvalidTwist):
        make_twist(rd, 4)
    with pytest.raises(InvalidTwist):
        named_twist(rd, 3, 1, "weird")


def test_frobenius_on_W_graph():
    rd = builtin_datum("A2-sc")
    W = weyl_group(rd)
    tw = named_twist(rd, 2, 1, "graph")
    s1 = W.from_word((1,))
    assert W.element(frobenius_on_W(tw, s1.matrix)).word == (2,)


def test_sequences():
    assert parse_seq("s1s2") == (1, 2)
    assert parse_seq("1,s2,s1") == (0, 2, 1)
    assert format_seq((0, 2)) == "(1,s2)"
    with pytest.raises(ValueError):
        parse_seq("s3", 2)
    w = (1, 2, 1)
    assert seq_length((0, 2, 0)) == 1
    assert len(seqs_below(w)) == 8
    assert seq_leq((0, 2, 0), w) and not seq_leq((2, 0, 0), w)
    assert seq_join((1, 0, 0), (0, 0, 1)) == (1, 0, 1)


def test_bruhat_order_a2():
    rd = builtin_datum("A2-sc")
    W = weyl_group(rd)
    e, s1, s12, w0 = (W.from_word(x) for x in ((), (1,), (1, 2), (1, 2, 1)))
    assert bruhat_leq(W, e, w0) and bruhat_leq(W, s1, s12) and bruhat_leq(W, s12, w0)
    assert not bruhat_leq(W, W.from_word((2, 1)), s12)


def test_levi_and_dual():
    rd = builtin_datum("B2-sc")
    L = levi_datum(rd, (2,))
    assert L.semisimple_rank == 1 and L.simple_root(1) == rd.simple_root(2)
    d = dual_datum(rd)
    assert d.roots == rd.coroots
    assert dual_datum(d).roots == rd.roots
    assert cartan_type(d) == [("B", 2)] or cartan_type(d) == [("C", 2)]
    assert same_lattice_invariants(builtin_datum("SL", 2), builtin_datum("A1-sc"))
    assert not same_lattice_invariants(builtin_datum("SL", 2), builtin_datum("PGL", 2))


@pytest.mark.parametrize("name", ["A1-sc", "A1-ad", "A2-sc", "A2-ad", "B2-sc", "A1xA1-sc"])
def test_regular_embedding(name):
    rd = builtin_datum(name)
    tw = named_twist(rd, 3, 1)
    emb = regular_embedding(rd, tw)
    big = emb.datum
    # connected centre: X-tilde / Z Phi torsion free; coroots map to coroots
    assert torsion_of_X_mod_roots(big) == ()
    assert big.semisimple_rank == rd.semisimple_rank
    for i in range(1, rd.semisimple_rank + 1):
        assert emb.inclusion.apply(rd.simple_coroot(i)) == big.simple_coroot(i)
        assert emb.restriction.apply(big.simple_root(i)) == rd.simple_root(i)
    assert emb.restriction == emb.inclusion.T


@pytest.mark.parametrize("name", ["A1-sc", "A1-ad", "A2-ad", "B2-ad", "A1xA1-ad"])
def test_injective_coroots_cover(name):
    rd = builtin_datum(name)
    tw = named_twist(rd, 3, 1)
    cov = injective_coroots_cover(rd, tw)
    assert torsion_of_Y_mod_coroots(cov.datum) == ()
    for i in range(1, rd.semisimple_rank + 1):
        assert cov.projection.apply(cov.datum.simple_coroot(i)) == rd.simple_coroot(i)
    # the kernel is central: killed by every root of the cover
    for b in cov.central_kernel.basis():
        assert all(sum(x * y for x, y in zip(a, b)) == 0 for a in cov.datum.roots)


def test_weyl_cap():
    with pytest.raises(CapExceeded):
        enumerate_weyl(builtin_datum("A3-sc"), cap=10)


def test_spec_file_round_trip():
    text = """
    # SL3 in the simply connected form
    name = SL3-file
    rank = 2
    roots = [[2,-1],[-1,2],[1,1],[-2,1],[1,-2],[-1,-1]]
    coroots = [[1,0],[0,1],[1,1],[-1,0],[0,-1],[-1,-1]]
    simple = [0, 1]
    p = 5
    a = 2
    """
    rd, tw = parse_spec_text(text)
    assert rd.name == "SL3-file"
    assert rd == builtin_datum("A2-sc")
    assert tw.q == 25


def test_spec_file_errors():
    with pytest.raises(InvalidCartan):
        parse_spec_text("rank = 1\nroots = [[2]]\ncoroots = [[1]]\n")
    with pytest.raises(InvalidCartan):
        parse_spec_text("bogus = 1\n")
    with pytest.raises(InvalidCartan):
        parse_spec_text("rank = 1\nroots = [[2],[-2],[4]]\ncoroots = [[1],[-1],[1]]\nsimple = [0]\n")


# ------------------------------------------------------------ properties


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL), st.lists(st.integers(1, 2), max_size=8))
def test_word_matrix_is_in_w_and_length_bounded(name, word):
    rd = builtin_datum(name)
    W = weyl_group(rd)
    word = [min(x, rd.semisimple_rank) for x in word]
    e = W.element(word_matrix(rd, word))
    assert e.length <= len(word)
    assert e.length % 2 == len(word) % 2
    assert W.mul(e, W.inv(e)) == W.identity


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_weyl_group_preserves_roots(name, data):
    rd = builtin_datum(name)
    W = weyl_group(rd)
    e = data.draw(st.sampled_from(list(W)))
    assert {e.matrix.apply(c) for c in rd.coroots} == set(rd.coroots)
    assert W.from_word(e.word) == e
