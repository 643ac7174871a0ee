from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dlseries.errors import InfiniteCokernel, NotContained, RankMismatch
from dlseries.lattice import (
    IntMatrix,
    Sublattice,
    cokernel,
    cokernel_structure,
    determinant,
    hom_group_elements,
    inverse_unimodular,
    kernel_basis,
    preimage,
    quotient_by,
    reduce_qz,
    smith_normal_form,
    solve_integral,
    solve_rational,
    sublattice_intersection,
    sublattice_sum,
)


def matrices(max_dim=4, lo=-6, hi=6, square=False):
    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_dim))
        n = m if square else draw(st.integers(1, max_dim))
        rows = draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m))
        return IntMatrix.from_rows(rows, n)
    return build()


# -------------------------------------------------------------- oracles


def test_snf_known_example():
    M = IntMatrix.from_rows([[-1, 3], [3, -1]])
    assert smith_normal_form(M).diagonal == (1, 8)


def test_snf_textbook_example():
    M = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert smith_normal_form(M).diagonal == (2, 6, 12)


def test_cokernel_of_diagonal():
    G = cokernel(IntMatrix.diagonal([1, 2, 6]))
    assert G.invariant_factors == (2, 6)
    assert G.order == 12


def test_infinite_cokernel_is_refused():
    with pytest.raises(InfiniteCokernel):
        cokernel(IntMatrix.from_rows([[1, 0], [0, 0]]))
    assert cokernel_structure(IntMatrix.from_rows([[2, 0], [0, 0]])) == ((2,), 1)


def test_quotient_by_example():
    big = Sublattice.full(2)
    small = Sublattice.of(2, [(2, 0), (0, 1)])
    assert quotient_by(big, small).invariant_factors == (2,)


def test_quotient_by_requires_containment():
    with pytest.raises(NotContained):
        quotient_by(Sublattice.of(2, [(2, 0)]), Sublattice.of(2, [(1, 0)]))


def test_hom_group_elements():
    G = cokernel(IntMatrix.diagonal([2, 3]))
    homs = hom_group_elements(G)
    assert G.invariant_factors == (6,)
    assert len(homs) == 6 and (Fraction(5, 6),) in homs


def test_reduce_qz():
    assert reduce_qz(Fraction(-1, 3)) == Fraction(2, 3)
    assert reduce_qz(Fraction(7, 2)) == Fraction(1, 2)


def test_shape_mismatch():
    with pytest.raises(RankMismatch):
        IntMatrix(2, 2, ((1, 2),))
    with pytest.raises(RankMismatch):
        Sublattice.of(2, [(1, 2, 3)])


def test_saturation_and_index():
    L = Sublattice.of(2, [(2, 4)])
    assert L.saturation().same_as(Sublattice.of(2, [(1, 2)]))
    assert L.index_in_saturation() == 2


def test_sum_intersection_preimage():
    A = Sublattice.of(2, [(2, 0)])
    B = Sublattice.of(2, [(3, 0), (0, 1)])
    assert sublattice_sum(A, B).same_as(Sublattice.full(2))
    assert sublattice_intersection(A, B).same_as(Sublattice.of(2, [(6, 0)]))
    M = IntMatrix.from_rows([[1, 1]])
    pre = preimage(M, Sublattice.of(1, [(2,)]))
    assert pre.contains((1, 1)) and not pre.contains((1, 0))


# -------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_snf_property(M):
    snf = smith_normal_form(M)
    assert snf.U @ M @ snf.V == snf.D
    assert abs(determinant(snf.U)) == 1 and abs(determinant(snf.V)) == 1
    d = snf.diagonal
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert b % a == 0 if a else b == 0
    for i in range(snf.D.rows):
        for j in range(snf.D.cols):
            if i != j:
                assert snf.D[i, j] == 0


@settings(max_examples=150, deadline=None)
@given(matrices(square=True))
def test_cokernel_order_is_abs_det(M):
    det = determinant(M)
    factors, free = cokernel_structure(M)
    if det == 0:
        assert free > 0
    else:
        assert free == 0
        assert cokernel(M).order == abs(det)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_kernel_basis_is_kernel(M):
    K = kernel_basis(M)
    for k in K:
        assert all(x == 0 for x in M.apply(k))
    assert len(K) == M.cols - smith_normal_form(M).rank


@settings(max_examples=150, deadline=None)
@given(matrices(square=True), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solvers_agree(M, x):
    x = x[: M.cols]
    b = M.apply(x)
    sol = solve_integral(M, b)
    assert sol is not None and M.apply(sol) == b
    r = solve_rational(M, b)
    assert r is not None and tuple(sum(Fraction(a) * c for a, c in zip(row, r)) for row in M.entries) == b


@settings(max_examples=100, deadline=None)
@given(matrices(square=True))
def test_inverse_unimodular(M):
    U = smith_normal_form(M).U
    assert U @ inverse_unimodular(U) == IntMatrix.identity(U.rows)


@settings(max_examples=100, deadline=None)
@given(matrices(square=True, lo=-4, hi=4))
def test_cokernel_projection_kills_image(M):
    if determinant(M) == 0:
        return
    G = cokernel(M)
    for j in range(M.cols):
        assert all(c == 0 for c in G.project(M.column(j)))
    for k in range(len(G.invariant_factors)):
        lift = G.generator_lift(k)
        assert G.project(lift) == tuple(int(i == k) for i in range(len(G.invariant_factors)))
