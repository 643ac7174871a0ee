from fractions import Fraction

import pytest

from dlseries.errors import CapExceeded, PreconditionError
from dlseries.jordan import (
    JordanDatum,
    NotLevi,
    bad_primes,
    center_component_order,
    centralizer_data,
    check_psi,
    fixing_element,
    is_isolated,
    is_quasi_isolated,
    jordan_datum,
    levi_subsystems,
    minimal_levi,
    pi_set,
    prime_factors,
)
from dlseries.rootdatum import builtin_datum, dual_datum, named_twist
from dlseries.series import context

F = Fraction


def test_bad_primes_and_pi():
    assert bad_primes(builtin_datum("G2-sc")) == {2, 3}
    assert bad_primes(builtin_datum("A3-sc")) == set()
    assert pi_set(builtin_datum("GL", 2)) == set()
    assert pi_set(builtin_datum("Sp4")) == {2}
    assert pi_set(builtin_datum("SL", 2)) == {2}
    assert pi_set(builtin_datum("SL", 3)) == {3}
    assert center_component_order(builtin_datum("Sp4")) == 2
    assert prime_factors(60) == {2, 3, 5}


def test_gl2_torus_levi():
    rd = builtin_datum("GL", 2)
    tw = named_twist(rd, 3, 1)
    s = (F(0), F(1, 2))
    rdd = dual_datum(rd)
    cd = centralizer_data(rdd, s)
    assert cd.phi_s == frozenset() and cd.connected
    assert minimal_levi(rdd, s).is_torus
    assert not is_quasi_isolated(rdd, s)
    jd = jordan_datum(rd, tw, s)
    assert isinstance(jd, JordanDatum) and jd.I == () and jd.v.length == 0
    assert check_psi(rd, tw, s, jd)


def test_trivial_s_is_whole_group():
    rd = builtin_datum("GL", 2)
    tw = named_twist(rd, 3, 1)
    jd = jordan_datum(rd, tw, (F(0), F(0)))
    assert jd.I == (1,) and jd.v.length == 0
    assert is_quasi_isolated(dual_datum(rd), (F(0), F(0)))


def test_sl2_disconnected():
    rd = builtin_datum("SL", 2)
    tw = named_twist(rd, 3, 1)
    jd = jordan_datum(rd, tw, (F(1, 2),))
    assert isinstance(jd, NotLevi) and "disconnected" in jd.reason and jd.pi == {2}
    rdd = dual_datum(rd)
    # C(s) is the torus normalizer: quasi-isolated, while C°(s) is the torus itself
    assert is_quasi_isolated(rdd, (F(1, 2),)) and not is_isolated(rdd, (F(1, 2),))


def test_fixing_element_requires_character():
    rd = builtin_datum("GL", 2)
    tw = named_twist(rd, 3, 1)
    assert fixing_element(rd, tw, (F(3, 8), F(1, 8))).length == 1
    with pytest.raises(PreconditionError):
        fixing_element(rd, tw, (F(1, 5), F(0)))


@pytest.mark.parametrize("name", ["B2-sc", "A2-sc", "A2-ad", "GL3"])
def test_psi_lands_in_series(name):
    rd = builtin_datum(name) if "-" in name else builtin_datum("GL", 3)
    tw = named_twist(rd, 3, 1)
    ctx = context(rd, tw)
    for s in sorted({ctx.dual(p) for p in ctx.pairs()}):
        jd = jordan_datum(rd, tw, s)
        if isinstance(jd, JordanDatum):
            assert check_psi(rd, tw, s, jd)


def test_levi_subsystems_count_a2():
    # the empty system, three A1 systems, and everything
    assert len(levi_subsystems(dual_datum(builtin_datum("A2-sc")))) == 5


def test_levi_cap():
    with pytest.raises(CapExceeded):
        levi_subsystems(dual_datum(builtin_datum("A5-sc")))
