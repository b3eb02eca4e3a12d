import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butterfly_atlas.errors import InvalidInput, NotInSemigroup
from butterfly_atlas.moebius import (
    A, B, IDENTITY, GeneratorWord, ProjMat, Rational, factor_word, farey, in_semigroup,
    lft_apply, lft_apply_raw, reduce,
)
from oracles import farey_bruteforce, semigroup_by_sampling


def canonical_members(bound):
    seen = set()
    for a, b, c, d in itertools.product(range(-bound, bound + 1), repeat=4):
        if a * d - b * c in (1, -1):
            m = ProjMat(a, b, c, d)
            if m not in seen:
                seen.add(m)
                yield m


def test_reduce_examples():
    assert reduce(2, 4) == Rational(1, 2)
    assert reduce(0, 5) == Rational(0, 1)
    assert reduce(-3, -6) == Rational(1, 2)
    with pytest.raises(InvalidInput):
        reduce(1, 0)
    with pytest.raises(InvalidInput):
        reduce(3, 2)


def test_rational_parse_and_order():
    assert Rational.parse("3/6") == Rational(1, 2)
    assert str(Rational.parse(" 2 / 5 ")) == "2/5"
    assert Rational.parse("1") == Rational(1, 1)
    assert Rational(1, 3) < Rational(1, 2)
    for bad in ["1/0", "x", "5/3", "-1/2", "1/2/3"]:
        with pytest.raises(InvalidInput):
            Rational.parse(bad)
    with pytest.raises(InvalidInput):
        Rational(2, 4)


def test_farey_small():
    assert [str(r) for r in farey(3)] == ["0/1", "1/3", "1/2", "2/3", "1/1"]
    assert len(farey(5)) == 11
    assert farey(1) == [Rational(0, 1), Rational(1, 1)]


@pytest.mark.parametrize("qmax", [1, 2, 7, 13, 30])
def test_farey_matches_bruteforce(qmax):
    assert farey(qmax) == farey_bruteforce(qmax)


def test_projmat_sign_canonical():
    assert ProjMat(-1, 0, -1, -1) == A
    assert ProjMat(0, -1, -1, 0) == ProjMat(0, 1, 1, 0)
    assert hash(ProjMat(-1, 1, 0, 1)) == hash(ProjMat(1, -1, 0, -1))
    with pytest.raises(InvalidInput):
        ProjMat(1, 2, 3, 4)
    assert str(ProjMat.parse("2,1,3,2")) == "2,1,3,2"


def test_lft_ladder():
    m = ProjMat(1, 0, 2, 1)
    got = [lft_apply(m, Rational(1, n)) for n in range(1, 6)]
    assert got == [Rational(1, n + 2) for n in range(1, 6)]


def test_lft_raw_uses_positive_denominator():
    # B has d = 1 > 0; both representatives give the same image
    assert lft_apply_raw(B, Rational(1, 3)) == (2, 3)
    assert lft_apply_raw(ProjMat(1, -1, 0, -1), Rational(1, 3)) == (2, 3)


def test_semigroup_examples():
    assert in_semigroup(A) and in_semigroup(B) and in_semigroup(IDENTITY)
    assert not in_semigroup(ProjMat(1, 1, 0, 1))  # theta + 1 leaves [0, 1]
    assert not in_semigroup(ProjMat(0, 1, 1, 0))  # 1/theta has a pole at 0


def test_semigroup_matches_sampling_oracle():
    for m in canonical_members(4):
        assert in_semigroup(m) == semigroup_by_sampling(*m.entries()), m


def test_factor_examples():
    assert str(factor_word(ProjMat(2, 1, 3, 2))) == "BABAA"
    assert str(factor_word(ProjMat(1, 0, 3, 1))) == "AAA"
    assert str(factor_word(B)) == "B"
    assert str(factor_word(IDENTITY)) == ""
    with pytest.raises(NotInSemigroup):
        factor_word(ProjMat(1, 1, 0, 1))


def test_factor_negative_terminal_power():
    # the Euclidean remainder ends with a negative power of A that must cancel
    m = ProjMat(8, -9, 9, -10)
    assert in_semigroup(m)
    assert factor_word(m).matrix() == m


words = st.text(alphabet="AB", max_size=12)


@given(words)
@settings(max_examples=200, deadline=None)
def test_words_are_members_and_round_trip(letters):
    m = GeneratorWord(letters).matrix()
    assert in_semigroup(m)
    assert factor_word(m).matrix() == m


@given(words, st.fractions(min_value=0, max_value=1, max_denominator=50))
@settings(max_examples=200, deadline=None)
def test_members_map_interval_into_itself(letters, th):
    m = GeneratorWord(letters).matrix()
    out = lft_apply(m, Rational(th.numerator, th.denominator))
    a, b, c, d = m.entries()
    assert out.as_fraction() == (a * th + b) / (c * th + d)
    assert 0 <= out.as_fraction() <= 1


def test_bb_is_identity():
    assert B @ B == IDENTITY
    assert A ** 3 == ProjMat(1, 0, 3, 1)
    assert len(GeneratorWord("ABA")) == 3
    with pytest.raises(InvalidInput):
        GeneratorWord("ABC")


def test_gcd_preserved():
    for m in canonical_members(3):
        if not in_semigroup(m):
            continue
        for th in farey(9):
            p, q = lft_apply_raw(m, th)
            assert Fraction(p, q).denominator == q
