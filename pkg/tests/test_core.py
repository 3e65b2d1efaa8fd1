import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pfacomplexity.core import (
    BudgetError,
    InputError,
    Pfa,
    PreconditionError,
    drop_prefix,
    gap,
    identity_pfa,
    pad_states,
    reverse_pfa,
    rho,
    rho_table,
    validate_pfa,
)

from conftest import converted_thenfa, numeric_0110, pfas, three_state_0110, wit0110, words
from oracles import brute_gap, brute_rho


def test_validate_examples():
    assert validate_pfa(identity_pfa(2, 2, pi=(1, 0), eta=(1, 0))) == []
    assert validate_pfa(converted_thenfa()) == []
    bad = Pfa((1, 0), (((F(9, 10), 0), (0, 1)),), (1, 0))
    v = validate_pfa(bad)
    assert len(v) == 1 and "row" in str(v[0])


def test_validate_catches_negative_and_bad_pi():
    A = Pfa((F(1, 2), F(1, 4)), (((F(3, 2), F(-1, 2)), (0, 1)),), (1, 0))
    assert len(validate_pfa(A)) >= 2


def test_shape_errors():
    with pytest.raises(InputError):
        Pfa((1, 0), (((1, 0),),), (1, 0))
    with pytest.raises(InputError):
        Pfa((1, 0), (((1, 0), (0, 1)),), (1,))


def test_rho_examples(wit):
    assert rho(wit, "0110") == F(1, 2)
    assert rho(wit, "1110") == F(7, 16)
    I = identity_pfa(3, 2, pi=(F(1, 3), F(1, 3), F(1, 3)), eta=(1, 1, 0))
    assert all(rho(I, w) == F(2, 3) for w in ["", "0", "0110", "111"])


def test_rho_letter_out_of_range(wit):
    with pytest.raises(InputError):
        rho(wit, "012")


def test_gap_fixtures():
    A = wit0110()
    assert gap(A, "0110") == F(1, 16)
    assert gap(A, "01110") == F(1, 32)
    assert gap(A, "011110") == F(1, 64)
    assert gap(three_state_0110(), "0110") == F(7, 16)
    g = gap(numeric_0110(), "0110")
    assert abs(g - 0.1775) < 5e-4 and g > 1 / 6


def test_gap_budget(wit):
    with pytest.raises(BudgetError):
        gap(wit, "0" * 12, budget=1000)


def test_gap_trivial_cases(wit):
    assert gap(wit, "") == 1
    unary = Pfa((1, 0), (((F(1, 2), F(1, 2)), (0, 1)),), (1, 0))
    assert gap(unary, "000") == 1


def test_drop_prefix_examples(wit):
    assert drop_prefix(wit, "") == wit
    B = drop_prefix(wit, "0")
    assert B.pi == (0, 1)
    assert rho(B, "110") == F(1, 2)


def test_drop_prefix_dfa_gives_coordinate_vector():
    # a DFA as PFA: permutation-like 0/1 rows
    P0 = ((0, 1, 0), (0, 0, 1), (0, 0, 1))
    P1 = ((0, 0, 1), (1, 0, 0), (0, 0, 1))
    A = Pfa((1, 0, 0), (P0, P1), (0, 1, 0))
    for x in ["0", "01", "0110", "111"]:
        pi = drop_prefix(A, x).pi
        assert sorted(pi) == [0, 0, 1]


def test_reverse_examples():
    A = identity_pfa(2, 2, pi=(1, 0), eta=(1, 0))
    B = reverse_pfa(A)
    assert B.pi == (1, 0) and B.eta == (1, 0)
    h = F(1, 2)
    A = Pfa((h, h), (((h, h), (h, h)), ((0, 1), (1, 0))), (1, 0))
    B = reverse_pfa(A)
    for n in range(7):
        for y in itertools.product((0, 1), repeat=n):
            assert rho(B, y[::-1]) == 2 * rho(A, y)


@st.composite
def doubly_stochastic_pfas(draw):
    k = draw(st.integers(2, 3))
    perms = list(itertools.permutations(range(k)))

    def mixture():
        wts = [draw(st.integers(0, 3)) for _ in perms]
        if not any(wts):
            wts[0] = 1
        tot = sum(wts)
        return tuple(tuple(sum(F(wt, tot) for wt, p in zip(wts, perms) if p[i] == j) for j in range(k))
                     for i in range(k))

    support = draw(st.lists(st.integers(0, 1), min_size=k, max_size=k).filter(any))
    eta = tuple(draw(st.lists(st.integers(0, 1), min_size=k, max_size=k).filter(any)))
    pi = tuple(F(x, sum(support)) for x in support)
    return Pfa(pi, (mixture(), mixture()), eta)


@given(doubly_stochastic_pfas(), words(2, 0, 6))
def test_reverse_scales_rho(A, y):
    ratio = F(sum(1 for x in A.pi if x), sum(A.eta))
    assert rho(reverse_pfa(A), y[::-1]) == ratio * rho(A, y)


@given(doubly_stochastic_pfas(), words(2, 1, 6))
def test_reverse_preserves_gap_when_supports_match(A, y):
    if sum(1 for x in A.pi if x) == sum(A.eta):
        assert gap(reverse_pfa(A), y[::-1]) == gap(A, y)


def test_reverse_rejects_non_doubly_stochastic(wit):
    with pytest.raises(PreconditionError):
        reverse_pfa(wit)


def test_pad_states_keeps_rho(wit):
    B = pad_states(wit, 4)
    assert B.k == 4 and validate_pfa(B) == []
    for w in ["", "0", "0110", "1011"]:
        assert rho(B, w) == rho(wit, w)


def test_json_round_trip(wit):
    assert Pfa.from_json(wit.to_json()) == wit
    A = numeric_0110()
    assert Pfa.from_json(A.to_json()) == A
    with pytest.raises(InputError):
        Pfa.from_json({"pi": [1]})


# -- properties ------------------------------------------------------------------------

@given(pfas(), words(3, 0, 5))
def test_rho_is_probability(A, w):
    w = tuple(s % A.alphabet for s in w)
    p = rho(A, w)
    assert 0 <= p <= 1
    assert p == brute_rho(A, w)


@given(pfas(b=2), st.integers(1, 6))
def test_at_most_one_positive_gap(A, n):
    table = rho_table(A, n)
    top = max(table.values())
    winners = [z for z, v in table.items() if v == top]
    positive = [z for z in table if gap(A, z) > 0]
    assert len(positive) <= 1
    if positive:
        assert winners == positive


@given(pfas(), words(3, 0, 3), words(3, 0, 3))
def test_drop_prefix_identity(A, x, w):
    x = tuple(s % A.alphabet for s in x)
    w = tuple(s % A.alphabet for s in w)
    assert rho(drop_prefix(A, x), w) == rho(A, x + w)


@given(pfas(b=2), words(2, 0, 3), words(2, 1, 4))
def test_suffix_gap_inequality(A, x, y):
    assert gap(drop_prefix(A, x), y) >= gap(A, x + y)


@given(pfas(k=2, b=2), words(2, 1, 5))
def test_gap_matches_brute_force(A, w):
    assert gap(A, w) == brute_gap(A, w)

