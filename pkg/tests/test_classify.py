import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from pfacomplexity.classical import an
from pfacomplexity.classify import (
    FORMS,
    WitnessFamily,
    check_regular_tail,
    decompositions,
    extremal_trace,
    is_class2,
    pad_alphabet,
    render,
    verify_witness,
    witness_class2,
    witnessed_language,
)
from pfacomplexity.core import InputError, word, word_str
from pfacomplexity.ifs import Ifs2, ifs_rho

from checks import ALL_FAMILIES, brute_witnessed, classification_soundness, forward_direction
from conftest import ifs2s, random_ifs2, wit0110_ifs2


def brute_trace(I, L):
    """(max, argmax, unique, min, argmin, unique) per length, lexicographic ties."""
    out = []
    for n in range(L + 1):
        vals = {z: ifs_rho(I, z) for z in itertools.product((0, 1), repeat=n)}
        hi, lo = max(vals.values()), min(vals.values())
        his = sorted(z for z, v in vals.items() if v == hi)
        los = sorted(z for z, v in vals.items() if v == lo)
        out.append((hi, his[0], len(his) == 1, lo, los[0], len(los) == 1))
    return out


def as_tuples(trace):
    return [(s.max_value, s.max_arg, s.max_unique, s.min_value, s.min_arg, s.min_unique) for s in trace.steps]


def test_is_class2_examples():
    assert is_class2("000111") == WitnessFamily("IN_JM", 0, 3, 3)
    assert is_class2("0110") == WitnessFamily("IN_JM_I", 0, 1, 2)
    assert is_class2("0100") is None


def test_render_and_decompositions_agree():
    for form in FORMS:
        for i in (0, 1):
            for n in range(4):
                for m in range(4):
                    w = render(form, i, n, m)
                    assert WitnessFamily(form, i, n, m) in decompositions(w) or len(w) == 0


def test_every_classified_word_has_a_witness_family():
    for n in range(1, 9):
        for w in itertools.product((0, 1), repeat=n):
            fam = is_class2(w)
            if fam is not None:
                assert fam.word() == w


def test_witness_examples():
    for w in ["0011", "01110", "0010101", "0110", "1", "000", "0101", "110101"]:
        I = witness_class2(w)
        assert I.violations() == []
        assert extremal_trace(I, len(w)).witnesses(w), w
        assert verify_witness(I, is_class2(w))


def test_witness_rejects_unclassified():
    with pytest.raises(InputError):
        witness_class2("0100")


def test_soundness_up_to_eight():
    count, seen, bad = classification_soundness(8)
    assert bad == [] and seen == ALL_FAMILIES and count > 100


def test_trace_example():
    tr = extremal_trace(wit0110_ifs2(), 6)
    assert tr[4].max_arg == word("0110") and tr[4].max_unique
    assert all(s.max_unique for s in tr.steps)


def test_identity_trace_is_never_unique():
    tr = extremal_trace(Ifs2(0, 1, 0, 1, F(1, 3)), 5)
    for ell in range(1, 6):
        assert not tr[ell].max_unique and not tr[ell].min_unique
        assert tr[ell].max_value == F(1, 3)


@settings(max_examples=40)
@given(ifs2s())
def test_trace_matches_brute_force(I):
    assert as_tuples(extremal_trace(I, 8)) == brute_trace(I, 8)


def test_trace_matches_brute_force_long():
    rng = random.Random(4)
    for _ in range(10):
        I = random_ifs2(rng, den=32)
        assert as_tuples(extremal_trace(I, 12)) == brute_trace(I, 12)


def test_witnessed_language_examples():
    # increasing maps with f1 above f0 everywhere
    up = Ifs2(0, F(1, 4), F(1, 2), F(1, 4), F(1, 3))
    assert witnessed_language(up, 8) == [(1,) * n for n in range(1, 9)]
    got = set(witnessed_language(wit0110_ifs2(), 10))
    for m in range(0, 9):
        assert (0,) + (1,) * m + (0,) in got
    commuting = Ifs2(F(1, 4), F(1, 2), F(1, 8), F(3, 4), F(1, 3))
    assert all(len(set(u)) == 1 for u in witnessed_language(commuting, 8))


def test_constant_maps_only_witness_one_letter():
    # the value depends only on the last letter, so longer words tie
    assert witnessed_language(Ifs2(F(1, 4), 0, F(1, 2), 0, F(1, 3)), 8) == [(1,)]


def test_tail_examples():
    ones = [(1,) * n for n in range(1, 9)]
    rep = check_regular_tail(ones, 8)
    assert rep.status == "match" and all(b.startswith("0^n ") and "flipped" in b for b in rep.bullets)
    rep = check_regular_tail(witnessed_language(wit0110_ifs2(), 10), 10)
    assert rep.status == "match" and rep.exceptions == ()
    assert check_regular_tail([], 8).bullets == ("nothing",)


def test_tail_no_match():
    rep = check_regular_tail([word("0100110"), word("0101110")], 8)
    assert rep.status == "no match" and rep.exceptions


def test_pad_alphabet():
    I = wit0110_ifs2()
    P2 = pad_alphabet(I, 2)
    for w in ["", "0", "0110", "10101"]:
        assert ifs_rho(P2, w) == ifs_rho(I, w)
    P3 = pad_alphabet(I, 3)
    got = witnessed_language(P3, 6)
    assert got == witnessed_language(I, 6)
    # ternary brute force: the unique maximum never uses the extra letter
    for n in range(1, 7):
        vals = {z: ifs_rho(P3, z) for z in itertools.product(range(3), repeat=n)}
        top = max(vals.values())
        winners = [z for z, v in vals.items() if v == top]
        expected = [u for u in got if len(u) == n]
        assert (winners if len(winners) == 1 else []) == expected
    up = Ifs2(0, F(1, 4), F(1, 2), F(1, 4), F(1, 3))
    assert witnessed_language(pad_alphabet(up, 4), 6) == [(1,) * n for n in range(1, 7)]


def test_separation_from_nfa_complexity():
    for n in range(2, 5):
        w = (0,) * n + (1,) * n
        assert an(w).value >= 3
        assert extremal_trace(witness_class2(w), len(w)).witnesses(w)


def test_family_closure():
    rng = random.Random(9)
    L = 14
    for _ in range(150):
        I = random_ifs2(rng, den=16)
        got = set(witnessed_language(I, L))
        for i in (0, 1):
            for n in range(0, 12):
                members = [m for m in range((L - n - 1) // 2 + 1)
                           if render("IN_J_IJ_M", i, n, m) in got]
                for m in members:
                    if m + 1 in members:
                        for m2 in range(m, (L - n - 1) // 2 + 1):
                            assert render("IN_J_IJ_M", i, n, m2) in got


def test_forward_direction_small():
    n, bad = forward_direction(60, seed=3)
    assert bad == []


def test_brute_witnessed_helper_on_example():
    assert [word_str(u) for u in brute_witnessed(wit0110_ifs2(), 5)] == ["1", "00", "010", "0110", "01110"]
