import math

import pytest

from pfacomplexity.blackbox import (
    GAP_EXCEEDS,
    NOT_EXCEEDS,
    per_string_epsilon,
    run_experiment,
    trials_needed,
)
from pfacomplexity.classical import ad, dfa_to_pfa
from pfacomplexity.core import BudgetError, InputError

from conftest import wit0110


def test_plan_formula():
    p = trials_needed(1 / 32, 0.05, 4, 2, margin=1 / 32)
    eps1 = 1 - 0.95 ** (1 / 16)
    assert p.per_string_confidence == pytest.approx(eps1, rel=1e-12)
    assert p.N == math.ceil(2 * math.log(2 / eps1) * 32 ** 2)
    assert p.N == 13185
    # the per-string confidence is just enough for all 16 strings
    assert (1 - p.per_string_confidence) ** 16 >= 0.95 - 1e-12


def test_plan_depends_on_margin_only():
    Ns = [trials_needed(0.5, 0.05, 4, margin=m).N for m in (0.01, 0.1, 0.3, 0.5)]
    assert Ns == sorted(Ns, reverse=True)
    assert len({trials_needed(d, 0.05, 4, margin=0.05).N for d in (0.1, 0.5, 0.9, 0.999)}) == 1


def test_halving_per_string_error_adds_constant():
    # N is linear in ln(2/eps'), so halving eps' adds about 2 ln 2 / margin^2
    m, n = 0.1, 4
    p1 = trials_needed(0.5, 0.05, n, margin=m)
    half = p1.per_string_confidence / 2
    p2 = trials_needed(0.5, 1 - (1 - half) ** (2 ** n), n, margin=m)
    assert p2.per_string_confidence == pytest.approx(half, rel=1e-9)
    assert abs((p2.N - p1.N) - 2 * math.log(2) / m ** 2) <= 1


def test_plan_errors():
    for bad in [dict(delta=0), dict(delta=1), dict(epsilon=0), dict(epsilon=1), dict(margin=0)]:
        kw = dict(delta=0.1, epsilon=0.05, word_length=3, alphabet_size=2, margin=0.1)
        kw.update(bad)
        with pytest.raises(InputError):
            trials_needed(**kw)


def test_tiny_per_string_error_is_accurate():
    e = per_string_epsilon(1e-6, 20, 2)
    assert 0 < e < 1e-11
    assert math.expm1(2 ** 20 * math.log1p(-e)) == pytest.approx(-1e-6, rel=1e-9)


def test_reproducible():
    a = run_experiment(wit0110(), "0110", 1 / 32, 0.05, 1 / 32, seed=7)
    b = run_experiment(wit0110(), "0110", 1 / 32, 0.05, 1 / 32, seed=7)
    assert a == b and a.to_json() == b.to_json()
    c = run_experiment(wit0110(), "0110", 1 / 32, 0.05, 1 / 32, seed=8)
    assert c.counts != a.counts


def test_counts_bounded_and_json():
    r = run_experiment(wit0110(), "0110", 1 / 8, 0.05, 1 / 16, seed=1)
    assert all(0 <= c <= r.plan.N for c in r.counts.values())
    js = r.to_json()
    assert js["plan"]["N"] == r.plan.N and len(js["counts"]) == 16


def test_small_calibration():
    hits = sum(run_experiment(wit0110(), "0110", 1 / 32, 0.05, 1 / 32, seed=s).verdict == GAP_EXCEEDS
               for s in range(20))
    assert hits >= 18
    hits = sum(run_experiment(wit0110(), "0110", 1 / 8, 0.05, 1 / 16, seed=s).verdict == NOT_EXCEEDS
               for s in range(20))
    assert hits >= 18


def test_dfa_always_exceeds():
    A = dfa_to_pfa(ad("0110").witness)
    for delta in (0.1, 0.5, 0.9):
        for s in range(3):
            assert run_experiment(A, "0110", delta, 0.05, 1 - delta, seed=s).verdict == GAP_EXCEEDS


def test_custom_sampler():
    # a sampler that always accepts exactly the target word
    def sampler(z, n, rng):
        return n if z == (0, 1, 1, 0) else 0

    r = run_experiment(wit0110(), "0110", 0.5, 0.05, 0.25, sampler=sampler)
    assert r.verdict == GAP_EXCEEDS and r.observed_gap == 1.0

    def broken(z, n, rng):
        return n + 1

    with pytest.raises(InputError):
        run_experiment(wit0110(), "0110", 0.5, 0.05, 0.25, sampler=broken)


def test_budget_guard():
    with pytest.raises(BudgetError):
        run_experiment(wit0110(), "0" * 12, 0.1, 0.05, 0.1, budget=100)
