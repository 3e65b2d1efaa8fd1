"""Deciding ``gap > delta`` by sampling a PFA as if it were a black box.

One trial runs every word of length ``|w|`` through the machine once.  After
``N`` trials the observed acceptance frequencies are compared; Hoeffding's
inequality fixes ``N`` so that, when the true gap stays at least ``margin``
away from ``delta``, the verdict is wrong with probability at most ``epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import DEFAULT_GAP_BUDGET, BudgetError, InputError, Pfa, all_words, rho_table, validate_pfa, word, word_str

GAP_EXCEEDS = "GapExceeds"
NOT_EXCEEDS = "NotExceeds"


@dataclass(frozen=True)
class TrialPlan:
    N: int
    delta: float
    epsilon: float
    word_length: int
    alphabet_size: int
    per_string_confidence: float
    margin: float

    def to_json(self) -> dict:
        return asdict(self)


def per_string_epsilon(epsilon: float, word_length: int, alphabet_size: int) -> float:
    """Largest eps' with ``(1 - eps')**(b**n) >= 1 - epsilon``."""
    m = alphabet_size ** word_length
    # -expm1(log1p(-e)/m) keeps precision when eps' is tiny
    return -math.expm1(math.log1p(-epsilon) / m)


def trials_needed(delta: float, epsilon: float, word_length: int, alphabet_size: int = 2,
                  margin: float | None = None) -> TrialPlan:
    """Trial count making every per-string estimate accurate to ``margin / 2``.

    ``margin`` defaults to the widest one that still makes sense,
    ``min(delta, 1 - delta)``.
    """
    if not 0 < delta < 1:
        raise InputError("delta must lie strictly between 0 and 1")
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie strictly between 0 and 1")
    if word_length < 0 or alphabet_size < 1:
        raise InputError("bad word length or alphabet size")
    if margin is None:
        margin = min(delta, 1 - delta)
    if not margin > 0:
        raise InputError("margin must be positive: a gap equal to delta cannot be told apart")
    eps1 = per_string_epsilon(epsilon, word_length, alphabet_size)
    N = math.ceil(2 * math.log(2 / eps1) / margin ** 2)
    return TrialPlan(N, float(delta), float(epsilon), word_length, alphabet_size, eps1, float(margin))


class PfaSampler:
    """Acceptance counts drawn from a known PFA.

    Any callable ``sampler(z, n, rng) -> int`` with the same meaning can stand
    in for it, for instance one that drives a physical process.
    """

    def __init__(self, M: Pfa, length: int, budget: int = DEFAULT_GAP_BUDGET):
        self.table = {z: float(p) for z, p in rho_table(M, length, budget).items()}

    def __call__(self, z, n: int, rng: np.random.Generator) -> int:
        p = min(max(self.table[tuple(z)], 0.0), 1.0)
        return int(rng.binomial(n, p))


@dataclass(frozen=True)
class ExperimentReport:
    verdict: str
    counts: dict
    seed: int
    plan: TrialPlan
    word: tuple
    observed_gap: float

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "word": word_str(self.word),
            "seed": self.seed,
            "observed_gap": self.observed_gap,
            "counts": {word_str(z): c for z, c in self.counts.items()},
            "plan": self.plan.to_json(),
        }


def run_experiment(M: Pfa, w, delta: float, epsilon: float, margin: float | None = None, seed: int = 0,
                   sampler=None, budget: int = DEFAULT_GAP_BUDGET) -> ExperimentReport:
    """Sample every same-length word ``N`` times and compare frequencies.

    Each word gets its own random stream spawned from ``seed`` (in
    lexicographic order), so results do not depend on evaluation order.
    """
    w = word(w)
    bad = validate_pfa(M)
    if bad:
        raise InputError("; ".join(map(str, bad)))
    b = M.alphabet
    if b ** len(w) > budget:
        raise BudgetError(f"{b}^{len(w)} words exceed budget {budget}")
    if any(s >= b for s in w):
        raise InputError("word uses letters outside the alphabet")
    plan = trials_needed(delta, epsilon, len(w), b, margin)
    if sampler is None:
        sampler = PfaSampler(M, len(w), budget)
    words = list(all_words(b, len(w)))
    streams = np.random.SeedSequence(seed).spawn(len(words))
    counts = {}
    for z, ss in zip(words, streams):
        c = int(sampler(z, plan.N, np.random.default_rng(ss)))
        if not 0 <= c <= plan.N:
            raise InputError(f"sampler returned {c} acceptances out of {plan.N}")
        counts[z] = c
    others = [counts[z] for z in words if z != w]
    observed = (counts[w] - max(others)) / plan.N if others else 1.0
    verdict = GAP_EXCEEDS if observed > delta else NOT_EXCEEDS
    return ExperimentReport(verdict, counts, seed, plan, w, observed)
