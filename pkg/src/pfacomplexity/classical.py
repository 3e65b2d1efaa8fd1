"""Deterministic and nondeterministic automatic complexity, and the NFA lift.

Both searches enumerate the run of ``w`` as a state sequence rather than
whole transition tables.  A witness can always be cut down to the edges its
accepting run uses (removing edges, extra start or accepting states only
removes accepting paths), so enumerating runs is exhaustive.  Runs are listed
as restricted-growth sequences: the start is state 0 and each new state is the
next unused index, which quotients out relabelings that fix the start.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .core import BudgetError, InputError, Pfa, all_words, word

DEFAULT_SEARCH_BUDGET = 2_000_000


@dataclass(frozen=True)
class Nfa:
    """Single-start NFA with 0/1 transition matrices ``T[letter][i][j]``."""

    start: int
    T: tuple
    accept: tuple

    def __post_init__(self):
        object.__setattr__(self, "T", tuple(tuple(tuple(int(x) for x in row) for row in m) for m in self.T))
        object.__setattr__(self, "accept", tuple(int(x) for x in self.accept))
        k = len(self.accept)
        if not 0 <= self.start < k:
            raise InputError("start state out of range")
        for m in self.T:
            if len(m) != k or any(len(row) != k for row in m):
                raise InputError("transition matrix has the wrong shape")
            if any(x not in (0, 1) for row in m for x in row):
                raise InputError("transition entries must be 0/1")

    @property
    def k(self) -> int:
        return len(self.accept)

    @property
    def alphabet(self) -> int:
        return len(self.T)

    def to_json(self) -> dict:
        return {
            "kind": type(self).__name__.lower(),
            "k": self.k,
            "alphabet": self.alphabet,
            "start": self.start,
            "P": [[list(row) for row in m] for m in self.T],
            "eta": list(self.accept),
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(data["start"], data["P"], data["eta"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed automaton JSON: {exc}") from exc


class Dfa(Nfa):
    """Total DFA: every row of every transition matrix has exactly one 1."""

    def __post_init__(self):
        super().__post_init__()
        for m in self.T:
            if any(sum(row) != 1 for row in m):
                raise InputError("DFA rows must contain exactly one 1")

    def delta(self, q: int, s: int) -> int:
        return self.T[s][q].index(1)


@dataclass(frozen=True)
class ComplexityResult:
    value: int
    witness: Nfa
    optimal: bool = True
    lower: int = 1

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "optimal": self.optimal,
            "lower_bound": self.lower,
            "witness": self.witness.to_json(),
        }


def count_paths(N: Nfa, n: int, w=None) -> int:
    """Accepting paths of length ``n``; only those reading ``w`` if given."""
    v = [0] * N.k
    v[N.start] = 1
    letters = word(w) if w is not None else None
    if letters is not None and len(letters) != n:
        raise InputError("word length differs from n")
    for t in range(n):
        mats = [N.T[letters[t]]] if letters is not None else N.T
        nv = [0] * N.k
        for i, c in enumerate(v):
            if c:
                for m in mats:
                    row = m[i]
                    for j in range(N.k):
                        if row[j]:
                            nv[j] += c
        v = nv
    return sum(c for c, a in zip(v, N.accept) if a)


def an_witness_check(N: Nfa, w) -> bool:
    """True iff ``N`` accepts ``w`` along the only accepting path of length |w|."""
    w = word(w)
    return count_paths(N, len(w), w) >= 1 and count_paths(N, len(w)) == 1


def dfa_witness_check(D: Dfa, w, budget: int = 2**24) -> bool:
    """True iff ``D`` accepts ``w`` and rejects every other word of length |w|."""
    w = word(w)
    if D.alphabet ** len(w) > budget:
        raise BudgetError("competitor enumeration exceeds budget")

    def accepts(z):
        q = D.start
        for s in z:
            q = D.delta(q, s)
        return bool(D.accept[q])

    if not accepts(w):
        return False
    return not any(accepts(z) for z in all_words(D.alphabet, len(w)) if z != w)


def _runs(n: int, k: int):
    """Restricted-growth state sequences of length ``n + 1`` using < k states."""
    seq = [0]

    def rec(top):
        if len(seq) == n + 1:
            yield tuple(seq)
            return
        for q in range(min(top + 2, k)):
            seq.append(q)
            yield from rec(max(top, q))
            seq.pop()

    yield from rec(0)


def _edge_counts(n, k, edges, start, end):
    """Paths of length ``n`` from start to end; ``edges`` lists (i, j) once per letter."""
    v = [0] * k
    v[start] = 1
    for _ in range(n):
        nv = [0] * k
        for i, j in edges:
            if v[i]:
                nv[j] += v[i]
        v = nv
    return v[end]


def _path_nfa(k, alphabet, run, w) -> Nfa:
    T = [[[0] * k for _ in range(k)] for _ in range(alphabet)]
    for t, s in enumerate(w):
        T[s][run[t]][run[t + 1]] = 1
    acc = [0] * k
    acc[run[-1]] = 1
    return Nfa(0, T, acc)


def an(w, budget: int = DEFAULT_SEARCH_BUDGET, alphabet: int | None = None, max_states: int | None = None) -> ComplexityResult:
    """Nondeterministic automatic complexity of ``w`` with a witness NFA.

    ``max_states`` stops the search early; the result is then flagged
    non-optimal with ``lower`` recording how far the refutation got.
    """
    w = word(w)
    n = len(w)
    b = alphabet or max(2, max(w, default=0) + 1)
    cap = n + 1 if max_states is None else min(max_states, n + 1)
    spent = 0
    for k in range(1, cap + 1):
        for run in _runs(n, k):
            spent += 1
            if spent > budget:
                return _an_fallback(w, b, k)
            if max(run) != k - 1:
                continue  # already tried with fewer states
            edges = [(i, j) for i, _s, j in {(run[t], w[t], run[t + 1]) for t in range(n)}]
            if _edge_counts(n, k, edges, 0, run[-1]) == 1:
                return ComplexityResult(k, _path_nfa(k, b, run, w), True, k)
    return _an_fallback(w, b, cap + 1)


def _an_fallback(w, b, lower):
    n = len(w)
    run = tuple(range(n + 1))
    return ComplexityResult(n + 1, _path_nfa(n + 1, b, run, w), n + 1 <= lower, min(lower, n + 1))


def _dfa_from(k, b, trans, start, end) -> Dfa:
    T = [[[0] * k for _ in range(k)] for _ in range(b)]
    for (q, s), r in trans.items():
        T[s][q][r] = 1
    acc = [0] * k
    acc[end] = 1
    return Dfa(start, T, acc)


def _dfa_count(n, k, trans, end):
    edges = [(q, r) for (q, _s), r in trans.items()]
    return _edge_counts(n, k, edges, 0, end)


def ad(w, budget: int = DEFAULT_SEARCH_BUDGET, alphabet: int | None = None, max_states: int | None = None) -> ComplexityResult:
    """Deterministic automatic complexity of ``w`` with a witness DFA.

    For each run of ``w`` the unused transitions are filled in by depth-first
    search.  Adding a transition never removes an accepted word, so a partial
    table that already accepts two words of length |w| is abandoned.
    """
    w = word(w)
    n = len(w)
    b = alphabet or max(2, max(w, default=0) + 1)
    cap = n + 2 if max_states is None else min(max_states, n + 2)
    spent = [0]
    for k in range(1, cap + 1):
        # runs need not visit every state: the spare ones (a dead state, say)
        # are reachable only through the transitions filled in below
        for run in _runs(n, k):
            trans = {}
            consistent = True
            for t, s in enumerate(w):
                key = (run[t], s)
                if trans.setdefault(key, run[t + 1]) != run[t + 1]:
                    consistent = False
                    break
            if not consistent:
                continue
            free = [(q, s) for q in range(k) for s in range(b) if (q, s) not in trans]
            found = _complete(n, k, trans, free, run[-1], spent, budget)
            if found is None:
                continue
            if found == "budget":
                return _ad_fallback(w, b, k)
            return ComplexityResult(k, _dfa_from(k, b, found, 0, run[-1]), True, k)
    return _ad_fallback(w, b, cap + 1)


def _complete(n, k, trans, free, end, spent, budget):
    spent[0] += 1
    if spent[0] > budget:
        return "budget"
    if _dfa_count(n, k, trans, end) > 1:
        return None
    if not free:
        return dict(trans)
    key, rest = free[0], free[1:]
    for r in range(k):
        trans[key] = r
        got = _complete(n, k, trans, rest, end, spent, budget)
        if got is not None:
            del trans[key]
            return got
    del trans[key]
    return None


def _ad_fallback(w, b, lower):
    # a chain along w plus a dead state always works
    n = len(w)
    k = n + 2
    dead = n + 1
    trans = {(q, s): dead for q in range(k) for s in range(b)}
    for t, s in enumerate(w):
        trans[(t, s)] = t + 1
    return ComplexityResult(k, _dfa_from(k, b, trans, 0, n), k <= lower, min(lower, k))


def nfa_to_pfa(N: Nfa) -> Pfa:
    """Normalise NFA rows into probabilities, sending empty rows to a dead state.

    The dead state is appended only when some row of some matrix is all zero.
    """
    k = N.k
    needs_dead = any(not any(row) for m in N.T for row in m)
    size = k + 1 if needs_dead else k
    one, zero = Fraction(1), Fraction(0)
    P = []
    for m in N.T:
        rows = []
        for row in m:
            total = sum(row)
            if total:
                rows.append(tuple(Fraction(x, total) for x in row) + ((zero,) if needs_dead else ()))
            else:
                rows.append((zero,) * k + (one,))
        if needs_dead:
            rows.append((zero,) * k + (one,))
        P.append(tuple(rows))
    pi = tuple(one if i == N.start else zero for i in range(size))
    eta = tuple(N.accept) + ((0,) if needs_dead else ())
    return Pfa(pi, tuple(P), eta)


def dfa_to_pfa(D: Dfa) -> Pfa:
    return nfa_to_pfa(D)
