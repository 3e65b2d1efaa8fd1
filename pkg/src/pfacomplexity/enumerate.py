"""Listing rational PFAs and semi-deciding whether k states suffice.

A positive gap is a finite certificate, so a search that runs through every
rational machine will eventually find one whenever it exists.  The stream is
interleaved with local-search restarts, which usually get there much sooner.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classical import an, ad, dfa_to_pfa, nfa_to_pfa
from .classify import is_class2, witness_class2
from .core import InputError, Pfa, gap, word, word_str
from .gamma import restart_results
from .ifs import ifs2_to_pfa
from .interval import word_index

log = logging.getLogger(__name__)

BATCH = 10_000


@dataclass(frozen=True)
class SearchBudget:
    max_denominator: int = 4
    max_machines: int = 2_000_000
    wall_clock: float = 60.0

    def __post_init__(self):
        if self.max_denominator < 1 or self.max_machines < 1 or self.wall_clock <= 0:
            raise InputError("budget fields must be positive")


@dataclass(frozen=True)
class SemiDecision:
    found: bool
    witness: Pfa | None = None
    exact_gap: Fraction | None = None
    machines: int = 0
    restarts: int = 0
    denominator: int = 0
    source: str = ""

    def to_json(self) -> dict:
        out = {"outcome": "Found" if self.found else "Exhausted", "machines": self.machines,
               "restarts": self.restarts, "denominator": self.denominator}
        if self.found:
            out.update(witness=self.witness.to_json(), exact_gap=str(self.exact_gap), source=self.source)
        return out


def farey(d: int) -> list[Fraction]:
    return sorted({Fraction(p, q) for q in range(1, d + 1) for p in range(q + 1)})


def simplex_points(k: int, d: int) -> list[tuple]:
    """Probability vectors of length k whose entries have denominator <= d."""
    fs = farey(d)
    out = []
    for head in itertools.product(fs, repeat=k - 1):
        last = 1 - sum(head)
        if 0 <= last and last.denominator <= d:
            out.append(tuple(head) + (last,))
    return out


def _etas(k):
    return list(itertools.product((0, 1), repeat=k))


def enum_rational_pfas(k: int, alphabet: int, denom_bound: int):
    """Every k-state PFA with entries of denominator <= ``denom_bound``, once.

    Ordered by eta, then pi, then the rows of each matrix, each lexicographic.
    """
    if denom_bound < 1 or k < 1 or alphabet < 1:
        raise InputError("need positive k, alphabet and denominator bound")
    vecs = simplex_points(k, denom_bound)
    for eta in _etas(k):
        for pi in vecs:
            for rows in itertools.product(vecs, repeat=alphabet * k):
                P = tuple(tuple(rows[s * k:(s + 1) * k]) for s in range(alphabet))
                yield Pfa(pi, P, eta)


def _float_gaps(V, eta, idx_pi, idx_rows, k, b, w):
    """Float gaps of ``w`` for a batch of machines given as vector indices."""
    pi = V[idx_pi]                                      # (N, k)
    P = V[idx_rows].reshape(len(idx_pi), b, k, k)       # (N, b, k, k)
    v = pi[:, None, :]
    for _ in range(len(w)):
        v = np.einsum("nwi,nsij->nwsj", v, P).reshape(len(idx_pi), -1, k)
    rho = v @ np.asarray(eta, dtype=float)
    i = word_index(w, b)
    rw = rho[:, i].copy()
    rho[:, i] = -np.inf
    return rw - rho.max(axis=1)


def _new_at(d, vec_dens, idx_pi, idx_rows):
    """Machines whose largest entry denominator is exactly d (not seen before)."""
    top = np.maximum(vec_dens[idx_pi], vec_dens[idx_rows].max(axis=1))
    return top == d


def semidecide_ap_le(w, k: int, budget: SearchBudget = SearchBudget(), alphabet: int | None = None,
                     seed: int = 0, progress=None) -> SemiDecision:
    """Look for a k-state PFA giving ``w`` a positive gap.

    Denominators 1, 2, 3, ... are searched in canonical order in batches; each
    batch is followed by one local-search restart.  ``progress`` (if given)
    receives a dict after every batch.
    """
    w = word(w)
    if k < 1:
        raise InputError("k must be positive")
    b = alphabet or max(2, max(w, default=0) + 1)
    start = time.monotonic()
    machines = restarts = 0
    restarter = restart_results(k, w, b, restarts=None, seed=seed) if k >= 2 else iter(())
    best = None

    def out_of_time():
        return time.monotonic() - start > budget.wall_clock or machines >= budget.max_machines

    for d in range(1, budget.max_denominator + 1):
        vecs = simplex_points(k, d)
        V = np.array([[float(x) for x in v] for v in vecs])
        vec_dens = np.array([max(x.denominator for x in v) for v in vecs])
        # gaps are rationals with denominator dividing lcm(1..d)^(n+1), so a
        # positive one cannot hide below half of its reciprocal
        scale = math.lcm(*range(1, d + 1)) ** (len(w) + 1)
        floor = 0.5 / scale if scale < 10 ** 12 else -1e-9
        for eta in _etas(k):
            combos = itertools.product(range(len(vecs)), repeat=1 + b * k)
            while True:
                chunk = list(itertools.islice(combos, BATCH))
                if not chunk:
                    break
                arr = np.array(chunk)
                idx_pi, idx_rows = arr[:, 0], arr[:, 1:]
                keep = _new_at(d, vec_dens, idx_pi, idx_rows) if d > 1 else np.ones(len(arr), bool)
                machines += int(keep.sum())
                if keep.any():
                    g = _float_gaps(V, eta, idx_pi[keep], idx_rows[keep], k, b, w)
                    for j in np.flatnonzero(g > floor):
                        row = arr[keep][j]
                        A = Pfa(vecs[row[0]], tuple(tuple(vecs[r] for r in row[1 + s * k:1 + (s + 1) * k])
                                                    for s in range(b)), eta)
                        exact = gap(A, w)
                        if exact > 0:
                            return SemiDecision(True, A, exact, machines, restarts, d, "enumeration")
                res = next(restarter, None)
                if res is not None:
                    restarts += 1
                    if res[0] > 0:
                        return SemiDecision(True, res[1], res[0], machines, restarts, d, "local search")
                    if best is None or res[0] > best:
                        best = res[0]
                if progress is not None:
                    progress({"machines": machines, "restarts": restarts, "denominator": d,
                              "best_gap": None if best is None else float(best)})
                if out_of_time():
                    return SemiDecision(False, machines=machines, restarts=restarts, denominator=d)
    return SemiDecision(False, machines=machines, restarts=restarts, denominator=budget.max_denominator)


@dataclass(frozen=True)
class UpperBound:
    k: int
    witness: Pfa
    provenance: str
    exact_gap: Fraction

    def to_json(self) -> dict:
        return {"k": self.k, "provenance": self.provenance, "exact_gap": str(self.exact_gap),
                "witness": self.witness.to_json()}


def ap_upper_bound(w, budget: SearchBudget = SearchBudget(max_denominator=2, wall_clock=20.0),
                   alphabet: int | None = None, seed: int = 0) -> UpperBound:
    """Smallest state count this package can certify for ``w``, with its source.

    Tries the classified two-state witnesses, the NFA lift and the DFA bound,
    then searches below the best of those.
    """
    w = word(w)
    b = alphabet or max(2, max(w, default=0) + 1)
    cands = []
    if b == 2 and is_class2(w) is not None:
        A = ifs2_to_pfa(witness_class2(w))
        cands.append(UpperBound(2, A, "classified", gap(A, w)))
    N = an(w, alphabet=b).witness
    A = nfa_to_pfa(N)
    g = gap(A, w)
    if g > 0:
        cands.append(UpperBound(A.k, A, "nfa-lift", g))
    D = dfa_to_pfa(ad(w, alphabet=b).witness)
    cands.append(UpperBound(D.k, D, "dfa", gap(D, w)))
    best = min(cands, key=lambda u: u.k)
    for k in range(2, best.k):
        res = semidecide_ap_le(w, k, budget, alphabet=b, seed=seed)
        if res.found:
            log.info("search found a %d-state witness for %s", k, word_str(w))
            return UpperBound(k, res.witness, "search", res.exact_gap)
    return best
