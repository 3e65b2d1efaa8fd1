"""Enclosures of the best gap a k-state PFA can give a word.

Lower bounds come from local search with exact rational re-scoring, upper
bounds from interval branch and bound over the parameter box.  ``ap_delta``
combines both to find the least state count beating a threshold, and reports
an ``Undetermined`` result when the threshold sits inside an enclosure.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classical import ad, an, dfa_to_pfa, nfa_to_pfa
from .classify import is_class2, witness_class2
from .core import BudgetError, InputError, Pfa, gap, pad_states, parse_scalar, word, word_str
from .ifs import ifs2_to_pfa
from .interval import ParamSpace, TwoStateBinary

log = logging.getLogger(__name__)

DEFAULT_EPS = 2.0 ** -7
DEFAULT_RESTARTS = 8
DEFAULT_MAX_BOXES = 400_000
ITERATIONS = 64

# machines printed in the literature, used only as starting points
PRINTED_SEEDS = (
    Pfa((1, 0), (((0, 1), ("1/2", "1/2")), (("1/2", "1/2"), (0, 1))), (1, 0)),
    Pfa((1, 0), ((("0.16748", "0.83252"), ("0.99", "0.01")), (("0.66116", "0.33884"), (0, 1))), (1, 0)),
    Pfa((1, 0, 0),
        (((0, 0, 1), ("1/4", "3/4", 0), (1, 0, 0)), ((0, "3/4", "1/4"), (1, 0, 0), (0, 1, 0))),
        (0, 0, 1)),
)


@dataclass(frozen=True)
class GapEnclosure:
    k: int
    w: tuple
    lb: Fraction
    ub: float
    witness: Pfa | None
    seed: int = 0
    restarts: int = 0
    boxes: int = 0
    eps_achieved: float = 0.0
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "word": word_str(self.w),
            "lb": str(self.lb),
            "lb_float": float(self.lb),
            "ub": self.ub,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "seed": self.seed,
            "eps_achieved": self.eps_achieved,
            "boxes": self.boxes,
            "restarts": self.restarts,
            "complete": self.complete,
        }


@dataclass(frozen=True)
class Undetermined:
    """The threshold lies inside the enclosure of gamma at ``k``."""

    k: int
    enclosure: GapEnclosure

    def to_json(self) -> dict:
        return {"undetermined": True, "k": self.k, "enclosure": self.enclosure.to_json()}


@dataclass(frozen=True)
class DiscontinuityPoint:
    k: int
    enclosure: GapEnclosure
    w: tuple
    certified: bool

    def to_json(self) -> dict:
        return {"k": self.k, "word": word_str(self.w), "certified": self.certified,
                "enclosure": self.enclosure.to_json()}


def _trivial(w, b) -> bool:
    return len(w) == 0 or b == 1


def _alphabet(w, alphabet):
    return alphabet or max(2, max(w, default=0) + 1)


# -- lower bounds ----------------------------------------------------------------

def seed_machines(k: int, w, alphabet: int | None = None) -> list[Pfa]:
    """Known machines with at most k states, padded to exactly k."""
    w = word(w)
    b = _alphabet(w, alphabet)
    out = []
    cands = list(PRINTED_SEEDS)
    if b == 2 and is_class2(w) is not None:
        try:
            cands.append(ifs2_to_pfa(witness_class2(w)))
        except Exception:  # noqa: BLE001 - a missing seed only weakens the search
            pass
    if len(w) <= 12:
        res = ad(w, alphabet=b, max_states=k)
        if res.optimal and res.value <= k:
            cands.append(dfa_to_pfa(res.witness))
        res = an(w, alphabet=b, max_states=k)
        if res.optimal:
            cands.append(nfa_to_pfa(res.witness))
    for A in cands:
        if A.alphabet == b and A.k <= k and 0 < sum(A.eta) < A.k:
            out.append(pad_states(A, k) if A.k < k else A)
    return out


def _exact_score(A: Pfa, w) -> Fraction:
    return gap(A, w)


def _roundings(theta):
    """Nearby rational points: dyadic grids and small-denominator fits."""
    out = []
    for den in (2, 4, 8, 16, 32, 64, 1024, 2 ** 20):
        out.append(np.round(theta * den) / den)
    return out


def _exact_from_point(space: ParamSpace, theta, s: int, w):
    best = None
    for cand in _roundings(theta) + [theta]:
        cand = space.project(cand)
        if not space.feasible(cand[None], tol=0)[0]:
            continue
        A = space.to_pfa(cand, s, exact=True)
        # limit_denominator keeps the fits short; rows must still sum to 1
        A = _tidy(A)
        g = _exact_score(A, w)
        if best is None or g > best[0]:
            best = (g, A)
    return best


def _tidy(A: Pfa) -> Pfa:
    def fix(vec):
        vals = [Fraction(x).limit_denominator(2 ** 24) for x in vec[:-1]]
        last = 1 - sum(vals)
        if last < 0 or any(v < 0 for v in vals):
            return tuple(vec)
        return tuple(vals) + (last,)

    P = tuple(tuple(fix(row) for row in m) for m in A.P)
    return Pfa(fix(A.pi), P, A.eta)


def _local_search(space: ParamSpace, theta, s: int, w, iterations: int):
    D = space.dim
    cur = space.project(theta)
    val = space.gap_points(cur[None], w, s)[0]
    step = 0.5
    moves = np.concatenate([np.eye(D), -np.eye(D)])
    for _ in range(iterations):
        cands = space.project(cur[None] + step * moves)
        vals = space.gap_points(cands, w, s)
        j = int(np.argmax(vals))
        if vals[j] > val + 1e-15:
            cur, val = cands[j], vals[j]
        else:
            step /= 2
            if step < 1e-12:
                break
    return cur, val


def gamma_lower(k: int, w, restarts: int = DEFAULT_RESTARTS, seed: int = 0, alphabet: int | None = None,
                seeds=(), iterations: int = ITERATIONS):
    """Best exact gap found by multi-start coordinate search: ``(lb, witness)``.

    One batch of restarts runs per accepting-set size (state relabelling makes
    the choice of which states accept irrelevant).  Every candidate is rounded
    to rationals and scored exactly; the returned ``lb`` is that exact gap.
    """
    w = word(w)
    if k < 1:
        raise InputError("k must be positive")
    b = _alphabet(w, alphabet)
    if _trivial(w, b):
        return Fraction(1), pad_states(Pfa((1,), ((((1,),),) * b), (1,)), k)
    if k == 1:
        A = Pfa((1,), tuple(((1,),) for _ in range(b)), (1,))
        return gap(A, w), A
    best = (Fraction(-2), None)
    for res in restart_results(k, w, b, restarts=restarts, seed=seed, seeds=seeds, iterations=iterations):
        if res is not None and res[0] > best[0]:
            best = res
    return best


def restart_results(k: int, w, b: int, restarts: int | None = DEFAULT_RESTARTS, seed: int = 0, seeds=(),
                    iterations: int = ITERATIONS):
    """Yield ``(exact_gap, pfa)`` per local-search run, seeds first.

    Known machines are also yielded as they are, before any search.  With
    ``restarts=None`` random restarts continue forever.
    """
    w = word(w)
    space = ParamSpace(k, b)
    rng = np.random.default_rng(seed)
    starts = []
    for A in list(seed_machines(k, w, b)) + [pad_states(A, k) if A.k < k else A for A in seeds]:
        yield gap(A, w), A
        starts.append(space.from_pfa(A.to_float() if A.mode == "rational" else A))
    for theta, s in starts:
        cur, _val = _local_search(space, theta, s, w, iterations)
        yield _exact_from_point(space, cur, s, w)
    count = itertools.count() if restarts is None else range(restarts)
    for _ in count:
        for s in range(1, k):
            theta = space.project(rng.random(space.dim) ** 2)
            cur, _val = _local_search(space, theta, s, w, iterations)
            yield _exact_from_point(space, cur, s, w)


# -- upper bounds ---------------------------------------------------------------

@dataclass
class UpperResult:
    ub: float
    boxes: int
    complete: bool
    lb: Fraction | None = None
    witness: Pfa | None = None
    extra: dict = field(default_factory=dict)


def gamma_upper(k: int, w, eps: float = DEFAULT_EPS, lb: Fraction | None = None, alphabet: int | None = None,
                stop_below: float | None = None, max_boxes: int = DEFAULT_MAX_BOXES, batch: int = 512) -> UpperResult:
    """Certified upper bound on the best k-state gap of ``w``.

    Boxes are split along their widest side.  A box is retired once its bound
    is within ``eps`` of the incumbent or at or below ``stop_below``.  The
    returned bound is the largest bound among retired and unfinished boxes, so
    it stays certified even when ``max_boxes`` cuts the search short.
    """
    w = word(w)
    if k < 1 or eps <= 0:
        raise InputError("need k >= 1 and eps > 0")
    b = _alphabet(w, alphabet)
    if _trivial(w, b):
        return UpperResult(1.0, 0, True, Fraction(1))
    if k == 1:
        return UpperResult(0.0 if b > 1 else 1.0, 0, True)
    space = ParamSpace(k, b)
    # the polynomial form is much tighter but only set up for 2 states, 2 letters
    bounder = TwoStateBinary(len(w)) if (k, b) == (2, 2) and len(w) <= 8 else space
    inc = float(lb) if lb is not None else -1.0
    best_lb, best_wit = lb, None
    if inc >= 1.0:
        return UpperResult(1.0, 0, True, lb)
    retired = -np.inf
    heap = []  # (-ub, counter, lo, hi, s)
    counter = itertools.count()
    for s in range(1, k):
        lo, hi = np.zeros((1, space.dim)), np.ones((1, space.dim))
        ub = bounder.gap_upper_box(lo, hi, w, s)[0]
        heapq.heappush(heap, (-ub, next(counter), lo[0], hi[0], s))
    boxes = k - 1
    while heap:
        top = -heap[0][0]
        if top < inc + eps or (stop_below is not None and top <= stop_below):
            break
        if boxes >= max_boxes:
            break
        take = [heapq.heappop(heap) for _ in range(min(batch, len(heap)))]
        for s in range(1, k):
            group = [t for t in take if t[4] == s]
            if not group:
                continue
            lo = np.array([t[2] for t in group])
            hi = np.array([t[3] for t in group])
            axis = np.argmax(hi - lo, axis=1)
            mid = (lo[np.arange(len(group)), axis] + hi[np.arange(len(group)), axis]) / 2
            lo2, hi1 = lo.copy(), hi.copy()
            hi1[np.arange(len(group)), axis] = mid
            lo2[np.arange(len(group)), axis] = mid
            clo = np.concatenate([lo, lo2])
            chi = np.concatenate([hi1, hi])
            ubs = bounder.gap_upper_box(clo, chi, w, s)
            boxes += len(clo)
            # improve the incumbent from feasible box anchors
            anchors = space.feasible_anchor(clo, chi)
            vals = space.gap_points(anchors, w, s)
            j = int(np.argmax(vals))
            if vals[j] > inc + 1e-12:
                got = _exact_from_point(space, anchors[j], s, w)
                if got is not None and (best_lb is None or got[0] > best_lb):
                    best_lb, best_wit = got
                    inc = max(inc, float(got[0]))
            for lo_i, hi_i, ub in zip(clo, chi, ubs):
                if ub == -np.inf:
                    continue
                if ub < inc + eps or (stop_below is not None and ub <= stop_below):
                    retired = max(retired, ub)
                else:
                    heapq.heappush(heap, (-ub, next(counter), lo_i, hi_i, s))
    pending = -heap[0][0] if heap else -np.inf
    ub = float(max(retired, pending, inc if best_lb is not None else -np.inf))
    ub = min(ub, 1.0)
    complete = bool(not heap or pending < inc + eps or (stop_below is not None and pending <= stop_below))
    return UpperResult(ub, boxes, complete, best_lb, best_wit)


def gamma_enclosure(k: int, w, eps: float = DEFAULT_EPS, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                    alphabet: int | None = None, seeds=(), max_boxes: int = DEFAULT_MAX_BOXES,
                    stop_below: float | None = None) -> GapEnclosure:
    w = word(w)
    lb, wit = gamma_lower(k, w, restarts=restarts, seed=seed, alphabet=alphabet, seeds=seeds)
    up = gamma_upper(k, w, eps=eps, lb=lb, alphabet=alphabet, max_boxes=max_boxes, stop_below=stop_below)
    if up.lb is not None and up.lb > lb and up.witness is not None:
        lb, wit = up.lb, up.witness
    ub = max(up.ub, float(lb))
    return GapEnclosure(k, w, lb, ub, wit, seed=seed, restarts=restarts, boxes=up.boxes,
                        eps_achieved=ub - float(lb), complete=up.complete)


# -- thresholds -------------------------------------------------------------------

def ap_delta(w, delta, eps: float = DEFAULT_EPS, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
             alphabet: int | None = None, max_boxes: int = DEFAULT_MAX_BOXES):
    """Least k whose best gap certainly exceeds ``delta``, or ``Undetermined``."""
    w = word(w)
    delta = parse_scalar(delta)
    if delta == 0:
        raise InputError("delta = 0 is not supported (computability unknown there)")
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)")
    b = _alphabet(w, alphabet)
    top = ad(w, alphabet=b).value
    carried = []
    for k in range(2, top + 1):
        lb, wit = gamma_lower(k, w, restarts=restarts, seed=seed, alphabet=b, seeds=carried)
        carried = [wit] if wit is not None else []
        if delta < lb:
            return k
        up = gamma_upper(k, w, eps=eps, lb=lb, alphabet=b, stop_below=float(delta), max_boxes=max_boxes)
        if up.lb is not None and up.lb > lb:
            lb, wit = up.lb, up.witness
            carried = [wit]
            if delta < lb:
                return k
        if up.ub <= delta:
            continue
        enc = GapEnclosure(k, w, lb, max(up.ub, float(lb)), wit, seed=seed, restarts=restarts, boxes=up.boxes,
                           eps_achieved=up.ub - float(lb), complete=up.complete)
        return Undetermined(k, enc)
    return top


def enumerate_E(w, eps: float = DEFAULT_EPS, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                alphabet: int | None = None, max_boxes: int = 50_000) -> list[DiscontinuityPoint]:
    """Enclosures of gamma at every k strictly between 1 and the DFA complexity."""
    w = word(w)
    b = _alphabet(w, alphabet)
    top = ad(w, alphabet=b).value
    out, carried = [], ()
    for k in range(2, top):
        enc = gamma_enclosure(k, w, eps=eps, restarts=restarts, seed=seed, alphabet=b, seeds=carried,
                              max_boxes=max_boxes)
        carried = (enc.witness,) if enc.witness is not None else ()
        out.append(DiscontinuityPoint(k, enc, w, enc.lb > 0 and enc.ub < 1))
    return out


def dyadic_cover(k: int, n: int, alphabet: int = 2, budget: int = 10 ** 6):
    """Every PFA whose entries are multiples of 2^-(n+1), with nontrivial eta."""
    if n < 0 or k < 1:
        raise InputError("need n >= 0 and k >= 1")
    den = 2 ** (n + 1)
    vecs = [tuple(Fraction(c, den) for c in comp) for comp in _compositions(den, k)]
    etas = [e for e in itertools.product((0, 1), repeat=k) if 0 < sum(e) < k]
    size = len(etas) * len(vecs) ** (1 + alphabet * k)
    if size > budget:
        raise BudgetError(f"dyadic cover has {size} machines, over budget {budget}")
    for eta in etas:
        for pi in vecs:
            for rows in itertools.product(vecs, repeat=alphabet * k):
                P = tuple(tuple(rows[s * k:(s + 1) * k]) for s in range(alphabet))
                yield Pfa(pi, P, eta)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
