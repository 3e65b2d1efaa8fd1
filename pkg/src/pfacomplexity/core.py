"""Probabilistic finite automata: validation, acceptance probability and gap.

A :class:`Pfa` is an immutable value holding an initial distribution, one
row-stochastic matrix per letter and a 0/1 accepting vector.  Scalars are
either :class:`fractions.Fraction` (``mode="rational"``) or ``float``
(``mode="float"``); the two are never mixed inside one machine.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

RATIONAL = "rational"
FLOAT = "float"

FLOAT_TOL = 1e-12
DEFAULT_GAP_BUDGET = 2**24

Word = tuple


class InputError(ValueError):
    """Malformed input: bad letters, bad JSON, out-of-range parameters."""


class PreconditionError(ValueError):
    """An operation's hypothesis does not hold for the given machine."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured enumeration budget."""


def word(w: str | Iterable[int]) -> Word:
    """Normalise ``"0110"`` or ``[0, 1, 1, 0]`` to a tuple of ints."""
    if isinstance(w, str):
        if w and not w.isdigit():
            raise InputError(f"word {w!r} must be a string of digits")
        return tuple(int(ch) for ch in w)
    return tuple(int(x) for x in w)


def word_str(w: Sequence[int]) -> str:
    return "".join(str(x) for x in w)


def all_words(alphabet: int, length: int):
    """All words of ``length`` over ``alphabet`` in lexicographic order."""
    return itertools.product(range(alphabet), repeat=length)


def parse_scalar(x, mode: str = RATIONAL):
    if mode == FLOAT:
        return float(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {x!r}") from exc
    return Fraction(x)


def scalar_json(x, mode: str):
    if mode == FLOAT:
        return float(x)
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Violation:
    what: str
    letter: int | None = None
    row: int | None = None
    detail: str = ""

    def __str__(self):
        loc = []
        if self.letter is not None:
            loc.append(f"letter {self.letter}")
        if self.row is not None:
            loc.append(f"row {self.row}")
        where = f" at {', '.join(loc)}" if loc else ""
        return f"{self.what}{where}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Pfa:
    """A k-state PFA over the alphabet ``{0, ..., alphabet-1}``.

    ``P[s][i][j]`` is the probability of moving from state ``i`` to ``j``
    on letter ``s``.
    """

    pi: tuple
    P: tuple
    eta: tuple
    mode: str = RATIONAL
    k: int = field(init=False)
    alphabet: int = field(init=False)

    def __post_init__(self):
        conv = (lambda x: parse_scalar(x, self.mode))
        if self.mode not in (RATIONAL, FLOAT):
            raise InputError(f"unknown scalar mode {self.mode!r}")
        object.__setattr__(self, "pi", tuple(conv(x) for x in self.pi))
        object.__setattr__(
            self, "P", tuple(tuple(tuple(conv(x) for x in row) for row in m) for m in self.P)
        )
        object.__setattr__(self, "eta", tuple(int(x) for x in self.eta))
        object.__setattr__(self, "k", len(self.pi))
        object.__setattr__(self, "alphabet", len(self.P))
        if self.alphabet < 1:
            raise InputError("a PFA needs at least one letter")
        if len(self.eta) != self.k:
            raise InputError("eta length differs from pi length")
        for s, m in enumerate(self.P):
            if len(m) != self.k or any(len(row) != self.k for row in m):
                raise InputError(f"matrix for letter {s} is not {self.k}x{self.k}")

    # -- conversions -------------------------------------------------------
    def to_float(self) -> "Pfa":
        return Pfa(
            tuple(float(x) for x in self.pi),
            tuple(tuple(tuple(float(x) for x in row) for row in m) for m in self.P),
            self.eta,
            mode=FLOAT,
        )

    def to_json(self) -> dict:
        sj = (lambda x: scalar_json(x, self.mode))
        return {
            "k": self.k,
            "alphabet": self.alphabet,
            "mode": self.mode,
            "pi": [sj(x) for x in self.pi],
            "P": [[[sj(x) for x in row] for row in m] for m in self.P],
            "eta": list(self.eta),
        }

    @classmethod
    def from_json(cls, data) -> "Pfa":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            mode = data.get("mode", RATIONAL)
            pfa = cls(data["pi"], data["P"], data["eta"], mode=mode)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed PFA JSON: {exc}") from exc
        if "k" in data and data["k"] != pfa.k:
            raise InputError("field k disagrees with pi")
        if "alphabet" in data and data["alphabet"] != pfa.alphabet:
            raise InputError("field alphabet disagrees with P")
        return pfa


def validate_pfa(A: Pfa) -> list[Violation]:
    """Return every violated invariant of ``A``; an empty list means valid."""
    out: list[Violation] = []
    exact = A.mode == RATIONAL

    def bad_sum(total):
        return total != 1 if exact else abs(total - 1.0) > FLOAT_TOL

    for i, x in enumerate(A.pi):
        if not 0 <= x <= 1:
            out.append(Violation("pi entry outside [0,1]", row=i, detail=str(x)))
    if bad_sum(sum(A.pi)):
        out.append(Violation("pi does not sum to 1", detail=str(sum(A.pi))))
    for s, m in enumerate(A.P):
        for i, row in enumerate(m):
            for x in row:
                if not 0 <= x <= 1:
                    out.append(Violation("entry outside [0,1]", letter=s, row=i, detail=str(x)))
                    break
            if bad_sum(sum(row)):
                out.append(Violation("row does not sum to 1", letter=s, row=i, detail=str(sum(row))))
    for i, e in enumerate(A.eta):
        if e not in (0, 1):
            out.append(Violation("eta entry not 0/1", row=i, detail=str(e)))
    return out


def _check_word(A: Pfa, w) -> Word:
    w = word(w)
    for x in w:
        if not 0 <= x < A.alphabet:
            raise InputError(f"letter {x} outside alphabet of size {A.alphabet}")
    return w


def _step(v, m):
    k = len(v)
    return tuple(sum(v[i] * m[i][j] for i in range(k) if v[i]) for j in range(k))


def distribution(A: Pfa, w) -> tuple:
    """State distribution ``pi * P(w)`` after reading ``w``."""
    v = A.pi
    for s in _check_word(A, w):
        v = _step(v, A.P[s])
    return v


def rho(A: Pfa, w) -> Fraction | float:
    """Acceptance probability ``pi * P(w1)...P(wn) * eta``."""
    v = distribution(A, w)
    return sum((x for x, e in zip(v, A.eta) if e), Fraction(0) if A.mode == RATIONAL else 0.0)


def rho_table(A: Pfa, n: int, budget: int = DEFAULT_GAP_BUDGET) -> dict:
    """Acceptance probability of every word of length ``n``.

    Shares prefix products, so the cost is about ``b**n`` vector-matrix steps.
    """
    if A.alphabet**n > budget:
        raise BudgetError(f"{A.alphabet}^{n} words exceed budget {budget}")
    level = {(): A.pi}
    for _ in range(n):
        level = {u + (s,): _step(v, A.P[s]) for u, v in level.items() for s in range(A.alphabet)}
    zero = Fraction(0) if A.mode == RATIONAL else 0.0
    return {u: sum((x for x, e in zip(v, A.eta) if e), zero) for u, v in level.items()}


def gap(A: Pfa, w, budget: int = DEFAULT_GAP_BUDGET):
    """``min(rho(w) - rho(z))`` over same-length ``z != w``; 1 if no such ``z``."""
    w = _check_word(A, w)
    if not w or A.alphabet == 1:
        return Fraction(1) if A.mode == RATIONAL else 1.0
    table = rho_table(A, len(w), budget)
    rw = table.pop(w)
    return rw - max(table.values())


def drop_prefix(A: Pfa, x) -> Pfa:
    """The same machine started from ``pi * P(x)``, so rho'(w) = rho(x w)."""
    return Pfa(distribution(A, x), A.P, A.eta, mode=A.mode)


def reverse_pfa(A: Pfa) -> Pfa:
    """Run ``A`` backwards: transposed matrices, start from eta, accept on pi.

    Requires doubly stochastic matrices, equal nonzero ``pi`` entries and a
    nonzero ``eta``; then ``rho(A', reversed(y)) = (n/s) * rho(A, y)``.
    """
    for s, m in enumerate(A.P):
        for j in range(A.k):
            col = sum(m[i][j] for i in range(A.k))
            off = col != 1 if A.mode == RATIONAL else abs(col - 1) > FLOAT_TOL
            if off:
                raise PreconditionError(f"matrix for letter {s} is not doubly stochastic (column {j})")
    nz = {x for x in A.pi if x != 0}
    if len(nz) != 1:
        raise PreconditionError("nonzero entries of pi are not all equal")
    s_count = sum(A.eta)
    if s_count == 0:
        raise PreconditionError("eta has no accepting state")
    one = Fraction(1) if A.mode == RATIONAL else 1.0
    new_pi = tuple(one * e / s_count for e in A.eta)
    new_eta = tuple(1 if x != 0 else 0 for x in A.pi)
    PT = tuple(tuple(tuple(m[i][j] for i in range(A.k)) for j in range(A.k)) for m in A.P)
    return Pfa(new_pi, PT, new_eta, mode=A.mode)


def identity_pfa(k: int, alphabet: int, pi=None, eta=None) -> Pfa:
    one, zero = Fraction(1), Fraction(0)
    I = tuple(tuple(one if i == j else zero for j in range(k)) for i in range(k))
    pi = pi if pi is not None else (one,) + (zero,) * (k - 1)
    eta = eta if eta is not None else (1,) + (0,) * (k - 1)
    return Pfa(pi, (I,) * alphabet, eta)


def pad_states(A: Pfa, k: int) -> Pfa:
    """Add unreachable self-looping rejecting states until ``A`` has ``k``."""
    if k < A.k:
        raise InputError("cannot shrink a PFA")
    extra = k - A.k
    zero = Fraction(0) if A.mode == RATIONAL else 0.0
    one = Fraction(1) if A.mode == RATIONAL else 1.0
    P = []
    for m in A.P:
        rows = [tuple(row) + (zero,) * extra for row in m]
        for t in range(extra):
            rows.append(tuple(one if j == A.k + t else zero for j in range(k)))
        P.append(tuple(rows))
    return Pfa(A.pi + (zero,) * extra, tuple(P), A.eta + (0,) * extra, mode=A.mode)
