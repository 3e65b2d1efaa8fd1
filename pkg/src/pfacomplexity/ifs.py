"""Affine iterated function systems equivalent to PFAs.

Reading a letter moves the state distribution by an affine map.  Once the last
state is non-accepting, the first ``k - 1`` coordinates carry everything
``rho`` needs, so a k-state PFA becomes a family of affine self-maps
``x -> a + x B`` of the (k-1)-simplex.  With two states this is a pair of maps
``f(x) = a + b x`` on [0, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .core import InputError, Pfa, PreconditionError, parse_scalar, word

Q = Fraction


def _q(x) -> Fraction:
    return parse_scalar(x)


def _frac_json(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Ifs:
    """Affine maps ``x -> offsets[s] + x @ B[s]`` on the (k-1)-simplex.

    ``accepting`` holds 0-based coordinate indices.  ``perm`` records the
    state order used when the system came from a PFA: ``perm[i]`` is the
    original index of coordinate ``i`` (the last entry is the dropped state).
    """

    offsets: tuple
    B: tuple
    x0: tuple
    accepting: frozenset
    perm: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(tuple(_q(x) for x in a) for a in self.offsets))
        object.__setattr__(self, "B", tuple(tuple(tuple(_q(x) for x in row) for row in m) for m in self.B))
        object.__setattr__(self, "x0", tuple(_q(x) for x in self.x0))
        object.__setattr__(self, "accepting", frozenset(int(i) for i in self.accepting))
        d = len(self.x0)
        if len(self.offsets) != len(self.B) or not self.B:
            raise InputError("need one offset and one matrix per letter")
        for a, m in zip(self.offsets, self.B):
            if len(a) != d or len(m) != d or any(len(row) != d for row in m):
                raise InputError("offset/matrix shape does not match x0")
        if any(not 0 <= i < d for i in self.accepting):
            raise InputError("accepting index outside 0..dim-1")

    @property
    def dim(self) -> int:
        return len(self.x0)

    @property
    def alphabet(self) -> int:
        return len(self.B)

    def apply(self, s: int, x):
        a, m = self.offsets[s], self.B[s]
        return tuple(a[j] + sum(x[i] * m[i][j] for i in range(self.dim)) for j in range(self.dim))

    def violations(self) -> list[str]:
        """Images of the origin and the unit vectors that leave the simplex."""
        out = []
        d = self.dim
        corners = [tuple(Q(0) for _ in range(d))]
        corners += [tuple(Q(int(i == j)) for j in range(d)) for i in range(d)]
        for s in range(self.alphabet):
            for ci, v in enumerate(corners):
                y = self.apply(s, v)
                if any(t < 0 for t in y) or sum(y) > 1:
                    out.append(f"letter {s} sends corner {ci} outside the simplex")
        if any(t < 0 for t in self.x0) or sum(self.x0) > 1:
            out.append("x0 outside the simplex")
        return out

    def to_json(self) -> dict:
        return {
            "offsets": [[_frac_json(x) for x in a] for a in self.offsets],
            "B": [[[_frac_json(x) for x in row] for row in m] for m in self.B],
            "x0": [_frac_json(x) for x in self.x0],
            "accepting": sorted(self.accepting),
            "perm": list(self.perm) if self.perm is not None else None,
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            perm = data.get("perm")
            return cls(data["offsets"], data["B"], data["x0"], data["accepting"],
                       tuple(perm) if perm is not None else None)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed IFS JSON: {exc}") from exc


@dataclass(frozen=True)
class Ifs2:
    """Two maps on [0, 1]: ``f0(x) = a + b x`` and ``f1(x) = c + d x``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    x0: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _q(getattr(self, name)))
        object.__setattr__(self, "x0", _q(self.x0))

    @property
    def maps(self) -> tuple:
        return ((self.a, self.b), (self.c, self.d))

    def violations(self) -> list[str]:
        out = []
        for name, v in (("a", self.a), ("a+b", self.a + self.b), ("c", self.c), ("c+d", self.d + self.c),
                        ("x0", self.x0)):
            if not 0 <= v <= 1:
                out.append(f"{name} = {v} outside [0,1]")
        return out

    def check(self) -> "Ifs2":
        bad = self.violations()
        if bad:
            raise InputError("; ".join(bad))
        return self

    def swapped(self) -> "Ifs2":
        """Exchange the roles of the two letters."""
        return Ifs2(self.c, self.d, self.a, self.b, self.x0)

    def to_ifs(self) -> Ifs:
        return Ifs(((self.a,), (self.c,)), (((self.b,),), ((self.d,),)), (self.x0,), {0})

    def to_json(self) -> dict:
        return {k: _frac_json(getattr(self, k)) for k in ("a", "b", "c", "d", "x0")}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(*(data[k] for k in ("a", "b", "c", "d", "x0")))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed Ifs2 JSON: {exc}") from exc


def pfa_to_ifs(A: Pfa) -> Ifs:
    """The affine system of ``A`` with a rejecting state moved last.

    The order is left alone when the last state already rejects, so
    ``pfa_to_ifs(ifs_to_pfa(I))`` gives back ``I``; otherwise the first
    rejecting state is moved to the end.
    """
    if A.mode != "rational":
        raise InputError("pfa_to_ifs works on rational PFAs")
    acc = sum(A.eta)
    if acc == 0 or acc == A.k:
        raise PreconditionError("rho is constant: every state accepts or none does")
    last = A.k - 1 if A.eta[-1] == 0 else A.eta.index(0)
    perm = tuple(i for i in range(A.k) if i != last) + (last,)
    d = A.k - 1
    offsets, Bs = [], []
    for m in A.P:
        a_k = tuple(m[last][perm[j]] for j in range(d))
        U = [[m[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
        offsets.append(a_k)
        Bs.append(tuple(tuple(U[i][j] - a_k[j] for j in range(d)) for i in range(d)))
    x0 = tuple(A.pi[perm[j]] for j in range(d))
    accepting = {j for j in range(d) if A.eta[perm[j]]}
    return Ifs(tuple(offsets), tuple(Bs), x0, accepting, perm)


def ifs_to_pfa(I: Ifs, accepting=None) -> Pfa:
    """Build a PFA realising ``I``; the extra last state never accepts.

    States come out in the coordinate order of ``I`` (``I.perm`` is not undone).
    """
    bad = I.violations()
    if bad:
        raise InputError("; ".join(bad))
    accepting = I.accepting if accepting is None else frozenset(accepting)
    d = I.dim
    if any(not 0 <= i < d for i in accepting):
        raise InputError("the last state cannot be accepting")
    P = []
    for a, m in zip(I.offsets, I.B):
        tail = 1 - sum(a)
        rows = []
        for i in range(d):
            row = [a[j] + m[i][j] for j in range(d)]
            rows.append(tuple(row) + (tail - sum(m[i]),))
        rows.append(tuple(a) + (tail,))
        P.append(tuple(rows))
    pi = tuple(I.x0) + (1 - sum(I.x0),)
    eta = tuple(int(i in accepting) for i in range(d)) + (0,)
    return Pfa(pi, tuple(P), eta)


def ifs2_from_pfa(A: Pfa) -> Ifs2:
    I = pfa_to_ifs(A)
    if I.dim != 1 or I.alphabet != 2:
        raise PreconditionError("need a 2-state PFA over a binary alphabet")
    return Ifs2(I.offsets[0][0], I.B[0][0][0], I.offsets[1][0], I.B[1][0][0], I.x0[0])


def ifs2_to_pfa(I: Ifs2) -> Pfa:
    return ifs_to_pfa(I.check().to_ifs())


def ifs_rho(I, w):
    """Acceptance probability by composing the maps along ``w``."""
    w = word(w)
    if isinstance(I, Ifs2):
        x = I.x0
        maps = I.maps
        for s in w:
            if s > 1:
                raise InputError(f"letter {s} outside binary alphabet")
            a, b = maps[s]
            x = a + b * x
        return x
    x = I.x0
    for s in w:
        if not 0 <= s < I.alphabet:
            raise InputError(f"letter {s} outside alphabet of size {I.alphabet}")
        x = I.apply(s, x)
    return sum((x[i] for i in I.accepting), Q(0))


# -- two-state diagnostics ---------------------------------------------------

DEGENERATE = "Degenerate"
COMMUTING = "Commuting"
NO_INTERSECT = "NoIntersect"


@dataclass(frozen=True)
class Ifs2Diagnostics:
    r0: Fraction | None
    r1: Fraction | None
    ix: Fraction | None
    iy: Fraction | None
    label: str
    commuting: bool

    def to_json(self) -> dict:
        f = (lambda v: None if v is None else _frac_json(v))
        return {"r0": f(self.r0), "r1": f(self.r1), "ix": f(self.ix), "iy": f(self.iy),
                "label": self.label, "commuting": self.commuting}


def _slope_sign(b):
    return (b > 0) - (b < 0)


def ifs2_diagnostics(I: Ifs2) -> Ifs2Diagnostics:
    a, b, c, d = I.a, I.b, I.c, I.d
    r0 = a / (1 - b) if b != 1 else None
    r1 = c / (1 - d) if d != 1 else None
    ix = iy = None
    if b != d:
        ix = (c - a) / (b - d)
        iy = (b * c - a * d) / (b - d)
    commuting = a + b * c == c + d * a
    if (a, b) == (c, d):
        label = DEGENERATE
    elif (a, b) in ((0, 1),) or (c, d) in ((0, 1),) or commuting:
        label = COMMUTING
    elif ix is None or not 0 <= ix <= 1:
        label = NO_INTERSECT
    else:
        sb, sd = _slope_sign(b), _slope_sign(d)
        if sb > 0 and sd > 0:
            pair = "PosPos"
        elif sb < 0 and sd < 0:
            pair = "NegNeg"
        else:
            pair = "Mixed"
        label = f"{pair}-{'Dec' if iy < ix else 'Inc'}"
    return Ifs2Diagnostics(r0, r1, ix, iy, label, commuting)
