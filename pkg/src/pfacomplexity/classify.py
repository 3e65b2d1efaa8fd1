"""Which strings a two-state PFA can witness, and witnesses for those that can.

For one-dimensional affine maps the longest-run maxima are easy to follow: an
increasing map sends the previous maximum to a candidate maximum and a
decreasing map sends the previous minimum there.  ``extremal_trace`` runs that
recursion exactly, tracking how many words attain each extremum (capped at 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import InputError, word, word_str
from .ifs import Ifs, Ifs2, ifs2_diagnostics

IN_JM = "IN_JM"            # i^n j^m
IN_JM_I = "IN_JM_I"        # i^n j^m i
IN_JI_M = "IN_JI_M"        # i^n (ji)^m
IN_J_IJ_M = "IN_J_IJ_M"    # i^n j (ij)^m
FORMS = (IN_JM, IN_JM_I, IN_JI_M, IN_J_IJ_M)

MAX_SCHEDULE = 64


class WitnessError(RuntimeError):
    """No verified witness was found within the parameter schedule."""


def render(form: str, i: int, n: int, m: int) -> tuple:
    j = 1 - i
    if form == IN_JM:
        return (i,) * n + (j,) * m
    if form == IN_JM_I:
        return (i,) * n + (j,) * m + (i,)
    if form == IN_JI_M:
        return (i,) * n + (j, i) * m
    if form == IN_J_IJ_M:
        return (i,) * n + (j,) + (i, j) * m
    raise InputError(f"unknown form {form!r}")


def _fixed_len(form):
    return {IN_JM: 0, IN_JM_I: 1, IN_JI_M: 0, IN_J_IJ_M: 1}[form]


def _period(form):
    return 2 if form in (IN_JI_M, IN_J_IJ_M) else 1


@dataclass(frozen=True)
class WitnessFamily:
    form: str
    i: int
    n: int
    m: int

    def __post_init__(self):
        if self.form not in FORMS or self.i not in (0, 1) or self.n < 0 or self.m < 0:
            raise InputError(f"bad witness family {self}")

    def word(self) -> tuple:
        return render(self.form, self.i, self.n, self.m)

    def member(self, m: int) -> tuple:
        return render(self.form, self.i, self.n, m)

    def members_up_to(self, L: int):
        """Family words with this prefix parameter and length <= L."""
        out = []
        m = 0
        while True:
            u = self.member(m)
            if len(u) > L:
                return out
            out.append(u)
            m += 1

    def to_json(self) -> dict:
        return {"form": self.form, "i": self.i, "n": self.n, "m": self.m}


def decompositions(w) -> list[WitnessFamily]:
    """Every (form, i, n, m) rendering ``w``, in preference order."""
    w = word(w)
    if any(x not in (0, 1) for x in w):
        return []
    out = []
    for form in FORMS:
        for i in (0, 1):
            for n in range(len(w), -1, -1):
                rest = len(w) - n - _fixed_len(form)
                if rest < 0 or rest % _period(form):
                    continue
                m = rest // _period(form)
                if render(form, i, n, m) == w:
                    out.append(WitnessFamily(form, i, n, m))
    return out


def is_class2(w) -> WitnessFamily | None:
    """The preferred classified decomposition of a binary word, if any."""
    found = decompositions(w)
    return found[0] if found else None


# -- extremal trace ------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    max_value: Fraction
    max_arg: tuple
    max_unique: bool
    min_value: Fraction
    min_arg: tuple
    min_unique: bool


@dataclass(frozen=True)
class ExtremalTrace:
    steps: tuple  # steps[l] describes length l, including l = 0

    def __getitem__(self, length: int) -> TraceStep:
        return self.steps[length]

    def __len__(self):
        return len(self.steps)

    def witnesses(self, w) -> bool:
        w = word(w)
        if len(w) >= len(self.steps):
            raise InputError("trace too short for this word")
        st = self.steps[len(w)]
        return st.max_unique and st.max_arg == w

    def to_json(self) -> list:
        return [
            {"length": ell, "max": str(s.max_value), "max_arg": word_str(s.max_arg), "max_unique": s.max_unique,
             "min": str(s.min_value), "min_arg": word_str(s.min_arg), "min_unique": s.min_unique}
            for ell, s in enumerate(self.steps)
        ]


def one_dim_maps(I) -> tuple[list, Fraction]:
    """``([(offset, slope), ...], x0)`` for an Ifs2 or a one-dimensional Ifs."""
    if isinstance(I, Ifs2):
        return list(I.maps), I.x0
    if isinstance(I, Ifs) and I.dim == 1 and I.accepting == frozenset({0}):
        return [(a[0], m[0][0]) for a, m in zip(I.offsets, I.B)], I.x0[0]
    raise InputError("need a one-dimensional system accepting on its coordinate")


def extremal_trace(I, L: int) -> ExtremalTrace:
    """Exact extrema of rho over each length 0..L, with argmax/argmin words.

    Ties are broken towards the lexicographically smaller word; the unique
    flags say whether exactly one word of that length attains the value.
    """
    maps, x0 = one_dim_maps(I)
    nletters = len(maps)
    hi = lo = (x0, (), 1)
    steps = [TraceStep(x0, (), True, x0, (), True)]
    for ell in range(1, L + 1):
        everyone = min(2, nletters ** (ell - 1))
        cands_hi, cands_lo = [], []
        for s, (a, b) in enumerate(maps):
            if b > 0:
                cands_hi.append((a + b * hi[0], hi[1] + (s,), hi[2]))
                cands_lo.append((a + b * lo[0], lo[1] + (s,), lo[2]))
            elif b < 0:
                cands_hi.append((a + b * lo[0], lo[1] + (s,), lo[2]))
                cands_lo.append((a + b * hi[0], hi[1] + (s,), hi[2]))
            else:
                # constant map: every word of length ell - 1 lands on a
                first = (0,) * (ell - 1) + (s,)
                cands_hi.append((a, first, everyone))
                cands_lo.append((a, first, everyone))
        hi = _pick(cands_hi, max)
        lo = _pick(cands_lo, min)
        steps.append(TraceStep(hi[0], hi[1], hi[2] == 1, lo[0], lo[1], lo[2] == 1))
    return ExtremalTrace(tuple(steps))


def _pick(cands, best):
    v = best(c[0] for c in cands)
    tied = [c for c in cands if c[0] == v]
    count = min(2, sum(c[2] for c in tied))
    return v, min(c[1] for c in tied), count


def witnessed_language(I, L: int) -> list[tuple]:
    """Words of length 1..L that are the unique most likely word of their length."""
    tr = extremal_trace(I, L)
    return [tr[ell].max_arg for ell in range(1, L + 1) if tr[ell].max_unique]


# -- witness construction ------------------------------------------------------

def _flip(w):
    return tuple(1 - x for x in w)


def _between(lo, hi, floor=None, ceil=None):
    """Midpoint of (lo, hi) clipped to (floor, ceil), or None when empty."""
    lo, hi = min(lo, hi), max(lo, hi)
    if floor is not None:
        lo = max(lo, floor)
    if ceil is not None:
        hi = min(hi, ceil)
    if not lo < hi:
        return None
    return (lo + hi) / 2


def _rev1(n, s):
    # 0^n 1^m: increasing maps, f0 above f1 only to the right of i_x
    b = 1 - s
    a, c, d = Fraction(0), b / 2, b / 8
    ix = (c - a) / (b - d)
    if n == 0:
        x0 = ix / 2
    else:
        x0 = _between(ix / b ** (n - 1), ix / b ** n, ix, Fraction(1))
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _neg_f1(s):
    d = -1 + s
    return (1 + abs(d)) / 2, d


def _rev6(n, s):
    # 1^(2n) 0^m 1
    a = b = Fraction(1, 4)
    c, d = _neg_f1(s)
    r1 = c / (1 - d)
    ix = (c - a) / (b - d)
    F = (a + a * b - c - c * d) / (d * d - b * b)
    x0 = _between(r1 - (r1 - F) / d ** (2 * n), r1 - (r1 - F) / d ** (2 * (n - 1)), Fraction(0), ix)
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _rev7(n, s):
    # 1^(2n-1) 0^m 1
    a = b = Fraction(1, 4)
    c, d = _neg_f1(s)
    r1 = c / (1 - d)
    ix = (c - a) / (b - d)
    E = (a * (1 + b) - c * (1 + d)) / (d * d - b * b)
    x0 = _between(r1 + (r1 - E) / abs(d) ** (2 * n - 3), r1 + (r1 - E) / abs(d) ** (2 * n - 1), ix, Fraction(1))
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _rev3(n, s):
    # 1^(2n) (01)^m, n >= 1
    a, b = Fraction(1, 2), Fraction(-1, 4)
    c, d = _neg_f1(s)
    r1 = c / (1 - d)
    ix = (c - a) / (b - d)
    x0 = _between(r1 + (ix - r1) / d ** (2 * (n - 1)), r1 + (ix - r1) / d ** (2 * n), ix, Fraction(1))
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _rev4(n, s):
    # 1^(2n+1) (01)^m
    a, b = Fraction(1, 2), Fraction(-1, 4)
    c, d = _neg_f1(s)
    r0, r1 = a / (1 - b), c / (1 - d)
    ix = (c - a) / (b - d)
    x0 = _between(r1 - (ix - r1) / abs(d) ** (2 * n + 1), r1 - (ix - r1) / abs(d) ** (2 * n - 1), Fraction(0), r0)
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _rev5(n, s):
    # 1^(2n+1) 0 (10)^m
    a, b = Fraction(7, 8), Fraction(-1, 2)
    c, d = _neg_f1(s)
    r0, r1 = a / (1 - b), c / (1 - d)
    ix = (c - a) / (b - d)
    x0 = _between(r1 + (r1 - ix) / abs(d) ** (2 * n - 1), r1 + (r1 - ix) / abs(d) ** (2 * n + 1), r0, Fraction(1))
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _worst(n, s):
    # 0^(2n) 1 (01)^m, n >= 1: both slopes tend to -1 together
    t = s
    b = -1 + t
    d = -1 + t / 2
    c = 1 - t / 4
    r0 = Fraction(1, 2) - t / 16
    a = (1 - b) * r0
    ix = (c - a) / (b - d)
    x0 = _between(r0 + (ix - r0) / b ** (2 * n - 2), r0 + (ix - r0) / b ** (2 * n), ix, Fraction(1))
    return None if x0 is None else Ifs2(a, b, c, d, x0)


def _alternating(_n, _s):
    # parallel decreasing maps, f1 always above f0: maxima alternate ...0101
    return Ifs2(Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1, 2), Fraction(1, 2))


def _plan(fam: WitnessFamily):
    """(constructor, n argument, swap maps?) for a classified family.

    Constructors are written for one fixed letter pattern; families using the
    other letter pattern are handled by exchanging the two maps.
    """
    form, i, n = fam.form, fam.i, fam.n
    if form == IN_JM:
        return _rev1, n, i == 1
    if form == IN_JM_I:
        # i^n j^m i; constructors are for 1^n 0^m 1
        swap = i == 0
        if n == 0:
            raise WitnessError("j^m i is handled as IN_JM")
        return (_rev6, n // 2, swap) if n % 2 == 0 else (_rev7, (n + 1) // 2, swap)
    if form == IN_JI_M:
        # i^n (ji)^m; constructors are for 1^n (01)^m
        swap = i == 0
        if n == 0:
            return _alternating, 0, swap
        return (_rev3, n // 2, swap) if n % 2 == 0 else (_rev4, (n - 1) // 2, swap)
    # i^n j (ij)^m
    if n == 0:
        # j (ij)^m ends like (..ji) on the other letter: 1(01)^m under the alternating maps
        return _alternating, 0, i == 1
    if n % 2 == 1:
        return _rev5, (n - 1) // 2, i == 0
    return _worst, n // 2, i == 1


def verify_witness(I, fam: WitnessFamily, L: int | None = None) -> bool:
    """True iff the family word and its same-prefix relatives up to L are witnessed."""
    w = fam.word()
    L = 2 * len(w) + 4 if L is None else L
    tr = extremal_trace(I, L)
    members = [u for u in fam.members_up_to(L) if len(u) >= 1]
    return tr.witnesses(w) and all(tr.witnesses(u) for u in members)


def witness_class2(w, max_schedule: int = MAX_SCHEDULE) -> Ifs2:
    """A rational 2-state system witnessing ``w``, checked by ``extremal_trace``.

    Parameters move along a geometric schedule toward the limit the
    construction needs; the first verified candidate is returned.
    """
    w = word(w)
    fam = is_class2(w)
    if fam is None:
        raise InputError(f"{word_str(w)} is not of a classified form")
    build, n, swap = _plan(fam)
    for t in range(1, max_schedule + 1):
        try:
            I = build(n, Fraction(1, 2 ** t))
        except ZeroDivisionError:
            continue  # parallel maps at this point of the schedule
        if I is None or I.violations():
            continue
        if swap:
            I = I.swapped()
        if verify_witness(I, fam):
            return I
    raise WitnessError(f"no verified witness for {word_str(w)} within {max_schedule} steps")


# -- regular tail --------------------------------------------------------------

# pattern name -> renderer of (n, m) in the unflipped letters
_BULLETS = {
    "0^n": lambda n, m: (0,) * n,
    "0^n1^m": lambda n, m: (0,) * n + (1,) * m,
    "0^n(10)^m": lambda n, m: (0,) * n + (1, 0) * m,
    "0^n1(01)^m": lambda n, m: (0,) * n + (1,) + (0, 1) * m,
    "1^n(01)^m": lambda n, m: (1,) * n + (0, 1) * m,
    "1^n0(10)^m": lambda n, m: (1,) * n + (0,) + (1, 0) * m,
    "1^n0^m1": lambda n, m: (1,) * n + (0,) * m + (1,),
}


def _bullet_params(name, flipped, u):
    """Values of the fixed parameter under which ``u`` belongs to the bullet."""
    target = _flip(u) if flipped else u
    if name == "0^n":
        return {0} if all(x == 0 for x in target) else set()
    out = set()
    for n in range(len(target) + 1):
        for m in range(len(target) + 1):
            v = _BULLETS[name](n, m)
            if len(v) > len(target):
                break
            if v == target:
                out.add(n)
    return out


@dataclass(frozen=True)
class TailReport:
    status: str        # "match" or "no match"
    bullets: tuple     # one entry per parity class that has words
    exceptions: tuple  # tail words not covered by their class's bullet

    def to_json(self) -> dict:
        return {"status": self.status, "bullets": list(self.bullets),
                "exceptions": [word_str(u) for u in self.exceptions]}


def check_regular_tail(words, L: int) -> TailReport:
    """Match the long words of a witnessed language against the eventual patterns.

    Words of length L-6..L are split by parity; in each class the two longest
    words must belong to one pattern with a common fixed prefix parameter.
    """
    tail = sorted((word(u) for u in words if L - 6 <= len(word(u)) <= L), key=len)
    if not tail:
        return TailReport("match", ("nothing",), ())
    bullets, exceptions = [], []
    for parity in (0, 1):
        cls = [u for u in tail if len(u) % 2 == parity]
        if not cls:
            continue
        probe = cls[-2:]
        hit = None
        for name in _BULLETS:
            for flipped in (False, True):
                common = set.intersection(*(_bullet_params(name, flipped, u) for u in probe))
                if common:
                    hit = (name, flipped, min(common))
                    break
            if hit:
                break
        if hit is None:
            exceptions.extend(probe)
            bullets.append("no match")
        else:
            name, flipped, n = hit
            bullets.append(f"{name}{' (flipped)' if flipped else ''} n={n}")
    status = "no match" if exceptions else "match"
    return TailReport(status, tuple(bullets), tuple(exceptions))


# -- alphabet padding ----------------------------------------------------------

def pad_alphabet(I: Ifs2, size: int) -> Ifs:
    """Extend to ``size`` letters; every extra letter uses the averaged map."""
    if size < 2:
        raise InputError("padded alphabet needs at least 2 letters")
    (a, b), (c, d) = I.maps
    mid = ((a + c) / 2, (b + d) / 2)
    maps = [(a, b), (c, d)] + [mid] * (size - 2)
    return Ifs(tuple((m[0],) for m in maps), tuple((((m[1],),)) for m in maps), (I.x0,), {0})


def diagnostics_label(I: Ifs2) -> str:
    return ifs2_diagnostics(I).label
