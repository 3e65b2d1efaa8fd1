import random
from fractions import Fraction as F

import pytest
from hypothesis import settings, strategies as st

from pfacomplexity.classical import Nfa
from pfacomplexity.core import Pfa
from pfacomplexity.ifs import Ifs2

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

H = F(1, 2)


def wit0110() -> Pfa:
    return Pfa((1, 0), (((0, 1), (H, H)), ((H, H), (0, 1))), (1, 0))


def three_state_0110() -> Pfa:
    q, t = F(1, 4), F(3, 4)
    P0 = ((0, 0, 1), (q, t, 0), (1, 0, 0))
    P1 = ((0, t, q), (1, 0, 0), (0, 1, 0))
    return Pfa((1, 0, 0), (P0, P1), (0, 0, 1))


def numeric_0110() -> Pfa:
    P0 = ((0.16748, 0.83252), (0.99, 0.01))
    P1 = ((0.66116, 0.33884), (0.0, 1.0))
    return Pfa((1.0, 0.0), (P0, P1), (1, 0), mode="float")


def thenfa() -> Nfa:
    P0 = ((0, 1, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1), (0, 0, 0, 0))
    P1 = ((0, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 1))
    return Nfa(0, (P0, P1), (1, 0, 0, 0))


def converted_thenfa() -> Pfa:
    P0 = ((0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, H, 0, H, 0), (0, 0, 0, 0, 1), (0, 0, 0, 0, 1))
    P1 = ((0, 0, 0, 0, 1), (1, 0, 0, 0, 0), (0, 0, 0, 0, 1), (0, 0, H, H, 0), (0, 0, 0, 0, 1))
    return Pfa((1, 0, 0, 0, 0), (P0, P1), (1, 0, 0, 0, 0))


def wit0110_ifs2() -> Ifs2:
    return Ifs2(H, -H, 0, H, 1)


@pytest.fixture
def wit():
    return wit0110()


# -- random machines -------------------------------------------------------------------

def random_vector(rng: random.Random, k: int, den: int):
    """Uniform-ish rational probability vector with denominator ``den``."""
    cuts = sorted(rng.randint(0, den) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return tuple(F(p, den) for p in parts)


def random_pfa(rng: random.Random, k: int, b: int, den: int = 8, eta=None) -> Pfa:
    P = tuple(tuple(random_vector(rng, k, den) for _ in range(k)) for _ in range(b))
    if eta is None:
        eta = tuple(rng.randint(0, 1) for _ in range(k))
    return Pfa(random_vector(rng, k, den), P, eta)


def random_ifs2(rng: random.Random, den: int = 16) -> Ifs2:
    """Valid two-map system: pick f(0) and f(1) in [0, 1] for each map."""
    def one():
        lo, hi = F(rng.randint(0, den), den), F(rng.randint(0, den), den)
        return lo, hi - lo
    (a, b), (c, d) = one(), one()
    return Ifs2(a, b, c, d, F(rng.randint(0, den), den))


@st.composite
def prob_vectors(draw, k, den=None):
    den = den or draw(st.sampled_from([2, 3, 4, 6, 8]))
    cuts = sorted(draw(st.lists(st.integers(0, den), min_size=k - 1, max_size=k - 1)))
    return tuple(F(b - a, den) for a, b in zip([0] + cuts, cuts + [den]))


@st.composite
def pfas(draw, k=None, b=None):
    k = k or draw(st.integers(1, 3))
    b = b or draw(st.integers(1, 3))
    den = draw(st.sampled_from([2, 3, 4, 6]))
    P = tuple(tuple(draw(prob_vectors(k, den)) for _ in range(k)) for _ in range(b))
    eta = tuple(draw(st.lists(st.integers(0, 1), min_size=k, max_size=k)))
    return Pfa(draw(prob_vectors(k, den)), P, eta)


def words(alphabet=2, min_size=0, max_size=5):
    return st.lists(st.integers(0, alphabet - 1), min_size=min_size, max_size=max_size).map(tuple)


@st.composite
def ifs2s(draw, den=12):
    vals = [F(draw(st.integers(0, den)), den) for _ in range(5)]
    a, fa1, c, fc1, x0 = vals
    return Ifs2(a, fa1 - a, c, fc1 - c, x0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
