import random

import pytest

import streampredict as sp
from streampredict import Interval, LinkStream

S1_LINKS = [(1, "a", "b"), (2, "a", "c"), (3, "b", "c"), (4, "a", "b"), (9, "a", "b")]
S2_LINKS = [(1, "a", "b"), (2, "a", "c"), (3, "b", "c"), (4, "a", "b"), (5, "b", "c"),
            (6, "a", "c"), (9, "a", "b")]


@pytest.fixture
def s1():
    return LinkStream.from_links(S1_LINKS, Interval(0, 10))


@pytest.fixture
def s2():
    return LinkStream.from_links(S2_LINKS, Interval(0, 10))


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    previous = sp.set_backend(request.param)
    yield request.param
    sp.set_backend(previous)


def random_links(rng, n_nodes=None, n_links=None, horizon=100.0, integer_times=None):
    n_nodes = n_nodes or rng.randint(2, 20)
    n_links = n_links or rng.randint(1, 200)
    integer_times = rng.random() < 0.5 if integer_times is None else integer_times
    nodes = [f"n{i}" for i in range(n_nodes)]
    links = []
    for _ in range(n_links):
        u, v = rng.sample(nodes, 2)
        t = float(rng.randint(0, int(horizon))) if integer_times else rng.uniform(0, horizon)
        links.append((t, u, v))
    return links


def random_stream(seed, **kw):
    rng = random.Random(seed)
    links = random_links(rng, **kw)
    horizon = kw.get("horizon", 100.0)
    return links, LinkStream.from_links(links, Interval(0, horizon))


PERIODIC_COUNTS = {("a", "b"): 4, ("a", "c"): 2, ("b", "d"): 1, ("c", "d"): 1}


def periodic_links(counts=None, period=100.0, periods=3):
    """The same per-pair activity in every period, never on a period boundary."""
    counts = counts or PERIODIC_COUNTS
    links = []
    for p in range(periods):
        base = p * period
        for (u, v), n in counts.items():
            for i in range(n):
                links.append((base + period * (i + 1) / (n + 1), u, v))
    return links


def periodic_stream(counts=None, period=100.0, periods=3):
    links = periodic_links(counts, period, periods)
    return LinkStream.from_links(links, Interval(0, period * periods))
