import itertools
import os
import sys

from hypothesis import settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from hypermatch.core import KPartiteHypergraph  # noqa: E402
from hypermatch.family import HypergraphFamily  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def hypergraphs(draw, k=None, max_n=3, min_n=1, equal=True):
    k = draw(st.integers(2, 3)) if k is None else k
    if equal:
        n = draw(st.integers(min_n, max_n))
        sizes = [n] * k
    else:
        sizes = [draw(st.integers(min_n, max_n)) for _ in range(k)]
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    mask = draw(st.lists(st.booleans(), min_size=len(tuples), max_size=len(tuples)))
    return KPartiteHypergraph(sizes, [t for t, b in zip(tuples, mask) if b])


@st.composite
def families(draw, k=3, max_n=3, max_t=3):
    n = draw(st.integers(1, max_n))
    t = draw(st.integers(1, max_t))
    tuples = list(itertools.product(range(n), repeat=k))
    members = []
    for _ in range(t):
        mask = draw(st.lists(st.booleans(), min_size=len(tuples), max_size=len(tuples)))
        members.append(KPartiteHypergraph([n] * k, [e for e, b in zip(tuples, mask) if b]))
    return HypergraphFamily(tuple(members))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
