import itertools

import pytest

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from chainlab.complex import SimplicialComplex, graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def complexes(draw, max_n=8, max_r=3):
    """Downward closures of random face lists."""
    N = draw(st.integers(1, max_n))
    r = draw(st.integers(0, min(max_r, N - 1)))
    faces = draw(
        st.lists(
            st.lists(st.integers(0, N - 1), min_size=1, max_size=r + 1, unique=True),
            max_size=12,
        )
    )
    return SimplicialComplex(N, r, [tuple(sorted(f)) for f in faces], close=True)


@st.composite
def graphs(draw, min_n=1, max_n=12):
    N = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(N), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return graph(N, [e for e, k in zip(pairs, keep) if k])


def random_count_instance(rng, max_n=10, g=1):
    """A random graph, half the time with a copy of the pattern's B graph planted.

    Returns ``(N, vertices, edges)``; a few labels may be absent.  Planting
    keeps nonzero counts common so the labelled totals get exercised, not
    just the zero case.
    """
    k = 2 * g + 4
    N = rng.randint(k, max_n)
    density = rng.uniform(0.2, 0.9)
    edges = {e for e in itertools.combinations(range(N), 2) if rng.random() < density}
    T = []
    if rng.random() < 0.5:
        from oracles import pattern_graphs

        A, B = pattern_graphs(g)
        T = rng.sample(range(N), k)
        for a, b in itertools.combinations(range(k), 2):
            e = tuple(sorted((T[a], T[b])))
            if (a, b) in A or ((a, b) in B and rng.random() < 0.5):
                edges.add(e)
            elif (a, b) not in B:
                edges.discard(e)
    vertices = [v for v in range(N) if v in T or rng.random() > 0.1]
    edges = [e for e in sorted(edges) if e[0] in vertices and e[1] in vertices]
    return N, vertices, edges


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a criterion's PASS/FAIL line; all lines are repeated in the terminal summary."""

    def record(number, ok, detail):
        line = f"acceptance {number}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        _VERDICTS.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
