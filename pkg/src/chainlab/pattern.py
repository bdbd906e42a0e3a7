"""The chain pattern and its combinatorial predicates.

For genus ``g`` the pattern lives on ``2g + 4`` labelled vertices: a cycle
``v_0 .. v_{2g+1}`` and two extra vertices ``w_0, w_1``.  Vertex ids are
``v_i -> i``, ``w_0 -> 2g+2`` and ``w_1 -> 2g+3``.

* ``A`` (a graph): ``v_i v_j`` for cyclically non-consecutive ``i, j``, and
  ``w_i v_j`` when ``i`` and ``j`` have the same parity.
* ``B`` (a flag complex): all of ``A`` plus ``w_0 w_1`` and the mixed-parity
  ``w_i v_j``.  The ``2g + 2`` polygon sides ``v_i v_{i+1}`` are in neither.

The predicates below read "intersection 0/1" between curves combinatorially
inside an arbitrary complex.  A *top-dimensional* simplex is a face of the
largest dimension present in the complex.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from chainlab import _backend
from chainlab.complex import (
    SimplicialComplex,
    flag_completion,
    graph,
    mask_of,
    simplex,
    simplex_of,
)
from chainlab.errors import VertexNotFoundError

__all__ = [
    "PatternPair",
    "StarPattern",
    "DEFAULT_STAR",
    "PatternCount",
    "build_pattern",
    "pattern_edges",
    "intersection_zero",
    "exchangeable",
    "adjacency_graph",
    "separates_torus",
    "intersection_one",
    "is_closed_chain",
    "count_pattern_occurrences",
]


def pattern_edges(g: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]], list[tuple[int, int]]]:
    """Edge lists ``(A, B-only, polygon sides)`` for genus ``g``."""
    m = 2 * g + 2
    w = (m, m + 1)
    a_edges, b_extra, sides = [], [], []
    for i in range(m):
        for j in range(i + 1, m):
            (sides if (j - i) % m in (1, m - 1) else a_edges).append((i, j))
    for k in (0, 1):
        for j in range(m):
            (a_edges if j % 2 == k else b_extra).append((j, w[k]))
    b_extra.append(w)
    return a_edges, b_extra, sides


@dataclass(frozen=True)
class PatternPair:
    g: int
    A: SimplicialComplex
    B: SimplicialComplex

    @property
    def N(self) -> int:
        return 2 * self.g + 4

    def v(self, i: int) -> int:
        return i % (2 * self.g + 2)

    def w(self, i: int) -> int:
        return 2 * self.g + 2 + i

    @property
    def names(self) -> tuple[str, ...]:
        m = 2 * self.g + 2
        return tuple(f"v{i}" for i in range(m)) + ("w0", "w1")

    @property
    def polygon_sides(self) -> list[tuple[int, int]]:
        return pattern_edges(self.g)[2]


def build_pattern(g: int, r: int | None = None) -> PatternPair:
    """Pattern graph ``A`` and flag complex ``B`` for genus ``g``.

    ``B`` is flag-completed up to dimension ``min(r, 2g + 3)``; the default
    is the full clique complex.
    """
    if g < 1:
        raise ValueError(f"genus must be >= 1, got {g}")
    N = 2 * g + 4
    cap = N - 1 if r is None else min(r, N - 1)
    if cap < 1:
        raise ValueError("the pattern needs dimension cap >= 1")
    a_edges, b_extra, _ = pattern_edges(g)
    A = graph(N, a_edges)
    B = flag_completion(graph(N, a_edges + b_extra), cap)
    return PatternPair(g=g, A=A, B=B)


@dataclass(frozen=True)
class StarPattern:
    """A graph on the abstract vertices ``1..5`` used by :func:`intersection_one`.

    The shipped default, :data:`DEFAULT_STAR`, is the pentagon
    ``1-3-5-2-4-1``.  It is an assumption, not a recovered figure; pass a
    different pattern (or set ``star`` in a parameter file) to change it.
    """

    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2 or e[0] >= e[1] or not (1 <= e[0] and e[1] <= 5):
                raise ValueError(f"bad star edge {e}; expected i < j in 1..5")

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]]) -> StarPattern:
        return cls(frozenset(tuple(sorted(e)) for e in edges))

    @classmethod
    def parse(cls, text: str) -> StarPattern:
        """Parse ``"1-3 3-5 5-2"`` (comma or space separated)."""
        pairs = []
        for tok in text.replace(",", " ").split():
            a, b = tok.split("-")
            pairs.append((int(a), int(b)))
        return cls.from_edges(pairs)

    def has(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def __str__(self) -> str:
        return " ".join(f"{a}-{b}" for a, b in sorted(self.edges))


DEFAULT_STAR = StarPattern.from_edges([(1, 3), (3, 5), (5, 2), (2, 4), (4, 1)])


# -- predicates ----------------------------------------------------------


def _require_vertex(Gamma: SimplicialComplex, v: int) -> None:
    if not (0 <= v < Gamma.N) or not (Gamma.vertex_mask >> v) & 1:
        raise VertexNotFoundError(v)


def _edge(Gamma: SimplicialComplex, u: int, v: int) -> bool:
    return bool((Gamma.adjacency[u] >> v) & 1)


def _top_mask(Gamma: SimplicialComplex, sigma: Iterable[int]) -> int:
    s = mask_of(simplex(sigma))
    if Gamma.dim < 0 or s not in Gamma.masks(Gamma.dim):
        raise ValueError(f"{simplex_of(s)} is not a top-dimensional simplex (top dimension {Gamma.dim})")
    return s


def intersection_zero(Gamma: SimplicialComplex, u: int, v: int) -> bool:
    """``u`` and ``v`` span a 1-simplex."""
    if u == v:
        raise ValueError("intersection_zero needs two distinct vertices")
    _require_vertex(Gamma, u)
    _require_vertex(Gamma, v)
    return _edge(Gamma, u, v)


def exchangeable(Gamma: SimplicialComplex, v: int, w: int, sigma: Iterable[int]) -> bool:
    """Swapping ``v`` for ``w`` in the top simplex ``sigma`` gives another top simplex."""
    s = _top_mask(Gamma, sigma)
    if not (s >> v) & 1:
        raise ValueError(f"{v} is not a vertex of {simplex_of(s)}")
    if w < 0 or (s >> w) & 1:
        raise ValueError(f"{w} must be a vertex outside {simplex_of(s)}")
    return (s ^ (1 << v) | (1 << w)) in Gamma.masks(Gamma.dim)


def _exchange_targets(Gamma: SimplicialComplex, s: int) -> dict[int, int]:
    # v in sigma -> mask of w outside sigma exchangeable with v
    top = Gamma.masks(Gamma.dim)
    out = {}
    for v in simplex_of(s):
        base = s ^ (1 << v)
        t = 0
        for w in simplex_of(Gamma.vertex_mask & ~s):
            if base | (1 << w) in top:
                t |= 1 << w
        out[v] = t
    return out


def _adjacent_inside(Gamma: SimplicialComplex, t1: int, t2: int) -> bool:
    adjm = Gamma.adjacency
    for w1 in simplex_of(t1):
        # some w2 in t2, distinct from w1, not spanning an edge with w1
        if t2 & ~adjm[w1] & ~(1 << w1):
            return True
    return False


def _adjacency_masks(Gamma: SimplicialComplex, s: int) -> dict[int, int]:
    targets = _exchange_targets(Gamma, s)
    verts = simplex_of(s)
    nbrs = {v: 0 for v in verts}
    for i, v1 in enumerate(verts):
        for v2 in verts[i + 1:]:
            if _adjacent_inside(Gamma, targets[v1], targets[v2]):
                nbrs[v1] |= 1 << v2
                nbrs[v2] |= 1 << v1
    return nbrs


def adjacency_graph(Gamma: SimplicialComplex, sigma: Iterable[int]) -> SimplicialComplex:
    """Graph on the vertices of the top simplex ``sigma``.

    ``v1 v2`` is an edge when there are vertices ``w1 != w2`` with
    ``{w1, w2}`` not a simplex and each ``v_i`` exchangeable with ``w_i``.
    """
    s = _top_mask(Gamma, sigma)
    nbrs = _adjacency_masks(Gamma, s)
    edges = [(v, u) for v, m in nbrs.items() for u in simplex_of(m) if v < u]
    return graph(Gamma.N, edges, vertices=simplex_of(s))


def separates_torus(Gamma: SimplicialComplex, sigma: Iterable[int], v1: int, v2: int) -> bool:
    """``v1`` is a leaf of the adjacency graph of ``sigma`` and ``v2`` its neighbour."""
    s = _top_mask(Gamma, sigma)
    if v1 == v2:
        raise ValueError("separates_torus needs two distinct vertices")
    for v in (v1, v2):
        if not (0 <= v < Gamma.N) or not (s >> v) & 1:
            raise ValueError(f"{v} is not a vertex of {simplex_of(s)}")
    return _adjacency_masks(Gamma, s)[v1] == 1 << v2


def intersection_one(Gamma: SimplicialComplex, v1: int, v2: int, star: StarPattern = DEFAULT_STAR) -> bool:
    """Search for ``v3, v4, v5`` and a top simplex ``sigma`` such that

    1. ``{v_i, v_j}`` is a simplex iff ``{i, j}`` is an edge of ``star``;
    2. ``v1, v4`` lie in ``sigma``;
    3. ``v4`` separates a torus containing ``v1`` w.r.t. ``sigma``;
    4. ``v1`` can be exchanged with ``v2`` w.r.t. ``sigma``.

    The roles of ``v1`` and ``v2`` differ, so the relation need not be
    symmetric.
    """
    if v1 == v2:
        raise ValueError("intersection_one needs two distinct vertices")
    _require_vertex(Gamma, v1)
    _require_vertex(Gamma, v2)
    if Gamma.dim < 0 or star.has(1, 2) != _edge(Gamma, v1, v2):
        return False
    top = Gamma.masks(Gamma.dim)
    adjm = Gamma.adjacency
    b1, b2 = 1 << v1, 1 << v2
    full = Gamma.vertex_mask

    def fits(x: int, role: int, placed: dict[int, int]) -> bool:
        return all(star.has(role, j) == _edge(Gamma, x, u) for j, u in placed.items())

    def pool(role: int, placed: dict[int, int]) -> int:
        m = full
        for j, u in placed.items():
            m &= adjm[u] if star.has(role, j) else ~adjm[u]
            m &= ~(1 << u)
        return m

    for s in top:
        if not s & b1 or s & b2 or (s ^ b1 | b2) not in top:
            continue
        nb = _adjacency_masks(Gamma, s)[v1]
        if not nb or nb & (nb - 1):
            continue
        v4 = nb.bit_length() - 1
        placed = {1: v1, 2: v2}
        if not fits(v4, 4, placed):
            continue
        placed[4] = v4
        for v3 in simplex_of(pool(3, placed)):
            if pool(5, {**placed, 3: v3}):
                return True
    return False


def is_closed_chain(Gamma: SimplicialComplex, seq: Sequence[int], star: StarPattern = DEFAULT_STAR) -> bool:
    """Cyclically consecutive members have intersection 1 (in both orders),
    all other pairs intersection 0."""
    seq = list(seq)
    if len(seq) < 3:
        raise ValueError("a closed chain needs at least 3 vertices")
    if len(set(seq)) != len(seq):
        raise ValueError("closed chain vertices must be distinct")
    k1 = len(seq)
    for i in range(k1):
        for j in range(i + 1, k1):
            d = min(j - i, k1 - (j - i))
            a, b = seq[i], seq[j]
            if d > 1:
                if not intersection_zero(Gamma, a, b):
                    return False
            elif not (intersection_one(Gamma, a, b, star) and intersection_one(Gamma, b, a, star)):
                return False
    return True


# -- occurrence counting -----------------------------------------------------


@dataclass(frozen=True)
class PatternCount:
    """Occurrences of the pattern sandwiched inside ``Y``.

    ``raw``: vertex subsets ``T`` of size ``2g + 4`` with some labeling
    ``phi`` such that ``A <= phi*(Y|T) <= B`` as graphs.  ``labeled``: the
    number of such ``(T, phi)`` pairs.  ``inside_clique``: subsets ``T``
    counted in ``raw`` that extend to a ``clique_size``-vertex set of
    vertices of ``Y`` in which every pair not contained in ``T`` is an edge.
    """

    g: int
    clique_size: int
    raw: int
    labeled: int
    inside_clique: int


def count_pattern_occurrences(Y: SimplicialComplex, g: int, clique_size: int | None = None) -> PatternCount:
    if g < 1:
        raise ValueError(f"genus must be >= 1, got {g}")
    k = 2 * g + 4
    clique_size = k if clique_size is None else clique_size
    if clique_size < k:
        raise ValueError(f"clique_size must be >= 2g+4 = {k}")
    raw, labeled, inside = _backend.kernels(Y.N).count_patterns(
        Y.adjacency, Y.vertex_mask, g, clique_size - k
    )
    return PatternCount(g=g, clique_size=clique_size, raw=raw, labeled=labeled, inside_clique=inside)
