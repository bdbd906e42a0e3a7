"""Finite abstract simplicial complexes on labelled vertices ``0..N-1``.

A simplex is a strictly increasing tuple of vertex ids.  Internally every
face is also kept as an ``int`` bitmask, which makes subset and boundary
queries cheap; the public API speaks tuples.

Complexes are immutable once built.  Use :class:`ComplexBuilder` (or the
constructor with ``close=True``) to accumulate faces and seal them.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from chainlab import _backend
from chainlab.errors import StructureError, VertexNotFoundError

__all__ = [
    "Simplex",
    "SimplicialComplex",
    "ComplexBuilder",
    "simplex",
    "mask_of",
    "simplex_of",
    "f_vector",
    "boundary_closed_masks",
    "exterior_masks",
    "exterior_faces",
    "exterior_counts",
    "induced_subcomplex",
    "adj",
    "flag_completion",
    "full_skeleton",
    "graph",
    "format_complex",
    "parse_complex",
    "read_complex",
    "write_complex",
]

Simplex = tuple[int, ...]


def simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical simplex from an iterable of distinct vertex ids."""
    vs = tuple(sorted(vertices))
    if not vs:
        raise ValueError("a simplex needs at least one vertex")
    if len(set(vs)) != len(vs):
        raise ValueError(f"repeated vertex in {vs}")
    if vs[0] < 0:
        raise ValueError(f"negative vertex id in {vs}")
    return vs


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def simplex_of(mask: int) -> Simplex:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _lex_sorted(masks: Iterable[int]) -> list[int]:
    # For equal-size sets, A precedes B lexicographically iff the lowest
    # element of A ^ B lies in A, i.e. iff the bit string read from bit 0
    # upward is larger.
    return sorted(masks, key=lambda m: f"{m:b}"[::-1], reverse=True)


class SimplicialComplex:
    """Immutable, downward-closed family of simplices on ``range(N)``.

    Parameters
    ----------
    N : int
        Number of available vertex labels.
    r : int
        Dimension cap; no stored face may exceed it.
    faces : iterable of vertex iterables
        Faces of the complex.
    close : bool
        Add every subface of the given faces before sealing.  Without it the
        input must already be downward closed.
    """

    __slots__ = ("_N", "_r", "_levels", "_cache")

    def __init__(self, N: int, r: int, faces: Iterable[Iterable[int]] = (), *, close: bool = False):
        b = ComplexBuilder(N, r)
        for f in faces:
            b.add(f, close=close)
        sealed = b.build()
        self._N, self._r, self._levels, self._cache = sealed._N, sealed._r, sealed._levels, {}

    @classmethod
    def _from_levels(cls, N: int, r: int, levels, *, check: bool = True) -> SimplicialComplex:
        self = object.__new__(cls)
        lv = [frozenset(level) for level in levels][: r + 1]
        while len(lv) < r + 1:
            lv.append(frozenset())
        self._N, self._r, self._levels, self._cache = N, r, tuple(lv), {}
        if check:
            self._check()
        return self

    def _check(self) -> None:
        limit = 1 << self._N
        for d, level in enumerate(self._levels):
            for f in level:
                if f.bit_count() != d + 1:
                    raise StructureError(f"face {simplex_of(f)} stored at dimension {d}", simplex_of(f))
                if f >= limit:
                    raise StructureError(f"face {simplex_of(f)} uses a vertex id >= N={self._N}", simplex_of(f))
                if d == 0:
                    continue
                below = self._levels[d - 1]
                rest = f
                while rest:
                    b = rest & -rest
                    rest ^= b
                    if f ^ b not in below:
                        raise StructureError(
                            f"face {simplex_of(f)} is missing boundary face {simplex_of(f ^ b)}",
                            simplex_of(f ^ b),
                        )

    # -- basic queries -------------------------------------------------
    @property
    def N(self) -> int:
        return self._N

    @property
    def r(self) -> int:
        return self._r

    @property
    def dim(self) -> int:
        """Largest dimension of a present face, ``-1`` for the empty complex."""
        for d in range(self._r, -1, -1):
            if self._levels[d]:
                return d
        return -1

    def masks(self, d: int) -> frozenset[int]:
        if d < 0 or d > self._r:
            return frozenset()
        return self._levels[d]

    def faces(self, d: int) -> frozenset[Simplex]:
        key = ("faces", d)
        if key not in self._cache:
            self._cache[key] = frozenset(simplex_of(m) for m in self.masks(d))
        return self._cache[key]

    def sorted_masks(self, d: int) -> list[int]:
        """Faces of dimension ``d`` in lexicographic order of their vertex tuples."""
        key = ("sorted", d)
        if key not in self._cache:
            self._cache[key] = _lex_sorted(self.masks(d))
        return self._cache[key]

    @property
    def vertex_mask(self) -> int:
        if "vmask" not in self._cache:
            self._cache["vmask"] = mask_of(m.bit_length() - 1 for m in self._levels[0])
        return self._cache["vmask"]

    @property
    def vertices(self) -> tuple[int, ...]:
        return simplex_of(self.vertex_mask)

    @property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbour masks of the 1-skeleton, indexed by vertex id."""
        if "adj" not in self._cache:
            a = [0] * self._N
            for e in self.masks(1):
                lo = e & -e
                hi = e ^ lo
                a[lo.bit_length() - 1] |= hi
                a[hi.bit_length() - 1] |= lo
            self._cache["adj"] = tuple(a)
        return self._cache["adj"]

    def __contains__(self, face) -> bool:
        m = mask_of(face)
        if m == 0:
            return False
        return m in self.masks(m.bit_count() - 1)

    def __iter__(self) -> Iterator[Simplex]:
        for d in range(self._r + 1):
            for m in self.sorted_masks(d):
                yield simplex_of(m)

    def __len__(self) -> int:
        return sum(len(level) for level in self._levels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._N == other._N and self._r == other._r and self._levels == other._levels

    def __hash__(self) -> int:
        return hash((self._N, self._r, self._levels))

    def __repr__(self) -> str:
        return f"SimplicialComplex(N={self._N}, r={self._r}, f={f_vector(self)})"

    def with_cap(self, r: int) -> SimplicialComplex:
        """Same faces up to dimension ``r`` (higher faces dropped) with cap ``r``."""
        return SimplicialComplex._from_levels(self._N, r, self._levels[: r + 1], check=False)

    def issubcomplex(self, other: SimplicialComplex) -> bool:
        return all(self.masks(d) <= other.masks(d) for d in range(self._r + 1))


class ComplexBuilder:
    """Single-owner accumulator of faces; :meth:`build` seals and validates."""

    def __init__(self, N: int, r: int):
        if N < 0:
            raise ValueError(f"N must be non-negative, got {N}")
        if r < 0:
            raise ValueError(f"dimension cap must be non-negative, got {r}")
        self.N = N
        self.r = r
        self._levels: list[set[int]] = [set() for _ in range(r + 1)]

    def add(self, face: Iterable[int], *, close: bool = False) -> ComplexBuilder:
        s = simplex(face)
        if s[-1] >= self.N:
            raise ValueError(f"vertex {s[-1]} out of range for N={self.N}")
        d = len(s) - 1
        if d > self.r:
            raise ValueError(f"face {s} has dimension {d} > cap {self.r}")
        m = mask_of(s)
        if not close:
            self._levels[d].add(m)
            return self
        # all nonempty submasks
        sub = m
        while sub:
            self._levels[sub.bit_count() - 1].add(sub)
            sub = (sub - 1) & m
        return self

    def build(self) -> SimplicialComplex:
        return SimplicialComplex._from_levels(self.N, self.r, self._levels, check=True)


def f_vector(K: SimplicialComplex) -> list[int]:
    return [len(K.masks(d)) for d in range(K.r + 1)]


def boundary_closed_masks(K: SimplicialComplex, d: int) -> list[int]:
    """Masks of the ``d``-sets of ``range(N)`` whose whole boundary lies in ``K``.

    ``d`` may exceed the cap of ``K``.
    """
    if d == 0:
        return [1 << v for v in range(K.N)]
    lower = K.sorted_masks(d - 1) if d - 1 <= K.r else []
    ker = _backend.kernels(K.N)
    return ker.boundary_closed(lower, K.masks(d - 1) if d >= 3 else None, K.adjacency, K.vertex_mask, d)


def exterior_masks(K: SimplicialComplex, d: int) -> list[int]:
    present = K.masks(d)
    if d < 3 or d - 1 > K.r:
        return [m for m in boundary_closed_masks(K, d) if m not in present]
    # faces of K are never exterior, so only the absent candidates need
    # their remaining facets looked up
    lower = K.masks(d - 1)
    cands = _backend.kernels(K.N).boundary_closed(K.sorted_masks(d - 1), None, K.adjacency, K.vertex_mask, d)
    out = []
    for m in cands:
        if m in present:
            continue
        rest = m
        while rest:
            b = rest & -rest
            rest ^= b
            if m ^ b not in lower:
                break
        else:
            out.append(m)
    return out


def exterior_faces(K: SimplicialComplex, dim: int) -> set[Simplex]:
    """Simplices of dimension ``dim`` absent from ``K`` whose boundary is in ``K``.

    Vertices have empty boundary, so the exterior 0-faces are the absent
    vertex labels.
    """
    if dim < 0 or dim > K.r:
        raise ValueError(f"dimension {dim} outside 0..{K.r}")
    return {simplex_of(m) for m in exterior_masks(K, dim)}


def exterior_counts(K: SimplicialComplex, upto: int | None = None) -> list[int]:
    """Number of exterior faces per dimension ``0..upto`` (default ``K.r``).

    ``upto`` may exceed the cap of ``K``; faces of ``K`` above its cap are
    then simply absent.
    """
    upto = K.r if upto is None else upto
    return [len(exterior_masks(K, d)) for d in range(upto + 1)]


def induced_subcomplex(K: SimplicialComplex, S: Iterable[int]) -> SimplicialComplex:
    s = mask_of(S)
    levels = [[f for f in K.masks(d) if f & s == f] for d in range(K.r + 1)]
    return SimplicialComplex._from_levels(K.N, K.r, levels, check=False)


def adj(K: SimplicialComplex, v: int) -> frozenset[int]:
    """Vertices spanning a 1-simplex with ``v``."""
    if not (0 <= v < K.N) or not (K.vertex_mask >> v) & 1:
        raise VertexNotFoundError(v)
    return frozenset(simplex_of(K.adjacency[v]))


def flag_completion(G: SimplicialComplex, r: int) -> SimplicialComplex:
    """Clique complex of the 1-skeleton of ``G``, capped at dimension ``r``."""
    if G.dim > 1:
        raise ValueError("flag_completion expects a graph (faces of dimension <= 1)")
    edges = G.sorted_masks(1) if G.r >= 1 else []
    levels = _backend.kernels(G.N).flag_levels(G.adjacency, G.vertex_mask, edges, r)
    return SimplicialComplex._from_levels(G.N, r, levels, check=False)


def full_skeleton(N: int, r: int) -> SimplicialComplex:
    """Every simplex of dimension ``<= r`` on ``N`` vertices."""
    full = (1 << N) - 1
    edges = [mask_of(e) for e in _pairs(N)] if r >= 1 else []
    adjm = [full ^ (1 << v) for v in range(N)]
    levels = _backend.kernels(N).flag_levels(adjm, full, edges, r)
    return SimplicialComplex._from_levels(N, r, levels, check=False)


def _pairs(N):
    return ((i, j) for i in range(N) for j in range(i + 1, N))


def graph(N: int, edges: Iterable[tuple[int, int]], vertices: Iterable[int] | None = None) -> SimplicialComplex:
    """1-dimensional complex with the given edges; vertices default to ``range(N)``."""
    vs = range(N) if vertices is None else vertices
    return SimplicialComplex(N, 1, [*((v,) for v in vs), *edges], close=True)


# -- text format -------------------------------------------------------
# header "N r", then one face per line as space-separated sorted vertex ids


def format_complex(K: SimplicialComplex) -> str:
    lines = [f"{K.N} {K.r}"]
    lines.extend(" ".join(map(str, s)) for s in K)
    return "\n".join(lines) + "\n"


def parse_complex(text: str, *, close: bool = False) -> SimplicialComplex:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln]
    if not rows:
        raise ValueError("empty complex file: missing 'N r' header")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header {rows[0]!r}; expected 'N r'")
    N, r = int(head[0]), int(head[1])
    faces = [tuple(int(t) for t in ln.split()) for ln in rows[1:]]
    return SimplicialComplex(N, r, faces, close=close)


def read_complex(path, *, close: bool = False) -> SimplicialComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_complex(fh.read(), close=close)


def write_complex(K: SimplicialComplex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_complex(K))
