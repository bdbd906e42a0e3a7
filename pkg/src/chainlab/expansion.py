"""Rigid expansions of vertex sets.

A vertex ``v`` is *uniquely determined* by a nonempty set ``A`` when the
common neighbourhood of ``A`` is exactly ``{v}``.  One expansion step adds
every vertex uniquely determined by a subset of the current set; iterating
reaches a fixpoint after finitely many steps on a finite complex.  A set is
a *seed* when that fixpoint is the whole vertex set.

Rigidity of the expanded sets (locally injective maps extending to
automorphisms) is preserved by expansion, but it is not checked here.

Because no vertex is its own neighbour, a determined vertex never lies in
its determining set, so no strictness option is needed.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from chainlab import _backend
from chainlab.complex import SimplicialComplex, mask_of, simplex_of
from chainlab.errors import VertexNotFoundError

__all__ = [
    "ExpansionTrace",
    "uniquely_determined",
    "expand_once",
    "expand_to_fixpoint",
    "is_seed",
]


def _vertex_set(Gamma: SimplicialComplex, Y: Iterable[int]) -> int:
    y = mask_of(Y)
    stray = y & ~Gamma.vertex_mask
    if stray:
        raise VertexNotFoundError(simplex_of(stray)[0])
    return y


def uniquely_determined(Gamma: SimplicialComplex, A: Iterable[int]) -> int | None:
    """The vertex ``v`` with ``{v} == common neighbours of A``, if there is one."""
    a = _vertex_set(Gamma, A)
    if not a:
        raise ValueError("the determining set must be nonempty")
    inter = Gamma.vertex_mask
    adjm = Gamma.adjacency
    for w in simplex_of(a):
        inter &= adjm[w]
    if inter and inter & (inter - 1) == 0:
        return inter.bit_length() - 1
    return None


def expand_once(Gamma: SimplicialComplex, Y: Iterable[int]) -> tuple[frozenset[int], dict[int, frozenset[int]]]:
    """One expansion step.

    Returns the expanded vertex set and, for each added vertex, a
    determining subset of ``Y`` (the largest one, ``Y & adj(v)``).
    """
    y = _vertex_set(Gamma, Y)
    new, wit = _backend.kernels(Gamma.N).expand_once(Gamma.adjacency, Gamma.vertex_mask, y)
    return frozenset(simplex_of(new)), {v: frozenset(simplex_of(a)) for v, a in wit}


@dataclass(frozen=True)
class ExpansionTrace:
    """Stages of an expansion run.

    ``stages[0]`` is the input.  The last stage either repeats its
    predecessor (a fixpoint short of the full vertex set), is the full vertex
    set, or was cut off by ``max_stages`` (``truncated``).  ``witnesses[k]``
    maps each vertex added at stage ``k`` to its determining set; entry 0 is
    empty.
    """

    stages: tuple[frozenset[int], ...]
    witnesses: tuple[dict[int, frozenset[int]], ...] = field(compare=False)
    truncated: bool
    full: frozenset[int]

    @property
    def final(self) -> frozenset[int]:
        return self.stages[-1]

    @property
    def exhausted(self) -> bool:
        return self.final == self.full

    def lines(self) -> list[str]:
        out = []
        for k, stage in enumerate(self.stages):
            added = " ".join(
                f"{v}<-{{{','.join(map(str, sorted(a)))}}}" for v, a in sorted(self.witnesses[k].items())
            )
            line = f"stage {k}: " + " ".join(map(str, sorted(stage)))
            out.append(line + (f" | added {added}" if added else ""))
        return out


def expand_to_fixpoint(Gamma: SimplicialComplex, Y: Iterable[int], max_stages: int | None = None) -> ExpansionTrace:
    """Iterate :func:`expand_once` until nothing changes.

    ``max_stages`` bounds the number of expansion steps; stopping there
    before a fixpoint or the full vertex set is confirmed marks the trace
    ``truncated``.
    """
    if max_stages is not None and max_stages < 1:
        raise ValueError("max_stages must be >= 1")
    full = Gamma.vertex_mask
    cur = _vertex_set(Gamma, Y)
    kern = _backend.kernels(Gamma.N)
    adjm = Gamma.adjacency
    stages = [cur]
    witnesses: list[dict[int, frozenset[int]]] = [{}]
    truncated = False
    steps = 0
    while cur != full:
        if max_stages is not None and steps >= max_stages:
            truncated = True
            break
        new, wit = kern.expand_once(adjm, full, cur)
        steps += 1
        stages.append(new)
        witnesses.append({v: frozenset(simplex_of(a)) for v, a in wit})
        if new == cur:
            break
        cur = new
    return ExpansionTrace(
        stages=tuple(frozenset(simplex_of(s)) for s in stages),
        witnesses=tuple(witnesses),
        truncated=truncated,
        full=frozenset(simplex_of(full)),
    )


def is_seed(Gamma: SimplicialComplex, Y: Iterable[int]) -> bool:
    return expand_to_fixpoint(Gamma, Y).exhausted
