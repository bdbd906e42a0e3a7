"""Pure-Python reference kernels.

Vertex sets are Python ``int`` bitmasks (bit ``v`` set iff vertex ``v`` is
in the set), so these work for any ambient size.  ``chainlab._ckernels``
implements the same functions over ``uint64`` and must agree with this
module exactly, including the order in which random numbers are consumed.
"""

from itertools import combinations

import numpy as np

__all__ = [
    "boundary_closed",
    "sample_levels",
    "flag_levels",
    "expand_once",
    "count_patterns",
]


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def boundary_closed(lower, lower_set, adj, vmask, d):
    """All ``d``-sets whose facets all lie in ``lower`` (the ``(d-1)``-faces).

    Output follows the order of ``lower``: for each facet ``tau`` the
    extensions ``tau + {v}`` with ``v > max(tau)`` in increasing ``v``.  When
    ``lower`` is lexicographically sorted, so is the output.  Passing
    ``lower_set=None`` with ``d >= 3`` skips the facet lookups, which is
    exact when ``lower`` holds every ``(d-1)``-clique of ``adj``.
    """
    out = []
    append = out.append
    # consecutive facets in lex order share everything but their top vertex,
    # so the common neighbourhood of that prefix is reused
    last_prefix = 0
    prefix_cand = -1
    for tau in lower:
        top = tau.bit_length()
        if d == 1:
            cand = vmask >> top << top
        else:
            prefix = tau ^ (1 << (top - 1))
            if prefix != last_prefix:
                prefix_cand = -1
                rest = prefix
                while rest:
                    b = rest & -rest
                    prefix_cand &= adj[b.bit_length() - 1]
                    rest ^= b
                last_prefix = prefix
            cand = (prefix_cand & adj[top - 1]) >> top << top
        while cand:
            low = cand & -cand
            cand ^= low
            sigma = tau | low
            if d >= 3 and lower_set is not None:
                # edges are implied by adj; only the remaining facets need lookups
                ok = True
                rest = tau
                while rest:
                    b = rest & -rest
                    rest ^= b
                    if (sigma ^ b) not in lower_set:
                        ok = False
                        break
                if not ok:
                    continue
            append(sigma)
    return out


def _adjacency(edges, N):
    adj = [0] * N
    for e in edges:
        lo = e & -e
        hi = e ^ lo
        adj[lo.bit_length() - 1] |= hi
        adj[hi.bit_length() - 1] |= lo
    return adj


def sample_levels(N, r, p, bitgen):
    """Sample one complex level by level; returns face masks per dimension.

    Vertices consume ``N`` uniforms; dimension ``d`` consumes one uniform per
    boundary-closed candidate, in lexicographic order.  A face is kept when
    its uniform is ``< p[d]``.
    """
    rng = np.random.Generator(bitgen)
    u = rng.random(N)
    p0 = p[0]
    level = [1 << v for v in range(N) if u[v] < p0]
    levels = [level]
    vmask = 0
    for f in level:
        vmask |= f
    adj = None
    for d in range(1, r + 1):
        prev = levels[-1]
        if not prev:
            levels.append([])
            continue
        cands = boundary_closed(prev, set(prev) if d >= 3 else None, adj, vmask, d)
        pd = p[d]
        if cands:
            u = rng.random(len(cands))
            level = [c for c, x in zip(cands, u) if x < pd]
        else:
            level = []
        levels.append(level)
        if d == 1:
            adj = _adjacency(level, N)
    return levels


def flag_levels(adj, vmask, edges, r):
    """Clique complex of a graph up to dimension ``r`` as masks per dimension.

    ``edges`` must be lexicographically sorted for the output to be.
    """
    levels = [[1 << v for v in _bits(vmask)]]
    if r >= 1:
        levels.append(list(edges))
    for d in range(2, r + 1):
        prev = levels[-1]
        if not prev:
            break
        # every facet of a clique is a clique, so no facet lookups are needed
        levels.append(boundary_closed(prev, None, adj, vmask, d))
    return levels


def expand_once(adj, vmask, Y):
    """One rigid-expansion step.

    A vertex ``v`` outside ``Y`` is added iff ``A_v = Y & adj(v)`` is
    nonempty and the common neighbourhood of ``A_v`` is exactly ``{v}``.
    Any determining set inside ``Y`` must be a subset of ``A_v``, and
    enlarging a set can only shrink its common neighbourhood, so this test is
    exact.  Returns the new mask and ``(v, A_v)`` witness pairs.
    """
    new = Y
    witnesses = []
    for v in _bits(vmask & ~Y):
        av = Y & adj[v]
        if not av:
            continue
        inter = vmask
        for w in _bits(av):
            inter &= adj[w]
        if inter == 1 << v:
            new |= 1 << v
            witnesses.append((v, av))
    return new, witnesses


def _has_clique(adj, cand, k):
    if k == 0:
        return True
    if cand.bit_count() < k:
        return False
    while cand:
        low = cand & -cand
        cand ^= low
        v = low.bit_length() - 1
        if _has_clique(adj, cand & adj[v], k - 1):
            return True
    return False


def _cycle_classes(adj, R, m):
    """If the non-edges inside ``R`` form one ``m``-cycle, return its two
    alternating vertex classes (as masks), else ``None``."""
    for x in _bits(R):
        if (R & ~adj[x] & ~(1 << x)).bit_count() != 2:
            return None
    start = R & -R
    even = start
    odd = 0
    prev = 0
    cur = start
    for step in range(1, m + 1):
        c = cur.bit_length() - 1
        nxt = R & ~adj[c] & ~cur & ~prev
        if step == m:
            return (even, odd) if nxt == start else None
        if nxt == 0 or nxt & start:
            return None
        nxt &= -nxt
        if step % 2:
            odd |= nxt
        else:
            even |= nxt
        prev, cur = cur, nxt
    return None


def count_patterns(adj, vmask, g, extra):
    """Count chain-pattern occurrences on ``2g+4``-vertex subsets.

    Returns ``(raw, labeled, inside)``: subsets admitting a labeling,
    total number of labelings, and subsets admitting a labeling that also
    extend by ``extra`` further vertices adjacent to everything in the
    enlarged set.
    """
    k = 2 * g + 4
    m = 2 * g + 2
    verts = list(_bits(vmask))
    raw = labeled = inside = 0
    for T in combinations(verts, k):
        tmask = 0
        for v in T:
            tmask |= 1 << v
        lab = 0
        for i in range(k):
            a = T[i]
            for j in range(i + 1, k):
                b = T[j]
                classes = _cycle_classes(adj, tmask & ~(1 << a) & ~(1 << b), m)
                if classes is None:
                    continue
                e, o = classes
                for w0, w1 in ((a, b), (b, a)):
                    if adj[w0] & e == e and adj[w1] & o == o:
                        lab += m
                    if adj[w0] & o == o and adj[w1] & e == e:
                        lab += m
        if lab:
            raw += 1
            labeled += lab
            if extra == 0:
                inside += 1
            else:
                common = vmask & ~tmask
                for v in T:
                    common &= adj[v]
                if _has_clique(adj, common, extra):
                    inside += 1
    return raw, labeled, inside
