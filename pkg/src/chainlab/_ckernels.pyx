# distutils: language = c++
"""Compiled kernels over ``uint64`` vertex masks (ambient size <= 64).

Function-for-function twin of ``chainlab._pykernels``; both must return
identical results and consume random numbers in the same order.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport uint64_t
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector
from numpy.random cimport bitgen_t


cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil
    int clz64 "__builtin_clzll"(unsigned long long) nogil


cdef inline int bit_length(uint64_t x) noexcept nogil:
    if x == 0:
        return 0
    return 64 - clz64(x)


cdef inline uint64_t above(uint64_t cand, int top) noexcept nogil:
    # keep bits >= top
    if top >= 64:
        return 0
    return (cand >> top) << top


cdef void _adj_from_masks(list adj, uint64_t* out, int N):
    cdef int i
    for i in range(N):
        out[i] = <uint64_t>adj[i]


cdef void _closed(const vector[uint64_t]& lower, unordered_set[uint64_t]& lower_set,
                  const uint64_t* adj, uint64_t vmask, int d, bint check,
                  vector[uint64_t]& out) noexcept nogil:
    cdef size_t i
    cdef uint64_t tau, cand, rest, low, b, sigma
    cdef int top
    cdef bint ok
    for i in range(lower.size()):
        tau = lower[i]
        top = bit_length(tau)
        if d == 1:
            cand = above(vmask, top)
        else:
            cand = <uint64_t>0xFFFFFFFFFFFFFFFF
            rest = tau
            while rest:
                cand &= adj[ctz64(rest)]
                rest &= rest - 1
            cand = above(cand, top)
        while cand:
            low = cand & (~cand + 1)
            cand ^= low
            sigma = tau | low
            if check:
                ok = True
                rest = tau
                while rest:
                    b = rest & (~rest + 1)
                    rest ^= b
                    if lower_set.count(sigma ^ b) == 0:
                        ok = False
                        break
                if not ok:
                    continue
            out.push_back(sigma)


cdef list _to_list(const vector[uint64_t]& v):
    return [v[i] for i in range(v.size())]


def boundary_closed(lower, lower_set, adj, vmask, int d):
    cdef vector[uint64_t] lo
    cdef vector[uint64_t] out
    cdef unordered_set[uint64_t] s
    cdef uint64_t cadj[64]
    cdef int N = len(adj) if adj is not None else 0
    cdef bint check = d >= 3 and lower_set is not None
    for x in lower:
        lo.push_back(<uint64_t>x)
        if check:
            s.insert(<uint64_t>x)
    if adj is not None:
        _adj_from_masks(list(adj), cadj, N)
    _closed(lo, s, cadj, <uint64_t>vmask, d, check, out)
    return _to_list(out)


def sample_levels(int N, int r, p, bitgen):
    cdef const char* name = "BitGenerator"
    capsule = bitgen.capsule
    if not PyCapsule_IsValid(capsule, name):
        raise ValueError("invalid bit generator")
    cdef bitgen_t* rng = <bitgen_t*>PyCapsule_GetPointer(capsule, name)
    cdef vector[double] pv
    for x in p:
        pv.push_back(<double>x)
    cdef vector[vector[uint64_t]] levels
    cdef vector[uint64_t] cur
    cdef vector[uint64_t] cands
    cdef unordered_set[uint64_t] s
    cdef uint64_t cadj[64]
    cdef uint64_t vmask = 0, e, lo, hi
    cdef int v, d
    cdef size_t i
    cdef double pd
    for v in range(N):
        cadj[v] = 0
    with bitgen.lock:
      with nogil:
        pd = pv[0]
        for v in range(N):
            if rng.next_double(rng.state) < pd:
                cur.push_back((<uint64_t>1) << v)
                vmask |= (<uint64_t>1) << v
        levels.push_back(cur)
        for d in range(1, r + 1):
            cur.clear()
            cands.clear()
            if levels.back().size() > 0:
                s.clear()
                if d >= 3:
                    for i in range(levels.back().size()):
                        s.insert(levels.back()[i])
                _closed(levels.back(), s, cadj, vmask, d, d >= 3, cands)
                pd = pv[d]
                for i in range(cands.size()):
                    if rng.next_double(rng.state) < pd:
                        cur.push_back(cands[i])
            levels.push_back(cur)
            if d == 1:
                for i in range(cur.size()):
                    e = cur[i]
                    lo = e & (~e + 1)
                    hi = e ^ lo
                    cadj[ctz64(lo)] |= hi
                    cadj[ctz64(hi)] |= lo
    return [_to_list(levels[d]) for d in range(levels.size())]


def flag_levels(adj, vmask, edges, int r):
    cdef uint64_t cadj[64]
    cdef int N = len(adj)
    cdef uint64_t vm = <uint64_t>vmask
    cdef vector[vector[uint64_t]] levels
    cdef vector[uint64_t] cur
    cdef unordered_set[uint64_t] s
    cdef int d
    cdef size_t i
    _adj_from_masks(list(adj), cadj, N)
    cdef uint64_t rest = vm
    while rest:
        cur.push_back(rest & (~rest + 1))
        rest &= rest - 1
    levels.push_back(cur)
    if r >= 1:
        cur.clear()
        for x in edges:
            cur.push_back(<uint64_t>x)
        levels.push_back(cur)
    with nogil:
        for d in range(2, r + 1):
            if levels.back().size() == 0:
                break
            # every facet of a clique is a clique, so no facet lookups are needed
            cur.clear()
            _closed(levels.back(), s, cadj, vm, d, False, cur)
            levels.push_back(cur)
    return [_to_list(levels[d]) for d in range(levels.size())]


def expand_once(adj, vmask, Y):
    cdef uint64_t cadj[64]
    cdef int N = len(adj)
    _adj_from_masks(list(adj), cadj, N)
    cdef uint64_t vm = <uint64_t>vmask, y = <uint64_t>Y
    cdef uint64_t new = y, todo = vm & ~y, av, inter, rest
    cdef int v
    witnesses = []
    while todo:
        v = ctz64(todo)
        todo &= todo - 1
        av = y & cadj[v]
        if av == 0:
            continue
        inter = vm
        rest = av
        while rest:
            inter &= cadj[ctz64(rest)]
            rest &= rest - 1
        if inter == (<uint64_t>1) << v:
            new |= (<uint64_t>1) << v
            witnesses.append((v, av))
    return new, witnesses


cdef bint _has_clique(const uint64_t* adj, uint64_t cand, int k) noexcept nogil:
    cdef uint64_t low
    if k == 0:
        return True
    if popcount64(cand) < k:
        return False
    while cand:
        low = cand & (~cand + 1)
        cand ^= low
        if _has_clique(adj, cand & adj[ctz64(low)], k - 1):
            return True
    return False


cdef bint _cycle_classes(const uint64_t* adj, uint64_t R, int m,
                         uint64_t* even, uint64_t* odd) noexcept nogil:
    cdef uint64_t rest = R, start, prev, cur, nxt
    cdef int c, step
    while rest:
        c = ctz64(rest)
        rest &= rest - 1
        if popcount64(R & ~adj[c] & ~((<uint64_t>1) << c)) != 2:
            return False
    start = R & (~R + 1)
    even[0] = start
    odd[0] = 0
    prev = 0
    cur = start
    for step in range(1, m + 1):
        c = ctz64(cur)
        nxt = R & ~adj[c] & ~cur & ~prev
        if step == m:
            return nxt == start
        if nxt == 0 or (nxt & start):
            return False
        nxt &= ~nxt + 1
        if step % 2:
            odd[0] |= nxt
        else:
            even[0] |= nxt
        prev = cur
        cur = nxt
    return False


def count_patterns(adj, vmask, int g, int extra):
    cdef uint64_t cadj[64]
    cdef int N = len(adj)
    _adj_from_masks(list(adj), cadj, N)
    cdef uint64_t vm = <uint64_t>vmask
    cdef int k = 2 * g + 4, m = 2 * g + 2
    cdef vector[int] verts
    cdef uint64_t rest = vm
    while rest:
        verts.push_back(ctz64(rest))
        rest &= rest - 1
    cdef int nv = verts.size()
    cdef long long raw = 0, labeled = 0, inside = 0, lab
    cdef vector[int] idx
    cdef int i, j, a, b, t, w0, w1
    cdef uint64_t tmask, e, o, common
    if k > nv:
        return 0, 0, 0
    for i in range(k):
        idx.push_back(i)
    with nogil:
        while True:
            tmask = 0
            for i in range(k):
                tmask |= (<uint64_t>1) << verts[idx[i]]
            lab = 0
            for i in range(k):
                a = verts[idx[i]]
                for j in range(i + 1, k):
                    b = verts[idx[j]]
                    if not _cycle_classes(cadj, tmask & ~((<uint64_t>1) << a) & ~((<uint64_t>1) << b),
                                          m, &e, &o):
                        continue
                    for t in range(2):
                        if t == 0:
                            w0 = a
                            w1 = b
                        else:
                            w0 = b
                            w1 = a
                        if (cadj[w0] & e) == e and (cadj[w1] & o) == o:
                            lab += m
                        if (cadj[w0] & o) == o and (cadj[w1] & e) == e:
                            lab += m
            if lab:
                raw += 1
                labeled += lab
                if extra == 0:
                    inside += 1
                else:
                    common = vm & ~tmask
                    for i in range(k):
                        common &= cadj[verts[idx[i]]]
                    if _has_clique(cadj, common, extra):
                        inside += 1
            # next k-combination of range(nv), lexicographic
            i = k - 1
            while i >= 0 and idx[i] == nv - k + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, k):
                idx[j] = idx[j - 1] + 1
    return raw, labeled, inside
