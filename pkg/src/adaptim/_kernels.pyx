# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

NAME = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double unif(uint64_t key, uint64_t counter) noexcept nogil:
    return <double>(mix64(key + (counter + 1) * GOLDEN) >> 11) * INV_2_53


def edge_bits(const double[::1] prob, uint64_t key):
    cdef Py_ssize_t m = prob.shape[0], e
    out = np.empty(m, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    with nogil:
        for e in range(m):
            o[e] = unif(key, e) < prob[e]
    return out


cdef Py_ssize_t _reach(const int64_t[::1] ptr, const int64_t[::1] dst,
                       const double[::1] prob, const uint8_t[::1] alive,
                       const int64_t[::1] seeds, uint64_t key,
                       const uint8_t[::1] live, bint lazy,
                       uint8_t* seen, int64_t* order) noexcept nogil:
    cdef Py_ssize_t count = 0, head = 0, i
    cdef int64_t u, v, e
    cdef bint ok
    for i in range(seeds.shape[0]):
        u = seeds[i]
        if not seen[u]:
            seen[u] = 1
            order[count] = u
            count += 1
    while head < count:
        u = order[head]
        head += 1
        for e in range(ptr[u], ptr[u + 1]):
            v = dst[e]
            if seen[v] or not alive[v]:
                continue
            if lazy:
                ok = unif(key, e) < prob[e]
            else:
                ok = live[e] != 0
            if ok:
                seen[v] = 1
                order[count] = v
                count += 1
    # leave the scratch mask clean for the next call
    for i in range(count):
        seen[order[i]] = 0
    return count


def forward_reach(const int64_t[::1] out_ptr, const int64_t[::1] out_dst,
                  const double[::1] out_prob, const uint8_t[::1] alive,
                  const int64_t[::1] seeds, uint64_t key, const uint8_t[::1] live):
    cdef Py_ssize_t n = alive.shape[0], count
    cdef bint lazy = live.shape[0] == 0
    order = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = order
    cdef uint8_t* seen = <uint8_t*> malloc(n + 1)
    if seen == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        seen[i] = 0
    with nogil:
        count = _reach(out_ptr, out_dst, out_prob, alive, seeds, key, live, lazy,
                       seen, &o[0] if n > 0 else NULL)
    free(seen)
    return order[:count].copy()


def spread_counts(const int64_t[::1] out_ptr, const int64_t[::1] out_dst,
                  const double[::1] out_prob, const uint8_t[::1] alive,
                  const int64_t[::1] seeds, const uint64_t[::1] keys):
    cdef Py_ssize_t n = alive.shape[0], k = keys.shape[0], j, i
    counts = np.empty(k, dtype=np.int64)
    cdef int64_t[::1] c = counts
    cdef uint8_t* seen = <uint8_t*> malloc(n + 1)
    cdef int64_t* order = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    if seen == NULL or order == NULL:
        free(seen)
        free(order)
        raise MemoryError()
    for i in range(n):
        seen[i] = 0
    cdef uint8_t[::1] nolive = np.empty(0, dtype=np.uint8)
    with nogil:
        for j in range(k):
            c[j] = _reach(out_ptr, out_dst, out_prob, alive, seeds, keys[j],
                          nolive, True, seen, order)
    free(seen)
    free(order)
    return counts


def sample_rr(const int64_t[::1] in_ptr, const int64_t[::1] in_src,
              const int64_t[::1] in_eid, const double[::1] in_prob,
              const uint8_t[::1] alive, const int64_t[::1] candidates,
              uint64_t key, int64_t start, int64_t count):
    cdef Py_ssize_t n = alive.shape[0], nc = candidates.shape[0]
    cdef Py_ssize_t cap = 1024 if count < 256 else 4 * count, size = 0
    cdef Py_ssize_t head, begin, r, i, t
    cdef int64_t j, v, u
    cdef uint64_t base = mix64(key + GOLDEN), sk
    cdef int64_t* stamp = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    cdef int32_t* buf = <int32_t*> malloc(cap * sizeof(int32_t))
    cdef int32_t* grown
    if stamp == NULL or buf == NULL:
        free(stamp)
        free(buf)
        raise MemoryError()
    for i in range(n):
        stamp[i] = -1
    lengths = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] lens = lengths
    cdef bint oom = False
    with nogil:
        for t in range(count):
            j = start + t
            sk = mix64(base ^ mix64(<uint64_t>j + GOLDEN))
            r = <Py_ssize_t>(unif(sk, 0) * nc)
            if r >= nc:
                r = nc - 1
            v = candidates[r]
            if size + 1 > cap:
                cap *= 2
                grown = <int32_t*> realloc(buf, cap * sizeof(int32_t))
                if grown == NULL:
                    oom = True
                    break
                buf = grown
            begin = size
            buf[size] = <int32_t>v
            size += 1
            stamp[v] = j
            head = begin
            while head < size:
                v = buf[head]
                head += 1
                for i in range(in_ptr[v], in_ptr[v + 1]):
                    u = in_src[i]
                    if stamp[u] == j or not alive[u]:
                        continue
                    if unif(sk, <uint64_t>(in_eid[i] + 1)) < in_prob[i]:
                        if size + 1 > cap:
                            cap *= 2
                            grown = <int32_t*> realloc(buf, cap * sizeof(int32_t))
                            if grown == NULL:
                                oom = True
                                break
                            buf = grown
                        stamp[u] = j
                        buf[size] = <int32_t>u
                        size += 1
                if oom:
                    break
            if oom:
                break
            lens[t] = size - begin
    free(stamp)
    if oom:
        free(buf)
        raise MemoryError()
    nodes = np.empty(size, dtype=np.int32)
    cdef int32_t[::1] nd = nodes
    for i in range(size):
        nd[i] = buf[i]
    free(buf)
    return nodes, lengths


def cover_pick(const int64_t[::1] set_ptr, const int32_t[::1] set_nodes,
               const int64_t[::1] node_ptr, const int64_t[::1] node_sets,
               uint8_t[::1] covered, int64_t[::1] gains, int64_t u):
    cdef int64_t newly = 0, i, s, q
    with nogil:
        for i in range(node_ptr[u], node_ptr[u + 1]):
            s = node_sets[i]
            if covered[s]:
                continue
            covered[s] = 1
            newly += 1
            for q in range(set_ptr[s], set_ptr[s + 1]):
                gains[set_nodes[q]] -= 1
    return newly
