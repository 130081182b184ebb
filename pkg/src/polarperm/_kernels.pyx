# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SC / permutation / SCL kernels.

Buffer layout used by every kernel: for a code of length n = 2**m, the LLR
buffer has 2n doubles and stage ``l`` (size ``2**l``) lives at offset
``2**l``; stage m (offset n) holds the channel LLRs. The partial-sum buffer
uses the same layout with uint8 entries.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cnp.import_array()

ctypedef unsigned char u8
ctypedef long long i64


cdef inline double _minsum(double x, double y) noexcept nogil:
    cdef double ax = fabs(x)
    cdef double ay = fabs(y)
    cdef double mg = ax if ax < ay else ay
    cdef int neg = (x < 0) ^ (y < 0)
    return mg * (1 - 2 * neg)


# The metric is accumulated leaf by leaf in decode order (acc[0]), the same
# summation order as the SCL path metric, so both agree bit for bit.
cdef inline void _leaf(double y, int g, const u8* fz, u8* u0, double* leaf, u8* bit,
                       double* acc) noexcept nogil:
    if leaf != NULL:
        leaf[g] = y
    if fz[g]:
        u0[g] = 0
        bit[0] = 0
        if y < 0:
            acc[0] += y
        return
    bit[0] = 1 if y <= 0 else 0
    u0[g] = bit[0]


cdef inline void _sc_pair(double* a, u8* b, int g, const u8* fz, u8* u0, double* leaf,
                          double* acc) noexcept nogil:
    # stage-1 node: two leaves 2g and 2g + 1, LLRs at a[2], a[3]
    cdef u8 b0, b1
    cdef double x0 = a[2]
    cdef double x1 = a[3]
    _leaf(_minsum(x0, x1), 2 * g, fz, u0, leaf, &b0, acc)
    _leaf(x1 - x0 if b0 else x1 + x0, 2 * g + 1, fz, u0, leaf, &b1, acc)
    b[1] = b1
    b[2] = b0 ^ b1
    b[3] = b1


cdef void _sc_rec(double* a, u8* b, int l, int g, const u8* fz,
                  u8* u0, double* leaf, double* acc) noexcept nogil:
    cdef int h, i
    cdef double* al
    cdef double* ac
    cdef u8* bl
    cdef u8* bc
    if l == 0:
        _leaf(a[1], g, fz, u0, leaf, &b[1], acc)
        return
    if l == 1:
        _sc_pair(a, b, g, fz, u0, leaf, acc)
        return
    h = 1 << (l - 1)
    al = a + (1 << l)
    ac = a + h
    bl = b + (1 << l)
    bc = b + h
    for i in range(h):
        ac[i] = _minsum(al[i], al[i + h])
    _sc_rec(a, b, l - 1, 2 * g, fz, u0, leaf, acc)
    for i in range(h):
        bl[i] = bc[i]
        if bc[i]:
            ac[i] = al[i + h] - al[i]
        else:
            ac[i] = al[i + h] + al[i]
    _sc_rec(a, b, l - 1, 2 * g + 1, fz, u0, leaf, acc)
    for i in range(h):
        bl[i] ^= bc[i]
        bl[i + h] = bc[i]


def sc_decode(double[::1] llr, u8[::1] frozen):
    """Single SC decode; ``frozen`` is indexed by decode position.

    Returns ``(u0, codeword, metric, leaf_llrs)``.
    """
    cdef int n = llr.shape[0]
    cdef int m = n.bit_length() - 1
    cdef cnp.ndarray[double, ndim=1] a = np.zeros(2 * n)
    cdef cnp.ndarray[u8, ndim=1] b = np.zeros(2 * n, dtype=np.uint8)
    cdef cnp.ndarray[u8, ndim=1] u0 = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] leaf = np.zeros(n)
    cdef double mtr = 0.0
    a[n:] = llr
    with nogil:
        _sc_rec(&a[0], &b[0], m, 0, &frozen[0], &u0[0], &leaf[0], &mtr)
    return u0, b[n:].copy(), mtr, leaf


def perm_decode_batch(double[:, ::1] llrs, i64[:, ::1] perms, u8[::1] frozen):
    """Permutation decoding of a batch of frames.

    ``perms[j]`` is a bit permutation; branch j decodes ``llrs[:, perms[j]]``
    with frozen check ``frozen[perms[j][g]]``. Returns ``(u_hat, metric,
    winner)`` with ``u_hat`` in the original index domain.
    """
    cdef int nb = llrs.shape[0]
    cdef int n = llrs.shape[1]
    cdef int nl = perms.shape[0]
    cdef int m = n.bit_length() - 1
    cdef cnp.ndarray[u8, ndim=2] uhat = np.zeros((nb, n), dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] best = np.empty(nb)
    cdef cnp.ndarray[i64, ndim=1] win = np.zeros(nb, dtype=np.int64)
    cdef cnp.ndarray[u8, ndim=2] fzp = np.empty((nl, n), dtype=np.uint8)
    cdef double* a = <double*> malloc(2 * n * sizeof(double))
    cdef u8* b = <u8*> malloc(2 * n)
    cdef u8* u0 = <u8*> malloc(n)
    cdef int f, j, i
    cdef double mtr, bm
    cdef i64 bj
    if a == NULL or b == NULL or u0 == NULL:
        free(a); free(b); free(u0)
        raise MemoryError()
    for j in range(nl):
        for i in range(n):
            fzp[j, i] = frozen[perms[j, i]]
    with nogil:
        for f in range(nb):
            bm = -INFINITY
            bj = 0
            for j in range(nl):
                for i in range(n):
                    a[n + i] = llrs[f, perms[j, i]]
                mtr = 0.0
                _sc_rec(a, b, m, 0, &fzp[j, 0], u0, NULL, &mtr)
                if mtr > bm:
                    bm = mtr
                    bj = j
                    for i in range(n):
                        uhat[f, perms[j, i]] = u0[i]
            best[f] = bm
            win[f] = bj
    free(a); free(b); free(u0)
    return uhat, best, win


cdef struct SclState:
    int n
    int m
    int cap
    int nact
    double* alpha      # cap * 2n
    u8* beta           # cap * 2n
    u8* u              # cap * n
    double* pm         # cap
    int* order         # active slots in list order
    int* free_slots
    int nfree
    const u8* frozen
    # scratch for the pruning step
    double* cmet
    int* cidx
    u8* keep
    int* new_order


cdef inline void _clone(SclState* s, int src, int dst, int g) noexcept nogil:
    cdef int n = s.n
    memcpy(s.alpha + dst * 2 * n + 1, s.alpha + src * 2 * n + 1, (n - 1) * sizeof(double))
    memcpy(s.beta + dst * 2 * n + 1, s.beta + src * 2 * n + 1, 2 * n - 1)
    if g > 0:
        memcpy(s.u + dst * n, s.u + src * n, g)
    s.pm[dst] = s.pm[src]


cdef inline void _set_bit(SclState* s, int p, int g, u8 bit) noexcept nogil:
    s.u[p * s.n + g] = bit
    s.beta[p * 2 * s.n + 1] = bit


cdef void _scl_leaf(SclState* s, int g) noexcept nogil:
    cdef int idx, p, q, c, j, t, nc, nn
    cdef int n2 = 2 * s.n
    cdef double y, ay, key
    cdef int ckey
    cdef u8 pref
    if s.frozen[g]:
        for idx in range(s.nact):
            p = s.order[idx]
            y = s.alpha[p * n2 + 1]
            _set_bit(s, p, g, 0)
            if y < 0:
                s.pm[p] += y
        return
    nc = 2 * s.nact
    for c in range(nc):
        p = s.order[c >> 1]
        y = s.alpha[p * n2 + 1]
        s.cmet[c] = s.pm[p] if (c & 1) == 0 else s.pm[p] - fabs(y)
        s.keep[c] = 1
    if nc > s.cap:
        # stable selection of the cap best candidates: order by
        # (metric desc, candidate index asc) via insertion sort.
        for c in range(nc):
            s.cidx[c] = c
        for c in range(1, nc):
            ckey = s.cidx[c]
            key = s.cmet[ckey]
            j = c - 1
            while j >= 0 and (s.cmet[s.cidx[j]] < key or
                              (s.cmet[s.cidx[j]] == key and s.cidx[j] > ckey)):
                s.cidx[j + 1] = s.cidx[j]
                j -= 1
            s.cidx[j + 1] = ckey
        for c in range(nc):
            s.keep[c] = 0
        for t in range(s.cap):
            s.keep[s.cidx[t]] = 1
    # release parents with no surviving child first so their slots can be reused
    for idx in range(s.nact):
        if not s.keep[2 * idx] and not s.keep[2 * idx + 1]:
            s.free_slots[s.nfree] = s.order[idx]
            s.nfree += 1
    nn = 0
    for idx in range(s.nact):
        p = s.order[idx]
        y = s.alpha[p * n2 + 1]
        ay = fabs(y)
        pref = 1 if y <= 0 else 0
        if s.keep[2 * idx] and s.keep[2 * idx + 1]:
            s.nfree -= 1
            q = s.free_slots[s.nfree]
            _clone(s, p, q, g)
            _set_bit(s, p, g, pref)
            _set_bit(s, q, g, 1 - pref)
            s.pm[q] -= ay
            s.new_order[nn] = p
            s.new_order[nn + 1] = q
            nn += 2
        elif s.keep[2 * idx]:
            _set_bit(s, p, g, pref)
            s.new_order[nn] = p
            nn += 1
        elif s.keep[2 * idx + 1]:
            _set_bit(s, p, g, 1 - pref)
            s.pm[p] -= ay
            s.new_order[nn] = p
            nn += 1
    for idx in range(nn):
        s.order[idx] = s.new_order[idx]
    s.nact = nn


cdef void _scl_rec(SclState* s, int l, int g) noexcept nogil:
    cdef int h, i, idx, p
    cdef int n2 = 2 * s.n
    cdef double* al
    cdef double* ac
    cdef u8* bl
    cdef u8* bc
    if l == 0:
        _scl_leaf(s, g)
        return
    h = 1 << (l - 1)
    for idx in range(s.nact):
        p = s.order[idx]
        al = s.alpha + p * n2 + (1 << l)
        ac = s.alpha + p * n2 + h
        for i in range(h):
            ac[i] = _minsum(al[i], al[i + h])
    _scl_rec(s, l - 1, 2 * g)
    for idx in range(s.nact):
        p = s.order[idx]
        al = s.alpha + p * n2 + (1 << l)
        ac = s.alpha + p * n2 + h
        bl = s.beta + p * n2 + (1 << l)
        bc = s.beta + p * n2 + h
        for i in range(h):
            bl[i] = bc[i]
            if bc[i]:
                ac[i] = al[i + h] - al[i]
            else:
                ac[i] = al[i + h] + al[i]
    _scl_rec(s, l - 1, 2 * g + 1)
    for idx in range(s.nact):
        p = s.order[idx]
        bl = s.beta + p * n2 + (1 << l)
        bc = s.beta + p * n2 + h
        for i in range(h):
            bl[i] ^= bc[i]
            bl[i + h] = bc[i]


def scl_decode_batch(double[:, ::1] llrs, u8[::1] frozen, int list_size):
    """SCL decoding with min-sum path metrics for a batch of frames.

    Returns ``(u, codeword, metric)`` for the best surviving path per frame.
    """
    cdef int nb = llrs.shape[0]
    cdef int n = llrs.shape[1]
    cdef int m = n.bit_length() - 1
    cdef int cap = list_size
    cdef int f, i, p, idx, bp
    cdef double bm
    cdef SclState s
    cdef cnp.ndarray[u8, ndim=2] uout = np.zeros((nb, n), dtype=np.uint8)
    cdef cnp.ndarray[u8, ndim=2] xout = np.zeros((nb, n), dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] mout = np.zeros(nb)
    if cap < 1:
        raise ValueError("list size must be >= 1")
    s.n = n
    s.m = m
    s.cap = cap
    s.frozen = &frozen[0]
    s.alpha = <double*> malloc(cap * 2 * n * sizeof(double))
    s.beta = <u8*> malloc(cap * 2 * n)
    s.u = <u8*> malloc(cap * n)
    s.pm = <double*> malloc(cap * sizeof(double))
    s.order = <int*> malloc(cap * sizeof(int))
    s.free_slots = <int*> malloc(cap * sizeof(int))
    s.cmet = <double*> malloc(2 * cap * sizeof(double))
    s.cidx = <int*> malloc(2 * cap * sizeof(int))
    s.keep = <u8*> malloc(2 * cap)
    s.new_order = <int*> malloc(2 * cap * sizeof(int))
    if (s.alpha == NULL or s.beta == NULL or s.u == NULL or s.pm == NULL
            or s.order == NULL or s.free_slots == NULL or s.cmet == NULL
            or s.cidx == NULL or s.keep == NULL or s.new_order == NULL):
        _scl_free(&s)
        raise MemoryError()
    with nogil:
        for f in range(nb):
            s.nact = 1
            s.order[0] = 0
            s.pm[0] = 0.0
            s.nfree = cap - 1
            for i in range(cap - 1):
                s.free_slots[i] = cap - 1 - i
            for p in range(cap):
                for i in range(n):
                    s.alpha[p * 2 * n + n + i] = llrs[f, i]
            _scl_rec(&s, m, 0)
            bp = s.order[0]
            bm = s.pm[bp]
            for idx in range(1, s.nact):
                p = s.order[idx]
                if s.pm[p] > bm:
                    bm = s.pm[p]
                    bp = p
            mout[f] = bm
            for i in range(n):
                uout[f, i] = s.u[bp * n + i]
                xout[f, i] = s.beta[bp * 2 * n + n + i]
    _scl_free(&s)
    return uout, xout, mout


cdef void _scl_free(SclState* s) noexcept:
    free(s.alpha); free(s.beta); free(s.u); free(s.pm); free(s.order)
    free(s.free_slots); free(s.cmet); free(s.cidx); free(s.keep); free(s.new_order)
