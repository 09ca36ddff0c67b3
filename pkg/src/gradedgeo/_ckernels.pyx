# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled copy of _kernels_py; see that module for the conventions."""

from cpython.long cimport PyLong_FromLong
from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cython.view cimport array


cdef inline long _oddmask(tuple e):
    cdef long m = 0
    cdef Py_ssize_t j
    for j in range(len(e)):
        if (<long>e[j]) & 1:
            m |= (<long>1) << j
    return m


cdef inline int _popparity(long x):
    cdef int c = 0
    while x:
        x &= x - 1
        c ^= 1
    return c


def mono_mul(tuple a, tuple b, tuple pair_lower, tuple odd, long order):
    cdef Py_ssize_t k = len(a), i
    cdef long total = 0, s, mb
    cdef int par = 0
    for i in range(k):
        s = <long>a[i] + <long>b[i]
        if s > 1 and odd[i]:
            return 0, None
        total += s
    if total > order:
        return 0, None
    mb = _oddmask(b)
    for i in range(k):
        if (<long>a[i]) & 1:
            par ^= _popparity((<long>pair_lower[i]) & mb)
    return (-1 if par else 1), tuple([<long>a[i] + <long>b[i] for i in range(k)])


def mul_terms(list ta, list tb, tuple pair_lower, tuple odd, long order):
    cdef dict out = {}
    if not ta or not tb:
        return out
    cdef Py_ssize_t k = len(ta[0][0]), i, nb = len(tb), ib
    cdef long da, ai, mb
    cdef int par
    cdef bint clash
    cdef long[64] pl
    cdef int[64] od
    cdef long[64] ae
    cdef tuple ea, eb, key
    cdef list pre_e = [], pre_c = []
    cdef long[:] pre_d
    cdef long[:] pre_m
    import array
    pre_d = array.array("l", [0] * nb)
    pre_m = array.array("l", [0] * nb)
    if k > 64:
        raise ValueError("at most 64 formal variables are supported")
    for i in range(k):
        pl[i] = pair_lower[i]
        od[i] = odd[i]
    for ib in range(nb):
        eb = tb[ib][0]
        pre_e.append(eb)
        pre_c.append(tb[ib][1])
        pre_d[ib] = sum(eb)
        pre_m[ib] = _oddmask(eb)
    for item in ta:
        ea = item[0]
        ca = item[1]
        da = 0
        for i in range(k):
            ae[i] = ea[i]
            da += ae[i]
        if da > order:
            continue
        for ib in range(nb):
            if da + pre_d[ib] > order:
                continue
            eb = <tuple>pre_e[ib]
            mb = pre_m[ib]
            clash = False
            par = 0
            for i in range(k):
                ai = ae[i]
                if ai:
                    if od[i] and (<long>eb[i]):
                        clash = True
                        break
                    if ai & 1:
                        par ^= _popparity(pl[i] & mb)
            if clash:
                continue
            key = tuple([ae[i] + <long>eb[i] for i in range(k)])
            val = ca * pre_c[ib]
            if par:
                val = -val
            prev = out.get(key)
            if prev is None:
                out[key] = val
            else:
                out[key] = prev + val
    return out


def ldiff_terms(list terms, long idx, tuple pair_lower):
    cdef dict out = {}
    cdef tuple e
    cdef long p, j, pli = pair_lower[idx]
    cdef int par
    for item in terms:
        e = item[0]
        c = item[1]
        p = e[idx]
        if not p:
            continue
        par = 0
        for j in range(idx):
            if ((<long>e[j]) & 1) and ((pli >> j) & 1):
                par ^= 1
        key = tuple([(<long>e[j]) - 1 if j == idx else <long>e[j] for j in range(len(e))])
        val = c * p
        if par:
            val = -val
        prev = out.get(key)
        if prev is None:
            out[key] = val
        else:
            out[key] = prev + val
    return out


def poly_mul(dict pa, dict pb):
    cdef dict out = {}
    cdef list bs = list(pb.items())
    cdef Py_ssize_t nb = len(bs), i, j, k
    if not pa or not nb:
        return out
    k = len(next(iter(pa)))
    cdef long[:, :] be = array(shape=(nb, k if k else 1), itemsize=sizeof(long), format="l")
    cdef long ae[64]
    cdef tuple key
    if k > 64:
        raise ValueError("too many base variables")
    for j in range(nb):
        for i in range(k):
            be[j, i] = bs[j][0][i]
    for ea, ca in pa.items():
        for i in range(k):
            ae[i] = ea[i]
        for j in range(nb):
            key = PyTuple_New(k)
            for i in range(k):
                o = PyLong_FromLong(ae[i] + be[j, i])
                Py_INCREF(o)
                PyTuple_SET_ITEM(key, i, o)
            v = ca * bs[j][1]
            prev = out.get(key)
            if prev is None:
                out[key] = v
            else:
                out[key] = prev + v
    return {kk: vv for kk, vv in out.items() if vv}
