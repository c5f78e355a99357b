# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled merge kernel.  Behaviourally identical to ``_pykernel``.

Instead of building suffix sets it first computes which states (i, j) can
still reach the end, then walks only those states depth first, filling a C
buffer of borrowed references and allocating each result tuple once.
"""

from cpython.object cimport PyObject
from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from libc.stdlib cimport free, malloc


def sync_projection(tuple events, sync):
    return tuple([e for e in events if e[0] in sync])


cdef struct _Walk:
    Py_ssize_t n
    Py_ssize_t m
    PyObject** a
    PyObject** b
    unsigned char* sa
    unsigned char* sb
    unsigned char* ok       # (n+1) x (m+1): a merge of a[i:], b[j:] exists
    unsigned char* same     # n x m: a[i] == b[j]
    PyObject** buf


cdef inline bint _ok(_Walk* w, Py_ssize_t i, Py_ssize_t j):
    return w.ok[i * (w.m + 1) + j]


cdef int _emit(_Walk* w, Py_ssize_t depth, set out) except -1:
    cdef tuple t = PyTuple_New(depth)
    cdef Py_ssize_t k
    cdef object item
    for k in range(depth):
        item = <object>w.buf[k]
        Py_INCREF(item)
        PyTuple_SET_ITEM(t, k, item)
    out.add(t)
    return 0


cdef int _go(_Walk* w, Py_ssize_t i, Py_ssize_t j, Py_ssize_t depth, set out) except -1:
    if i == w.n and j == w.m:
        return _emit(w, depth, out)
    if i < w.n and not w.sa[i] and _ok(w, i + 1, j):
        w.buf[depth] = w.a[i]
        _go(w, i + 1, j, depth + 1, out)
    if j < w.m and not w.sb[j] and _ok(w, i, j + 1):
        w.buf[depth] = w.b[j]
        _go(w, i, j + 1, depth + 1, out)
    if i < w.n and j < w.m and w.sa[i] and w.sb[j] and w.same[i * w.m + j] and _ok(w, i + 1, j + 1):
        w.buf[depth] = w.a[i]
        _go(w, i + 1, j + 1, depth + 1, out)
    return 0


def interleavings(tuple a, tuple b, sync):
    cdef _Walk w
    cdef Py_ssize_t i, j
    cdef bint reach
    cdef set out = set()
    w.n = len(a)
    w.m = len(b)
    w.a = <PyObject**>malloc((w.n + 1) * sizeof(PyObject*))
    w.b = <PyObject**>malloc((w.m + 1) * sizeof(PyObject*))
    w.sa = <unsigned char*>malloc(w.n + 1)
    w.sb = <unsigned char*>malloc(w.m + 1)
    w.ok = <unsigned char*>malloc((w.n + 1) * (w.m + 1))
    w.same = <unsigned char*>malloc(w.n * w.m + 1)
    w.buf = <PyObject**>malloc((w.n + w.m + 1) * sizeof(PyObject*))
    if not (w.a and w.b and w.sa and w.sb and w.ok and w.same and w.buf):
        free(w.a); free(w.b); free(w.sa); free(w.sb); free(w.ok); free(w.same); free(w.buf)
        raise MemoryError()
    try:
        for i in range(w.n):
            w.a[i] = <PyObject*>a[i]
            w.sa[i] = a[i][0] in sync
        for j in range(w.m):
            w.b[j] = <PyObject*>b[j]
            w.sb[j] = b[j][0] in sync
        for i in range(w.n):
            for j in range(w.m):
                w.same[i * w.m + j] = w.sa[i] and w.sb[j] and a[i] == b[j]
        for i in range(w.n, -1, -1):
            for j in range(w.m, -1, -1):
                if i == w.n and j == w.m:
                    reach = True
                else:
                    reach = (
                        (i < w.n and not w.sa[i] and _ok(&w, i + 1, j))
                        or (j < w.m and not w.sb[j] and _ok(&w, i, j + 1))
                        or (i < w.n and j < w.m and w.same[i * w.m + j] and _ok(&w, i + 1, j + 1))
                    )
                w.ok[i * (w.m + 1) + j] = reach
        if _ok(&w, 0, 0):
            _go(&w, 0, 0, 0, out)
    finally:
        free(w.a); free(w.b); free(w.sa); free(w.sb); free(w.ok); free(w.same); free(w.buf)
    return out
