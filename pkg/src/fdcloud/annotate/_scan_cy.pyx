# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled scan kernel.

Same contract as ``_scan_py.raw_matches``; the win comes from typed loop
variables, a single UTF-32 decode pass, and C-level alphanumeric checks.
"""

from cpython.dict cimport PyDict_GetItem
from cpython cimport array
from cpython.ref cimport PyObject

import array

cdef extern from "Python.h":
    bint Py_UNICODE_ISALNUM(Py_UCS4 ch)

KERNEL = "compiled"


def raw_matches(str folded, dict trans, fail, out_len, out_pat, out_link):
    cdef Py_ssize_t n = len(folded)
    cdef array.array codes_arr = array.array("I")
    codes_arr.frombytes(folded.encode("utf-32-le"))
    cdef unsigned int[::1] codes = codes_arr
    cdef int[::1] fail_v = fail
    cdef int[::1] out_len_v = out_len
    cdef int[::1] out_pat_v = out_pat
    cdef int[::1] out_link_v = out_link

    cdef list matches = []
    cdef int state = 0
    cdef int s
    cdef Py_ssize_t i, start
    cdef unsigned int c
    cdef unsigned long long key
    cdef PyObject* item
    cdef bint ok

    for i in range(n):
        c = codes[i]
        key = ((<unsigned long long> state) << 21) | c
        item = PyDict_GetItem(trans, key)
        while item == NULL and state != 0:
            state = fail_v[state]
            key = ((<unsigned long long> state) << 21) | c
            item = PyDict_GetItem(trans, key)
        state = <int> <object> item if item != NULL else 0

        s = state if out_len_v[state] else out_link_v[state]
        while s:
            start = i + 1 - out_len_v[s]
            ok = (start == 0 or not Py_UNICODE_ISALNUM(<Py_UCS4> codes[start - 1]))
            if ok and (i + 1 == n or not Py_UNICODE_ISALNUM(<Py_UCS4> codes[i + 1])):
                matches.append((start, i + 1, out_pat_v[s]))
            s = out_link_v[s]
    return matches
