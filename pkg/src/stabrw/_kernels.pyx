# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled executor for encoded classical circuits."""

cimport cython

ctypedef unsigned char u8


def run_program(const int[:, ::1] prog, const int[::1] ctrl, const u8[:, ::1] rand, u8[:, ::1] bits):
    """Run ``prog`` on every sample row of ``bits`` in place.

    Row layout: ``bits[sample, bit]`` and ``rand[sample, j]``.
    """
    cdef Py_ssize_t n_samples = bits.shape[0]
    cdef Py_ssize_t L = prog.shape[0]
    cdef Py_ssize_t s, i, j, r
    cdef int op, a, b, off, ln
    cdef u8 par, t
    for s in range(n_samples):
        r = 0
        for i in range(L):
            op = prog[i, 0]
            a = prog[i, 1]
            b = prog[i, 2]
            if op == 1:
                t = rand[s, r]
                r += 1
            ln = prog[i, 4]
            if ln:
                off = prog[i, 3]
                par = 0
                for j in range(off, off + ln):
                    par ^= bits[s, ctrl[j]]
                if not par:
                    continue
            if op == 1:
                bits[s, a] = t
            elif op == 0:
                bits[s, a] = <u8>b
            elif op == 2:
                bits[s, a] ^= 1
            elif op == 3:
                bits[s, b] ^= bits[s, a]
            elif op == 4:
                t = bits[s, a]
                bits[s, a] = bits[s, b]
                bits[s, b] = t
            elif op == 5:
                bits[s, a] = 0
