"""Pure numpy executor for encoded classical circuits, vectorized over samples."""

from __future__ import annotations

import numpy as np


def run_program(prog: np.ndarray, ctrl: np.ndarray, rand: np.ndarray, bits: np.ndarray) -> None:
    """Same contract as the compiled kernel: ``bits[sample, bit]`` updated in place."""
    B = np.ascontiguousarray(bits.T)
    R = rand.T
    r = 0
    for op, a, b, off, ln in prog.tolist():
        if ln:
            mask = np.bitwise_xor.reduce(B[ctrl[off:off + ln]], axis=0)
        else:
            mask = None
        if op == 1:
            B[a] = R[r] if mask is None else np.where(mask, R[r], B[a])
            r += 1
        elif op == 0:
            B[a] = b if mask is None else np.where(mask, b, B[a])
        elif op == 2:
            B[a] ^= 1 if mask is None else mask
        elif op == 3:
            B[b] ^= B[a] if mask is None else B[a] & mask
        elif op == 4:
            t = B[a] ^ B[b]
            if mask is not None:
                t &= mask
            B[a] ^= t
            B[b] ^= t
        elif op == 5:
            B[a] = 0 if mask is None else B[a] & (mask ^ 1)
    bits[...] = B.T
