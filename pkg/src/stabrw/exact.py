"""Exact arithmetic over the dyadic ring Z[1/2][sqrt2, i].

A scalar is ``(a + b*sqrt2 + i*(c + d*sqrt2)) / 2**e`` with integer
coefficients.  Arrays share one exponent and store the four coefficient
planes in an ``int64`` array of shape ``(4, *shape)``.  Every stabilizer
circuit fed with |H> magic states stays inside this ring, so oracle
comparisons are equalities rather than tolerances.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = ["Exact", "ExactArray", "SQRT2"]

_LIMIT = 1 << 62


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1 if n else 1 << 30


class Exact:
    """Scalar of the ring; immutable and hashable."""

    __slots__ = ("a", "b", "c", "d", "e")

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0, e: int = 0):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if a == b == c == d == 0:
            e = 0
        else:
            tz = min(_trailing_zeros(v) for v in (a, b, c, d))
            if e < 0:
                tz = 0
                a, b, c, d = (v << -e for v in (a, b, c, d))
                e = 0
            k = min(tz, e)
            if k:
                a, b, c, d = (v >> k for v in (a, b, c, d))
                e -= k
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)

    def __setattr__(self, name, value):
        raise AttributeError("Exact is immutable")

    @classmethod
    def coerce(cls, x) -> "Exact":
        if isinstance(x, Exact):
            return x
        if isinstance(x, (int, np.integer)):
            return cls(int(x))
        if isinstance(x, Fraction):
            den = x.denominator
            if den & (den - 1):
                raise ValueError(f"non-dyadic rational {x}")
            return cls(x.numerator, e=den.bit_length() - 1)
        raise TypeError(f"cannot coerce {type(x).__name__} to Exact")

    def _align(self, other: "Exact") -> tuple[tuple[int, ...], tuple[int, ...], int]:
        e = max(self.e, other.e)
        s = tuple(v << (e - self.e) for v in (self.a, self.b, self.c, self.d))
        o = tuple(v << (e - other.e) for v in (other.a, other.b, other.c, other.d))
        return s, o, e

    def __add__(self, other) -> "Exact":
        try:
            other = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        s, o, e = self._align(other)
        return Exact(*(x + y for x, y in zip(s, o)), e=e)

    __radd__ = __add__

    def __neg__(self) -> "Exact":
        return Exact(-self.a, -self.b, -self.c, -self.d, self.e)

    def __sub__(self, other) -> "Exact":
        return self + (-Exact.coerce(other))

    def __rsub__(self, other) -> "Exact":
        return Exact.coerce(other) - self

    def __mul__(self, other) -> "Exact":
        try:
            o = Exact.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.a, self.b, self.c, self.d
        p, q, r, s = o.a, o.b, o.c, o.d
        return Exact(
            a * p + 2 * b * q - c * r - 2 * d * s,
            a * q + b * p - c * s - d * r,
            a * r + 2 * b * s + c * p + 2 * d * q,
            a * s + b * r + c * q + d * p,
            self.e + o.e,
        )

    __rmul__ = __mul__

    def half(self, k: int = 1) -> "Exact":
        return Exact(self.a, self.b, self.c, self.d, self.e + k)

    def conjugate(self) -> "Exact":
        return Exact(self.a, self.b, -self.c, -self.d, self.e)

    @property
    def real(self) -> "Exact":
        return Exact(self.a, self.b, 0, 0, self.e)

    @property
    def imag(self) -> "Exact":
        return Exact(self.c, self.d, 0, 0, self.e)

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == 0 and self.d == 0

    def to_fraction(self) -> Fraction:
        if not (self.is_real() and self.is_rational()):
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.a, 1 << self.e)

    def sign(self) -> int:
        """Sign of a real value a + b*sqrt2, decided without floats."""
        if not self.is_real():
            raise ValueError("sign of a complex value")
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        lhs, rhs = a * a, 2 * b * b
        if lhs == rhs:
            return 0
        return (1 if a > 0 else -1) if lhs > rhs else (1 if b > 0 else -1)

    def __abs__(self) -> "Exact":
        return -self if self.sign() < 0 else self

    def __lt__(self, other) -> bool:
        return (self - Exact.coerce(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - Exact.coerce(other)).sign() <= 0

    def __float__(self) -> float:
        if not self.is_real():
            raise ValueError("complex value")
        return (self.a + self.b * math.sqrt(2)) / (1 << self.e) if self.e < 1000 else 0.0

    def __complex__(self) -> complex:
        r2 = math.sqrt(2)
        return complex(self.a + self.b * r2, self.c + self.d * r2) / (1 << self.e)

    def _key(self) -> tuple[int, ...]:
        return (self.a, self.b, self.c, self.d, self.e)

    def __eq__(self, other) -> bool:
        try:
            other = Exact.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        parts = []
        for coef, unit in ((self.a, ""), (self.b, "*r2"), (self.c, "*i"), (self.d, "*r2*i")):
            if coef:
                parts.append(f"{coef}{unit}")
        body = " + ".join(parts) if parts else "0"
        return f"Exact(({body})/2^{self.e})"


SQRT2 = Exact(0, 1)


def _bilinear(op: Callable[[np.ndarray, np.ndarray], np.ndarray], A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = A
    b0, b1, b2, b3 = B
    return np.stack(
        [
            op(a0, b0) + 2 * op(a1, b1) - op(a2, b2) - 2 * op(a3, b3),
            op(a0, b1) + op(a1, b0) - op(a2, b3) - op(a3, b2),
            op(a0, b2) + 2 * op(a1, b3) + op(a2, b0) + 2 * op(a3, b1),
            op(a0, b3) + op(a1, b2) + op(a2, b1) + op(a3, b0),
        ]
    )


class ExactArray:
    """Array over the ring with a shared power-of-two denominator."""

    __slots__ = ("parts", "e")

    def __init__(self, parts: np.ndarray, e: int = 0):
        parts = np.asarray(parts, dtype=np.int64)
        if parts.shape[:1] != (4,):
            raise ValueError("parts must have leading dimension 4")
        self.parts = parts
        self.e = e
        self._normalize()

    def _normalize(self) -> None:
        if not self.parts.size or not self.parts.any():
            self.e = 0
            return
        while self.e > 0 and not np.any(self.parts & 1):
            self.parts = self.parts >> 1
            self.e -= 1
        if self.e < 0:
            self._guard(-self.e)
            self.parts = self.parts << -self.e
            self.e = 0

    def _guard(self, extra_bits: int = 0) -> None:
        if self.parts.size and int(np.abs(self.parts).max()) >= _LIMIT >> (extra_bits + 1):
            raise OverflowError("exact array coefficients exceed int64 headroom")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.parts.shape[1:]

    @classmethod
    def zeros(cls, shape) -> "ExactArray":
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        return cls(np.zeros((4, *shape), dtype=np.int64))

    @classmethod
    def from_gaussian(cls, re, im=None, e: int = 0) -> "ExactArray":
        re = np.asarray(re, dtype=np.int64)
        im = np.zeros_like(re) if im is None else np.asarray(im, dtype=np.int64)
        z = np.zeros_like(re)
        return cls(np.stack([re, z, im, z]), e)

    @classmethod
    def from_scalar(cls, x: Exact, shape=()) -> "ExactArray":
        x = Exact.coerce(x)
        parts = np.empty((4, *shape), dtype=np.int64)
        for k, v in enumerate((x.a, x.b, x.c, x.d)):
            parts[k] = v
        return cls(parts, x.e)

    @classmethod
    def from_scalars(cls, values, shape) -> "ExactArray":
        flat = [Exact.coerce(v) for v in values]
        e = max((v.e for v in flat), default=0)
        parts = np.zeros((4, len(flat)), dtype=object)
        for i, v in enumerate(flat):
            sh = e - v.e
            parts[:, i] = [v.a << sh, v.b << sh, v.c << sh, v.d << sh]
        if flat and max(abs(int(x)) for x in parts.ravel()) >= _LIMIT:
            raise OverflowError("scalar coefficients exceed int64 headroom")
        return cls(parts.astype(np.int64).reshape((4, *shape)), e)

    def copy(self) -> "ExactArray":
        return ExactArray(self.parts.copy(), self.e)

    def _aligned(self, other: "ExactArray") -> tuple[np.ndarray, np.ndarray, int]:
        e = max(self.e, other.e)
        a, b = self, other
        if a.e < e:
            a._guard(e - a.e)
        if b.e < e:
            b._guard(e - b.e)
        return a.parts << (e - a.e), b.parts << (e - b.e), e

    def __add__(self, other: "ExactArray") -> "ExactArray":
        a, b, e = self._aligned(other)
        self._guard(1)
        other._guard(1)
        return ExactArray(a + b, e)

    def __sub__(self, other: "ExactArray") -> "ExactArray":
        return self + (-other)

    def __neg__(self) -> "ExactArray":
        return ExactArray(-self.parts, self.e)

    def half(self, k: int = 1) -> "ExactArray":
        return ExactArray(self.parts, self.e + k)

    def scale(self, x: Exact) -> "ExactArray":
        s = ExactArray.from_scalar(x)
        return self.bilinear(s, lambda p, q: p * q, len_hint=1)

    def conj(self) -> "ExactArray":
        p = self.parts.copy()
        p[2:] = -p[2:]
        return ExactArray(p, self.e)

    def bilinear(self, other: "ExactArray", op, len_hint: int) -> "ExactArray":
        ma = int(np.abs(self.parts).max()) if self.parts.size else 0
        mb = int(np.abs(other.parts).max()) if other.parts.size else 0
        if ma * mb * 12 * max(len_hint, 1) >= _LIMIT:
            raise OverflowError("exact product would exceed int64 headroom")
        return ExactArray(_bilinear(op, self.parts, other.parts), self.e + other.e)

    def matmul(self, other: "ExactArray") -> "ExactArray":
        return self.bilinear(other, np.matmul, self.shape[-1] if self.shape else 1)

    def kron(self, other: "ExactArray") -> "ExactArray":
        return self.bilinear(other, np.kron, 1)

    def tensordot(self, other: "ExactArray", axes) -> "ExactArray":
        ax_a = axes[0] if isinstance(axes[0], (list, tuple)) else [axes[0]]
        length = int(np.prod([self.shape[i] for i in ax_a])) if ax_a else 1
        return self.bilinear(other, lambda p, q: np.tensordot(p, q, axes=axes), length)

    def moveaxis(self, src, dst) -> "ExactArray":
        src = np.atleast_1d(src) + 1
        dst = np.atleast_1d(dst) + 1
        return ExactArray(np.moveaxis(self.parts, src.tolist(), dst.tolist()), self.e)

    def transpose(self, axes) -> "ExactArray":
        return ExactArray(self.parts.transpose([0, *[a + 1 for a in axes]]), self.e)

    def reshape(self, *shape) -> "ExactArray":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ExactArray(self.parts.reshape((4, *shape)), self.e)

    def __getitem__(self, idx) -> "ExactArray | Exact":
        if not isinstance(idx, tuple):
            idx = (idx,)
        sub = self.parts[(slice(None), *idx)]
        if sub.ndim == 1:
            return Exact(*(int(v) for v in sub), e=self.e)
        return ExactArray(sub.copy(), self.e)

    def item(self) -> Exact:
        if self.shape != ():
            raise ValueError("item() needs a 0-d array")
        return Exact(*(int(v) for v in self.parts), e=self.e)

    def sum(self, axis=None) -> "ExactArray":
        if axis is None:
            axis = tuple(range(len(self.shape)))
        axis = np.atleast_1d(axis) + 1
        return ExactArray(self.parts.sum(axis=tuple(axis.tolist())), self.e)

    def trace(self) -> Exact:
        return ExactArray(np.trace(self.parts, axis1=1, axis2=2), self.e).item()

    def einsum_diag(self, n: int) -> "ExactArray":
        """Diagonal of a tensor with ``n`` row axes followed by ``n`` column axes."""
        p = self.parts.reshape(4, 1 << n, 1 << n)
        return ExactArray(np.diagonal(p, axis1=1, axis2=2).copy(), self.e)

    def to_list(self) -> list[Exact]:
        flat = self.parts.reshape(4, -1)
        return [Exact(*(int(v) for v in flat[:, i]), e=self.e) for i in range(flat.shape[1])]

    def to_complex(self) -> np.ndarray:
        r2 = math.sqrt(2)
        p = self.parts.astype(np.float64)
        return ((p[0] + r2 * p[1]) + 1j * (p[2] + r2 * p[3])) / float(2 ** self.e)

    def is_zero(self) -> bool:
        return not self.parts.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactArray):
            return NotImplemented
        return self.shape == other.shape and self.e == other.e and np.array_equal(self.parts, other.parts)

    def __hash__(self):
        raise TypeError("ExactArray is unhashable")

    def __repr__(self) -> str:
        return f"ExactArray(shape={self.shape}, e={self.e})"
