"""Elements of SL(2,p), full enumeration of the group and dense indexing.

The enumeration order is lexicographic in the entries ``(a, b, c, d)``:
first the ``p(p-1)`` matrices with ``a = 0`` (then ``c = -1/b``), then the
``p^2(p-1)`` matrices with ``a != 0`` (then ``d = (1+bc)/a``). Because of this
the index of a matrix has a closed form, which :meth:`GroupTable.index_arrays`
evaluates vectorised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded, MatrixParseError, ModulusMismatch, NotInSL2
from .field import Fp, FpElement

# 2 million elements is p ~ 126; enough for every prime the checks use.
DEFAULT_BUDGET = 2_000_000
# a full Cayley table is only worth it (and affordable) for tiny groups
CAYLEY_MAX_ORDER = 120


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 matrix ``[[a, b], [c, d]]`` over F_p with determinant 1."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self) -> None:
        p = self.p
        for name in "abcd":
            v = getattr(self, name)
            if not 0 <= v < p:
                object.__setattr__(self, name, int(v) % p)
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise NotInSL2(f"{format_matrix(self)} has determinant "
                           f"{(self.a * self.d - self.b * self.c) % p} mod {p}")

    @classmethod
    def of(cls, rows, p: int) -> GroupElement:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d), p)

    @classmethod
    def identity(cls, p: int) -> GroupElement:
        return cls(1, 0, 0, 1, p)

    @classmethod
    def minus_identity(cls, p: int) -> GroupElement:
        return cls(p - 1, 0, 0, p - 1, p)

    @classmethod
    def diag(cls, alpha: int | FpElement, p: int) -> GroupElement:
        """``diag[alpha, alpha^-1]``."""
        al = int(alpha) % p
        return cls(al, 0, 0, pow(al, -1, p), p)

    @classmethod
    def antidiag(cls, v: int | FpElement, p: int) -> GroupElement:
        """``antidiag[v, -v^-1]``, i.e. ``[[0, v], [-v^-1, 0]]``."""
        vv = int(v) % p
        return cls(0, vv, -pow(vv, -1, p), 0, p)

    @classmethod
    def upper(cls, alpha: int | FpElement, beta: int | FpElement, p: int) -> GroupElement:
        """``u(alpha, beta) = [[alpha, beta], [0, alpha^-1]]``."""
        al = int(alpha) % p
        return cls(al, int(beta), 0, pow(al, -1, p), p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def field(self) -> Fp:
        return Fp(self.p)

    def _check(self, other: GroupElement) -> None:
        if other.p != self.p:
            raise ModulusMismatch(f"SL(2,{self.p}) element combined with SL(2,{other.p}) element")

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._check(other)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        p = self.p
        return GroupElement((a * e + b * g) % p, (a * f + b * h) % p,
                            (c * e + d * g) % p, (c * f + d * h) % p, p)

    def __neg__(self) -> GroupElement:
        return GroupElement(-self.a, -self.b, -self.c, -self.d, self.p)

    def __pow__(self, n: int) -> GroupElement:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = GroupElement.identity(self.p)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> GroupElement:
        return GroupElement(self.d, -self.b, -self.c, self.a, self.p)

    def conj(self, x: GroupElement) -> GroupElement:
        """``x^-1 g x``."""
        return x.inverse() * self * x

    def trace(self) -> int:
        return (self.a + self.d) % self.p

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def order(self) -> int:
        """Least ``n >= 1`` with ``g^n = I``, by repeated multiplication."""
        n, g = 1, self
        while not g.is_identity():
            g = g * self
            n += 1
        return n

    def __str__(self) -> str:
        return format_matrix(self)


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    return g * h


def inv(g: GroupElement) -> GroupElement:
    return g.inverse()


def conj(g: GroupElement, x: GroupElement) -> GroupElement:
    return g.conj(x)


def element_order(g: GroupElement) -> int:
    return g.order()


def format_matrix(g: GroupElement) -> str:
    return f"[[{g.a},{g.b}],[{g.c},{g.d}]]"


_MATRIX_RE = re.compile(r"^\[\[(-?\d+),(-?\d+)\],\[(-?\d+),(-?\d+)\]\]$")


def parse_matrix(text: str, p: int) -> GroupElement:
    """Parse ``[[a,b],[c,d]]``; whitespace is ignored, entries are reduced mod p."""
    m = _MATRIX_RE.match("".join(text.split()))
    if not m:
        raise MatrixParseError(f"not a matrix: {text!r}")
    a, b, c, d = (int(v) for v in m.groups())
    return GroupElement(a % p, b % p, c % p, d % p, p)


def group_order(p: int) -> int:
    return (p + 1) * p * (p - 1)


class GroupTable:
    """The enumerated group SL(2,p) with element <-> index maps.

    ``entries`` is an ``(n, 4)`` array of canonical residues. Products are
    computed on index arrays, either through the Cayley table (small ``p``)
    or by modular arithmetic on the entries.
    """

    def __init__(self, p: int, budget: int = DEFAULT_BUDGET, cayley: bool | None = None):
        Fp(p)  # validates p
        self.p = p
        self.order = group_order(p)
        if self.order > budget:
            raise BudgetExceeded(f"|SL(2,{p})| = {self.order} exceeds budget {budget}")
        self.entries = _enumerate_entries(p)
        self.entries.setflags(write=False)
        assert len(self.entries) == self.order
        self.identity = self.index(GroupElement.identity(p))
        self.minus_identity = self.index(GroupElement.minus_identity(p))
        e = self.entries
        self.inverse = self.index_arrays(e[:, 3], -e[:, 1], -e[:, 2], e[:, 0])
        self.negation = self.index_arrays(-e[:, 0], -e[:, 1], -e[:, 2], -e[:, 3])
        self.inverse.setflags(write=False)
        self.negation.setflags(write=False)
        if cayley is None:
            cayley = self.order <= CAYLEY_MAX_ORDER
        self.cayley = None
        if cayley:
            idx = np.arange(self.order)
            self.cayley = self._mul_arith(idx[:, None], idx[None, :]).astype(np.int32)
            self.cayley.setflags(write=False)

    def __len__(self) -> int:
        return self.order

    def __getitem__(self, i: int) -> GroupElement:
        a, b, c, d = (int(v) for v in self.entries[i])
        return GroupElement(a, b, c, d, self.p)

    def __iter__(self) -> Iterator[GroupElement]:
        return (self[i] for i in range(self.order))

    def __repr__(self) -> str:
        return f"GroupTable(SL(2,{self.p}), order={self.order})"

    @property
    def elements(self) -> list[GroupElement]:
        return list(self)

    def index(self, g: GroupElement) -> int:
        if g.p != self.p:
            raise ModulusMismatch(f"element of SL(2,{g.p}) looked up in SL(2,{self.p})")
        return int(self.index_arrays(np.int64(g.a), np.int64(g.b), np.int64(g.c), np.int64(g.d)))

    def index_of(self, g: GroupElement) -> int:
        return self.index(g)

    def index_arrays(self, a, b, c, d) -> np.ndarray:
        """Vectorised inverse of the enumeration; inputs need not be reduced."""
        p = self.p
        a = np.mod(a, p)
        b = np.mod(b, p)
        c = np.mod(c, p)
        d = np.mod(d, p)
        head = (b - 1) * p + d
        tail = p * (p - 1) + ((a - 1) * p + b) * p + c
        return np.where(a == 0, head, tail).astype(np.int64)

    def _mul_arith(self, i, j) -> np.ndarray:
        p = self.p
        x = self.entries[i]
        y = self.entries[j]
        a = (x[..., 0] * y[..., 0] + x[..., 1] * y[..., 2]) % p
        b = (x[..., 0] * y[..., 1] + x[..., 1] * y[..., 3]) % p
        c = (x[..., 2] * y[..., 0] + x[..., 3] * y[..., 2]) % p
        d = (x[..., 2] * y[..., 1] + x[..., 3] * y[..., 3]) % p
        return self.index_arrays(a, b, c, d)

    def mul_idx(self, i, j) -> np.ndarray:
        """Elementwise (broadcasting) product of index arrays."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if self.cayley is not None:
            return self.cayley[i, j].astype(np.int64)
        return self._mul_arith(i, j)

    def conj_idx(self, g, x) -> np.ndarray:
        """Indices of ``x^-1 g x``."""
        x = np.asarray(x, dtype=np.int64)
        return self.mul_idx(self.mul_idx(self.inverse[x], g), x)


def _enumerate_entries(p: int) -> np.ndarray:
    # a = 0: b != 0, c = -1/b, d free
    b = np.arange(1, p, dtype=np.int64)
    c = np.array([(-pow(int(v), -1, p)) % p for v in b], dtype=np.int64)
    bb = np.repeat(b, p)
    cc = np.repeat(c, p)
    dd = np.tile(np.arange(p, dtype=np.int64), p - 1)
    head = np.stack([np.zeros_like(bb), bb, cc, dd], axis=1)
    # a != 0: d = (1 + bc)/a
    a = np.arange(1, p, dtype=np.int64)
    ainv = np.array([pow(int(v), -1, p) for v in a], dtype=np.int64)
    A, B, C = np.meshgrid(np.arange(p - 1), np.arange(p), np.arange(p), indexing="ij")
    A, B, C = A.ravel(), B.ravel(), C.ravel()
    D = (1 + B * C) % p * ainv[A] % p
    tail = np.stack([a[A], B, C, D], axis=1)
    return np.concatenate([head, tail]).astype(np.int64)


@lru_cache(maxsize=8)
def enumerate_group(p: int, budget: int = DEFAULT_BUDGET) -> GroupTable:
    """Cached :class:`GroupTable` for SL(2,p)."""
    return GroupTable(p, budget=budget)
