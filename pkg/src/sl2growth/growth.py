"""Set algebra on subsets of SL(2,p): products, growth, closure, double cosets."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

import mpmath
import numpy as np

from .errors import (
    NotASubgroup,
    NotCentrallyClosed,
    SymmetryViolation,
    TableMismatch,
    XInH,
)
from .sl2 import GroupElement, GroupTable, enumerate_group, format_matrix, parse_matrix

# cap on the number of products materialised at once
_CHUNK = 1 << 22


class ElementSet:
    """An immutable subset of a :class:`GroupTable`, stored as a dense bit-vector."""

    __slots__ = ("table", "bits", "size", "_subgroup")

    def __init__(self, table: GroupTable, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (table.order,):
            raise ValueError(f"bit-vector of shape {bits.shape} for group of order {table.order}")
        bits.setflags(write=False)
        self.table = table
        self.bits = bits
        self.size = int(np.count_nonzero(bits))
        self._subgroup: bool | None = None

    @classmethod
    def from_indices(cls, table: GroupTable, indices: Iterable[int]) -> ElementSet:
        bits = np.zeros(table.order, dtype=bool)
        bits[np.fromiter(indices, dtype=np.int64)] = True
        return cls(table, bits)

    @classmethod
    def from_elements(cls, table: GroupTable, elements: Iterable[GroupElement]) -> ElementSet:
        return cls.from_indices(table, (table.index(g) for g in elements))

    @classmethod
    def empty(cls, table: GroupTable) -> ElementSet:
        return cls(table, np.zeros(table.order, dtype=bool))

    @classmethod
    def full(cls, table: GroupTable) -> ElementSet:
        return cls(table, np.ones(table.order, dtype=bool))

    @property
    def cached_size(self) -> int:
        return self.size

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def elements(self) -> list[GroupElement]:
        return [self.table[int(i)] for i in self.indices()]

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.elements())

    def __contains__(self, g) -> bool:
        i = self.table.index(g) if isinstance(g, GroupElement) else int(g)
        return bool(self.bits[i])

    def _same(self, other: ElementSet) -> None:
        if other.table is not self.table and other.table.p != self.table.p:
            raise TableMismatch(f"sets over SL(2,{self.table.p}) and SL(2,{other.table.p})")

    def __or__(self, other: ElementSet) -> ElementSet:
        self._same(other)
        return ElementSet(self.table, self.bits | other.bits)

    def __and__(self, other: ElementSet) -> ElementSet:
        self._same(other)
        return ElementSet(self.table, self.bits & other.bits)

    def __sub__(self, other: ElementSet) -> ElementSet:
        self._same(other)
        return ElementSet(self.table, self.bits & ~other.bits)

    def __le__(self, other: ElementSet) -> bool:
        self._same(other)
        return not np.any(self.bits & ~other.bits)

    def __lt__(self, other: ElementSet) -> bool:
        return self <= other and self.size < other.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.table.p == other.table.p and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.table.p, np.packbits(self.bits).tobytes()))

    def __mul__(self, other: ElementSet) -> ElementSet:
        return product(self, other)

    def __repr__(self) -> str:
        return f"ElementSet(SL(2,{self.table.p}), size={self.size})"

    def isdisjoint(self, other: ElementSet) -> bool:
        self._same(other)
        return not np.any(self.bits & other.bits)

    def with_elements(self, *gs: GroupElement | int) -> ElementSet:
        bits = self.bits.copy()
        for g in gs:
            bits[self.table.index(g) if isinstance(g, GroupElement) else int(g)] = True
        return ElementSet(self.table, bits)

    def without_elements(self, *gs: GroupElement | int) -> ElementSet:
        bits = self.bits.copy()
        for g in gs:
            bits[self.table.index(g) if isinstance(g, GroupElement) else int(g)] = False
        return ElementSet(self.table, bits)

    def inverse(self) -> ElementSet:
        bits = np.zeros_like(self.bits)
        bits[self.table.inverse[self.indices()]] = True
        return ElementSet(self.table, bits)

    def negate(self) -> ElementSet:
        """``-S = {-g : g in S}``."""
        bits = np.zeros_like(self.bits)
        bits[self.table.negation[self.indices()]] = True
        return ElementSet(self.table, bits)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.bits[self.table.inverse], self.bits))

    def contains_identity(self) -> bool:
        return bool(self.bits[self.table.identity])

    def left(self, x: GroupElement | int) -> ElementSet:
        """``xS``."""
        xi = _idx(self.table, x)
        return _from_products(self.table, self.table.mul_idx(xi, self.indices()))

    def right(self, x: GroupElement | int) -> ElementSet:
        """``Sx``."""
        xi = _idx(self.table, x)
        return _from_products(self.table, self.table.mul_idx(self.indices(), xi))

    def conjugate(self, x: GroupElement | int) -> ElementSet:
        """``x^-1 S x``."""
        xi = _idx(self.table, x)
        return _from_products(self.table, self.table.conj_idx(self.indices(), xi))


def _idx(table: GroupTable, x: GroupElement | int) -> int:
    return table.index(x) if isinstance(x, GroupElement) else int(x)


def _from_products(table: GroupTable, idx: np.ndarray) -> ElementSet:
    bits = np.zeros(table.order, dtype=bool)
    bits[np.asarray(idx).ravel()] = True
    return ElementSet(table, bits)


def _product_bits(table: GroupTable, ia: np.ndarray, ib: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    if out is None:
        out = np.zeros(table.order, dtype=bool)
    if len(ia) == 0 or len(ib) == 0:
        return out
    rows = max(1, _CHUNK // len(ib))
    for s in range(0, len(ia), rows):
        out[table.mul_idx(ia[s:s + rows, None], ib[None, :]).ravel()] = True
    return out


def product(A: ElementSet, B: ElementSet) -> ElementSet:
    """``AB = {ab : a in A, b in B}``."""
    A._same(B)
    return ElementSet(A.table, _product_bits(A.table, A.indices(), B.indices()))


def triple(S: ElementSet) -> ElementSet:
    return product(product(S, S), S)


def delta_ratio(size: int, size3: int) -> float:
    """``log|S^3| / log|S|``; 1 by convention for singletons."""
    if size <= 1:
        return 1.0
    return math.log(size3) / math.log(size)


def delta_greater(size_t: int, size3_t: int, size_s: int, size3_s: int) -> bool:
    """Strict ``Delta(T) > Delta(S)`` without floating-point ties.

    Decides ``log a / log b > log c / log d`` by cross multiplication; a
    double-precision verdict closer than 1e-12 is re-evaluated at 60 digits.
    """
    lhs = math.log(size3_t) * math.log(size_s)
    rhs = math.log(size3_s) * math.log(size_t)
    if abs(lhs - rhs) > 1e-12 * max(1.0, abs(rhs)):
        return lhs > rhs
    with mpmath.workdps(60):
        lhs_mp = mpmath.log(size3_t) * mpmath.log(size_s)
        rhs_mp = mpmath.log(size3_s) * mpmath.log(size_t)
        return bool(lhs_mp - rhs_mp > mpmath.mpf(10) ** -50)


@dataclass(frozen=True)
class GrowthReport:
    sizeS: int
    sizeS2: int
    sizeS3: int
    delta_ratio: float
    generates: bool
    symmetric: bool
    contains_identity: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def to_dict(self) -> dict:
        return asdict(self)


def analyze(S: ElementSet) -> GrowthReport:
    S2 = product(S, S)
    S3 = product(S2, S)
    sym = S.is_symmetric()
    has_id = S.contains_identity()
    if sym and has_id:
        assert S <= S2 <= S3, "containment chain S <= S^2 <= S^3 violated"
    return GrowthReport(
        sizeS=S.size,
        sizeS2=S2.size,
        sizeS3=S3.size,
        delta_ratio=delta_ratio(S.size, S3.size),
        generates=generates(S),
        symmetric=sym,
        contains_identity=has_id,
    )


def closure(S: ElementSet) -> ElementSet:
    """The subgroup generated by ``S``.

    Generators are taken greedily from ``S``: an element joins the generating
    list only if it is outside the current subgroup, so the list stays short
    (each addition at least doubles the subgroup).
    """
    table = S.table
    gens: list[int] = []
    bits = np.zeros(table.order, dtype=bool)
    bits[table.identity] = True
    for s in S.indices():
        if bits[s]:
            continue
        gens.append(int(s))
        bits = _bfs(table, np.asarray(gens, dtype=np.int64))
        if bits.all():
            break
    return ElementSet(table, bits)


def _bfs(table: GroupTable, gens: np.ndarray, cap: int | None = None) -> np.ndarray | None:
    """Subgroup generated by ``gens``; ``None`` once it exceeds ``cap`` elements."""
    bits = np.zeros(table.order, dtype=bool)
    bits[table.identity] = True
    frontier = np.array([table.identity], dtype=np.int64)
    count = 1
    half = table.order // 2
    while len(frontier):
        nxt = np.unique(table.mul_idx(frontier[:, None], gens[None, :]).ravel())
        nxt = nxt[~bits[nxt]]
        bits[nxt] = True
        count += len(nxt)
        if cap is not None and count > cap:
            return None
        if count > half:
            # a proper subgroup has index >= 2
            bits[:] = True
            break
        frontier = nxt
    return bits


def generated_by(table: GroupTable, gens: Iterable[GroupElement | int]) -> ElementSet:
    """Subgroup generated by an explicit generator list."""
    idx = np.array([_idx(table, g) for g in gens], dtype=np.int64)
    if len(idx) == 0:
        return ElementSet.from_indices(table, [table.identity])
    return ElementSet(table, _bfs(table, idx))


def generates(S: ElementSet) -> bool:
    return closure(S).size == S.table.order


def is_subgroup(H: ElementSet) -> bool:
    """Closed under products and contains the identity (cached on the set)."""
    if H._subgroup is None:
        ok = H.size > 0 and H.contains_identity()
        if ok:
            closed = _product_bits(H.table, H.indices(), H.indices())
            ok = not np.any(closed & ~H.bits)
        H._subgroup = bool(ok)
    return H._subgroup


def require_subgroup(H: ElementSet, name: str = "H") -> None:
    if not is_subgroup(H):
        raise NotASubgroup(f"{name} is not a subgroup")


def double_coset(H: ElementSet, x: GroupElement | int, L: ElementSet | None = None) -> ElementSet:
    """``HxL`` (``L`` defaults to ``H``)."""
    require_subgroup(H)
    if L is None:
        L = H
    else:
        require_subgroup(L, "L")
    return product(H.right(x), L)


def intersect_conjugate(H: ElementSet, x: GroupElement | int) -> ElementSet:
    """``H & x^-1 H x``."""
    require_subgroup(H)
    return H & H.conjugate(x)


def frobenius_size(H: ElementSet, L: ElementSet, x: GroupElement | int) -> int:
    """``|HxL| = |H||L| / |x^-1 H x & L|``."""
    require_subgroup(H)
    require_subgroup(L, "L")
    d = (H.conjugate(x) & L).size
    return H.size * L.size // d


def coset_core(H: ElementSet, x: GroupElement | int) -> ElementSet:
    """``xH & Hx``, which equals ``xL`` for ``L = H & x^-1 H x``."""
    require_subgroup(H)
    if x in H:
        raise XInH("x lies in H")
    return H.left(x) & H.right(x)


def double_cosets(H: ElementSet, L: ElementSet | None = None) -> list[ElementSet]:
    """All distinct double cosets ``HxL``, ordered by smallest element index."""
    if L is None:
        L = H
    seen = np.zeros(H.table.order, dtype=bool)
    out = []
    for i in range(H.table.order):
        if seen[i]:
            continue
        D = double_coset(H, i, L)
        seen |= D.bits
        out.append(D)
    return out


def psl_project(S: ElementSet) -> tuple[int, int]:
    """Sizes of the images of ``S`` and ``S^3`` in PSL(2,p)."""
    if not S.is_symmetric():
        raise SymmetryViolation("psl_project needs a symmetric set")
    if S.negate() != S:
        raise NotCentrallyClosed("S is not a union of {g, -g} pairs")
    S3 = triple(S)
    return _projective_size(S), _projective_size(S3)


def _projective_size(S: ElementSet) -> int:
    idx = S.indices()
    return int(len(np.unique(np.minimum(idx, S.table.negation[idx]))))


def read_set_file(path: str | Path) -> ElementSet:
    return parse_set_text(Path(path).read_text())


def parse_set_text(text: str) -> ElementSet:
    p = None
    mats = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if p is None:
            key, _, val = line.partition("=")
            if key.strip() != "p" or not val.strip().isdigit():
                raise ValueError(f"set file must start with 'p=<prime>', got {line!r}")
            p = int(val)
            continue
        mats.append(parse_matrix(line, p))
    if p is None:
        raise ValueError("empty set file")
    return ElementSet.from_elements(enumerate_group(p), mats)


def format_set(S: ElementSet) -> str:
    lines = [f"p={S.table.p}"]
    lines += [format_matrix(g) for g in S.elements()]
    return "\n".join(lines) + "\n"


def write_set_file(S: ElementSet, path: str | Path) -> None:
    Path(path).write_text(format_set(S))
