"""Catalog of subgroups of SL(2,p) and the small-tripling sets built from them."""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BadIndex,
    DomainError,
    NoneFound,
    NotRealizable,
    OrderTwo,
    SearchExhausted,
    XInH,
    XSquaredNotInH,
)
from .field import Fp
from .growth import (
    ElementSet,
    _bfs,
    coset_core,
    generated_by,
    intersect_conjugate,
    require_subgroup,
)
from .sl2 import GroupElement, GroupTable, enumerate_group, format_matrix, parse_matrix

log = logging.getLogger(__name__)

KINDS = (
    "upper_triangular",
    "unipotent",
    "diagonal",
    "qr_index2",
    "cyclic",
    "gen_quaternion",
    "two_dot_S4",
    "two_dot_A4",
    "two_dot_A5",
)
PARAMETRISED = ("cyclic", "gen_quaternion")

A5_ATTEMPTS = 5000


@dataclass(frozen=True)
class SubgroupSpec:
    """A catalog subgroup: its kind, generators and enumerated elements.

    ``order_param`` is the group order for the parametrised kinds
    (``cyclic:n`` has order n, ``gen_quaternion:4n`` has order 4n).
    """

    kind: str
    p: int
    generators: tuple[GroupElement, ...]
    elements: ElementSet
    order_param: int | None = None

    @property
    def tag(self) -> str:
        return f"{self.kind}:{self.order_param}" if self.order_param is not None else self.kind

    @property
    def order(self) -> int:
        return self.elements.size

    @property
    def table(self) -> GroupTable:
        return self.elements.table

    def to_dict(self) -> dict:
        return {"kind": self.tag, "p": self.p, "generators": [format_matrix(g) for g in self.generators]}

    @classmethod
    def from_dict(cls, data: dict) -> SubgroupSpec:
        kind, order = parse_kind(data["kind"])
        p = int(data["p"])
        gens = tuple(parse_matrix(m, p) for m in data["generators"])
        return cls(kind, p, gens, generated_by(enumerate_group(p), gens), order)


def parse_kind(tag: str) -> tuple[str, int | None]:
    """``"cyclic:8"`` -> ``("cyclic", 8)``; ``"two_dot_S4"`` -> ``("two_dot_S4", None)``."""
    kind, _, param = tag.partition(":")
    if kind not in KINDS:
        raise ValueError(f"unknown subgroup kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind in PARAMETRISED:
        if not param.isdigit():
            raise ValueError(f"{kind} needs an order, e.g. {kind}:8")
        return kind, int(param)
    if param:
        raise ValueError(f"{kind} takes no parameter")
    return kind, None


def expected_order(kind: str, p: int, order: int | None = None) -> int:
    return {
        "upper_triangular": p * (p - 1),
        "unipotent": p,
        "diagonal": p - 1,
        "qr_index2": p * (p - 1) // 2,
        "cyclic": order,
        "gen_quaternion": order,
        "two_dot_S4": 48,
        "two_dot_A4": 24,
        "two_dot_A5": 120,
    }[kind]


def _expected_derived_order(kind: str, p: int, order: int | None) -> int:
    if kind == "upper_triangular":
        return p if p > 3 else 1
    if kind == "qr_index2":
        # abelian unless some square q has q^2 != 1
        return p if (p - 1) // 2 > 2 else 1
    if kind == "gen_quaternion":
        return order // 4
    return {"two_dot_S4": 24, "two_dot_A4": 8, "two_dot_A5": 120}.get(kind, 1)


def derived_subgroup(H: ElementSet) -> ElementSet:
    t = H.table
    idx = H.indices()
    a, b = idx[:, None], idx[None, :]
    comm = t.mul_idx(t.mul_idx(t.inverse[a], t.inverse[b]), t.mul_idx(a, b))
    return generated_by(t, np.unique(comm))


def involution_count(H: ElementSet) -> int:
    t = H.table
    idx = H.indices()
    return int(np.count_nonzero((t.mul_idx(idx, idx) == t.identity) & (idx != t.identity)))


def element_orders(H: ElementSet) -> list[int]:
    return sorted({g.order() for g in H.elements()})


def _two_dot_s4_generators(p: int, i: int | None = None, sqrt2: int | None = None) -> tuple[GroupElement, GroupElement]:
    F = Fp(p)
    i = F(i) if i is not None else F.sqrt(p - 1)
    r2 = F(sqrt2) if sqrt2 is not None else F.sqrt(2)
    if i * i != -1 or r2 * r2 != 2:
        raise ValueError("need i^2 = -1 and sqrt2^2 = 2")
    h = r2 / 2
    a = GroupElement(int(h * (1 + i)), 0, 0, int(h * (1 - i)), p)
    b = GroupElement(int(h), int(h), int(-h), int(h), p)
    return a, b


def _two_dot_a5_generators(table: GroupTable, seed: int, attempts: int) -> tuple[GroupElement, GroupElement]:
    # 2.A5 = <s, t | s^2 = t^3 = (st)^5>: s of order 4 (trace 0), t of order 6 (trace 1)
    p = table.p
    tr = (table.entries[:, 0] + table.entries[:, 3]) % p
    order4 = np.flatnonzero(tr == 0)
    order6 = np.flatnonzero(tr == 1)
    rng = random.Random(seed)
    for _ in range(attempts):
        s = int(order4[rng.randrange(len(order4))])
        t = int(order6[rng.randrange(len(order6))])
        bits = _bfs(table, np.array([s, t], dtype=np.int64), cap=120)
        if bits is not None and np.count_nonzero(bits) == 120:
            return table[s], table[t]
    raise SearchExhausted(f"no 2.A5 found in SL(2,{p}) after {attempts} attempts")


def build_subgroup(kind: str, p: int, order: int | None = None, *, seed: int = 0,
                   attempts: int = A5_ATTEMPTS, i: int | None = None,
                   sqrt2: int | None = None) -> SubgroupSpec:
    """Build and verify a catalog subgroup of SL(2,p).

    ``kind`` may carry its order inline (``"cyclic:8"``). ``i`` and ``sqrt2``
    override the square roots used to reduce the 2.S4 generators mod p.
    """
    if ":" in kind:
        kind, order = parse_kind(kind)
    elif kind not in KINDS:
        raise ValueError(f"unknown subgroup kind {kind!r}")
    if kind in PARAMETRISED and order is None:
        raise ValueError(f"{kind} needs an order")
    F = Fp(p)
    table = enumerate_group(p)
    g = F.primitive_root()

    if kind == "upper_triangular":
        gens = (GroupElement.diag(g, p), GroupElement.upper(1, 1, p))
    elif kind == "unipotent":
        gens = (GroupElement.upper(1, 1, p),)
    elif kind == "diagonal":
        gens = (GroupElement.diag(g, p),)
    elif kind == "qr_index2":
        gens = (GroupElement.diag(g * g, p), GroupElement.upper(1, 1, p))
    elif kind == "cyclic":
        if order < 1 or (p - 1) % order:
            raise NotRealizable(f"split cyclic subgroup of order {order} needs {order} | p-1")
        gens = (GroupElement.diag(F.element_of_order(order), p),)
    elif kind == "gen_quaternion":
        if order < 4 or order % 4 or (p - 1) % (order // 2):
            raise NotRealizable(f"Q_{order} needs 4 | {order} and {order // 2} | p-1")
        gens = (GroupElement.diag(F.element_of_order(order // 2), p), GroupElement.antidiag(1, p))
    elif kind == "two_dot_S4":
        if p % 8 != 1:
            raise NotRealizable("2.S4 is only constructed for p = 1 mod 8")
        gens = _two_dot_s4_generators(p, i, sqrt2)
    elif kind == "two_dot_A4":
        big = build_subgroup("two_dot_S4", p, i=i, sqrt2=sqrt2)
        idx = big.elements.indices()
        squares = np.unique(table.mul_idx(idx, idx))
        sub = generated_by(table, squares)
        gens = tuple(table[int(j)] for j in _greedy_generators(sub))
    else:  # two_dot_A5
        if p % 10 not in (1, 9):
            raise NotRealizable("2.A5 needs p = +-1 mod 10")
        gens = _two_dot_a5_generators(table, seed, attempts)

    elements = generated_by(table, gens)
    spec = SubgroupSpec(kind, p, tuple(gens), elements, order)
    _verify(spec)
    return spec


def _greedy_generators(H: ElementSet) -> list[int]:
    t = H.table
    gens: list[int] = []
    bits = np.zeros(t.order, dtype=bool)
    bits[t.identity] = True
    for s in H.indices():
        if not bits[s]:
            gens.append(int(s))
            bits = _bfs(t, np.array(gens, dtype=np.int64))
    return gens


def _verify(spec: SubgroupSpec) -> None:
    H = spec.elements
    n = expected_order(spec.kind, spec.p, spec.order_param)
    if H.size != n:
        raise AssertionError(f"{spec.tag} over F_{spec.p} has order {H.size}, expected {n}")
    # -I is the only involution of SL(2,p), and lies in H iff |H| is even
    inv = involution_count(H)
    if inv != (1 if n % 2 == 0 else 0) or (GroupElement.minus_identity(spec.p) in H) != (n % 2 == 0):
        raise AssertionError(f"{spec.tag}: involution census {inv} inconsistent with order {n}")
    d = derived_subgroup(H).size
    if d != _expected_derived_order(spec.kind, spec.p, spec.order_param):
        raise AssertionError(f"{spec.tag}: derived subgroup of order {d}")
    if spec.kind == "two_dot_A5" and not set(element_orders(H)) <= {1, 2, 3, 4, 5, 6, 10}:
        raise AssertionError("2.A5 candidate has an element order outside {1,2,3,4,5,6,10}")


def catalog(p: int, *, seed: int = 0) -> list[SubgroupSpec]:
    """Every catalog subgroup realizable at p, in a fixed order."""
    out = []
    for kind in ("upper_triangular", "unipotent", "diagonal", "qr_index2"):
        out.append(build_subgroup(kind, p))
    for n in _divisors(p - 1):
        out.append(build_subgroup("cyclic", p, n))
    for n in _divisors(p - 1):
        if n % 2 == 0:
            out.append(build_subgroup("gen_quaternion", p, 2 * n))
    for kind in ("two_dot_S4", "two_dot_A4", "two_dot_A5"):
        try:
            out.append(build_subgroup(kind, p, seed=seed))
        except NotRealizable:
            pass
        except SearchExhausted as exc:
            log.warning("skipping %s at p=%d: %s", kind, p, exc)
    return out


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _elements(H: SubgroupSpec | ElementSet) -> ElementSet:
    return H.elements if isinstance(H, SubgroupSpec) else H


def splus2(H: SubgroupSpec | ElementSet, x: GroupElement) -> ElementSet:
    """Subgroup-plus-two set ``H | {x, x^-1}``."""
    Hs = _elements(H)
    if x in Hs:
        raise XInH("x lies in H")
    if x.order() <= 2:
        raise OrderTwo("x of order 2 gives <H, x> = H x C2")
    return Hs.with_elements(x, x.inverse())


def coset_core_set(H: SubgroupSpec | ElementSet, x: GroupElement) -> ElementSet:
    """Subgroup plus coset core ``H | (xH & Hx)``; symmetric because x^2 is in H."""
    Hs = _elements(H)
    require_subgroup(Hs)
    if x in Hs:
        raise XInH("x lies in H")
    if x * x not in Hs:
        raise XSquaredNotInH("x^2 is not in H, so H | xL is not symmetric")
    return Hs | coset_core(Hs, x)


def normalize_rep(H: SubgroupSpec | ElementSet, x: GroupElement) -> GroupElement | None:
    """``y = h2^-1 x`` with ``y^2`` in H when ``HxH = Hx^-1H``, else ``None``.

    ``h2`` is the first element of H (in index order) for which
    ``x = h1 x^-1 h2`` has a solution ``h1 = x h2^-1 x`` in H.
    """
    Hs = _elements(H)
    t = Hs.table
    xi = t.index(x)
    h2 = Hs.indices()
    h1 = t.mul_idx(t.mul_idx(xi, t.inverse[h2]), xi)
    hits = np.flatnonzero(Hs.bits[h1])
    if len(hits) == 0:
        return None
    return t[int(h2[hits[0]])].inverse() * x


def _index_c(Hs: ElementSet, cands: np.ndarray) -> np.ndarray:
    """``[H : H & x^-1 H x]`` for every candidate index x."""
    t = Hs.table
    h = Hs.indices()
    sizes = np.empty(len(cands), dtype=np.int64)
    rows = max(1, (1 << 21) // len(h))
    for s in range(0, len(cands), rows):
        x = cands[s:s + rows, None]
        conj = t.conj_idx(h[None, :], x)
        sizes[s:s + rows] = Hs.bits[conj].sum(axis=1)
    return Hs.size // sizes


def is_normal(Hs: ElementSet) -> bool:
    # SL(2,p) is generated by the two elementary unipotents
    p = Hs.table.p
    gens = (GroupElement(1, 1, 0, 1, p), GroupElement(1, 0, 1, 1, p))
    return all(Hs.conjugate(g) == Hs for g in gens)


def find_good_x(H: SubgroupSpec | ElementSet) -> list[tuple[GroupElement, int]]:
    """All ``x`` outside H with ``x^2`` in H and ``<H, x> = G`` minimising ``[H : H & x^-1 H x]``."""
    Hs = _elements(H)
    require_subgroup(Hs)
    t = Hs.table
    if Hs.size == t.order or is_normal(Hs):
        raise NoneFound("H must be proper and non-normal")
    gens = [t.index(g) for g in H.generators] if isinstance(H, SubgroupSpec) else _greedy_generators(Hs)
    cands = np.flatnonzero(~Hs.bits)
    cands = cands[Hs.bits[t.mul_idx(cands, cands)]]
    if len(cands) == 0:
        raise NoneFound("no x outside H with x^2 in H")
    cs = _index_c(Hs, cands)
    for c in np.unique(cs):
        good = [int(x) for x in cands[cs == c]
                if _bfs(t, np.array(gens + [int(x)], dtype=np.int64)).all()]
        if good:
            return [(t[x], int(c)) for x in good]
    raise NoneFound("no x with x^2 in H generates G together with H")


@dataclass(frozen=True)
class OptimalConstruction:
    H: SubgroupSpec
    x: GroupElement
    L: ElementSet
    S: ElementSet


def optimal_construction(p: int, v_power: int = 1, diagonal: bool = False, **roots) -> OptimalConstruction:
    """The 2.S4 subgroup plus coset core of size 64.

    ``x = antidiag[v, -v^-1]`` for ``v`` of order 16 (raised to ``v_power``);
    ``diagonal=True`` uses ``x = diag[v, v^-1]`` instead.
    """
    if p % 16 != 1:
        raise NotRealizable("the size-64 construction needs p = 1 mod 16")
    H = build_subgroup("two_dot_S4", p, **roots)
    v = Fp(p).element_of_order(16) ** v_power
    x = GroupElement.diag(v, p) if diagonal else GroupElement.antidiag(v, p)
    return OptimalConstruction(H, x, intersect_conjugate(H.elements, x), coset_core_set(H, x))


def optimal_set(p: int) -> ElementSet:
    return optimal_construction(p).S


EVDLT_X = ((1, -2), (1, -1))


def evdlt_set(p: int) -> ElementSet:
    """``H | {x, x^-1}`` with H the index-2 subgroup of U over the quadratic residues.

    Size ``(p(p-1)+4)/2`` and ``(p+1)|H| <= |S^3| <= (p+2)|H|``.
    """
    if p % 4 != 1:
        raise NotRealizable("needs p = 1 mod 4")
    F = Fp(p)
    assert F.is_qr(-1)
    H = build_subgroup("qr_index2", p)
    x = GroupElement.of(EVDLT_X, p)
    assert x.c != 0 and x * x == GroupElement.minus_identity(p)
    return splus2(H, x)


@dataclass(frozen=True)
class BoundEstimate:
    c: int
    sizeH: int
    lower3: Fraction
    upper3: Fraction | None
    sizeS: Fraction
    case: str


def bound_estimate(sizeH: int, c: int, case: str = "coset_core") -> BoundEstimate:
    """Bounds on ``|S^3|`` from the index ``c = [H : H & x^-1 H x]``.

    ``coset_core``: ``S = H | xL`` with ``x^2`` in H.
    ``disjoint_cosets``: ``S = H | {x, x^-1}`` with ``HxH != Hx^-1H``.
    """
    if c < 2:
        raise BadIndex(f"index c = {c} < 2 cannot occur for a generating pair in SL(2,p)")
    if case == "coset_core":
        return BoundEstimate(c, sizeH, Fraction((c + 1) * sizeH),
                             (c + 2 - Fraction(1, c)) * sizeH, (1 + Fraction(1, c)) * sizeH, case)
    if case == "disjoint_cosets":
        return BoundEstimate(c, sizeH, Fraction((2 * c + 1) * sizeH), None, Fraction(sizeH + 2), case)
    raise ValueError(f"unknown case {case!r}")


def monotone_bounds(l: int, k) -> tuple[float, float]:
    """``(log(lk(k+1)) / log(l(k+1)), log(lk(2k+1)) / log(l(k+1)))``."""
    if l < 2 or k < 1:
        raise DomainError("need l >= 2 and k >= 1")
    k = float(k)
    denom = math.log(l * (k + 1))
    return math.log(l * k * (k + 1)) / denom, math.log(l * k * (2 * k + 1)) / denom
