"""Arithmetic in the prime field F_p for odd primes p."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ModulusMismatch, NonResidue, NoSuchOrder, NotPrime, ZeroInput

MAX_PRIME = 2**31 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _primitive_root(p: int) -> int:
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    return 1  # p == 2 only; unreachable for odd primes


@lru_cache(maxsize=None)
def _non_residue(p: int) -> int:
    for z in range(2, p):
        if pow(z, (p - 1) // 2, p) == p - 1:
            return z
    raise NonResidue(f"no quadratic non-residue mod {p}")


def _tonelli_shanks(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    c = pow(_non_residue(p), q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return r


@dataclass(frozen=True)
class Fp:
    """The field of residues modulo an odd prime ``p``."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or self.p < 3 or self.p > MAX_PRIME or not is_prime(self.p):
            raise NotPrime(f"modulus must be an odd prime <= 2^31-1, got {self.p!r}")

    def __call__(self, value: int) -> FpElement:
        return FpElement(int(value) % self.p, self)

    def __iter__(self):
        return (FpElement(v, self) for v in range(self.p))

    def _coerce(self, a: FpElement | int) -> int:
        if isinstance(a, FpElement):
            if a.field.p != self.p:
                raise ModulusMismatch(f"element of F_{a.field.p} used in F_{self.p}")
            return a.value
        return int(a) % self.p

    def is_qr(self, a: FpElement | int) -> bool:
        """True iff ``a`` is a nonzero square, by Euler's criterion."""
        v = self._coerce(a)
        if v == 0:
            raise ZeroInput("quadratic character of 0 is undefined")
        return pow(v, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a: FpElement | int) -> FpElement:
        """Square root of ``a``; of the two roots the smaller residue is returned."""
        v = self._coerce(a)
        if v == 0:
            return self(0)
        if not self.is_qr(v):
            raise NonResidue(f"{v} is not a square mod {self.p}")
        r = _tonelli_shanks(v, self.p)
        return self(min(r, self.p - r))

    def primitive_root(self) -> FpElement:
        return self(_primitive_root(self.p))

    def element_of_order(self, n: int) -> FpElement:
        """``g^((p-1)/n)`` for the smallest primitive root ``g``."""
        if n < 1 or (self.p - 1) % n:
            raise NoSuchOrder(f"{n} does not divide p-1 = {self.p - 1}")
        e = self(pow(_primitive_root(self.p), (self.p - 1) // n, self.p))
        assert e.order() == n
        return e


@dataclass(frozen=True)
class FpElement:
    value: int
    field: Fp

    @property
    def p(self) -> int:
        return self.field.p

    def _other(self, other) -> int:
        if isinstance(other, FpElement):
            if other.field.p != self.field.p:
                raise ModulusMismatch(f"cannot combine F_{self.p} with F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def _wrap(self, v: int) -> FpElement:
        return FpElement(v % self.p, self.field)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * self.field(o).inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self.inverse() * o

    def __neg__(self) -> FpElement:
        return self._wrap(-self.value)

    def __pow__(self, e: int) -> FpElement:
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(pow(self.value, e, self.p))

    def inverse(self) -> FpElement:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return self._wrap(pow(self.value, -1, self.p))

    def order(self) -> int:
        """Multiplicative order."""
        if self.value == 0:
            raise ZeroInput("0 has no multiplicative order")
        for d in _divisors(self.p - 1):
            if pow(self.value, d, self.p) == 1:
                return d
        raise AssertionError("unreachable: Fermat")

    def __eq__(self, other) -> bool:
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p})"


def arith(a: FpElement, b: FpElement | None, op: str) -> FpElement:
    """Dispatch by operation name; ``b`` is the exponent for ``pow``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown operation {op!r}")
