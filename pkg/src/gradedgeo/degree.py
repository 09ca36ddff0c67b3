"""Z2^n degrees: sums, the Koszul pairing, parity and the canonical ordering."""

from __future__ import annotations

from itertools import product

from .errors import DimensionError, DomainError


class Degree(tuple):
    """An element of Z2^n stored as a tuple of 0/1 bits.

    Degrees are plain tuples underneath, so they hash, compare and serialize
    like ``(1, 0)``.
    """

    __slots__ = ()

    def __new__(cls, bits):
        bits = tuple(int(b) for b in bits)
        if not bits:
            raise DimensionError("a degree needs at least one bit")
        for b in bits:
            if b not in (0, 1):
                raise DomainError(f"degree bits must be 0 or 1, got {b}")
        return super().__new__(cls, bits)

    @classmethod
    def zero(cls, n: int) -> "Degree":
        if n < 1:
            raise DomainError("n must be positive")
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def mask(self) -> int:
        m = 0
        for i, b in enumerate(self):
            if b:
                m |= 1 << i
        return m

    def is_zero(self) -> bool:
        return not any(self)

    def __add__(self, other):  # type: ignore[override]
        return degree_sum(self, other)

    def __repr__(self):
        return "Degree(" + ",".join(str(b) for b in self) + ")"

    def to_json(self) -> list:
        return list(self)


def _check(a, b):
    if len(a) != len(b):
        raise DimensionError(f"degree length mismatch: {len(a)} vs {len(b)}")


def degree_sum(a, b) -> Degree:
    _check(a, b)
    return Degree(x ^ y for x, y in zip(a, b))


def pairing(a, b) -> int:
    """Return sum_i a_i b_i reduced mod 2."""
    _check(a, b)
    return sum(x & y for x, y in zip(a, b)) & 1


def koszul_sign(a, b) -> int:
    return -1 if pairing(a, b) else 1


def parity(a) -> str:
    return "odd" if sum(a) & 1 else "even"


def is_odd(a) -> bool:
    return bool(sum(a) & 1)


def enumerate_degrees(n: int) -> list[Degree]:
    """All 2^n degrees: zero first, other evens ascending, then odds ascending."""
    if n < 1:
        raise DomainError("n must be >= 1")
    allbits = sorted(product((0, 1), repeat=n))
    evens = [Degree(b) for b in allbits if not sum(b) & 1]
    odds = [Degree(b) for b in allbits if sum(b) & 1]
    return evens + odds


def degree_index(d, n: int | None = None) -> int:
    d = Degree(d)
    return enumerate_degrees(n or len(d)).index(d)


def as_degree(value, n: int | None = None) -> Degree:
    """Coerce JSON-ish input (list of ints, or a bit string like "01")."""
    if isinstance(value, str):
        value = [int(c) for c in value.strip()]
    d = Degree(value)
    if n is not None and len(d) != n:
        raise DimensionError(f"expected a degree of length {n}, got {list(d)}")
    return d
