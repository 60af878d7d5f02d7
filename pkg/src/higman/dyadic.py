"""Exact arithmetic in Z[1/2] and in the group K = Z[1/2] x| Z.

K is the Baumslag-Solitar group BS(1,2) presented as <b, c | c^b = c^2>
(with c^b meaning b^-1 c b).  The correspondence is c = (1, 0) and
b = (0, 1), and the product is

    (r, s) (r', s') = (r + 2^-s r', s + s').

Everything is arbitrary precision.  A configurable magnitude cap aborts
computations whose numbers enter tower-of-exponents blowup; hitting the
cap raises :class:`CapExceeded`, which callers treat as "oracle
infeasible", never as a mathematical answer.
"""

from __future__ import annotations

from typing import Optional

DEFAULT_CAP_BITS = 1 << 20

_cap_bits = DEFAULT_CAP_BITS


class CapExceeded(ArithmeticError):
    """A value outgrew the configured magnitude cap."""


def set_cap_bits(bits: int) -> int:
    """Set the global bit-length cap; returns the previous value."""
    global _cap_bits
    old = _cap_bits
    _cap_bits = bits
    return old


def _guard(n: int) -> int:
    if n.bit_length() > _cap_bits:
        raise CapExceeded(f"integer of {n.bit_length()} bits exceeds cap {_cap_bits}")
    return n


class Dyadic:
    """m * 2^e in canonical form: m odd, or m = 0 and e = 0."""

    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int = 0):
        if m == 0:
            self.m, self.e = 0, 0
            return
        v = (m & -m).bit_length() - 1
        self.m = _guard(m >> v)
        self.e = _guard(e + v)

    def __bool__(self) -> bool:
        return self.m != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        return isinstance(other, Dyadic) and self.m == other.m and self.e == other.e

    def __hash__(self) -> int:
        return hash((self.m, self.e))

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.m, self.e)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        if isinstance(other, int):
            other = Dyadic(other)
        if not self:
            return other
        if not other:
            return self
        e = min(self.e, other.e)
        return Dyadic(_guard(self.m << (self.e - e)) + _guard(other.m << (other.e - e)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def shift(self, k: int) -> "Dyadic":
        """Multiply by 2^k."""
        if not self:
            return self
        return Dyadic(self.m, _guard(self.e + k))

    def is_integer(self) -> bool:
        return self.m == 0 or self.e >= 0

    def as_integer(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return _guard(self.m << self.e) if self.m else 0

    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def __repr__(self) -> str:
        return f"Dyadic({self.m}, {self.e})"

    def __str__(self) -> str:
        return f"{self.m}*2^{self.e}"

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        text = text.strip()
        if "*2^" in text:
            m, e = text.split("*2^")
            return cls(int(m), int(e))
        return cls(int(text))


ZERO = Dyadic(0)


class KElement:
    """Element (r, s) of Z[1/2] x| Z."""

    __slots__ = ("r", "s")

    def __init__(self, r, s: int):
        if isinstance(r, int):
            r = Dyadic(r)
        self.r: Dyadic = r
        self.s: int = _guard(s)

    def __eq__(self, other) -> bool:
        return isinstance(other, KElement) and self.r == other.r and self.s == other.s

    def __hash__(self) -> int:
        return hash((self.r, self.s))

    def is_identity(self) -> bool:
        return not self.r and self.s == 0

    def __mul__(self, other: "KElement") -> "KElement":
        return KElement(self.r + other.r.shift(-self.s), self.s + other.s)

    def inverse(self) -> "KElement":
        return KElement(-self.r.shift(self.s), -self.s)

    def __repr__(self) -> str:
        return f"({self.r}, {self.s})"


K_IDENTITY = KElement(ZERO, 0)


def k_mul(x: KElement, y: KElement) -> KElement:
    return x * y


def k_inv(x: KElement) -> KElement:
    return x.inverse()


def phi_pow(m: int, eps: int) -> Optional[int]:
    """The shift b^m -> b^2m across the doubling homomorphism, or its
    partial inverse: halving fails on odd exponents."""
    if eps == 1:
        return _guard(m << 1) if m else 0
    if m % 2:
        return None
    return m >> 1


def word_to_k(word: str) -> KElement:
    """Evaluate a flat word over b, c (case = inverse) in K."""
    out = K_IDENTITY
    for ch in word:
        if ch == "b":
            nxt = KElement(ZERO, 1)
        elif ch == "B":
            nxt = KElement(ZERO, -1)
        elif ch == "c":
            nxt = KElement(Dyadic(1), 0)
        elif ch == "C":
            nxt = KElement(Dyadic(-1), 0)
        else:
            raise ValueError(f"letter {ch!r} is not in the b/c alphabet")
        out = out * nxt
    return out


def bs_value(blocks, one_gen: str, stable_gen: str) -> KElement:
    """Evaluate a block word in a BS(1,2) copy <x, y | y^x = y^2>.

    `one_gen` plays y (maps to (1,0)), `stable_gen` plays x (maps to (0,1)).
    """
    out = K_IDENTITY
    for g, e in blocks:
        if g == one_gen:
            out = out * KElement(Dyadic(e), 0)
        elif g == stable_gen:
            out = out * KElement(ZERO, e)
        else:
            raise ValueError(f"generator {g!r} not in this BS(1,2) copy")
    return out
