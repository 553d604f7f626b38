"""Prime-field arithmetic and multiplicative orders in GF(p^r).

Elements of GF(p) are immutable :class:`FieldElem` values. Extension-field
elements are plain coefficient sequences (lowest degree first) taken modulo a
caller-supplied irreducible polynomial; the polynomial helpers delegate to
``sympy.polys.galoistools``, which works on dense, highest-degree-first lists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Union

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_factor,
    gf_gcd,
    gf_pow_mod,
    gf_rem,
    gf_strip,
    gf_sub,
)

MAX_MODULUS = 2**31


class FieldError(ValueError):
    """Raised for invalid moduli, mismatched operands or undefined operations."""


class FieldOp(str, enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    POW = "pow"


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p) for a prime ``p < 2**31``."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or self.p < 2 or self.p >= MAX_MODULUS:
            raise FieldError(f"field modulus must be a prime below 2**31, got {self.p!r}")
        if not isprime(self.p):
            raise FieldError(f"field modulus {self.p} is not prime")

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(value % self.p, self.p)

    def inv(self, value: int) -> int:
        value %= self.p
        if value == 0:
            raise FieldError("division by zero")
        return pow(value, self.p - 2, self.p)

    def elements(self) -> range:
        return range(self.p)


@dataclass(frozen=True)
class FieldElem:
    value: int
    p: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.p:
            raise FieldError(f"{self.value} is not a residue modulo {self.p}")

    def _check(self, other: "FieldElem") -> None:
        if not isinstance(other, FieldElem):
            raise FieldError(f"expected a field element, got {type(other).__name__}")
        if other.p != self.p:
            raise FieldError(f"modulus mismatch: {self.p} != {other.p}")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem((self.value + other.value) % self.p, self.p)

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem((self.value - other.value) % self.p, self.p)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem((self.value * other.value) % self.p, self.p)

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return self * other.inverse()

    def __neg__(self) -> "FieldElem":
        return FieldElem((-self.value) % self.p, self.p)

    def __pow__(self, exponent: int) -> "FieldElem":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        # pow() is square-and-multiply
        return FieldElem(pow(self.value, exponent, self.p), self.p)

    def inverse(self) -> "FieldElem":
        if self.value == 0:
            raise FieldError("division by zero")
        return FieldElem(pow(self.value, self.p - 2, self.p), self.p)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"GF({self.p})({self.value})"


def ff_arith(a: FieldElem, b: Union[FieldElem, int], op: Union[FieldOp, str]) -> FieldElem:
    """Applies a binary field operation.

    For ``pow`` the second operand is the exponent; a :class:`FieldElem`
    exponent contributes its residue.

    Raises:
        FieldError: On modulus mismatch or division by zero.
    """
    op = FieldOp(op)
    if op is FieldOp.POW:
        exponent = b.value if isinstance(b, FieldElem) else int(b)
        return a**exponent
    if not isinstance(b, FieldElem):
        b = FieldElem(int(b) % a.p, a.p)
    if op is FieldOp.ADD:
        return a + b
    if op is FieldOp.SUB:
        return a - b
    if op is FieldOp.MUL:
        return a * b
    return a / b


# Polynomials over GF(p) -------------------------------------------------------


def _dense(coeffs_low_first: Sequence[int], p: int) -> List[int]:
    return gf_strip([int(c) % p for c in reversed(list(coeffs_low_first))])


def _low_first(dense: Sequence[int]) -> List[int]:
    return [int(c) for c in reversed(list(dense))]


def is_irreducible(g: Sequence[int], p: int) -> bool:
    """Ben-Or test: ``gcd(g, t^(p^k) - t) = 1`` for every ``k <= deg(g)/2``.

    ``g`` is given lowest degree first.
    """
    dense = _dense(g, p)
    degree = len(dense) - 1
    if degree < 1:
        return False
    if degree == 1:
        return True
    t = [1, 0]
    power = t
    for _ in range(degree // 2):
        power = gf_pow_mod(power, p, dense, p, ZZ)
        h = gf_sub(power, t, p, ZZ)
        if len(gf_gcd(dense, h, p, ZZ)) > 1:
            return False
    return True


def _group_order_factors(p: int, degree: int) -> Mapping[int, int]:
    return factorint(p**degree - 1)


def ff_element_order(
    a: Union[FieldElem, Sequence[int]],
    *,
    p: Optional[int] = None,
    modulus: Optional[Sequence[int]] = None,
    factors: Optional[Mapping[int, int]] = None,
) -> int:
    """Multiplicative order of an element of GF(p) or GF(p^r).

    Args:
        a: A prime-field element, or a coefficient list (lowest degree first)
            of an element of ``GF(p)[t]/(modulus)``.
        p: Characteristic; taken from ``a`` when it is a :class:`FieldElem`.
        modulus: Irreducible polynomial of degree r, lowest degree first.
        factors: Prime factorization of ``p^r - 1``; computed when omitted.

    Returns:
        The least ``k >= 1`` with ``a^k = 1``.

    Raises:
        FieldError: When ``a`` is zero or ``modulus`` is not irreducible.
    """
    if isinstance(a, FieldElem):
        p = a.p
        modulus = [0, 1] if modulus is None else modulus
        coeffs: Sequence[int] = [a.value]
    else:
        if p is None or modulus is None:
            raise FieldError("extension elements require both p and modulus")
        coeffs = a
    dense_mod = _dense(modulus, p)
    degree = len(dense_mod) - 1
    if degree < 1:
        raise FieldError("modulus must have positive degree")
    if not is_irreducible(modulus, p):
        raise FieldError("modulus is not irreducible; quotient ring has zero divisors")
    element = gf_rem(_dense(coeffs, p), dense_mod, p, ZZ)
    if not element:
        raise FieldError("zero has no multiplicative order")

    group_order = p**degree - 1
    if factors is None:
        factors = _group_order_factors(p, degree)
    one = [1]

    def power(exponent: int) -> List[int]:
        return gf_pow_mod(element, exponent, dense_mod, p, ZZ)

    if power(group_order) != one:
        raise FieldError("element does not lie in the multiplicative group; check the factorization")
    order = group_order
    for prime, multiplicity in factors.items():
        order //= prime**multiplicity
        residue = power(order)
        while residue != one:
            residue = gf_pow_mod(residue, prime, dense_mod, p, ZZ)
            order *= prime
    return order


def is_primitive(g: Sequence[int], p: int) -> bool:
    """True when ``g`` is irreducible and ``t`` generates ``GF(p)[t]/(g)``*."""
    if not is_irreducible(g, p):
        return False
    degree = len(_dense(g, p)) - 1
    if _dense(g, p)[-1] == 0:
        return False
    return ff_element_order([0, 1], p=p, modulus=g) == p**degree - 1


def order_of_t(g: Sequence[int], p: int) -> int:
    """Order of ``t`` in the unit group of ``GF(p)[t]/(g)``.

    Factor ``g = prod h_i^e_i``; the order is the lcm of
    ``ord_{h_i}(t) * p^ceil(log_p e_i)``.

    Raises:
        FieldError: When ``t`` divides ``g`` (``t`` is not a unit).
    """
    dense = _dense(g, p)
    if len(dense) < 2:
        raise FieldError("polynomial must have positive degree")
    if dense[-1] == 0:
        raise FieldError("t divides the polynomial; t is not a unit")
    _, parts = gf_factor(dense, p, ZZ)
    order = 1
    for factor, multiplicity in parts:
        low = _low_first(factor)
        if len(low) == 2:
            # linear factor t - c: t reduces to c
            base = ff_element_order(FieldElem((-low[0] * pow(low[1], p - 2, p)) % p, p))
        else:
            base = ff_element_order([0, 1], p=p, modulus=low)
        lift = 1
        while lift < multiplicity:
            lift *= p
        order = math.lcm(order, base * lift)
    return order


__all__ = [
    "FieldElem",
    "FieldError",
    "FieldOp",
    "PrimeField",
    "ff_arith",
    "ff_element_order",
    "is_irreducible",
    "is_primitive",
    "order_of_t",
]
