"""The difference polynomial algebra over GF(p).

Variables ``x_i(t)`` live in a :class:`DifferenceRing` that fixes the base
field and the stream names. Monomials are encoded as Python integers: the
variable ``x_i(t)`` owns the bit slot ``t * n + i`` (``n`` streams) of width
``w`` bits holding its exponent (``w = 1`` over GF(2)). The shift map is then
a left shift by ``n * w`` bits, and over GF(2) multiplication is a bitwise or.

Polynomials are kept canonical modulo the field ideal: exponents never reach
``p`` and zero coefficients are never stored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Protocol,
    Sequence,
    Tuple,
    Union,
)

from diffcipher.core.field import FieldElem, PrimeField

logger = logging.getLogger(__name__)

Monomial = int
"""Encoded monomial; ``0`` is the constant monomial ``1``."""


class VariableError(ValueError):
    """Raised for unknown streams, negative clocks or mixed rings."""


class Var(NamedTuple):
    stream: int
    clock: int


@dataclass(frozen=True)
class DifferenceRing:
    """Polynomial algebra ``GF(p)[x_i(t)]`` modulo the field ideal."""

    field: PrimeField
    streams: Tuple[str, ...]
    n: int = dataclass_field(init=False, compare=False, repr=False)
    p: int = dataclass_field(init=False, compare=False, repr=False)
    width: int = dataclass_field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        streams = tuple(self.streams)
        if not streams:
            raise VariableError("a ring needs at least one stream")
        if len(set(streams)) != len(streams):
            raise VariableError(f"duplicate stream names in {streams}")
        object.__setattr__(self, "streams", streams)
        object.__setattr__(self, "n", len(streams))
        object.__setattr__(self, "p", self.field.p)
        object.__setattr__(self, "width", 1 if self.field.p == 2 else (self.field.p - 1).bit_length())

    @classmethod
    def over(cls, p: int, streams: Iterable[str]) -> "DifferenceRing":
        return cls(PrimeField(p), tuple(streams))

    # Variables ----------------------------------------------------------------

    def stream_index(self, name: str) -> int:
        try:
            return self.streams.index(name)
        except ValueError as exc:
            raise VariableError(f"unknown stream {name!r}") from exc

    def var(self, stream: Union[str, int], clock: int) -> Var:
        index = self.stream_index(stream) if isinstance(stream, str) else stream
        return self._checked(Var(index, clock))

    def _checked(self, v: Var) -> Var:
        if not 0 <= v.stream < self.n:
            raise VariableError(f"stream index {v.stream} outside 0..{self.n - 1}")
        if v.clock < 0:
            raise VariableError(f"negative clock {v.clock} for stream {self.streams[v.stream]!r}")
        return v

    def var_name(self, v: Var) -> str:
        return f"{self.streams[v.stream]}{v.clock}"

    def slot(self, v: Var) -> int:
        return v.clock * self.n + v.stream

    def slot_var(self, slot: int) -> Var:
        return Var(slot % self.n, slot // self.n)

    # Monomials ------------------------------------------------------------------

    def reduce_exponent(self, e: int) -> int:
        """Exponent of ``x^e`` modulo ``x^p - x`` (``e >= 1``)."""
        return (e - 1) % (self.p - 1) + 1

    def monomial(self, factors: Union[Mapping[Var, int], Iterable[Var], Iterable[Tuple[Var, int]]]) -> Monomial:
        exponents: Dict[int, int] = {}
        items = factors.items() if isinstance(factors, Mapping) else factors
        for item in items:
            if isinstance(item, Var):
                v, e = item, 1
            else:
                v, e = item
                v = Var(*v)
            if e < 0:
                raise VariableError(f"negative exponent {e}")
            if e == 0:
                continue
            slot = self.slot(self._checked(v))
            exponents[slot] = exponents.get(slot, 0) + e
        return self._encode(exponents)

    def _encode(self, exponents: Mapping[int, int]) -> Monomial:
        m = 0
        w = self.width
        for slot, e in exponents.items():
            if e:
                m |= self.reduce_exponent(e) << (slot * w)
        return m

    def exponents(self, m: Monomial) -> Dict[int, int]:
        """Slot -> exponent map of an encoded monomial."""
        out: Dict[int, int] = {}
        w = self.width
        if w == 1:
            while m:
                low = m & -m
                out[low.bit_length() - 1] = 1
                m ^= low
            return out
        mask = (1 << w) - 1
        while m:
            slot = ((m & -m).bit_length() - 1) // w
            out[slot] = (m >> (slot * w)) & mask
            m &= ~(mask << (slot * w))
        return out

    def factors(self, m: Monomial) -> Tuple[Tuple[Var, int], ...]:
        """Factors sorted by clock, then stream."""
        return tuple((self.slot_var(s), e) for s, e in sorted(self.exponents(m).items()))

    def mono_mul(self, a: Monomial, b: Monomial) -> Monomial:
        if self.p == 2:
            return a | b
        if not a & b:
            return a | b
        exps = self.exponents(a)
        for slot, e in self.exponents(b).items():
            exps[slot] = exps.get(slot, 0) + e
        return self._encode(exps)

    def mono_degree(self, m: Monomial) -> int:
        if self.p == 2:
            return m.bit_count()
        return sum(self.exponents(m).values())

    def mono_shift(self, m: Monomial, t: int) -> Monomial:
        return m << (t * self.n * self.width) if t >= 0 else m >> (-t * self.n * self.width)

    def mono_variables(self, m: Monomial) -> Tuple[Var, ...]:
        return tuple(self.slot_var(s) for s in sorted(self.exponents(m)))

    def mono_max_clock(self, m: Monomial) -> int:
        if not m:
            return -1
        return ((m.bit_length() - 1) // self.width) // self.n

    def mono_min_clock(self, m: Monomial) -> int:
        if not m:
            return -1
        return (((m & -m).bit_length() - 1) // self.width) // self.n

    # Polynomials ----------------------------------------------------------------

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {0: 1})

    def const(self, c: Union[int, FieldElem]) -> "Poly":
        c = int(c) % self.p
        return Poly(self, {0: c} if c else {})

    def gen(self, stream: Union[str, int, Var], clock: Optional[int] = None) -> "Poly":
        v = stream if isinstance(stream, Var) else self.var(stream, clock if clock is not None else 0)
        return Poly(self, {self.monomial([self._checked(Var(*v))]): 1})

    def term(self, coeff: int, m: Monomial) -> "Poly":
        coeff %= self.p
        return Poly(self, {m: coeff} if coeff else {})

    def poly(self, raw_terms: Iterable[Tuple[int, object]]) -> "Poly":
        return poly_normalize(self, raw_terms)


class Poly:
    """Canonical polynomial: a map from encoded monomials to nonzero residues.

    Instances are treated as immutable; arithmetic returns new polynomials.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: DifferenceRing, terms: Dict[Monomial, int]) -> None:
        self.ring = ring
        self.terms = terms
        self._hash: Optional[int] = None

    # Structure ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(self.terms.items())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, int):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.p, self.ring.streams, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self) -> int:
        return self.terms.get(0, 0)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.mono_degree(m) for m in self.terms)

    def monomials(self) -> Iterable[Monomial]:
        return self.terms.keys()

    def support(self) -> Monomial:
        """Or of all monomials: every variable occurring in the polynomial."""
        acc = 0
        for m in self.terms:
            acc |= m
        return acc

    def variables(self) -> Tuple[Var, ...]:
        ring = self.ring
        return tuple(ring.slot_var(s) for s in sorted(ring.exponents(self.support())))

    def max_clock(self) -> int:
        return self.ring.mono_max_clock(self.support())

    def min_clock(self) -> int:
        return self.ring.mono_min_clock(self.support())

    # Arithmetic -----------------------------------------------------------------

    def _coerce(self, other: Union["Poly", int, FieldElem]) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise VariableError("polynomials belong to different rings")
            return other
        return self.ring.const(int(other))

    def __add__(self, other: Union["Poly", int]) -> "Poly":
        other = self._coerce(other)
        return Poly(self.ring, _add_terms(self.ring.p, self.terms, other.terms, 1))

    __radd__ = __add__

    def __sub__(self, other: Union["Poly", int]) -> "Poly":
        other = self._coerce(other)
        return Poly(self.ring, _add_terms(self.ring.p, self.terms, other.terms, -1))

    def __rsub__(self, other: Union["Poly", int]) -> "Poly":
        return self._coerce(other) - self

    def __neg__(self) -> "Poly":
        p = self.ring.p
        return Poly(self.ring, {m: (-c) % p for m, c in self.terms.items()})

    def __mul__(self, other: Union["Poly", int]) -> "Poly":
        other = self._coerce(other)
        return Poly(self.ring, _mul_terms(self.ring, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative powers are undefined")
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def scale(self, c: int) -> "Poly":
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {m: (v * c) % p for m, v in self.terms.items()})

    def mul_monomial(self, m: Monomial, c: int = 1) -> "Poly":
        ring = self.ring
        out: Dict[Monomial, int] = {}
        p = ring.p
        for t, v in self.terms.items():
            key = ring.mono_mul(t, m)
            value = (out.get(key, 0) + v * c) % p
            if value:
                out[key] = value
            else:
                out.pop(key, None)
        return Poly(ring, out)

    # Difference structure -------------------------------------------------------

    def shift(self, t: int) -> "Poly":
        return poly_shift(self, t)

    def evaluate(self, assignment: Mapping[Var, Union[int, FieldElem]]) -> FieldElem:
        return poly_evaluate(self, assignment)

    def substitute(self, mapping: Mapping[Var, "Poly"]) -> "Poly":
        """Simultaneously replaces variables by polynomials of the same ring."""
        ring = self.ring
        if not mapping:
            return self
        targets = {ring.slot(v): g for v, g in mapping.items()}
        w = ring.width
        mask = (1 << w) - 1
        target_mask = 0
        for slot in targets:
            target_mask |= mask << (slot * w)
        powers: Dict[Tuple[int, int], Poly] = {}
        acc: Dict[Monomial, int] = {}
        p = ring.p
        for m, c in self.terms.items():
            hit = m & target_mask
            if not hit:
                value = (acc.get(m, 0) + c) % p
                if value:
                    acc[m] = value
                else:
                    acc.pop(m, None)
                continue
            product: Dict[Monomial, int] = {m & ~target_mask: c}
            for slot, e in ring.exponents(hit).items():
                key = (slot, e)
                power = powers.get(key)
                if power is None:
                    power = targets[slot] ** e
                    powers[key] = power
                product = _mul_terms(ring, product, power.terms)
                if not product:
                    break
            acc = _add_terms(p, acc, product, 1)
        return Poly(ring, acc)

    def rename(self, target: DifferenceRing, fn: Callable[[Var], Var]) -> "Poly":
        """Maps every variable through ``fn`` into the ring ``target``."""
        if target.p != self.ring.p:
            raise VariableError("cannot move polynomials between fields")
        raw = []
        ring = self.ring
        for m, c in self.terms.items():
            raw.append((c, [(fn(v), e) for v, e in ring.factors(m)]))
        return poly_normalize(target, raw)

    def leading_monomial(self, ordering: "OrderingLike") -> Monomial:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading monomial")
        return max(self.terms, key=lambda m: ordering.key(self.ring, m))

    def monic(self, ordering: "OrderingLike") -> "Poly":
        if not self.terms:
            return self
        lc = self.terms[self.leading_monomial(ordering)]
        return self.scale(self.ring.field.inv(lc))


class OrderingLike(Protocol):
    def key(self, ring: DifferenceRing, m: Monomial) -> Any: ...


def _add_terms(p: int, a: Dict[Monomial, int], b: Dict[Monomial, int], sign: int) -> Dict[Monomial, int]:
    if len(a) < len(b) and sign == 1:
        a, b = b, a
    out = dict(a)
    if p == 2:
        for m in b:
            if m in out:
                del out[m]
            else:
                out[m] = 1
        return out
    for m, c in b.items():
        value = (out.get(m, 0) + sign * c) % p
        if value:
            out[m] = value
        else:
            out.pop(m, None)
    return out


def _mul_terms(ring: DifferenceRing, a: Dict[Monomial, int], b: Dict[Monomial, int]) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    if not a or not b:
        return out
    if ring.p == 2:
        for ma in a:
            for mb in b:
                m = ma | mb
                if m in out:
                    del out[m]
                else:
                    out[m] = 1
        return out
    p = ring.p
    mul = ring.mono_mul
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mul(ma, mb)
            value = (out.get(m, 0) + ca * cb) % p
            if value:
                out[m] = value
            else:
                out.pop(m, None)
    return out


# Module-level operations ----------------------------------------------------------


def poly_normalize(ring: DifferenceRing, raw_terms: Iterable[Tuple[int, object]]) -> Poly:
    """Builds a canonical polynomial from ``(coefficient, monomial)`` pairs.

    Monomials may be encoded integers or collections of variables /
    ``(variable, exponent)`` pairs with arbitrary nonnegative exponents.
    Exponents are reduced with ``x^p = x``, like terms merged and zero terms
    dropped.

    Raises:
        VariableError: For unknown streams or negative clocks.
    """
    p = ring.p
    acc: Dict[Monomial, int] = {}
    for coeff, mono in raw_terms:
        m = mono if isinstance(mono, int) else ring.monomial(mono)  # type: ignore[arg-type]
        value = (acc.get(m, 0) + int(coeff)) % p
        if value:
            acc[m] = value
        else:
            acc.pop(m, None)
    return Poly(ring, acc)


def poly_shift(f: Poly, t: int) -> Poly:
    """Applies the shift map ``t`` times (``t < 0`` shifts back when defined)."""
    if t == 0:
        return f
    ring = f.ring
    if t < 0 and f.terms and f.min_clock() + t < 0:
        raise VariableError(f"cannot shift clock {f.min_clock()} back by {-t}")
    bits = abs(t) * ring.n * ring.width
    if t > 0:
        return Poly(ring, {m << bits: c for m, c in f.terms.items()})
    return Poly(ring, {m >> bits: c for m, c in f.terms.items()})


def poly_evaluate(f: Poly, assignment: Mapping[Var, Union[int, FieldElem]]) -> FieldElem:
    """Evaluates ``f`` at an assignment covering all of its variables.

    Raises:
        VariableError: When a variable of ``f`` is not assigned.
    """
    ring = f.ring
    p = ring.p
    values: Dict[int, int] = {}
    for v in f.variables():
        try:
            values[ring.slot(v)] = int(assignment[v]) % p
        except KeyError as exc:
            raise VariableError(f"variable {ring.var_name(v)} is not assigned") from exc
    total = 0
    for m, c in f.terms.items():
        term = c
        for slot, e in ring.exponents(m).items():
            term = term * pow(values[slot], e, p) % p
            if not term:
                break
        total += term
    return FieldElem(total % p, p)


# Printing ---------------------------------------------------------------------------


def format_monomial(ring: DifferenceRing, m: Monomial) -> str:
    parts: List[str] = []
    for v, e in ring.factors(m):
        name = ring.var_name(v)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def term_sort_key(ring: DifferenceRing, m: Monomial) -> Tuple:
    factors = ring.factors(m)
    degree = sum(e for _, e in factors)
    return (degree == 0, degree, tuple((v.clock, v.stream, e) for v, e in factors))


def format_poly(f: Poly) -> str:
    """Canonical text: terms by degree then variables, constant last."""
    if not f.terms:
        return "0"
    ring = f.ring
    parts: List[str] = []
    for m in sorted(f.terms, key=lambda mono: term_sort_key(ring, mono)):
        c = f.terms[m]
        if m == 0:
            parts.append(str(c))
        elif c == 1:
            parts.append(format_monomial(ring, m))
        else:
            parts.append(f"{c}*{format_monomial(ring, m)}")
    return " + ".join(parts)


def collect_variables(polys: Sequence[Poly]) -> Tuple[Var, ...]:
    acc = 0
    ring: Optional[DifferenceRing] = None
    for f in polys:
        ring = f.ring
        acc |= f.support()
    if ring is None:
        return ()
    return tuple(ring.slot_var(s) for s in sorted(ring.exponents(acc)))


__all__ = [
    "DifferenceRing",
    "Monomial",
    "Poly",
    "Var",
    "VariableError",
    "collect_variables",
    "format_monomial",
    "format_poly",
    "poly_evaluate",
    "poly_normalize",
    "poly_shift",
]
