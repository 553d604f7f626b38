"""Monomial orderings on the difference algebra.

Every ordering exposes a tuple ``key`` for direct comparison and compiles,
over a finite set of variables, into a sequence of :class:`Block` s. A block
lists its variables from greatest to smallest and compares by ``lex`` or
``degrevlex``; earlier blocks are more significant. The Groebner engine
turns blocks into integer keys.
"""

from __future__ import annotations

import abc
import enum
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

from .diffpoly import DifferenceRing, Monomial, Var


class OrderingError(ValueError):
    """Raised when a monomial uses a variable outside a bounded ordering."""


class Comparison(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class InnerOrder(str, enum.Enum):
    LEX = "lex"
    DEGREVLEX = "degrevlex"


@dataclass(frozen=True)
class Block:
    variables: Tuple[Var, ...]
    inner: InnerOrder = InnerOrder.DEGREVLEX


def _block_key(inner: InnerOrder, exps: Dict[Var, int], variables: Sequence[Var]) -> Tuple:
    if inner is InnerOrder.LEX:
        return tuple(exps.get(v, 0) for v in variables)
    degree = sum(exps.get(v, 0) for v in variables)
    return (degree, tuple(-exps.get(v, 0) for v in reversed(variables)))


def _var_exponents(ring: DifferenceRing, m: Monomial) -> Dict[Var, int]:
    return {ring.slot_var(s): e for s, e in ring.exponents(m).items()}


class OrderingSpec(abc.ABC):
    """A monomial ordering usable by normal forms and the Groebner engine."""

    #: True when ``m < m'`` implies ``shift(m) < shift(m')``.
    difference_ordering: bool = False

    @abc.abstractmethod
    def key(self, ring: DifferenceRing, m: Monomial) -> Tuple:
        """Sort key; larger keys are larger monomials."""

    @abc.abstractmethod
    def blocks(self, ring: DifferenceRing, variables: Iterable[Var]) -> Tuple[Block, ...]:
        """Finite block decomposition covering ``variables``."""

    def bounded_variables(self) -> Tuple[Var, ...]:
        return ()


@dataclass(frozen=True)
class ClockBased(OrderingSpec):
    """Compares the highest-clock block first.

    Within one clock the variables are ordered by stream index, higher index
    greater, and compared with ``inner``.
    """

    inner: InnerOrder = InnerOrder.DEGREVLEX
    difference_ordering = True

    def _inner_variables(self, ring: DifferenceRing, clock: int) -> Tuple[Var, ...]:
        return tuple(Var(i, clock) for i in reversed(range(ring.n)))

    def key(self, ring: DifferenceRing, m: Monomial) -> Tuple:
        exps = _var_exponents(ring, m)
        clocks = sorted({v.clock for v in exps}, reverse=True)
        return tuple(
            (c, _block_key(self.inner, exps, self._inner_variables(ring, c))) for c in clocks
        )

    def blocks(self, ring: DifferenceRing, variables: Iterable[Var]) -> Tuple[Block, ...]:
        by_clock: Dict[int, list] = {}
        for v in variables:
            by_clock.setdefault(v.clock, []).append(v)
        return tuple(
            Block(tuple(sorted(set(by_clock[c]), key=lambda v: -v.stream)), self.inner)
            for c in sorted(by_clock, reverse=True)
        )


@dataclass(frozen=True)
class BoundedDegRevLex(OrderingSpec):
    """Degree reverse lexicographic order on a finite list (first is greatest)."""

    variables: Tuple[Var, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(Var(*v) for v in self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise OrderingError("duplicate variables in ordering")

    def _check(self, ring: DifferenceRing, exps: Dict[Var, int]) -> None:
        known = set(self.variables)
        for v in exps:
            if v not in known:
                raise OrderingError(f"variable {ring.var_name(v)} outside the bounded ordering")

    def key(self, ring: DifferenceRing, m: Monomial) -> Tuple:
        exps = _var_exponents(ring, m)
        self._check(ring, exps)
        return _block_key(InnerOrder.DEGREVLEX, exps, self.variables)

    def blocks(self, ring: DifferenceRing, variables: Iterable[Var]) -> Tuple[Block, ...]:
        self._check(ring, {v: 1 for v in variables})
        return (Block(self.variables, InnerOrder.DEGREVLEX),)

    def bounded_variables(self) -> Tuple[Var, ...]:
        return self.variables


@dataclass(frozen=True)
class ProductOrdering(OrderingSpec):
    """Block ordering; ``parts[0]`` is the most significant block."""

    parts: Tuple[Tuple[Var, ...], ...]
    inner: InnerOrder = InnerOrder.DEGREVLEX

    def __post_init__(self) -> None:
        parts = tuple(tuple(Var(*v) for v in part) for part in self.parts)
        flat = [v for part in parts for v in part]
        if len(set(flat)) != len(flat):
            raise OrderingError("product blocks must be disjoint")
        object.__setattr__(self, "parts", parts)

    def _check(self, ring: DifferenceRing, exps: Dict[Var, int]) -> None:
        known = set(self.bounded_variables())
        for v in exps:
            if v not in known:
                raise OrderingError(f"variable {ring.var_name(v)} outside the product ordering")

    def key(self, ring: DifferenceRing, m: Monomial) -> Tuple:
        exps = _var_exponents(ring, m)
        self._check(ring, exps)
        return tuple(_block_key(self.inner, exps, part) for part in self.parts)

    def blocks(self, ring: DifferenceRing, variables: Iterable[Var]) -> Tuple[Block, ...]:
        self._check(ring, {v: 1 for v in variables})
        return tuple(Block(part, self.inner) for part in self.parts)

    def bounded_variables(self) -> Tuple[Var, ...]:
        return tuple(v for part in self.parts for v in part)


def monomial_compare(
    m1: Monomial, m2: Monomial, ordering: OrderingSpec, ring: DifferenceRing
) -> Comparison:
    """Compares two monomials under ``ordering``.

    Raises:
        OrderingError: When a bounded ordering does not cover a variable.
    """
    k1, k2 = ordering.key(ring, m1), ordering.key(ring, m2)
    if k1 == k2:
        return Comparison.EQUAL
    return Comparison.GREATER if k1 > k2 else Comparison.LESS


__all__ = [
    "Block",
    "BoundedDegRevLex",
    "ClockBased",
    "Comparison",
    "InnerOrder",
    "OrderingError",
    "OrderingSpec",
    "ProductOrdering",
    "monomial_compare",
]
