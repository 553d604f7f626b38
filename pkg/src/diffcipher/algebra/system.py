"""Explicit difference systems ``x_i(r_i) = f_i``.

A :class:`DiffSystem` realizes the state transition endomorphism of the
algebra (:func:`endo_iterate`) and the transition map on state vectors
(:func:`simulate`). States are tuples laid out stream-major: the window
``x_1(t) .. x_1(t + r_1 - 1)`` first, then the next stream, and so on.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from diffcipher.core.field import FieldError, is_primitive, order_of_t

from .diffpoly import DifferenceRing, Poly, Var, VariableError
from .groebner import BasisStatus, BuchbergerOptions, GBasis, buchberger
from .ordering import ClockBased, InnerOrder, OrderingError, OrderingSpec, ProductOrdering

logger = logging.getLogger(__name__)

StateVec = Tuple[int, ...]

DEFAULT_TERM_CAP = 2**20
DEFAULT_STATE_SPACE_CAP = 2**24


class SystemDefinitionError(ValueError):
    """Raised when a system's updates, orders or split are inconsistent."""


class TermCapExceeded(RuntimeError):
    """Raised when an iterated polynomial grows past the configured term cap."""

    def __init__(self, clock: int, terms: int, cap: int) -> None:
        super().__init__(f"polynomial at clock {clock} has {terms} terms (cap {cap})")
        self.clock = clock
        self.terms = terms
        self.cap = cap


class NotInvertibleError(RuntimeError):
    """Raised when an operation needs the inverse of a non-invertible system."""


@dataclass(frozen=True)
class DiffSystem:
    ring: DifferenceRing
    orders: Tuple[int, ...]
    updates: Tuple[Poly, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(r) for r in self.orders)
        updates = tuple(self.updates)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "updates", updates)
        if len(orders) != self.ring.n or len(updates) != self.ring.n:
            raise SystemDefinitionError(
                f"expected {self.ring.n} orders and updates, got {len(orders)} and {len(updates)}"
            )
        for name, r in zip(self.ring.streams, orders):
            if r < 1:
                raise SystemDefinitionError(f"stream {name!r} must have a positive order")
        for name, f in zip(self.ring.streams, updates):
            if f.ring != self.ring:
                raise SystemDefinitionError(f"update of {name!r} belongs to another ring")
            for v in f.variables():
                if v.clock >= orders[v.stream]:
                    raise SystemDefinitionError(
                        f"update of {name!r} references {self.ring.var_name(v)} "
                        f"but stream {self.ring.streams[v.stream]!r} has order {orders[v.stream]}"
                    )

    # Shape -----------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def r(self) -> int:
        return sum(self.orders)

    @property
    def streams(self) -> Tuple[str, ...]:
        return self.ring.streams

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for r in self.orders:
            out.append(acc)
            acc += r
        return tuple(out)

    def state_vars(self) -> Tuple[Var, ...]:
        """Variables of the 0-state in state-vector order."""
        return tuple(Var(i, c) for i, r in enumerate(self.orders) for c in range(r))

    def position(self, v: Var) -> int:
        if not 0 <= v.clock < self.orders[v.stream]:
            raise VariableError(f"{self.ring.var_name(v)} is not a state variable")
        return self.offsets[v.stream] + v.clock

    def window(self, state: Sequence[int], stream: int) -> Tuple[int, ...]:
        start = self.offsets[stream]
        return tuple(state[start : start + self.orders[stream]])

    def assignment(self, state: Sequence[int]) -> Dict[Var, int]:
        self.check_state(state)
        return dict(zip(self.state_vars(), state))

    def check_state(self, state: Sequence[int]) -> None:
        if len(state) != self.r:
            raise SystemDefinitionError(f"state has length {len(state)}, expected {self.r}")

    def update(self, stream: str) -> Poly:
        return self.updates[self.ring.stream_index(stream)]

    def is_homogeneous(self) -> bool:
        return all(f.constant_term() == 0 for f in self.updates)

    @cached_property
    def stepper(self) -> "Stepper":
        return Stepper(self)


class Stepper:
    """Compiled transition map.

    Over GF(2) a state is an integer whose bit ``k`` holds state position
    ``k``; one step is a shift, a mask and a few parity evaluations. Other
    fields use value lists.
    """

    def __init__(self, system: DiffSystem) -> None:
        self.system = system
        self.p = system.p
        self.r = system.r
        self.tops = tuple(off + r - 1 for off, r in zip(system.offsets, system.orders))
        keep = (1 << self.r) - 1
        for top in self.tops:
            keep &= ~(1 << top)
        self.keep = keep
        self.compiled = [self.compile(f) for f in system.updates]

    def compile(self, f: Poly) -> List[Tuple[int, object]]:
        """Terms as ``(coeff, mask)`` over GF(2), ``(coeff, ((pos, e), ...))`` otherwise."""
        system = self.system
        ring = system.ring
        out: List[Tuple[int, object]] = []
        for m, c in f.terms.items():
            factors = ring.factors(m)
            if self.p == 2:
                mask = 0
                for v, _ in factors:
                    mask |= 1 << system.position(v)
                out.append((c, mask))
            else:
                out.append((c, tuple((system.position(v), e) for v, e in factors)))
        return out

    # GF(2) ------------------------------------------------------------------------

    def to_mask(self, state: Sequence[int]) -> int:
        mask = 0
        for k, value in enumerate(state):
            if value & 1:
                mask |= 1 << k
        return mask

    def from_mask(self, mask: int) -> StateVec:
        return tuple((mask >> k) & 1 for k in range(self.r))

    def eval_mask(self, compiled: Sequence[Tuple[int, object]], mask: int) -> int:
        acc = 0
        for _, m in compiled:
            if mask & m == m:  # type: ignore[operator]
                acc ^= 1
        return acc

    def step_mask(self, mask: int) -> int:
        values = [self.eval_mask(c, mask) for c in self.compiled]
        mask = (mask >> 1) & self.keep
        for top, value in zip(self.tops, values):
            if value:
                mask |= 1 << top
        return mask

    # Generic ------------------------------------------------------------------------

    def eval_values(self, compiled: Sequence[Tuple[int, object]], values: Sequence[int]) -> int:
        p = self.p
        acc = 0
        for c, factors in compiled:
            term = c
            for pos, e in factors:  # type: ignore[union-attr]
                term = term * pow(values[pos], e, p) % p
                if not term:
                    break
            acc += term
        return acc % p

    def step_values(self, values: List[int]) -> List[int]:
        new = [self.eval_values(c, values) for c in self.compiled]
        out = values[1:] + [0]
        for top, value in zip(self.tops, new):
            out[top] = value
        return out

    def states(self, initial: Sequence[int], count: int) -> Iterator[StateVec]:
        """Yields the states at clocks ``0 .. count - 1``."""
        self.system.check_state(initial)
        if self.p == 2:
            mask = self.to_mask(initial)
            for _ in range(count):
                yield self.from_mask(mask)
                mask = self.step_mask(mask)
            return
        values = [int(v) % self.p for v in initial]
        for _ in range(count):
            yield tuple(values)
            values = self.step_values(values)

    def evaluations(self, initial: Sequence[int], f: Poly, start: int, count: int) -> List[int]:
        """Values of ``f`` at the states of clocks ``start .. start + count - 1``."""
        self.system.check_state(initial)
        compiled = self.compile(f)
        out: List[int] = []
        if self.p == 2:
            mask = self.to_mask(initial)
            for _ in range(start):
                mask = self.step_mask(mask)
            for _ in range(count):
                out.append(self.eval_mask(compiled, mask))
                mask = self.step_mask(mask)
            return out
        values = [int(v) % self.p for v in initial]
        for _ in range(start):
            values = self.step_values(values)
        for _ in range(count):
            out.append(self.eval_values(compiled, values))
            values = self.step_values(values)
        return out

    def run(self, initial: Sequence[int], steps: int) -> StateVec:
        self.system.check_state(initial)
        if self.p == 2:
            mask = self.to_mask(initial)
            for _ in range(steps):
                mask = self.step_mask(mask)
            return self.from_mask(mask)
        values = [int(v) % self.p for v in initial]
        for _ in range(steps):
            values = self.step_values(values)
        return tuple(values)


# Simulation ---------------------------------------------------------------------------


def simulate(system: DiffSystem, initial: Sequence[int], t: int) -> StateVec:
    """State at clock ``t`` of the solution with the given 0-state."""
    if t < 0:
        raise ValueError("use backstep for negative clocks")
    return system.stepper.run(initial, t)


def trajectory(system: DiffSystem, initial: Sequence[int], count: int) -> List[StateVec]:
    return list(system.stepper.states(initial, count))


# Transition endomorphism ----------------------------------------------------------------


def _check_in_state_algebra(system: DiffSystem, f: Poly) -> None:
    if f.ring != system.ring:
        raise SystemDefinitionError("polynomial belongs to another ring")
    for v in f.variables():
        if v.clock >= system.orders[v.stream]:
            raise SystemDefinitionError(
                f"{system.ring.var_name(v)} is not a state variable of the system"
            )


class DifferenceBasis:
    """The difference Groebner basis ``{x_i(r_i) - f_i}`` and its normal forms.

    Normal forms of the variables ``x_i(c)`` with ``c >= r_i`` are built
    clock by clock and memoized; a polynomial's normal form substitutes them
    simultaneously.
    """

    def __init__(
        self,
        system: DiffSystem,
        ordering: Optional[OrderingSpec] = None,
        term_cap: int = DEFAULT_TERM_CAP,
    ) -> None:
        ordering = ordering or ClockBased(InnerOrder.DEGREVLEX)
        if not ordering.difference_ordering:
            raise OrderingError("difference normal forms need a clock-based ordering")
        ring = system.ring
        for i, f in enumerate(system.updates):
            lead = ring.monomial([Var(i, system.orders[i])])
            if f and ordering.key(ring, f.leading_monomial(ordering)) >= ordering.key(ring, lead):
                raise OrderingError(
                    f"{ring.var_name(Var(i, system.orders[i]))} does not lead its update polynomial"
                )
        self.system = system
        self.ordering = ordering
        self.term_cap = term_cap
        self._memo: Dict[Var, Poly] = {}
        self._filled = -1

    def generators(self, up_to_clock: int) -> List[Poly]:
        """The shifted generators ``x_i(r_i + t) - shift^t(f_i)`` with ``r_i + t <= up_to_clock``."""
        ring = self.system.ring
        out = []
        for i, (r, f) in enumerate(zip(self.system.orders, self.system.updates)):
            for c in range(r, up_to_clock + 1):
                out.append(ring.gen(Var(i, c)) - f.shift(c - r))
        return out

    def _fill(self, clock: int) -> None:
        system = self.system
        for c in range(self._filled + 1, clock + 1):
            for i, (r, f) in enumerate(zip(system.orders, system.updates)):
                if c < r:
                    continue
                value = self._substitute(f.shift(c - r))
                if len(value) > self.term_cap:
                    raise TermCapExceeded(c, len(value), self.term_cap)
                self._memo[Var(i, c)] = value
            self._filled = c

    def _substitute(self, f: Poly) -> Poly:
        orders = self.system.orders
        mapping = {v: self._memo[v] for v in f.variables() if v.clock >= orders[v.stream]}
        return f.substitute(mapping)

    def normal_form(self, f: Poly) -> Poly:
        if f.ring != self.system.ring:
            raise SystemDefinitionError("polynomial belongs to another ring")
        if f.is_zero:
            return f
        self._fill(f.max_clock())
        return self._substitute(f)


def endo_iterate(
    system: DiffSystem,
    f: Poly,
    t: int,
    method: str = "substitution",
    *,
    term_cap: int = DEFAULT_TERM_CAP,
    basis: Optional[DifferenceBasis] = None,
) -> Poly:
    """Image of ``f`` (a state polynomial) under the ``t``-th power of the
    transition endomorphism.

    ``substitution`` applies shift-then-substitute ``t`` times;
    ``normal_form`` reduces ``shift^t(f)`` modulo the difference basis.

    Raises:
        SystemDefinitionError: When ``f`` uses non-state variables.
        OrderingError: When the ordering does not make ``x_i(r_i)`` leading.
        TermCapExceeded: When an intermediate polynomial passes ``term_cap``.
    """
    _check_in_state_algebra(system, f)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if method == "normal_form":
        basis = basis or DifferenceBasis(system, term_cap=term_cap)
        return basis.normal_form(f.shift(t))
    if method != "substitution":
        raise ValueError(f"unknown method {method!r}")
    ring = system.ring
    heads = {Var(i, r): g for i, (r, g) in enumerate(zip(system.orders, system.updates))}
    g = f
    for step in range(1, t + 1):
        shifted = g.shift(1)
        present = {v: heads[v] for v in shifted.variables() if v in heads}
        g = shifted.substitute(present)
        if len(g) > term_cap:
            raise TermCapExceeded(step, len(g), term_cap)
    logger.debug("Iterated %s over %d clocks: %d terms", ring.streams, t, len(g))
    return g


# Invertibility --------------------------------------------------------------------------


class InverseStatus(str, enum.Enum):
    INVERTIBLE = "invertible"
    NOT_INVERTIBLE = "not_invertible"


@dataclass(frozen=True)
class InverseResult:
    status: InverseStatus
    inverse: Optional[DiffSystem] = None
    witness: Optional[GBasis] = None
    method: str = "full"

    @property
    def invertible(self) -> bool:
        return self.status is InverseStatus.INVERTIBLE


def _reverse_var(system: DiffSystem, v: Var) -> Var:
    return Var(v.stream, system.orders[v.stream] - v.clock)


def _quick_inverse(system: DiffSystem) -> Optional[DiffSystem]:
    ring = system.ring
    p = ring.p
    inverse_updates: List[Optional[Poly]] = [None] * system.n
    for i, f in enumerate(system.updates):
        head_terms = [(m, c) for m, c in f.terms.items() if m and ring.mono_min_clock(m) == 0]
        if len(head_terms) != 1:
            return None
        m, c = head_terms[0]
        factors = ring.factors(m)
        if len(factors) != 1 or factors[0][1] != 1:
            return None
        k = factors[0][0].stream
        if inverse_updates[k] is not None:
            return None
        g = f - ring.term(c, m)
        # x_j(s) -> x_j(r_j - s) maps clocks 1..r_j-1 onto themselves
        reversed_g = g.rename(ring, lambda v: _reverse_var(system, v))
        inverse_updates[k] = (ring.gen(Var(i, 0)) - reversed_g).scale(pow(c, p - 2, p))
    return DiffSystem(ring, system.orders, tuple(inverse_updates))  # type: ignore[arg-type]


def transition_ideal(system: DiffSystem) -> Tuple[DifferenceRing, List[Poly], ProductOrdering]:
    """The state transition ideal over the state variables and primed copies.

    Primed streams ``x'`` follow the original streams in the returned ring;
    the product ordering makes every unprimed variable larger.
    """
    ring = system.ring
    primed = DifferenceRing(ring.field, ring.streams + tuple(f"{s}'" for s in ring.streams))
    n = system.n
    gens: List[Poly] = []
    for i, (r, f) in enumerate(zip(system.orders, system.updates)):
        for j in range(r - 1):
            gens.append(primed.gen(Var(n + i, j)) - primed.gen(Var(i, j + 1)))
        gens.append(primed.gen(Var(n + i, r - 1)) - f.rename(primed, lambda v: v))

    def block(offset: int) -> Tuple[Var, ...]:
        return tuple(
            sorted(
                (Var(offset + i, c) for i, r in enumerate(system.orders) for c in range(r)),
                key=lambda v: (-v.clock, -v.stream),
            )
        )

    return primed, gens, ProductOrdering((block(0), block(n)), InnerOrder.DEGREVLEX)


def _full_inverse(system: DiffSystem) -> InverseResult:
    ring = system.ring
    n = system.n
    primed, gens, ordering = transition_ideal(system)
    basis = buchberger(gens, ordering, BuchbergerOptions(early_stop_on_one=True))
    heads: Dict[Var, Poly] = {}
    shape_ok = basis.status is BasisStatus.REDUCED and len(basis.generators) == system.r
    if shape_ok:
        for g in basis.generators:
            lm = g.leading_monomial(ordering)
            factors = primed.factors(lm)
            tail = g - primed.term(g.terms[lm], lm)
            if (
                len(factors) != 1
                or factors[0][1] != 1
                or factors[0][0].stream >= n
                or any(v.stream < n for v in tail.variables())
            ):
                shape_ok = False
                break
            heads[factors[0][0]] = -tail
    if not shape_ok or len(heads) != system.r:
        logger.info("State transition ideal of %s has no inverse shape", ring.streams)
        return InverseResult(InverseStatus.NOT_INVERTIBLE, witness=basis, method="full")
    updates = []
    for i, r in enumerate(system.orders):
        updates.append(
            heads[Var(i, 0)].rename(
                ring, lambda v: Var(v.stream - n, system.orders[v.stream - n] - 1 - v.clock)
            )
        )
    return InverseResult(
        InverseStatus.INVERTIBLE, DiffSystem(ring, system.orders, tuple(updates)), basis, "full"
    )


@lru_cache(maxsize=64)
def invert_system(system: DiffSystem, method: str = "auto") -> InverseResult:
    """Decides invertibility and builds the inverse system.

    ``quick`` checks the sufficient condition ``f_i = c * x_k(0) + g_i`` with
    the ``x_k(0)`` a permutation of the clock-0 variables and ``g_i`` free of
    them; ``full`` computes the reduced Groebner basis of the state transition
    ideal; ``auto`` tries ``quick`` first.
    """
    if method not in {"quick", "full", "auto"}:
        raise ValueError(f"unknown inversion method {method!r}")
    if method in {"quick", "auto"}:
        inverse = _quick_inverse(system)
        if inverse is not None:
            return InverseResult(InverseStatus.INVERTIBLE, inverse, method="quick")
        if method == "quick":
            return InverseResult(InverseStatus.NOT_INVERTIBLE, method="quick")
    return _full_inverse(system)


def reverse_windows(system: DiffSystem, state: Sequence[int]) -> StateVec:
    out: List[int] = []
    for i in range(system.n):
        out.extend(reversed(system.window(state, i)))
    return tuple(out)


def backstep(system: DiffSystem, state: Sequence[int], steps: int) -> StateVec:
    """State ``steps`` clocks earlier: reverse each window, run the inverse
    system, reverse back.

    Raises:
        NotInvertibleError: When the system has no inverse.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    system.check_state(state)
    if steps == 0:
        return tuple(state)
    result = invert_system(system)
    if not result.invertible or result.inverse is None:
        raise NotInvertibleError(f"system over streams {system.streams} is not invertible")
    inverse = result.inverse
    return reverse_windows(system, simulate(inverse, reverse_windows(system, state), steps))


# Structure --------------------------------------------------------------------------------


def subsystem_split(system: DiffSystem, m: int) -> Optional[DiffSystem]:
    """The subsystem of the first ``m`` streams, or ``None`` when they depend
    on later streams.

    Raises:
        SystemDefinitionError: When ``m`` is outside ``0 < m < n``.
    """
    if not 0 < m < system.n:
        raise SystemDefinitionError(f"split {m} outside 0 < m < {system.n}")
    for f in system.updates[:m]:
        if any(v.stream >= m for v in f.variables()):
            return None
    ring = DifferenceRing(system.ring.field, system.streams[:m])
    updates = tuple(f.rename(ring, lambda v: v) for f in system.updates[:m])
    return DiffSystem(ring, system.orders[:m], updates)


# Periods ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodResult:
    period: Optional[int]
    strategy: str
    cap: Optional[int] = None

    @property
    def known(self) -> bool:
        return self.period is not None


def companion_polynomial(system: DiffSystem) -> List[int]:
    """``t^r - sum c_j t^j`` (lowest degree first) of a single linear recurrence.

    Raises:
        SystemDefinitionError: When the system is not one homogeneous linear equation.
    """
    if system.n != 1:
        raise SystemDefinitionError("the primitive-polynomial route needs a single stream")
    f = system.updates[0]
    if f.constant_term() or f.degree() > 1:
        raise SystemDefinitionError("the primitive-polynomial route needs a homogeneous linear update")
    p = system.p
    r = system.orders[0]
    g = [0] * (r + 1)
    g[r] = 1
    for m, c in f.terms.items():
        (v, _), = system.ring.factors(m)
        g[v.clock] = (-c) % p
    return g


def _period_linear(system: DiffSystem) -> PeriodResult:
    g = companion_polynomial(system)
    p = system.p
    r = system.orders[0]
    if g[0] == 0:
        raise NotInvertibleError("x(0) does not occur in the update; the map is singular")
    if is_primitive(g, p):
        return PeriodResult(p**r - 1, "linear_primitive")
    logger.warning("Companion polynomial is not primitive; using the order of t modulo it")
    try:
        return PeriodResult(order_of_t(g, p), "linear_primitive")
    except FieldError as exc:
        raise NotInvertibleError(str(exc)) from exc


TABLE_CHUNK = 1 << 16


def transition_table(system: DiffSystem, *, chunk: int = TABLE_CHUNK) -> np.ndarray:
    """Successor index of every state, states numbered base ``p`` by position.

    States are decoded ``chunk`` at a time, so working memory beyond the
    table itself stays proportional to ``chunk * r``.
    """
    p, r = system.p, system.r
    size = p**r
    dtype = np.uint32 if size <= 1 << 32 else np.int64
    successor = np.empty(size, dtype=dtype)
    weights = [p**k for k in range(r)]
    stepper = system.stepper
    shifted = [k for k in range(r) if k not in stepper.tops and k + 1 < r]
    ring = system.ring
    updates = [
        (top, [(int(c), [(system.position(v), e) for v, e in ring.factors(m)]) for m, c in f.terms.items()])
        for top, f in zip(stepper.tops, system.updates)
    ]
    for low in range(0, size, chunk):
        high = min(low + chunk, size)
        rest = np.arange(low, high, dtype=np.int64)
        digits = np.empty((r, high - low), dtype=np.uint8 if p <= 256 else np.int64)
        for k in range(r):
            digits[k] = rest % p
            rest //= p
        block = np.zeros(high - low, dtype=np.int64)
        for k in shifted:
            block += digits[k + 1].astype(np.int64) * weights[k]
        for top, terms in updates:
            value = np.zeros(high - low, dtype=np.int64)
            for c, factors in terms:
                term = np.full(high - low, c, dtype=np.int64)
                for position, e in factors:
                    base = digits[position].astype(np.int64)
                    for _ in range(e):
                        term = term * base % p
                value = (value + term) % p
            block += value * weights[top]
        successor[low:high] = block
    return successor


def _cycle_lcm(successor: np.ndarray) -> int:
    size = len(successor)
    step = memoryview(successor)
    visited = bytearray(size)
    result = 1
    for start in range(size):
        if visited[start]:
            continue
        length = 0
        s = start
        while not visited[s]:
            visited[s] = 1
            s = step[s]
            length += 1
        if s != start:
            raise NotInvertibleError("transition map is not a permutation")
        result = math.lcm(result, length)
    return result


def _state_index(state: Sequence[int], p: int) -> int:
    index = 0
    for value in reversed(state):
        index = index * p + value
    return index


def _index_state(index: int, p: int, r: int) -> StateVec:
    out = []
    for _ in range(r):
        index, value = divmod(index, p)
        out.append(value)
    return tuple(out)


def _period_orbits(system: DiffSystem) -> int:
    p, r = system.p, system.r
    size = p**r
    visited = bytearray(size)
    stepper = system.stepper
    result = 1
    for start in range(size):
        if visited[start]:
            continue
        if p == 2:
            mask = start
            length = 0
            while not visited[mask]:
                visited[mask] = 1
                mask = stepper.step_mask(mask)
                length += 1
            end = mask
        else:
            values = list(_index_state(start, p, r))
            index = start
            length = 0
            while not visited[index]:
                visited[index] = 1
                values = stepper.step_values(values)
                index = _state_index(values, p)
                length += 1
            end = index
        if end != start:
            raise NotInvertibleError("transition map is not a permutation")
        result = math.lcm(result, length)
    return result


def period(
    system: DiffSystem,
    strategy: str = "orbit_lcm",
    *,
    state_space_cap: int = DEFAULT_STATE_SPACE_CAP,
) -> PeriodResult:
    """Least ``d`` with ``T^d = id``.

    Raises:
        NotInvertibleError: When the transition map is not a permutation.
        SystemDefinitionError: When ``linear_primitive`` is asked of a
            system that is not a single linear recurrence.
    """
    if strategy == "linear_primitive":
        return _period_linear(system)
    if strategy not in {"orbit_lcm", "brute_force"}:
        raise ValueError(f"unknown period strategy {strategy!r}")
    size = system.p**system.r
    if size > state_space_cap:
        logger.warning("State space %d exceeds cap %d; period unknown", size, state_space_cap)
        return PeriodResult(None, strategy, state_space_cap)
    if strategy == "orbit_lcm":
        return PeriodResult(_period_orbits(system), strategy)
    return PeriodResult(_cycle_lcm(transition_table(system)), strategy)


__all__ = [
    "DifferenceBasis",
    "DiffSystem",
    "InverseResult",
    "InverseStatus",
    "NotInvertibleError",
    "PeriodResult",
    "StateVec",
    "Stepper",
    "SystemDefinitionError",
    "TermCapExceeded",
    "backstep",
    "companion_polynomial",
    "endo_iterate",
    "invert_system",
    "period",
    "reverse_windows",
    "simulate",
    "subsystem_split",
    "trajectory",
    "transition_ideal",
    "transition_table",
]
