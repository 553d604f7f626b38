"""Buchberger engine over GF(p) with implicit field equations.

The engine works on a private copy of the generators in which the bounded
variables are renumbered ``0..N-1`` following the compiled ordering blocks
(greatest variable first). Over GF(2) a monomial is then a bitmask and the
ordering becomes an integer key, so sorting and divisibility tests are plain
integer operations.

Field equations ``x^p - x`` are never materialized. Multiplication reduces
exponents on the fly and, for every variable ``x`` in a leading monomial
``x^e * u``, the pair with ``x^p - x`` is represented by the polynomial
``x^(p-e) * g`` computed in the quotient ring.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .diffpoly import DifferenceRing, Monomial, Poly, Var, collect_variables
from .ordering import BoundedDegRevLex, InnerOrder, OrderingSpec

logger = logging.getLogger(__name__)


class SolverTimeout(TimeoutError):
    """Raised when a Groebner computation passes its deadline."""


class BasisStatus(str, enum.Enum):
    RAW = "raw"
    GROEBNER = "groebner"
    REDUCED = "reduced_groebner"


class SolveStatus(str, enum.Enum):
    UNIQUE = "unique"
    INCONSISTENT = "inconsistent"
    INDETERMINATE = "indeterminate"


@dataclass
class SolverStats:
    pairs_created: int = 0
    pairs_reduced: int = 0
    zero_reductions: int = 0
    product_criterion: int = 0
    chain_criterion: int = 0
    field_pairs: int = 0
    reduction_steps: int = 0
    max_basis: int = 0
    degree_skips: int = 0
    early_stop: Optional[str] = None
    elapsed: float = 0.0

    def as_dict(self) -> Dict[str, object]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class BuchbergerOptions:
    early_stop_on_all_variables: bool = False
    early_stop_on_one: bool = True
    degree_bound: Optional[int] = None
    deadline: Optional[float] = None
    """Absolute :func:`time.monotonic` value after which the run aborts."""
    reduce: bool = True


@dataclass(frozen=True)
class GBasis:
    generators: Tuple[Poly, ...]
    ordering: OrderingSpec
    status: BasisStatus
    ring: DifferenceRing
    variables: Tuple[Var, ...] = ()
    stats: Optional[SolverStats] = field(default=None, compare=False)

    def is_one(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def leading_monomials(self) -> Tuple[Monomial, ...]:
        return tuple(g.leading_monomial(self.ordering) for g in self.generators)

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    assignment: Optional[Dict[Var, int]] = None
    basis: Optional[GBasis] = None

    @property
    def is_unique(self) -> bool:
        return self.status is SolveStatus.UNIQUE


# Engine ---------------------------------------------------------------------------


class _Elem:
    __slots__ = ("terms", "lm", "idx", "degree", "active")

    def __init__(self, terms: Dict[int, int], lm: int, idx: int, degree: int) -> None:
        self.terms = terms
        self.lm = lm
        self.idx = idx
        self.degree = degree
        self.active = True


class _Engine:
    """Polynomial arithmetic on renumbered variables with integer order keys."""

    def __init__(self, ring: DifferenceRing, ordering: OrderingSpec, variables: Sequence[Var]) -> None:
        self.ring = ring
        self.p = ring.p
        self.ordering = ordering
        blocks = ordering.blocks(ring, variables)
        self.local_vars: List[Var] = [v for block in blocks for v in block.variables]
        self.nvars = len(self.local_vars)
        self.slot_to_local: Dict[int, int] = {ring.slot(v): i for i, v in enumerate(self.local_vars)}
        self.w = 1 if self.p == 2 else (self.p - 1).bit_length()
        self.emask = (1 << self.w) - 1
        self._blocks: List[Tuple[int, int, InnerOrder]] = []
        start = 0
        for block in blocks:
            self._blocks.append((start, len(block.variables), block.inner))
            start += len(block.variables)
        self._key_cache: Dict[int, int] = {}
        self._to_local_cache: Dict[int, int] = {}
        self.stats = SolverStats()
        self.deadline: Optional[float] = None

    # Conversion ----------------------------------------------------------------

    def to_local(self, f: Poly) -> Dict[int, int]:
        out: Dict[int, int] = {}
        cache = self._to_local_cache
        for m, c in f.terms.items():
            lm = cache.get(m)
            if lm is None:
                lm = self._convert_in(m)
                cache[m] = lm
            out[lm] = c
        return out

    def _convert_in(self, m: int) -> int:
        local = 0
        w = self.w
        try:
            for slot, e in self.ring.exponents(m).items():
                local |= e << (self.slot_to_local[slot] * w)
        except KeyError as exc:
            v = self.ring.slot_var(exc.args[0])
            raise ValueError(f"variable {self.ring.var_name(v)} is not covered by the ordering") from exc
        return local

    def to_poly(self, terms: Mapping[int, int]) -> Poly:
        ring = self.ring
        out: Dict[int, int] = {}
        for lm, c in terms.items():
            m = 0
            for idx, e in self.exps(lm).items():
                m |= e << (ring.slot(self.local_vars[idx]) * ring.width)
            out[m] = c
        return Poly(ring, out)

    # Monomials -----------------------------------------------------------------

    def exps(self, m: int) -> Dict[int, int]:
        out: Dict[int, int] = {}
        w = self.w
        if w == 1:
            while m:
                low = m & -m
                out[low.bit_length() - 1] = 1
                m ^= low
            return out
        mask = self.emask
        while m:
            idx = ((m & -m).bit_length() - 1) // w
            out[idx] = (m >> (idx * w)) & mask
            m &= ~(mask << (idx * w))
        return out

    def encode(self, exps: Mapping[int, int]) -> int:
        m = 0
        w = self.w
        p = self.p
        for idx, e in exps.items():
            if e:
                m |= ((e - 1) % (p - 1) + 1) << (idx * w)
        return m

    def degree(self, m: int) -> int:
        if self.w == 1:
            return m.bit_count()
        return sum(self.exps(m).values())

    def mul(self, a: int, b: int) -> int:
        if self.w == 1 or not a & b:
            return a | b
        exps = self.exps(a)
        for idx, e in self.exps(b).items():
            exps[idx] = exps.get(idx, 0) + e
        return self.encode(exps)

    def divides(self, a: int, b: int) -> bool:
        if self.w == 1:
            return a & b == a
        eb = self.exps(b)
        return all(eb.get(idx, 0) >= e for idx, e in self.exps(a).items())

    def quotient(self, b: int, a: int) -> int:
        """``b / a`` for ``a | b`` (no exponent reduction needed)."""
        if self.w == 1:
            return b ^ a
        exps = self.exps(b)
        for idx, e in self.exps(a).items():
            exps[idx] -= e
        m = 0
        for idx, e in exps.items():
            if e:
                m |= e << (idx * self.w)
        return m

    def lcm(self, a: int, b: int) -> int:
        if self.w == 1:
            return a | b
        exps = self.exps(a)
        for idx, e in self.exps(b).items():
            if e > exps.get(idx, 0):
                exps[idx] = e
        m = 0
        for idx, e in exps.items():
            m |= e << (idx * self.w)
        return m

    def coprime(self, a: int, b: int) -> bool:
        return not a & b

    def key(self, m: int) -> int:
        cached = self._key_cache.get(m)
        if cached is not None:
            return cached
        if self.w == 1:
            value = self._boolean_key(m)
        else:
            value = self._prime_key(m)
        self._key_cache[m] = value
        return value

    def _boolean_key(self, m: int) -> int:
        if len(self._blocks) == 1 and self._blocks[0][2] is InnerOrder.DEGREVLEX:
            n = self.nvars
            return (m.bit_count() << n) | (m ^ ((1 << n) - 1))
        acc = 0
        for start, size, inner in self._blocks:
            mask = (1 << size) - 1
            bits = (m >> start) & mask
            if inner is InnerOrder.DEGREVLEX:
                width = size + size.bit_length()
                part = (bits.bit_count() << size) | (bits ^ mask)
            else:
                width = size
                part = int(format(bits, f"0{size}b")[::-1], 2) if size else 0
            acc = (acc << width) | part
        return acc

    def _prime_key(self, m: int) -> int:
        p = self.p
        exps = self.exps(m)
        acc = 0
        for start, size, inner in self._blocks:
            digits = [exps.get(start + i, 0) for i in range(size)]
            if inner is InnerOrder.DEGREVLEX:
                part = sum(digits)
                # smallest variable is the most significant digit
                for e in reversed(digits):
                    part = part * p + (p - 1 - e)
                span = (size * (p - 1) + 1) * p**size
            else:
                part = 0
                for e in digits:
                    part = part * p + e
                span = p**size
            acc = acc * span + part
        return acc

    def leading(self, terms: Mapping[int, int]) -> int:
        return max(terms, key=self.key)

    # Polynomials ---------------------------------------------------------------

    def mul_term(self, terms: Mapping[int, int], m: int, c: int) -> Dict[int, int]:
        out: Dict[int, int] = {}
        p = self.p
        if self.w == 1:
            for t in terms:
                k = t | m
                if k in out:
                    del out[k]
                else:
                    out[k] = 1
            return out
        for t, v in terms.items():
            k = self.mul(t, m)
            value = (out.get(k, 0) + v * c) % p
            if value:
                out[k] = value
            else:
                out.pop(k, None)
        return out

    def add_into(self, target: Dict[int, int], terms: Mapping[int, int], c: int = 1) -> None:
        p = self.p
        if p == 2:
            for t in terms:
                if t in target:
                    del target[t]
                else:
                    target[t] = 1
            return
        for t, v in terms.items():
            value = (target.get(t, 0) + v * c) % p
            if value:
                target[t] = value
            else:
                target.pop(t, None)

    def monic(self, terms: Dict[int, int], lm: int) -> Dict[int, int]:
        lc = terms[lm]
        if lc == 1:
            return terms
        inv = pow(lc, self.p - 2, self.p)
        return {t: (v * inv) % self.p for t, v in terms.items()}

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout("Groebner computation exceeded its deadline")

    def reduce(self, terms: Mapping[int, int], reducers: "_ReducerIndex", skip: Optional[_Elem] = None) -> Dict[int, int]:
        """Full normal form of ``terms`` modulo the reducer set."""
        p = self.p
        f = dict(terms)
        key = self.key
        heap = [(-key(t), t) for t in f]
        heapq.heapify(heap)
        result: Dict[int, int] = {}
        steps = 0
        while heap:
            _, m = heapq.heappop(heap)
            c = f.get(m)
            if c is None:
                continue
            g = reducers.find(m, skip)
            if g is None:
                result[m] = c
                del f[m]
                continue
            q = self.quotient(m, g.lm)
            factor = (-c) % p
            for t, v in g.terms.items():
                k = q | t if self.w == 1 else self.mul(q, t)
                value = (f.get(k, 0) + factor * v) % p
                if value:
                    if k not in f:
                        heapq.heappush(heap, (-key(k), k))
                    f[k] = value
                else:
                    f.pop(k, None)
            steps += 1
            if steps & 0xFF == 0:
                self.check_deadline()
        self.stats.reduction_steps += steps
        return result


class _ReducerIndex:
    """Active basis elements, with single-variable leading terms indexed."""

    def __init__(self, engine: _Engine) -> None:
        self.engine = engine
        self.by_variable: Dict[int, _Elem] = {}
        self.others: List[_Elem] = []

    def add(self, elem: _Elem) -> None:
        if self.engine.w == 1 and elem.degree == 1:
            self.by_variable.setdefault(elem.lm, elem)
            if self.by_variable[elem.lm] is elem:
                return
        self.others.append(elem)
        self.others.sort(key=lambda e: (e.degree, len(e.terms)))

    def remove(self, elem: _Elem) -> None:
        if self.by_variable.get(elem.lm) is elem:
            del self.by_variable[elem.lm]
        elif elem in self.others:
            self.others.remove(elem)

    def find(self, m: int, skip: Optional[_Elem] = None) -> Optional[_Elem]:
        engine = self.engine
        if self.by_variable:
            rest = m
            while rest:
                low = rest & -rest
                g = self.by_variable.get(low)
                if g is not None and g is not skip:
                    return g
                rest ^= low
        divides = engine.divides
        for g in self.others:
            if g is not skip and divides(g.lm, m):
                return g
        return None

    def elements(self) -> List[_Elem]:
        return list(self.by_variable.values()) + list(self.others)


@dataclass(order=True)
class _Pair:
    sugar: int
    serial: int
    kind: str = field(compare=False)
    first: _Elem = field(compare=False)
    second: Optional[_Elem] = field(compare=False, default=None)
    lcm: int = field(compare=False, default=0)
    variable: int = field(compare=False, default=-1)
    alive: bool = field(compare=False, default=True)


class _Buchberger:
    def __init__(self, engine: _Engine, options: BuchbergerOptions) -> None:
        self.engine = engine
        self.options = options
        self.reducers = _ReducerIndex(engine)
        self.basis: List[_Elem] = []
        self.pairs: List[_Pair] = []
        self.serial = itertools.count()
        self.one: Optional[_Elem] = None
        self.incomplete = False

    # Pair bookkeeping ------------------------------------------------------------

    def _push(self, pair: _Pair) -> None:
        heapq.heappush(self.pairs, pair)
        self.engine.stats.pairs_created += 1

    def _field_pairs(self, h: _Elem) -> None:
        engine = self.engine
        if h.degree == 1:
            # x - t with t free of x: x^(p-1) * (x - t) reduces to t - t^p = 0
            return
        for idx, e in engine.exps(h.lm).items():
            extra = engine.p - e
            self._push(
                _Pair(h.degree + extra, next(self.serial), "field", h, variable=idx)
            )
            engine.stats.field_pairs += 1

    def _update(self, h: _Elem) -> None:
        """Gebauer-Moeller update of the pair queue and the active basis."""
        engine = self.engine
        lcm = engine.lcm
        divides = engine.divides
        candidates = [(g, lcm(g.lm, h.lm)) for g in self.basis if g.active]
        kept: List[Tuple[_Elem, int]] = []
        while candidates:
            g1, l1 = candidates.pop(0)
            if engine.coprime(g1.lm, h.lm):
                kept.append((g1, l1))
                continue
            if any(divides(l2, l1) for _, l2 in candidates) or any(divides(l2, l1) for _, l2 in kept):
                engine.stats.chain_criterion += 1
                continue
            kept.append((g1, l1))
        for pair in self.pairs:
            if not pair.alive or pair.kind != "s":
                continue
            if (
                divides(h.lm, pair.lcm)
                and lcm(pair.first.lm, h.lm) != pair.lcm
                and lcm(pair.second.lm, h.lm) != pair.lcm
            ):
                pair.alive = False
                engine.stats.chain_criterion += 1
        for g, l in kept:
            if engine.coprime(g.lm, h.lm):
                engine.stats.product_criterion += 1
                continue
            self._push(_Pair(engine.degree(l), next(self.serial), "s", g, h, lcm=l))
        for g in self.basis:
            if g.active and divides(h.lm, g.lm):
                g.active = False
                self.reducers.remove(g)
        self.basis.append(h)
        self.reducers.add(h)
        self._field_pairs(h)
        active = sum(1 for g in self.basis if g.active)
        engine.stats.max_basis = max(engine.stats.max_basis, active)

    def add(self, terms: Dict[int, int]) -> None:
        engine = self.engine
        lm = engine.leading(terms)
        terms = engine.monic(terms, lm)
        elem = _Elem(terms, lm, len(self.basis), engine.degree(lm))
        if lm == 0:
            self.one = elem
            self.basis.append(elem)
            return
        self._update(elem)

    # Main loop ---------------------------------------------------------------------

    def _spoly(self, pair: _Pair) -> Dict[int, int]:
        engine = self.engine
        if pair.kind == "field":
            g = pair.first
            e = engine.exps(g.lm)[pair.variable]
            factor = engine.encode({pair.variable: engine.p - e})
            return engine.mul_term(g.terms, factor, 1)
        g1, g2 = pair.first, pair.second
        assert g2 is not None
        s = engine.mul_term(g1.terms, engine.quotient(pair.lcm, g1.lm), 1)
        engine.add_into(s, engine.mul_term(g2.terms, engine.quotient(pair.lcm, g2.lm), 1), engine.p - 1)
        return s

    def _all_variables_leading(self) -> bool:
        engine = self.engine
        if engine.w == 1:
            return len(self.reducers.by_variable) == engine.nvars
        return all(
            self.reducers.find(1 << (i * engine.w)) is not None for i in range(engine.nvars)
        )

    def run(self, inputs: Sequence[Dict[int, int]]) -> None:
        engine = self.engine
        options = self.options
        ordered = sorted(
            (f for f in inputs if f), key=lambda f: (engine.degree(engine.leading(f)), len(f))
        )
        for f in ordered:
            engine.check_deadline()
            h = engine.reduce(f, self.reducers)
            if h:
                self.add(h)
                if self.one is not None and options.early_stop_on_one:
                    engine.stats.early_stop = "one"
                    return
        if options.early_stop_on_all_variables and self._all_variables_leading():
            engine.stats.early_stop = "all_variables"
            return
        while self.pairs:
            pair = heapq.heappop(self.pairs)
            if not pair.alive:
                continue
            engine.check_deadline()
            if options.degree_bound is not None and pair.sugar > options.degree_bound:
                engine.stats.degree_skips += 1
                self.incomplete = True
                continue
            engine.stats.pairs_reduced += 1
            h = engine.reduce(self._spoly(pair), self.reducers)
            if not h:
                engine.stats.zero_reductions += 1
                continue
            self.add(h)
            if self.one is not None and options.early_stop_on_one:
                engine.stats.early_stop = "one"
                return
            if options.early_stop_on_all_variables and self._all_variables_leading():
                engine.stats.early_stop = "all_variables"
                return

    def result(self) -> List[Dict[int, int]]:
        if self.one is not None:
            return [{0: 1}]
        if self.engine.stats.early_stop == "all_variables":
            return self._close_on_variables()
        return [g.terms for g in self.basis if g.active]

    def _close_on_variables(self) -> List[Dict[int, int]]:
        """Every variable leads a linear element: each remaining element,
        deactivated ones included, must reduce to zero modulo those."""
        engine = self.engine
        linear = [g for g in self.basis if g.active and g.degree == 1]
        index = _ReducerIndex(engine)
        for g in linear:
            index.add(g)
        for g in self.basis:
            if g.degree == 1 and g.active:
                continue
            if engine.reduce(g.terms, index):
                return [{0: 1}]
        return [g.terms for g in linear]


def _interreduce_terms(engine: _Engine, polys: Sequence[Dict[int, int]]) -> List[Dict[int, int]]:
    """Reduced basis from a Groebner basis given as local term maps."""
    elems: List[_Elem] = []
    for f in polys:
        if not f:
            continue
        lm = engine.leading(f)
        if lm == 0:
            return [{0: 1}]
        f = engine.monic(dict(f), lm)
        elems.append(_Elem(f, lm, len(elems), engine.degree(lm)))
    elems.sort(key=lambda e: engine.key(e.lm))
    minimal: List[_Elem] = []
    for e in elems:
        if not any(engine.divides(m.lm, e.lm) for m in minimal):
            minimal.append(e)
    index = _ReducerIndex(engine)
    for e in minimal:
        index.add(e)
    reduced: List[Dict[int, int]] = []
    for e in minimal:
        r = engine.reduce(e.terms, index, skip=e)
        if not r:
            continue
        lm = engine.leading(r)
        if lm == 0:
            return [{0: 1}]
        reduced.append(engine.monic(r, lm))
    reduced.sort(key=lambda f: engine.key(engine.leading(f)))
    return reduced


# Public operations ---------------------------------------------------------------


def _ring_of(polys: Sequence[Poly]) -> DifferenceRing:
    for f in polys:
        return f.ring
    raise ValueError("at least one generator is required")


def buchberger(
    gens: Sequence[Poly],
    ordering: OrderingSpec,
    options: Optional[BuchbergerOptions] = None,
    *,
    variables: Optional[Sequence[Var]] = None,
    ring: Optional[DifferenceRing] = None,
) -> GBasis:
    """Groebner basis of ``<gens> + L`` under ``ordering``.

    Args:
        gens: Generators over a common ring.
        ordering: Monomial ordering; it must cover every variable.
        options: Early-stop switches, degree bound and deadline.
        variables: The bounded variable set; defaults to the variables of
            ``gens`` (or the ordering's own list when it is bounded).
        ring: Needed only when ``gens`` is empty.

    Returns:
        A basis with status ``reduced_groebner`` (``groebner`` when
        ``options.reduce`` is false, ``raw`` when the degree bound cut pairs).

    Raises:
        SolverTimeout: When ``options.deadline`` passes.
    """
    options = options or BuchbergerOptions()
    ring = ring or _ring_of(gens)
    if variables is None:
        variables = ordering.bounded_variables() or collect_variables(gens)
    started = time.monotonic()
    engine = _Engine(ring, ordering, variables)
    engine.deadline = options.deadline
    runner = _Buchberger(engine, options)
    runner.run([engine.to_local(f) for f in gens])
    terms = runner.result()
    status = BasisStatus.RAW if runner.incomplete else BasisStatus.GROEBNER
    if options.reduce and status is not BasisStatus.RAW or engine.stats.early_stop == "all_variables":
        terms = _interreduce_terms(engine, terms)
        if status is BasisStatus.GROEBNER or engine.stats.early_stop == "all_variables":
            status = BasisStatus.REDUCED
    engine.stats.elapsed = time.monotonic() - started
    logger.debug(
        "Buchberger finished: %d generators, status %s, %d pairs reduced, early stop %s",
        len(terms),
        status.value,
        engine.stats.pairs_reduced,
        engine.stats.early_stop,
    )
    return GBasis(
        tuple(engine.to_poly(t) for t in terms),
        ordering,
        status,
        ring,
        tuple(variables),
        engine.stats,
    )


def interreduce(basis: GBasis) -> GBasis:
    """Reduced (monic, mutually normal) form of a basis.

    A ``raw`` basis is only autoreduced and keeps its status.
    """
    if not basis.generators:
        return basis
    engine = _Engine(basis.ring, basis.ordering, basis.variables or collect_variables(basis.generators))
    terms = _interreduce_terms(engine, [engine.to_local(g) for g in basis.generators])
    status = BasisStatus.RAW if basis.status is BasisStatus.RAW else BasisStatus.REDUCED
    return replace(basis, generators=tuple(engine.to_poly(t) for t in terms), status=status)


def normal_form(f: Poly, basis: "GBasis | object") -> Poly:
    """Normal form of ``f`` modulo a basis.

    Difference bases (see :mod:`diffcipher.algebra.system`) reduce over the
    whole infinite variable set; finite bases use the engine.
    """
    reducer = getattr(basis, "normal_form", None)
    if callable(reducer):
        return reducer(f)
    assert isinstance(basis, GBasis)
    if not basis.generators or f.is_zero:
        return f
    variables = set(basis.variables) | set(collect_variables(list(basis.generators) + [f]))
    if basis.ordering.bounded_variables():
        variables = set(basis.ordering.bounded_variables()) | set(f.variables())
    engine = _Engine(f.ring, basis.ordering, sorted(variables))
    index = _ReducerIndex(engine)
    for i, g in enumerate(basis.generators):
        terms = engine.to_local(g)
        lm = engine.leading(terms)
        index.add(_Elem(engine.monic(terms, lm), lm, i, engine.degree(lm)))
    return engine.to_poly(engine.reduce(engine.to_local(f), index))


def solve_unique(
    gens: Sequence[Poly],
    variables: Sequence[Var],
    *,
    deadline: Optional[float] = None,
    degree_bound: Optional[int] = None,
    ring: Optional[DifferenceRing] = None,
) -> SolveOutcome:
    """Classifies the solution set of ``gens`` over the listed variables.

    DegRevLex on ``variables`` is used with both early-stop switches. Pairs
    above ``degree_bound`` are dropped, so a bounded run that does not reach
    a point or ``{1}`` ends indeterminate.
    """
    ring = ring or _ring_of(gens)
    variables = tuple(variables)
    ordering = BoundedDegRevLex(variables)
    options = BuchbergerOptions(
        early_stop_on_all_variables=True,
        early_stop_on_one=True,
        degree_bound=degree_bound,
        deadline=deadline,
    )
    basis = buchberger(gens, ordering, options, variables=variables, ring=ring)
    return classify_basis(basis, variables)


def classify_basis(basis: GBasis, variables: Sequence[Var]) -> SolveOutcome:
    if basis.is_one():
        return SolveOutcome(SolveStatus.INCONSISTENT, basis=basis)
    ring = basis.ring
    p = ring.p
    assignment: Dict[Var, int] = {}
    for g in basis.generators:
        if len(g) > 2 or g.degree() != 1:
            return SolveOutcome(SolveStatus.INDETERMINATE, basis=basis)
        lm = g.leading_monomial(basis.ordering)
        factors = ring.factors(lm)
        if len(factors) != 1 or factors[0][1] != 1 or any(m not in (0, lm) for m in g.monomials()):
            return SolveOutcome(SolveStatus.INDETERMINATE, basis=basis)
        assignment[factors[0][0]] = (-g.constant_term()) % p
    if set(assignment) != set(variables):
        return SolveOutcome(SolveStatus.INDETERMINATE, basis=basis)
    return SolveOutcome(SolveStatus.UNIQUE, assignment=assignment, basis=basis)


def solution_basis(ring: DifferenceRing, assignment: Mapping[Var, int]) -> List[Poly]:
    """Generators ``x - a`` fixing each assigned variable."""
    return [ring.gen(v) - ring.const(a) for v, a in assignment.items()]


__all__ = [
    "BasisStatus",
    "BuchbergerOptions",
    "GBasis",
    "SolveOutcome",
    "SolveStatus",
    "SolverStats",
    "SolverTimeout",
    "buchberger",
    "classify_basis",
    "interreduce",
    "normal_form",
    "solution_basis",
    "solve_unique",
]
