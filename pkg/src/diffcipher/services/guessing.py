"""Guess-and-determine campaigns.

Each guess fixes the guess variables to one assignment and asks the
Groebner engine whether the remaining system has a unique solution. Guesses
run in batches over an optional process pool; a batch is tallied in index
order up to the first solved guess, so reports do not depend on the worker
count.
"""

from __future__ import annotations

import asyncio
import itertools
import logging
import statistics
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from diffcipher.algebra.diffpoly import DifferenceRing, Poly, Var
from diffcipher.algebra.groebner import SolverTimeout, solve_unique
from diffcipher.algebra.linear import gaussian_eliminate
from diffcipher.algebra.system import DEFAULT_TERM_CAP, NotInvertibleError
from diffcipher.core.metrics import CampaignMetrics
from diffcipher.schemas import AttackReport, CostEstimate, GuessTally, SolverStatsModel

from .cipher import StreamCipher, keystream_gen, state_to_hex, system_fingerprint
from .equations import OFFSET_STATE, key_equations, recover_initial, state_from_assignment

logger = logging.getLogger(__name__)

MIN_TIMEOUT_SECONDS = 0.05


class GuessSpecError(ValueError):
    """Raised for invalid guess sets, value lists or shards."""


@dataclass(frozen=True)
class GuessSpec:
    """Variables to guess, the values to try and the shard of them to process.

    Guess ``i`` of the full range assigns variable ``j`` the base-``p`` digit
    of ``i`` at position ``s - 1 - j``; shard ``(k, n)`` takes the indices
    congruent to ``k`` modulo ``n``.
    """

    variables: Tuple[Var, ...]
    p: int = 2
    values: Optional[Tuple[Tuple[int, ...], ...]] = None
    shard: Tuple[int, int] = (0, 1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(Var(*v) for v in self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise GuessSpecError("guess variables must be distinct")
        index, total = self.shard
        if total < 1 or not 0 <= index < total:
            raise GuessSpecError(f"invalid shard {index}/{total}")
        if self.values is not None:
            values = tuple(tuple(int(x) % self.p for x in row) for row in self.values)
            if any(len(row) != len(self.variables) for row in values):
                raise GuessSpecError("every guess value row needs one value per variable")
            object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        if self.values is not None:
            return len(self.values)
        return self.p ** len(self.variables)

    def assignment(self, index: int) -> Tuple[int, ...]:
        if self.values is not None:
            return self.values[index]
        s = len(self.variables)
        return tuple((index // self.p ** (s - 1 - j)) % self.p for j in range(s))

    def indices(self, start: int = 0) -> Iterator[int]:
        """Indices of this shard from position ``start`` of the shard onwards."""
        index, total = self.shard
        for i in range(index + start * total, self.size, total):
            yield i

    def shard_length(self) -> int:
        index, total = self.shard
        return max(0, (self.size - index + total - 1) // total)


@dataclass
class GuessResult:
    index: int
    values: Tuple[int, ...]
    status: str
    assignment: Optional[Dict[Var, int]] = None
    seconds: float = 0.0
    stats: Dict[str, object] = field(default_factory=dict)


def solve_guess(
    generators: Sequence[Poly],
    variables: Sequence[Var],
    guess_vars: Sequence[Var],
    values: Sequence[int],
    *,
    ring: DifferenceRing,
    as_ideal: bool = False,
    eliminate_linear: bool = True,
    timeout: Optional[float] = None,
    degree_bound: Optional[int] = None,
    index: int = 0,
) -> GuessResult:
    """Solves the generators under one guess.

    With ``as_ideal`` the guesses are appended as generators ``x - a``;
    otherwise they are substituted first and affine generators are
    eliminated before the Groebner run.
    """
    started = time.monotonic()
    deadline = started + timeout if timeout else None
    fixed = {v: int(a) % ring.p for v, a in zip(guess_vars, values)}

    def done(
        status: str,
        assignment: Optional[Dict[Var, int]] = None,
        stats: Optional[Dict[str, object]] = None,
    ) -> GuessResult:
        seconds = time.monotonic() - started
        return GuessResult(index, tuple(values), status, assignment, seconds, stats or {})

    if as_ideal:
        gens = list(generators) + [ring.gen(v) - ring.const(a) for v, a in fixed.items()]
        try:
            outcome = solve_unique(gens, variables, deadline=deadline, degree_bound=degree_bound, ring=ring)
        except SolverTimeout:
            return done("timeout")
        stats = outcome.basis.stats.as_dict() if outcome.basis and outcome.basis.stats else {}
        if outcome.is_unique:
            return done("solved", dict(outcome.assignment or {}), stats)
        return done(outcome.status.value, None, stats)

    constants = {v: ring.const(a) for v, a in fixed.items()}
    gens: List[Poly] = []
    for g in generators:
        present = {v: constants[v] for v in g.variables() if v in constants}
        h = g.substitute(present) if present else g
        if h.is_zero:
            continue
        if h.is_constant():
            return done("inconsistent")
        gens.append(h)
    remaining = [v for v in variables if v not in fixed]
    pivots: Dict[Var, Poly] = {}
    if eliminate_linear:
        linear = [g for g in gens if g.degree() <= 1]
        if linear:
            reduced = gaussian_eliminate(linear, ring=ring)
            if not reduced.consistent:
                return done("inconsistent")
            pivots = reduced.substitutions()
            rest = []
            for g in gens:
                if g.degree() <= 1:
                    continue
                present = {v: pivots[v] for v in g.variables() if v in pivots}
                h = g.substitute(present) if present else g
                if h.is_zero:
                    continue
                if h.is_constant():
                    return done("inconsistent")
                rest.append(h)
            gens = rest
            remaining = [v for v in remaining if v not in pivots]
    assignment: Dict[Var, int] = dict(fixed)
    stats: Dict[str, object] = {}
    if remaining:
        if not gens:
            return done("indeterminate")
        try:
            outcome = solve_unique(gens, remaining, deadline=deadline, degree_bound=degree_bound, ring=ring)
        except SolverTimeout:
            return done("timeout")
        stats = outcome.basis.stats.as_dict() if outcome.basis and outcome.basis.stats else {}
        if not outcome.is_unique:
            return done(outcome.status.value, None, stats)
        assignment.update(outcome.assignment or {})
    for v, expr in pivots.items():
        assignment[v] = int(expr.evaluate(assignment))
    return done("solved", assignment, stats)


class GuessPool:
    """Runs guesses in batches of ``workers`` and keeps campaign statistics.

    Per-guess timeouts are ``timeout_factor`` times the rolling median of
    completed solves, and ``timeout_floor_ms`` until a median exists. A floor
    of zero disables timeouts. ``degree_bound`` caps the sugar degree of the
    pairs each solve considers.
    """

    def __init__(
        self,
        workers: int = 1,
        *,
        timeout_factor: float = 10.0,
        timeout_floor_ms: int = 2000,
        metrics: Optional[CampaignMetrics] = None,
        executor: Optional[Executor] = None,
        window: int = 64,
        degree_bound: Optional[int] = None,
    ) -> None:
        if workers < 1:
            raise GuessSpecError("at least one worker is required")
        self.workers = workers
        self.timeout_factor = timeout_factor
        self.timeout_floor = timeout_floor_ms / 1000.0
        self.metrics = metrics or CampaignMetrics()
        self._executor = executor
        self._owns_executor = False
        self._times: List[float] = []
        self._window = window
        self.degree_bound = degree_bound
        self._lock = asyncio.Lock()
        self._found = asyncio.Event()
        self.tallies = GuessTally()
        self.solver = SolverStatsModel()
        self._processed = 0

    def _ensure_executor(self) -> Optional[Executor]:
        if self.workers > 1 and self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
            self._owns_executor = True
        return self._executor

    def close(self) -> None:
        if self._owns_executor and self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    def current_timeout(self) -> Optional[float]:
        """Seconds allowed for the next guess; ``None`` when timeouts are off."""
        if self.timeout_floor <= 0:
            return None
        if not self._times:
            return self.timeout_floor
        median = statistics.median(self._times[-self._window :])
        return max(self.timeout_factor * median, MIN_TIMEOUT_SECONDS)

    async def _record(self, result: GuessResult) -> None:
        async with self._lock:
            self.tallies.add(result.status)
            self.solver.merge(result.stats)
            self.metrics.observe(result.status, result.seconds)
            if result.status != "timeout":
                self._times.append(result.seconds)
            self._processed += 1
            logger.debug("Guess %d: %s in %.3fs", result.index, result.status, result.seconds)

    async def _solve(self, task: Callable[..., GuessResult], **kwargs: Any) -> GuessResult:
        executor = self._ensure_executor()
        if executor is None:
            return task(**kwargs)
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(executor, _call, task, kwargs)

    async def run(
        self,
        generators: Sequence[Poly],
        variables: Sequence[Var],
        spec: GuessSpec,
        *,
        ring: DifferenceRing,
        start: int = 0,
        as_ideal: bool = False,
        budget_ms: Optional[int] = None,
        verify: Optional[Callable[[Dict[Var, int]], bool]] = None,
        progress: Optional[Callable[[int, GuessTally], None]] = None,
    ) -> "CampaignResult":
        """Processes the shard of ``spec`` from shard position ``start``.

        Stops at the first solved guess that ``verify`` accepts. A solved
        guess that ``verify`` rejects is tallied as ``indeterminate``.
        """
        started = time.monotonic()
        position = start
        pending = spec.indices(start)
        found: Optional[GuessResult] = None
        aborted = False
        while True:
            if budget_ms is not None and (time.monotonic() - started) * 1000 > budget_ms:
                aborted = True
                break
            batch = list(itertools.islice(pending, self.workers))
            if not batch:
                break
            timeout = self.current_timeout()
            results = await asyncio.gather(
                *(
                    self._solve(
                        solve_guess,
                        generators=generators,
                        variables=variables,
                        guess_vars=spec.variables,
                        values=spec.assignment(i),
                        ring=ring,
                        as_ideal=as_ideal,
                        timeout=timeout,
                        degree_bound=self.degree_bound,
                        index=i,
                    )
                    for i in batch
                )
            )
            for result in results:
                if result.status == "solved" and verify is not None and not verify(result.assignment or {}):
                    logger.warning("Guess %d solved but failed verification", result.index)
                    result.status = "indeterminate"
                await self._record(result)
                position += 1
                if result.status == "solved":
                    found = result
                    self._found.set()
                    break
            if progress is not None:
                progress(position, self.tallies)
            if found is not None:
                break
        elapsed = time.monotonic() - started
        if found is not None:
            outcome = "recovered"
        elif aborted:
            outcome = "aborted"
        else:
            outcome = "exhausted"
        logger.info(
            "Campaign %s after %d guesses (%.2fs): %s",
            outcome,
            self._processed,
            elapsed,
            self.tallies.model_dump(),
        )
        return CampaignResult(outcome, found, position, elapsed, list(self._times))

    def get_pool_stats(self) -> Dict[str, Any]:
        return {
            "workers": self.workers,
            "processed": self._processed,
            "found": self._found.is_set(),
            "tallies": self.tallies.model_dump(),
            "current_timeout": self.current_timeout(),
            "median_seconds": statistics.median(self._times) if self._times else None,
        }


def _call(task: Callable[..., GuessResult], kwargs: Dict[str, Any]) -> GuessResult:
    return task(**kwargs)


@dataclass
class CampaignResult:
    outcome: str
    found: Optional[GuessResult]
    next_index: int
    elapsed: float
    times: List[float]

    @property
    def mean_seconds(self) -> float:
        return statistics.fmean(self.times) if self.times else 0.0


# Stream attack -------------------------------------------------------------------------


def bivium_guess_vars() -> Tuple[Var, ...]:
    """``x(68), x(71), .., x(92)``, ``y(2), y(5), .., y(80)``, ``y(3)`` and ``y(4)``."""
    xs = [Var(0, c) for c in range(68, 93, 3)]
    ys = [Var(1, c) for c in range(2, 81, 3)]
    return tuple(xs + ys + [Var(1, 3), Var(1, 4)])


def format_state(state: Sequence[int], p: int, *, bit_order: str = "msb") -> str:
    if p == 2:
        return state_to_hex(state, bit_order=bit_order)
    return ",".join(str(int(v)) for v in state)


async def attack_stream(
    cipher: StreamCipher,
    keystream: Sequence[int],
    spec: GuessSpec,
    *,
    pool: GuessPool,
    target: str = OFFSET_STATE,
    as_ideal: bool = False,
    start: int = 0,
    budget_ms: Optional[int] = None,
    term_cap: int = DEFAULT_TERM_CAP,
    bit_order: str = "msb",
    progress: Optional[Callable[[int, GuessTally], None]] = None,
) -> AttackReport:
    """Guess-and-determine on the key equations of an observed keystream.

    Raises:
        GuessSpecError: When a guess variable is not a state variable.
    """
    system = cipher.system
    eqs = key_equations(cipher, keystream, target, term_cap=term_cap)
    known = set(eqs.variables)
    for v in spec.variables:
        if v not in known:
            raise GuessSpecError(f"{system.ring.var_name(v)} is not a state variable")
    first = 0 if target == OFFSET_STATE else cipher.offset

    def verify(assignment: Dict[Var, int]) -> bool:
        state = state_from_assignment(cipher, assignment)
        if state is None:
            return False
        return keystream_gen(cipher, state, first, eqs.count) == list(eqs.keystream)

    result = await pool.run(
        list(eqs.generators),
        eqs.variables,
        spec,
        ring=system.ring,
        start=start,
        as_ideal=as_ideal,
        budget_ms=budget_ms,
        verify=verify,
        progress=progress,
    )
    mean_ms = result.mean_seconds * 1000
    report = AttackReport(
        attack="stream",
        cipher=cipher.name,
        fingerprint=system_fingerprint(system),
        outcome=result.outcome,
        guess_vars=[system.ring.var_name(v) for v in spec.variables],
        shard=f"{spec.shard[0]}/{spec.shard[1]}",
        next_index=result.next_index,
        tallies=pool.tallies.model_copy(),
        elapsed_ms=result.elapsed * 1000,
        solver=pool.solver.model_copy(),
        cost=CostEstimate(
            mean_guess_ms=mean_ms,
            guess_space=max(spec.size, 1),
            expected_campaign_ms=mean_ms * spec.size / 2,
            worst_case_ms=mean_ms * spec.size,
        ),
        notes=[f"key equations: {eqs.stats()}"],
    )
    if result.found is not None and result.found.assignment is not None:
        state = state_from_assignment(cipher, result.found.assignment)
        assert state is not None
        report.state_hex = format_state(state, system.p, bit_order=bit_order)
        report.guess_values_hex = format_state(result.found.values, system.p, bit_order=bit_order)
        if target == OFFSET_STATE:
            try:
                initial = recover_initial(cipher, state)
            except NotInvertibleError:
                report.notes.append("initial state not recovered: system not invertible")
            else:
                report.initial_state_hex = format_state(initial, system.p, bit_order=bit_order)
        else:
            report.initial_state_hex = report.state_hex
    return report


__all__ = [
    "CampaignResult",
    "GuessPool",
    "GuessResult",
    "GuessSpec",
    "GuessSpecError",
    "attack_stream",
    "bivium_guess_vars",
    "format_state",
    "solve_guess",
]
