"""Attacks on block ciphers with a periodic key subsystem.

The pair attack replicates the block streams once per plaintext-ciphertext
pair and shares the key streams, then runs guess-and-determine over the
key. The fixed-point attack on KeeLoq uses that the key subsystem has
period 64: a plaintext with ``v(0) = v(64)`` also satisfies ``v(0) = v(512)``,
so after peeling the last 16 rounds the pair is a 64-round pair.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from diffcipher.algebra.diffpoly import DifferenceRing, Poly, Var
from diffcipher.algebra.system import backstep, period, simulate
from diffcipher.schemas import AttackReport, CostEstimate, GuessTally, SolverStatsModel

from .cipher import BlockCipher, CipherError, block_encrypt, block_to_hex, system_fingerprint
from .guessing import GuessPool, GuessSpec, GuessSpecError

logger = logging.getLogger(__name__)

Block = Tuple[int, ...]
Pair = Tuple[Block, Block]


def _pair_suffix(index: int) -> str:
    letters = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        letters = chr(ord("a") + rem) + letters
    return letters


@dataclass(frozen=True)
class PairSystem:
    """Generators of the replicated system after fixing the known blocks."""

    ring: DifferenceRing
    generators: Tuple[Poly, ...]
    variables: Tuple[Var, ...]
    key_variables: Tuple[Var, ...]


def pair_equations(cipher: BlockCipher, pairs: Sequence[Pair], effective_t: int) -> PairSystem:
    """Replicated equations for pairs ``(v(0), v(effective_t))`` under one key.

    Block stream ``x`` of pair ``i`` becomes stream ``x_a``, ``x_b``, ...;
    key streams are shared. Known blocks are substituted as constants.

    Raises:
        CipherError: For block length mismatches or a nonpositive clock.
    """
    if not pairs:
        raise CipherError("at least one pair is required")
    if effective_t < 1:
        raise CipherError("effective clock must be positive")
    system = cipher.system
    m = cipher.split
    base = system.ring
    for plaintext, ciphertext in pairs:
        if len(plaintext) != cipher.block_length or len(ciphertext) != cipher.block_length:
            raise CipherError(f"blocks must have length {cipher.block_length}")
    names = list(base.streams[:m])
    for s in range(len(pairs)):
        names.extend(f"{name}_{_pair_suffix(s)}" for name in base.streams[m:])
    ring = DifferenceRing(base.field, tuple(names))
    nblock = system.n - m

    def target(pair: int) -> Callable[[Var], Var]:
        def rename(v: Var) -> Var:
            if v.stream < m:
                return v
            return Var(m + pair * nblock + (v.stream - m), v.clock)

        return rename

    generators: List[Poly] = []
    max_key_clock = -1
    for s in range(len(pairs)):
        rename = target(s)
        for j in range(m, system.n):
            r = system.orders[j]
            f = system.updates[j].rename(ring, rename)
            head = Var(m + s * nblock + (j - m), r)
            for t in range(effective_t):
                shifted = f.shift(t)
                for v in shifted.variables():
                    if v.stream < m:
                        max_key_clock = max(max_key_clock, v.clock)
                generators.append(ring.gen(Var(head.stream, r + t)) - shifted)
    for i in range(m):
        r = system.orders[i]
        f = system.updates[i].rename(ring, lambda v: v)
        for c in range(r, max_key_clock + 1):
            generators.append(ring.gen(Var(i, c)) - f.shift(c - r))

    known: Dict[Var, Poly] = {}
    for s, (plaintext, ciphertext) in enumerate(pairs):
        pos = 0
        for j in range(m, system.n):
            stream = m + s * nblock + (j - m)
            for c in range(system.orders[j]):
                known[Var(stream, c)] = ring.const(plaintext[pos])
                known[Var(stream, effective_t + c)] = ring.const(ciphertext[pos])
                pos += 1
    fixed: List[Poly] = []
    for g in generators:
        present = {v: known[v] for v in g.variables() if v in known}
        h = g.substitute(present) if present else g
        if not h.is_zero:
            fixed.append(h)
    key_vars = tuple(Var(i, c) for i in range(m) for c in range(system.orders[i]))
    variables = set(key_vars)
    for g in fixed:
        variables.update(g.variables())
    ordered = tuple(sorted(variables, key=lambda v: (v.stream, v.clock)))
    logger.debug(
        "Pair system: %d pairs, %d generators, %d variables", len(pairs), len(fixed), len(ordered)
    )
    return PairSystem(ring, tuple(fixed), ordered, key_vars)


def format_key(key: Sequence[int], p: int) -> str:
    """Integer hex over GF(2), bit ``j`` being ``k(j)``; comma-separated values otherwise."""
    if p == 2:
        return block_to_hex(key)
    return ",".join(str(int(v)) for v in key)


def _key_from_assignment(cipher: BlockCipher, assignment: Dict[Var, int]) -> Optional[Block]:
    try:
        return tuple(
            int(assignment[Var(i, c)]) for i in range(cipher.split) for c in range(cipher.system.orders[i])
        )
    except KeyError:
        return None


def _encrypts_all(cipher: BlockCipher, key: Sequence[int], pairs: Sequence[Pair], rounds: int) -> bool:
    return all(
        tuple(block_encrypt(cipher, key, plaintext, rounds=rounds)) == tuple(ciphertext)
        for plaintext, ciphertext in pairs
    )


async def block_pair_attack(
    cipher: BlockCipher,
    pairs: Sequence[Pair],
    effective_t: int,
    guess: GuessSpec,
    *,
    pool: Optional[GuessPool] = None,
    as_ideal: bool = False,
    budget_ms: Optional[int] = None,
) -> AttackReport:
    """Recovers the key from pairs ``(v(0), v(effective_t))``.

    A recovered key re-encrypts every pair to ``effective_t``.
    """
    report, _ = await _pair_attack(
        cipher, pairs, effective_t, guess, pool=pool, as_ideal=as_ideal, budget_ms=budget_ms
    )
    return report


async def _pair_attack(
    cipher: BlockCipher,
    pairs: Sequence[Pair],
    effective_t: int,
    guess: GuessSpec,
    *,
    pool: Optional[GuessPool] = None,
    as_ideal: bool = False,
    budget_ms: Optional[int] = None,
) -> Tuple[AttackReport, Optional[Block]]:
    if effective_t > cipher.final:
        raise CipherError(f"effective clock {effective_t} exceeds the cipher's {cipher.final}")
    for v in guess.variables:
        if v.stream >= cipher.split:
            raise GuessSpecError("guess variables must be key variables")
    built = pair_equations(cipher, pairs, effective_t)
    pool = pool or GuessPool()

    def verify(assignment: Dict[Var, int]) -> bool:
        key = _key_from_assignment(cipher, assignment)
        return key is not None and _encrypts_all(cipher, key, pairs, effective_t)

    result = await pool.run(
        list(built.generators),
        built.variables,
        guess,
        ring=built.ring,
        as_ideal=as_ideal,
        budget_ms=budget_ms,
        verify=verify,
    )
    report = AttackReport(
        attack="block_pair",
        cipher=cipher.name,
        fingerprint=system_fingerprint(cipher.system),
        outcome=result.outcome,
        guess_vars=[built.ring.var_name(v) for v in guess.variables],
        shard=f"{guess.shard[0]}/{guess.shard[1]}",
        next_index=result.next_index,
        tallies=pool.tallies.model_copy(),
        elapsed_ms=result.elapsed * 1000,
        solver=pool.solver.model_copy(),
        notes=[f"{len(pairs)} pairs at clock {effective_t}, {len(built.variables)} variables"],
    )
    key = None
    if result.found is not None and result.found.assignment is not None:
        key = _key_from_assignment(cipher, result.found.assignment)
        if key is not None:
            report.key_hex = format_key(key, cipher.system.p)
    return report, key


# Fixed points ------------------------------------------------------------------------------


def fixed_point_search(
    oracle: Callable[[Block], Sequence[int]],
    length: int,
    *,
    p: int = 2,
    budget: int = 1 << 16,
    rng: Optional[np.random.Generator] = None,
) -> List[Block]:
    """Blocks ``v`` with ``oracle(v) = v``.

    The whole space is searched when it has at most ``budget`` blocks;
    otherwise ``budget`` distinct random blocks are tried.
    """
    size = p**length
    found: List[Block] = []

    def candidates() -> Iterable[Block]:
        if size <= budget:
            for index in range(size):
                yield tuple((index // p**j) % p for j in range(length))
            return
        generator = rng or np.random.default_rng()
        seen = set()
        while len(seen) < budget:
            block = tuple(int(x) for x in generator.integers(0, p, size=length))
            if block in seen:
                continue
            seen.add(block)
            yield block

    for block in candidates():
        if tuple(oracle(block)) == block:
            found.append(block)
    logger.info("Fixed-point search over %d blocks found %d", min(size, budget), len(found))
    return found


def key_period(cipher: BlockCipher) -> int:
    result = period(cipher.key_system, "linear_primitive" if cipher.key_system.n == 1 else "orbit_lcm")
    if result.period is None:
        raise CipherError("key subsystem period is unknown")
    return result.period


class _RoundModel:
    """One key stream rotating with period ``d`` and one block stream
    ``x(r) = c * k(0) + g(x(0), .., x(r - 1))``."""

    def __init__(self, cipher: BlockCipher) -> None:
        system = cipher.system
        if cipher.split != 1 or system.n != 2:
            raise CipherError("periodic states need one key stream and one block stream")
        ring = system.ring
        d = system.orders[0]
        if system.updates[0] != ring.gen(Var(0, 0)):
            raise CipherError("the key stream must rotate, k(d) = k(0)")
        f = system.updates[1]
        key_terms = [(m, c) for m, c in f.terms.items() if m and any(v.stream == 0 for v in ring.mono_variables(m))]
        if len(key_terms) != 1 or key_terms[0][0] != ring.monomial([Var(0, 0)]):
            raise CipherError("the block update must contain k(0) linearly and no other key variable")
        self.p = system.p
        self.d = d
        self.r = system.orders[1]
        if self.r > d:
            raise CipherError("block order must not exceed the key period")
        self.c = key_terms[0][1]
        self.c_inv = pow(self.c, self.p - 2, self.p)
        g = f - ring.term(self.c, key_terms[0][0])
        self.terms = [
            (c, tuple((v.clock, e) for v, e in ring.factors(m))) for m, c in g.terms.items()
        ]

    def _g(self, xs: np.ndarray, t: int) -> np.ndarray:
        p = self.p
        acc = np.zeros(xs.shape[0], dtype=np.int64)
        for coeff, factors in self.terms:
            term = np.full(xs.shape[0], coeff, dtype=np.int64)
            for clock, e in factors:
                term = term * (xs[:, t + clock] ** e % p) % p
            acc = (acc + term) % p
        return acc

    def tails(self, blocks: np.ndarray, head: np.ndarray) -> np.ndarray:
        """Key bits ``k(d - r) .. k(d - 1)`` making each block periodic for ``head``."""
        n = blocks.shape[0]
        p, d, r = self.p, self.d, self.r
        h = d - r
        xs = np.zeros((n, d + r), dtype=np.int64)
        xs[:, :r] = blocks
        keys = np.zeros((n, d), dtype=np.int64)
        keys[:, :h] = head
        for t in range(d):
            gval = self._g(xs, t)
            if t < h:
                xs[:, t + r] = (gval + self.c * keys[:, t]) % p
            else:
                xs[:, t + r] = blocks[:, t + r - d]
                keys[:, t] = self.c_inv * (xs[:, t + r] - gval) % p
        return keys[:, h:]


def construct_periodic_state(
    cipher: BlockCipher,
    rng: np.random.Generator,
    key: Optional[Sequence[int]] = None,
    *,
    budget: int = 1 << 16,
) -> Optional[Tuple[Block, Block]]:
    """A key and block with ``v(0) = v(d)``, ``d`` the key period.

    Without ``key`` the key is solved for: its first ``d - r`` values are
    random and the rest follow from the block. With ``key`` blocks are
    searched, so the result may be ``None``.
    """
    model = _RoundModel(cipher)
    if key is None:
        block = rng.integers(0, model.p, size=(1, model.r))
        head = rng.integers(0, model.p, size=model.d - model.r)
        tail = model.tails(block, head)[0]
        full_key = tuple(int(x) for x in head) + tuple(int(x) for x in tail)
        return full_key, tuple(int(x) for x in block[0])
    key = tuple(key)
    found = fixed_point_search(
        lambda v: block_encrypt(cipher, key, v, rounds=model.d),
        cipher.block_length,
        p=model.p,
        budget=budget,
        rng=rng,
    )
    return (key, found[0]) if found else None


def construct_fixed_point_pairs(
    cipher: BlockCipher,
    rng: np.random.Generator,
    count: int = 2,
    *,
    batch: int = 1 << 15,
    max_batches: int = 64,
) -> Tuple[Block, List[Block]]:
    """A key with ``count`` distinct blocks satisfying ``v(0) = v(d)``.

    Fixes a random key head and samples blocks until ``count`` of them
    demand the same key tail.

    Raises:
        CipherError: When no such key turns up within the sampling budget.
    """
    model = _RoundModel(cipher)
    head = rng.integers(0, model.p, size=model.d - model.r)
    buckets: Dict[bytes, List[Block]] = {}
    samples = 0
    for _ in range(max_batches):
        blocks = rng.integers(0, model.p, size=(batch, model.r))
        tails = model.tails(blocks, head)
        for row, tail in zip(blocks, tails):
            samples += 1
            block = tuple(int(x) for x in row)
            bucket = buckets.setdefault(tail.astype(np.int64).tobytes(), [])
            if block in bucket:
                continue
            bucket.append(block)
            if len(bucket) == count:
                key = tuple(int(x) for x in head) + tuple(int(x) for x in tail)
                logger.info("Found %d periodic blocks for one key after %d samples", count, samples)
                return key, bucket
    raise CipherError(f"no key with {count} periodic blocks in {batch * max_batches} samples")


# KeeLoq ------------------------------------------------------------------------------------


def peel_rounds(
    cipher: BlockCipher, low_key: Sequence[int], ciphertext: Sequence[int], rounds: int
) -> Block:
    """Undoes the last ``rounds`` rounds using only the key values those rounds consume.

    The key at clock ``T`` is rebuilt from ``low_key`` with every other key
    value set to zero; the inverse rounds never read them.
    """
    key = list(low_key) + [0] * (cipher.key_length - len(low_key))
    key_at_t = simulate(cipher.key_system, tuple(key), cipher.final)
    state = backstep(cipher.system, tuple(key_at_t) + tuple(ciphertext), rounds)
    return tuple(state[cipher.key_length :])


async def keeloq_attack(
    cipher: BlockCipher,
    pairs: Sequence[Pair],
    *,
    candidates: Optional[Iterable[Sequence[int]]] = None,
    low_bits: int = 16,
    pool_factory: Callable[[], GuessPool] = GuessPool,
    budget_ms: Optional[int] = None,
    plaintext_fraction: float = 0.6,
) -> AttackReport:
    """Fixed-point attack: for each candidate of the low key values, peel the
    last rounds, keep the candidate when every pair becomes periodic, and solve
    the 64-round pair system with the candidate fixed.

    Without ``candidates`` all ``p^low_bits`` values are tried. The cost
    estimate composes a + b*c*p^l + d: the low-key search over the whole
    candidate space, one full-length encryption per plaintext in the share
    ``plaintext_fraction`` of the block space holding the fixed points, and
    the mean solve.
    """
    if not 0 < plaintext_fraction <= 1:
        raise CipherError("plaintext fraction must lie in (0, 1]")
    started = time.monotonic()
    d = key_period(cipher)
    peel = cipher.final % d
    effective = d
    p = cipher.system.p
    guess_vars = tuple(Var(0, c) for c in range(low_bits))
    if candidates is None:
        candidates = (
            tuple((index >> j) & 1 if p == 2 else (index // p**j) % p for j in range(low_bits))
            for index in range(p**low_bits)
        )
    tallies = GuessTally()
    peel_seconds = solve_seconds = verify_seconds = 0.0
    solved_candidates = 0
    recovered: Optional[Block] = None
    solver = SolverStatsModel()
    aborted = False
    tried = 0
    mark = time.perf_counter()
    for plain, _ in pairs:
        block_encrypt(cipher, (0,) * cipher.key_length, plain)
    encrypt_seconds = (time.perf_counter() - mark) / max(len(pairs), 1)
    for candidate in candidates:
        if budget_ms is not None and (time.monotonic() - started) * 1000 > budget_ms:
            aborted = True
            break
        tried += 1
        candidate = tuple(int(x) % p for x in candidate)
        mark = time.perf_counter()
        peeled = [peel_rounds(cipher, candidate, c, peel) for _, c in pairs]
        peel_seconds += time.perf_counter() - mark
        if any(tuple(v) != tuple(plain) for v, (plain, _) in zip(peeled, pairs)):
            tallies.add("inconsistent")
            continue
        mark = time.perf_counter()
        pool = pool_factory()
        result, key = await _pair_attack(
            cipher,
            [(plain, plain) for plain, _ in pairs],
            effective,
            GuessSpec(guess_vars, p=p, values=(candidate,)),
            pool=pool,
        )
        solve_seconds += time.perf_counter() - mark
        solved_candidates += 1
        solver.merge(result.solver.model_dump())
        if key is None:
            for status in ("inconsistent", "indeterminate", "timeout"):
                if getattr(result.tallies, status):
                    tallies.add(status)
            continue
        mark = time.perf_counter()
        ok = _encrypts_all(cipher, key, pairs, cipher.final)
        verify_seconds += time.perf_counter() - mark
        if ok:
            tallies.add("solved")
            recovered = key
            break
        tallies.add("indeterminate")
    elapsed = time.monotonic() - started
    outcome = "recovered" if recovered else ("aborted" if aborted else "exhausted")
    space = p**low_bits
    mean_peel = peel_seconds / max(tried, 1)
    mean_solve = solve_seconds / solved_candidates if solved_candidates else 0.0
    search = mean_peel * space
    encryptions = encrypt_seconds * plaintext_fraction * p**cipher.block_length
    total = search + encryptions + mean_solve
    cost = CostEstimate(
        mean_guess_ms=(mean_peel + mean_solve) * 1000,
        guess_space=space,
        expected_campaign_ms=(search / 2 + encryptions + mean_solve) * 1000,
        worst_case_ms=total * 1000,
        fixed_point_probability=1 - 1 / math.e,
        plaintext_fraction=plaintext_fraction,
        decomposition_ms={
            "a_search": search * 1000,
            "a_per_candidate": mean_peel * 1000,
            "b_encrypt": encrypt_seconds * 1000,
            "b_c_encryptions": encryptions * 1000,
            "d_solve": mean_solve * 1000,
            "verify": verify_seconds * 1000,
            "total": total * 1000,
        },
    )
    logger.info("KeeLoq attack %s after %d candidates in %.2fs", outcome, tried, elapsed)
    return AttackReport(
        attack="keeloq",
        cipher=cipher.name,
        fingerprint=system_fingerprint(cipher.system),
        outcome=outcome,
        key_hex=format_key(recovered, p) if recovered else None,
        guess_vars=[cipher.system.ring.var_name(v) for v in guess_vars],
        next_index=tried,
        tallies=tallies,
        elapsed_ms=elapsed * 1000,
        cost=cost,
        solver=solver,
        notes=[f"{len(pairs)} pairs, peeled {peel} rounds, effective clock {effective}"],
    )


__all__ = [
    "PairSystem",
    "block_pair_attack",
    "construct_fixed_point_pairs",
    "construct_periodic_state",
    "fixed_point_search",
    "format_key",
    "keeloq_attack",
    "key_period",
    "pair_equations",
    "peel_rounds",
]
