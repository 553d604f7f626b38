import itertools
from concurrent.futures import ThreadPoolExecutor

import pytest

from diffcipher.algebra import SolveStatus, Var, simulate, solve_unique
from diffcipher.algebra.groebner import solution_basis
from diffcipher.services.cipher import keystream_gen, load_state, state_to_hex
from diffcipher.services.equations import key_equations, recover_initial, state_from_assignment
from diffcipher.services.guessing import (
    GuessPool,
    GuessSpec,
    GuessSpecError,
    attack_stream,
    bivium_guess_vars,
    format_state,
    solve_guess,
)

COMBINER_STATE = (1, 0, 1, 1, 0, 1, 1, 0, 0)


def _bits(rng, n):
    return tuple(int(b) for b in rng.integers(0, 2, size=n))


def _consistent_states(cipher, keystream):
    out = []
    for state in itertools.product((0, 1), repeat=cipher.state_length):
        if keystream_gen(cipher, state, cipher.offset, len(keystream)) == list(keystream):
            out.append(state)
    return out


# Guess specs -------------------------------------------------------------------------------


def test_guess_digits_are_most_significant_first():
    spec = GuessSpec([(0, 0), (0, 1), (0, 2)])
    assert spec.variables == (Var(0, 0), Var(0, 1), Var(0, 2))
    assert spec.size == 8
    assert spec.assignment(1) == (0, 0, 1)
    assert spec.assignment(6) == (1, 1, 0)
    assert GuessSpec([(0, 0), (1, 0)], p=3).assignment(5) == (1, 2)


def test_shards_interleave():
    spec = GuessSpec([(0, 0), (0, 1), (0, 2)], shard=(1, 3))
    assert list(spec.indices()) == [1, 4, 7]
    assert list(spec.indices(1)) == [4, 7]
    assert spec.shard_length() == 3
    assert GuessSpec([(0, 0)], shard=(1, 3)).shard_length() == 1


def test_explicit_guess_values():
    spec = GuessSpec([(0, 0), (0, 1)], values=[(1, 3), (0, 0)])
    assert spec.size == 2
    assert spec.assignment(0) == (1, 1)


@pytest.mark.parametrize(
    "params",
    [
        {"variables": [(0, 0), (0, 0)]},
        {"variables": [(0, 0)], "shard": (2, 2)},
        {"variables": [(0, 0)], "shard": (0, 0)},
        {"variables": [(0, 0), (0, 1)], "values": [(1,)]},
    ],
)
def test_invalid_guess_specs(params):
    with pytest.raises(GuessSpecError):
        GuessSpec(**params)


def test_bivium_guess_set():
    guess = bivium_guess_vars()
    assert len(guess) == 38
    assert guess[0] == Var(0, 68) and guess[8] == Var(0, 92)
    assert guess[-2:] == (Var(1, 3), Var(1, 4))


# Single guesses ----------------------------------------------------------------------------


@pytest.fixture
def bivium_setup(bivium_cipher, rng):
    state = _bits(rng, 177)
    keystream = keystream_gen(bivium_cipher, state, 0, 100)
    eqs = key_equations(bivium_cipher, keystream)
    return eqs, bivium_cipher.system.assignment(state)


UNKNOWN = (Var(0, 10), Var(0, 40), Var(1, 20), Var(1, 50), Var(0, 80))


def test_correct_guess_determines_the_rest(bivium_setup):
    eqs, truth = bivium_setup
    guess_vars = [v for v in eqs.variables if v not in UNKNOWN]
    result = solve_guess(
        eqs.generators,
        eqs.variables,
        guess_vars,
        [truth[v] for v in guess_vars],
        ring=eqs.cipher.system.ring,
        index=3,
    )
    assert result.status == "solved"
    assert result.index == 3
    assert result.assignment == truth


def test_wrong_guess_is_inconsistent(bivium_setup):
    eqs, truth = bivium_setup
    guess_vars = [v for v in eqs.variables if v not in UNKNOWN]
    values = [truth[v] for v in guess_vars]
    # x0 only meets guessed variables in the first key equation
    values[guess_vars.index(Var(0, 0))] ^= 1
    result = solve_guess(eqs.generators, eqs.variables, guess_vars, values, ring=eqs.cipher.system.ring)
    assert result.status == "inconsistent"
    assert result.assignment is None


@pytest.mark.parametrize("as_ideal", [False, True])
def test_guess_modes_agree_with_brute_force(combiner, as_ideal):
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 16)
    eqs = key_equations(combiner, keystream)
    guess_vars = [Var(0, 0), Var(1, 0)]
    candidates = _consistent_states(combiner, keystream)
    for values in itertools.product((0, 1), repeat=2):
        matching = [s for s in candidates if (s[0], s[4]) == values]
        result = solve_guess(
            eqs.generators, eqs.variables, guess_vars, values, ring=combiner.system.ring, as_ideal=as_ideal
        )
        if not matching:
            assert result.status == "inconsistent"
        elif len(matching) == 1:
            assert result.status == "solved"
            assert tuple(result.assignment[v] for v in eqs.variables) == matching[0]
        else:
            assert result.status == "indeterminate"


# Campaigns ---------------------------------------------------------------------------------


@pytest.mark.asyncio
async def test_empty_guess_campaign_on_combiner(combiner):
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 20)
    candidates = _consistent_states(combiner, keystream)
    pool = GuessPool(timeout_floor_ms=0)
    report = await attack_stream(combiner, keystream, GuessSpec(()), pool=pool)
    assert report.tallies.total == 1
    if len(candidates) == 1:
        assert report.outcome == "recovered"
        assert report.state_hex == state_to_hex(COMBINER_STATE)
        assert report.initial_state_hex == report.state_hex
        assert report.guess_values_hex == ""
    else:
        assert report.outcome == "exhausted"
        assert report.tallies.indeterminate == 1


async def _combiner_report(combiner, workers, executor=None):
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 16)
    spec = GuessSpec([(0, 0), (0, 1), (1, 0)])
    pool = GuessPool(workers, timeout_floor_ms=0, executor=executor)
    try:
        return await attack_stream(combiner, keystream, spec, pool=pool), pool
    finally:
        pool.close()


@pytest.mark.asyncio
async def test_reports_do_not_depend_on_worker_count(combiner):
    single, pool = await _combiner_report(combiner, 1)
    with ThreadPoolExecutor(max_workers=3) as executor:
        triple, _ = await _combiner_report(combiner, 3, executor)
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 16)
    candidates = _consistent_states(combiner, keystream)
    determined = any(
        sum(1 for s in candidates if (s[0], s[1], s[4]) == values) == 1
        for values in itertools.product((0, 1), repeat=3)
    )
    assert (single.outcome == "recovered") == determined
    assert (single.outcome, single.state_hex, single.next_index) == (triple.outcome, triple.state_hex, triple.next_index)
    assert single.tallies == triple.tallies
    stats = pool.get_pool_stats()
    assert stats["found"] == single.recovered
    assert stats["processed"] == single.tallies.total == single.next_index
    assert single.cost.guess_space == 8


@pytest.mark.asyncio
async def test_campaign_resumes_from_a_shard_position(combiner):
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 16)
    spec = GuessSpec([(0, 0), (0, 1), (1, 0)], shard=(0, 2))
    seen = []
    pool = GuessPool(timeout_floor_ms=0)
    report = await attack_stream(
        combiner, keystream, spec, pool=pool, start=1, progress=lambda position, tallies: seen.append(position)
    )
    assert report.shard == "0/2"
    assert report.next_index <= spec.shard_length()
    assert report.tallies.total == report.next_index - 1
    assert seen == list(range(2, report.next_index + 1))


@pytest.mark.asyncio
async def test_guess_variables_must_be_state_variables(combiner):
    keystream = keystream_gen(combiner, COMBINER_STATE, 0, 8)
    with pytest.raises(GuessSpecError):
        await attack_stream(combiner, keystream, GuessSpec([(0, 7)]), pool=GuessPool(timeout_floor_ms=0))


@pytest.mark.asyncio
async def test_budget_stops_a_full_bivium_guess_space(bivium_cipher):
    system = bivium_cipher.system
    spec = GuessSpec(bivium_guess_vars())
    assert spec.size == 2**38
    pool = GuessPool(timeout_floor_ms=0)
    result = await pool.run([system.ring.const(1)], system.state_vars(), spec, ring=system.ring, budget_ms=5)
    assert result.outcome == "aborted"
    assert result.found is None
    assert 0 < result.next_index < spec.size
    assert pool.tallies.inconsistent == result.next_index


def test_degree_bound_reaches_the_solver(xyz):
    gens = [xyz.gen(Var(0, 0)) * xyz.gen(Var(1, 0)) + xyz.const(1)]
    variables = [Var(0, 0), Var(1, 0)]
    assert solve_guess(gens, variables, (), (), ring=xyz).status == "solved"
    assert solve_guess(gens, variables, (), (), ring=xyz, degree_bound=1).status == "indeterminate"
    assert GuessPool(degree_bound=4).degree_bound == 4


def test_fully_guessed_systems_are_settled_by_substitution(xyz):
    gens = [xyz.gen(Var(0, 0)) * xyz.gen(Var(1, 0)) + xyz.const(1)]
    variables = [Var(0, 0), Var(1, 0)]
    assert solve_guess(gens, variables, variables, (1, 0), ring=xyz).status == "inconsistent"
    solved = solve_guess(gens, variables, variables, (1, 1), ring=xyz)
    assert solved.status == "solved"
    assert solved.assignment == {Var(0, 0): 1, Var(1, 0): 1}


def test_pool_timeouts():
    assert GuessPool(timeout_floor_ms=0).current_timeout() is None
    assert GuessPool(timeout_floor_ms=1500).current_timeout() == 1.5
    with pytest.raises(GuessSpecError):
        GuessPool(0)


def test_format_state():
    assert format_state((1, 0, 1), 2) == "5"
    assert format_state((2, 0, 1), 3) == "2,0,1"


@pytest.mark.slow
@pytest.mark.asyncio
async def test_bivium_correct_guess_recovers_the_state(bivium_cipher, rng):
    initial = _bits(rng, 177)
    at_t = simulate(bivium_cipher.system, initial, 708)
    keystream = keystream_gen(bivium_cipher, initial, 708, 190)
    guess_vars = bivium_guess_vars()
    truth = bivium_cipher.system.assignment(at_t)
    spec = GuessSpec(guess_vars, values=[tuple(truth[v] for v in guess_vars)])
    report = await attack_stream(bivium_cipher, keystream, spec, pool=GuessPool(timeout_floor_ms=0))
    assert report.outcome == "recovered"
    assert report.state_hex == state_to_hex(at_t)
    assert report.initial_state_hex == state_to_hex(initial)


@pytest.mark.slow
def test_loaded_bivium_states_follow_from_the_true_guess(bivium_cipher, rng):
    system = bivium_cipher.system
    ring = system.ring
    guess_vars = bivium_guess_vars()
    wrong = 0
    for _ in range(16):
        initial = load_state(bivium_cipher, _bits(rng, 80), _bits(rng, 80))
        truth = system.assignment(simulate(system, initial, bivium_cipher.offset))
        eqs = key_equations(bivium_cipher, keystream_gen(bivium_cipher, initial, bivium_cipher.offset, 190))
        values = [truth[v] for v in guess_vars]
        result = solve_guess(eqs.generators, eqs.variables, guess_vars, values, ring=ring)
        assert result.status == "solved"
        assert result.assignment == truth
        # a single point has the same reduced basis {x - a} under every ordering
        point = solve_unique(list(eqs.generators) + solution_basis(ring, truth), eqs.variables, ring=ring)
        assert point.status is SolveStatus.UNIQUE
        assert set(point.basis.generators) == set(solution_basis(ring, truth))
        assert recover_initial(bivium_cipher, state_from_assignment(bivium_cipher, result.assignment)) == initial
        for _ in range(4):
            flipped = list(values)
            for k in rng.choice(len(flipped), size=int(rng.integers(1, 4)), replace=False):
                flipped[int(k)] ^= 1
            miss = solve_guess(eqs.generators, eqs.variables, guess_vars, flipped, ring=ring)
            assert miss.status == "inconsistent"
            wrong += 1
    assert wrong == 64
