import itertools

import numpy as np
import pytest

from diffcipher.algebra import Var, parse_system
from diffcipher.services.block_attack import (
    block_pair_attack,
    construct_fixed_point_pairs,
    construct_periodic_state,
    fixed_point_search,
    format_key,
    keeloq_attack,
    key_period,
    pair_equations,
    peel_rounds,
)
from diffcipher.services.cipher import BlockCipher, CipherError, block_encrypt, from_definition, int_to_bits
from diffcipher.services.guessing import GuessPool, GuessSpec, GuessSpecError

TOY_DEFINITION = """\
field 2
stream k order 6
stream x order 4
update k = k0
update x = k0 + x0 + x2 + x1*x3
split 1
final 20
"""


@pytest.fixture(scope="module")
def toy():
    cipher = from_definition(parse_system(TOY_DEFINITION), "toy")
    assert isinstance(cipher, BlockCipher)
    return cipher


def _bits(rng, n):
    return tuple(int(b) for b in rng.integers(0, 2, size=n))


def _quiet_pool():
    return GuessPool(timeout_floor_ms=0)


# Pair systems -------------------------------------------------------------------------------


def test_short_pairs_give_linear_key_equations(keeloq_cipher, rng):
    key, plaintext = _bits(rng, 64), _bits(rng, 32)
    ciphertext = tuple(block_encrypt(keeloq_cipher, key, plaintext, rounds=4))
    built = pair_equations(keeloq_cipher, [(plaintext, ciphertext)], 4)
    assert built.ring.streams == ("k", "x_a")
    assert len(built.generators) == 4
    assert all(g.degree() == 1 for g in built.generators)
    assert {v for g in built.generators for v in g.variables()} == {Var(0, t) for t in range(4)}
    truth = {Var(0, c): key[c] for c in range(64)}
    assert all(int(g.evaluate(truth)) == 0 for g in built.generators)
    assert built.key_variables == tuple(Var(0, c) for c in range(64))


def test_pairs_share_the_key_streams(toy, rng):
    key = _bits(rng, 6)
    pairs = [(block, tuple(block_encrypt(toy, key, block, rounds=8))) for block in ((1, 0, 0, 1), (0, 1, 1, 1))]
    built = pair_equations(toy, pairs, 8)
    assert built.ring.streams == ("k", "x_a", "x_b")
    # k6, k7 tie the shifted key back to the 0-state
    assert any(Var(0, 7) in g.variables() for g in built.generators)
    assert any(v.stream == 2 for g in built.generators for v in g.variables())


@pytest.mark.parametrize(
    "pairs, effective_t",
    [([], 4), ([((0,) * 4, (0,) * 4)], 0), ([((0,) * 3, (0,) * 4)], 4)],
)
def test_pair_equations_reject(toy, pairs, effective_t):
    with pytest.raises(CipherError):
        pair_equations(toy, pairs, effective_t)


@pytest.mark.asyncio
async def test_pair_attack_with_guessed_high_key(keeloq_cipher, rng):
    key, plaintext = _bits(rng, 64), _bits(rng, 32)
    ciphertext = tuple(block_encrypt(keeloq_cipher, key, plaintext, rounds=8))
    guess_vars = [Var(0, c) for c in range(8, 64)]
    spec = GuessSpec(guess_vars, values=[key[8:]])
    report = await block_pair_attack(keeloq_cipher, [(plaintext, ciphertext)], 8, spec, pool=_quiet_pool())
    assert report.outcome == "recovered"
    assert report.key_hex == format_key(key, 2)
    assert report.attack == "block_pair"


@pytest.mark.asyncio
async def test_pair_attack_rejects_bad_setups(keeloq_cipher):
    pair = ((0,) * 32, (0,) * 32)
    with pytest.raises(CipherError):
        await block_pair_attack(keeloq_cipher, [pair], 529, GuessSpec([(0, 0)]))
    with pytest.raises(GuessSpecError):
        await block_pair_attack(keeloq_cipher, [pair], 8, GuessSpec([(1, 0)]))


# Fixed points and periodic states ----------------------------------------------------------


def test_fixed_point_search_exhaustive_and_sampled():
    assert len(fixed_point_search(lambda v: v, 3)) == 8
    assert fixed_point_search(lambda v: tuple(1 - b for b in v), 3) == []
    found = fixed_point_search(lambda v: (v[0], 0, 0), 3)
    assert found == [(0, 0, 0), (1, 0, 0)]
    sampled = fixed_point_search(lambda v: v, 20, budget=50, rng=np.random.default_rng(3))
    assert len(sampled) == 50 and len(set(sampled)) == 50


def test_key_period(keeloq_cipher, toy):
    assert key_period(keeloq_cipher) == 64
    assert key_period(toy) == 6


def test_periodic_state_from_a_solved_key_tail(keeloq_cipher, rng):
    key, block = construct_periodic_state(keeloq_cipher, rng)
    assert tuple(block_encrypt(keeloq_cipher, key, block, rounds=64)) == block


def test_periodic_state_for_a_given_key(toy, rng):
    key = (1, 0, 1, 1, 0, 0)
    result = construct_periodic_state(toy, rng, key)
    fixed = fixed_point_search(lambda v: block_encrypt(toy, key, v, rounds=6), 4)
    if fixed:
        assert result == (key, fixed[0])
    else:
        assert result is None


def test_fixed_point_pairs_stay_fixed(keeloq_cipher, rng):
    key, blocks = construct_fixed_point_pairs(keeloq_cipher, rng, count=2)
    assert len(key) == 64
    assert len(blocks) == 2 and blocks[0] != blocks[1]
    for block in blocks:
        assert tuple(block_encrypt(keeloq_cipher, key, block, rounds=64)) == block
        assert tuple(block_encrypt(keeloq_cipher, key, block, rounds=512)) == block


def test_round_model_needs_a_rotating_key():
    definition = parse_system(
        "field 2\nstream k order 3\nstream x order 2\nupdate k = k0 + k1\nupdate x = x0 + k0\nsplit 1\nfinal 6\n"
    )
    cipher = from_definition(definition)
    with pytest.raises(CipherError):
        construct_fixed_point_pairs(cipher, np.random.default_rng(0))


# Fixed-point attack -------------------------------------------------------------------------


def test_peel_rounds_reaches_the_periodic_clock(keeloq_cipher, rng):
    key, plaintext = _bits(rng, 64), _bits(rng, 32)
    ciphertext = block_encrypt(keeloq_cipher, key, plaintext)
    peeled = peel_rounds(keeloq_cipher, key[:16], ciphertext, 16)
    assert peeled == tuple(block_encrypt(keeloq_cipher, key, plaintext, rounds=512))


def _toy_key_with_unique_fixed_points(toy):
    # a key whose fixed points at the key period pin it down among all keys
    keys = list(itertools.product((0, 1), repeat=6))
    fixed = {key: fixed_point_search(lambda v, key=key: block_encrypt(toy, key, v, rounds=6), 4) for key in keys}
    for key in keys:
        blocks = fixed[key]
        if blocks and sum(1 for other in keys if set(blocks) <= set(fixed[other])) == 1:
            return key, blocks
    raise AssertionError("no toy key is determined by its fixed points")


@pytest.mark.asyncio
async def test_fixed_point_attack_on_toy_cipher(toy):
    key, blocks = _toy_key_with_unique_fixed_points(toy)
    pairs = [(block, tuple(block_encrypt(toy, key, block))) for block in blocks]
    report = await keeloq_attack(toy, pairs, low_bits=2, pool_factory=_quiet_pool)
    assert report.outcome == "recovered"
    assert report.key_hex == format_key(key, 2)
    assert report.attack == "keeloq"
    assert report.cost.guess_space == 4
    assert report.tallies.solved == 1


@pytest.mark.asyncio
async def test_fixed_point_cost_terms_are_measured(toy):
    key, blocks = _toy_key_with_unique_fixed_points(toy)
    pairs = [(block, tuple(block_encrypt(toy, key, block))) for block in blocks]
    report = await keeloq_attack(toy, pairs, low_bits=2, pool_factory=_quiet_pool, plaintext_fraction=0.5)
    terms = report.cost.decomposition_ms
    for name in ("a_search", "a_per_candidate", "b_encrypt", "b_c_encryptions", "d_solve", "total"):
        assert terms[name] > 0, name
    assert report.cost.plaintext_fraction == 0.5
    assert terms["a_search"] == pytest.approx(terms["a_per_candidate"] * 4)
    assert terms["b_c_encryptions"] == pytest.approx(terms["b_encrypt"] * 0.5 * 2**toy.block_length)
    assert terms["total"] == pytest.approx(terms["a_search"] + terms["b_c_encryptions"] + terms["d_solve"])
    assert report.cost.worst_case_ms == pytest.approx(terms["total"])
    with pytest.raises(CipherError):
        await keeloq_attack(toy, pairs, low_bits=2, pool_factory=_quiet_pool, plaintext_fraction=0)

@pytest.mark.asyncio
async def test_fixed_point_attack_exhausts_wrong_candidates(toy):
    key, blocks = _toy_key_with_unique_fixed_points(toy)
    pairs = [(block, tuple(block_encrypt(toy, key, block))) for block in blocks]
    wrong = [c for c in itertools.product((0, 1), repeat=2) if c != key[:2]]
    report = await keeloq_attack(toy, pairs, candidates=wrong, low_bits=2, pool_factory=_quiet_pool)
    assert report.outcome == "exhausted"
    assert report.key_hex is None
    assert report.next_index == 3
    assert report.tallies.solved == 0


@pytest.mark.slow
@pytest.mark.asyncio
async def test_keeloq_fixed_point_attack(keeloq_cipher, rng):
    key, blocks = construct_fixed_point_pairs(keeloq_cipher, rng, count=2)
    pairs = [(block, tuple(block_encrypt(keeloq_cipher, key, block))) for block in blocks]
    wrong = tuple(1 - b for b in key[:16])
    report = await keeloq_attack(keeloq_cipher, pairs, candidates=[wrong, key[:16]], pool_factory=_quiet_pool)
    assert report.outcome == "recovered"
    assert report.key_hex == format_key(key, 2)
    assert report.tallies.inconsistent >= 1


@pytest.mark.slow
@pytest.mark.asyncio
async def test_keeloq_attack_over_several_keys(keeloq_cipher, rng):
    wrong_total = 0
    for _ in range(4):
        key, blocks = construct_fixed_point_pairs(keeloq_cipher, rng, count=2)
        for block in blocks:
            assert tuple(block_encrypt(keeloq_cipher, key, block, rounds=512)) == tuple(block)
        pairs = [(block, tuple(block_encrypt(keeloq_cipher, key, block))) for block in blocks]
        low = tuple(key[:16])
        sampled = (tuple(int_to_bits(int(i), 16)) for i in rng.choice(2**16, size=65, replace=False))
        wrong = [c for c in sampled if c != low][:64]
        report = await keeloq_attack(keeloq_cipher, pairs, candidates=wrong + [low], pool_factory=_quiet_pool)
        assert report.outcome == "recovered"
        assert report.key_hex == format_key(key, 2)
        assert report.next_index == len(wrong) + 1
        assert report.tallies.solved == 1
        assert report.tallies.timeout == 0
        assert report.tallies.inconsistent + report.tallies.indeterminate == len(wrong)
        wrong_total += len(wrong)
    assert wrong_total == 256
