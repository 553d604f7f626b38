import itertools

import pytest

from diffcipher.algebra import NotInvertibleError, Var, parse_polynomial, parse_system, simulate
from diffcipher.services.cipher import CipherError, StreamCipher, keystream_gen
from diffcipher.services.equations import (
    INITIAL_STATE,
    OFFSET_STATE,
    KeyEquations,
    apply_substitutions,
    clock_stride,
    key_equations,
    linear_slice,
    recover_initial,
    state_from_assignment,
)


def _bits(rng, n):
    return tuple(int(b) for b in rng.integers(0, 2, size=n))


@pytest.fixture
def bivium_linear(bivium_cipher, rng):
    state = _bits(rng, 177)
    keystream = keystream_gen(bivium_cipher, simulate(bivium_cipher.system, state, 708), 0, 66)
    return key_equations(bivium_cipher, keystream), state


def test_bivium_first_66_equations_are_linear(bivium_linear):
    eqs, _ = bivium_linear
    assert eqs.count == 66
    assert eqs.linear_count == 66
    assert eqs.max_degree == 1
    assert eqs.target == OFFSET_STATE and eqs.target_clock == 708
    assert eqs.iterates[2] == parse_polynomial("x2 + x29 + y2 + y17", eqs.cipher.system.ring)


def test_key_equations_vanish_on_the_offset_state(bivium_cipher, rng):
    state = _bits(rng, 177)
    at_t = simulate(bivium_cipher.system, state, 708)
    keystream = keystream_gen(bivium_cipher, state, 708, 100)
    eqs = key_equations(bivium_cipher, keystream)
    assert eqs.max_degree == 2
    assignment = bivium_cipher.system.assignment(at_t)
    assert all(int(g.evaluate(assignment)) == 0 for g in eqs.generators)


def test_initial_state_target(combiner):
    cipher = StreamCipher("shifted", combiner.system, combiner.keystream, 6)
    state = (1, 1, 0, 1, 0, 0, 1, 1, 1)
    keystream = keystream_gen(cipher, state, 6, 12)
    eqs = key_equations(cipher, keystream, INITIAL_STATE)
    assert eqs.target_clock == 0
    assignment = cipher.system.assignment(state)
    assert all(int(g.evaluate(assignment)) == 0 for g in eqs.generators)


def test_offset_state_needs_an_invertible_system():
    definition = parse_system("field 2\nstream a order 2\nupdate a = a1\nkeystream = a0\noffset 3\n")
    cipher = StreamCipher("singular", definition.system, definition.keystream, 3)
    with pytest.raises(NotInvertibleError):
        key_equations(cipher, [0, 1])
    assert key_equations(cipher, [0, 1], INITIAL_STATE).count == 2
    with pytest.raises(CipherError):
        key_equations(cipher, [0], "middle_state")


def test_bivium_slices_by_clock_residue(bivium_linear):
    eqs, _ = bivium_linear
    assert clock_stride(eqs.cipher.keystream) == 3
    result = linear_slice(eqs)
    assert result.consistent
    assert result.generator_counts == (22, 22, 22)
    second = result.slices[2]
    assert second.pivot_vars == tuple(Var(0, c) for c in range(2, 66, 3))
    assert (second.rank, len(second.free_vars)) == (22, 36)


def test_slice_substitutions_hold_on_the_true_state(bivium_linear, bivium_cipher):
    eqs, state = bivium_linear
    result = linear_slice(eqs)
    at_t = bivium_cipher.system.assignment(simulate(bivium_cipher.system, state, 708))
    for pivot, expr in result.substitutions.items():
        assert int(expr.evaluate(at_t)) == at_t[pivot]


def test_single_slice_for_stride_one(combiner):
    eqs = key_equations(combiner, keystream_gen(combiner, (1,) * 9, 0, 4))
    assert clock_stride(combiner.keystream) == 1
    assert len(linear_slice(eqs).slices) == 1


def test_substitution_preserves_solutions(combiner):
    # mix affine and quadratic key equations over the same state
    state = (0, 1, 1, 0, 1, 0, 0, 1, 1)
    affine = StreamCipher("affine", combiner.system, parse_polynomial("a0 + b0", combiner.system.ring), 0)
    linear_eqs = key_equations(affine, keystream_gen(affine, state, 0, 5))
    quadratic_eqs = key_equations(combiner, keystream_gen(combiner, state, 0, 8))
    generators = linear_eqs.generators + quadratic_eqs.generators
    eqs = KeyEquations(combiner, generators, OFFSET_STATE, 0, ())
    slices = linear_slice(eqs)
    assert slices.substitutions
    reduced = apply_substitutions(eqs.generators, slices.substitutions)
    variables = combiner.system.state_vars()
    for values in itertools.product((0, 1), repeat=len(variables)):
        assignment = dict(zip(variables, values))
        original = all(int(g.evaluate(assignment)) == 0 for g in generators)
        pivots_hold = all(int(e.evaluate(assignment)) == assignment[v] for v, e in slices.substitutions.items())
        substituted = all(int(g.evaluate(assignment)) == 0 for g in reduced)
        assert original == (pivots_hold and substituted)


def test_recover_initial_and_assignments(bivium_cipher, rng):
    state = _bits(rng, 177)
    at_t = simulate(bivium_cipher.system, state, 708)
    assert recover_initial(bivium_cipher, at_t) == state
    assignment = bivium_cipher.system.assignment(state)
    assert state_from_assignment(bivium_cipher, assignment) == state
    del assignment[Var(1, 0)]
    assert state_from_assignment(bivium_cipher, assignment) is None
