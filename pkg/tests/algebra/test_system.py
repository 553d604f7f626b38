import itertools

import pytest

from diffcipher.algebra import (
    BoundedDegRevLex,
    DifferenceBasis,
    DiffSystem,
    NotInvertibleError,
    OrderingError,
    SystemDefinitionError,
    TermCapExceeded,
    Var,
    backstep,
    endo_iterate,
    invert_system,
    parse_polynomial,
    parse_system,
    period,
    simulate,
    subsystem_split,
)
from diffcipher.algebra import ClockBased, groebner
from diffcipher.algebra.system import companion_polynomial, trajectory, transition_table
from diffcipher.core.field import is_primitive
from diffcipher.services.cipher import example_2_3, example_closed_form

F68 = "y83 + x68 + y68 + x26 + y17 + y4*y3 + y2"

KEELOQ_INVERSE_X = (
    "x0 + x16 + x23 + x31 + x1*x12 + x1*x31 + x6*x12 + x6*x31 + x12*x23 + x23*x31"
    " + x1*x23*x31 + x1*x12*x31 + x1*x6*x23 + x1*x6*x12 + k0"
)


def _lfsr(order, taps, p=2):
    update = " + ".join(f"x{t}" for t in taps)
    return parse_system(f"field {p}\nstream x order {order}\nupdate x = {update}\n").system


def _random_state(rng, system):
    return tuple(int(v) for v in rng.integers(0, system.p, size=system.r))


def _random_monomials(rng, pool, count, max_degree):
    terms = []
    for _ in range(count):
        degree = int(rng.integers(1, max_degree + 1))
        picks = rng.choice(len(pool), size=min(degree, len(pool)), replace=False)
        terms.append("*".join(pool[int(k)] for k in sorted(picks)))
    return terms


def _random_system(rng, max_r, streams="abc"):
    """A random explicit GF(2) system with r <= max_r and a random state polynomial."""
    n = int(rng.integers(1, len(streams) + 1))
    orders = [1] * n
    for _ in range(int(rng.integers(n, max_r + 1)) - n):
        orders[int(rng.integers(0, n))] += 1
    names = streams[:n]
    lines = ["field 2"] + [f"stream {s} order {r}" for s, r in zip(names, orders)]
    for s, r in zip(names, orders):
        # clocks below r keep the update under {s}{r} in every clock-based ordering
        pool = [f"{u}{c}" for u, ru in zip(names, orders) for c in range(min(r, ru))]
        terms = _random_monomials(rng, pool, int(rng.integers(1, 4)), 2)
        if rng.integers(0, 2):
            terms.append("1")
        lines.append(f"update {s} = " + " + ".join(terms))
    system = parse_system("\n".join(lines) + "\n").system
    state = [f"{u}{c}" for u, ru in zip(names, orders) for c in range(ru)]
    f = parse_polynomial(" + ".join(_random_monomials(rng, state, int(rng.integers(1, 4)), 3)), system.ring)
    return system, f


def _state_number(state, p):
    return sum(v * p**k for k, v in enumerate(state))


# Construction ------------------------------------------------------------------------


def test_updates_must_stay_inside_the_state(xyz):
    f = parse_polynomial("x3", xyz)
    zero = xyz.zero()
    with pytest.raises(SystemDefinitionError):
        DiffSystem(xyz, (3, 1, 1), (f, zero, zero))
    with pytest.raises(SystemDefinitionError):
        DiffSystem(xyz, (3, 1), (zero, zero))


def test_state_layout(bivium_cipher):
    system = bivium_cipher.system
    assert system.r == 177
    assert system.position(Var(1, 0)) == 93
    assert system.state_vars()[-1] == Var(1, 83)


# Simulation --------------------------------------------------------------------------


def test_worked_example_matches_closed_form():
    system = example_2_3(7)
    assert simulate(system, (1, 1), 1) == (2, 2)
    for a0, b0 in itertools.product(range(7), repeat=2):
        for t in range(11):
            assert simulate(system, (a0, b0), t) == example_closed_form(7, a0, b0, t)


def test_simulation_composes(bivium_cipher, rng):
    system = bivium_cipher.system
    state = _random_state(rng, system)
    assert simulate(system, state, 150) == simulate(system, simulate(system, state, 70), 80)
    states = trajectory(system, state, 4)
    assert states[0] == state
    assert states[3] == simulate(system, state, 3)


def test_zero_state_is_fixed(bivium_cipher, trivium_cipher, keeloq_cipher):
    for system in (bivium_cipher.system, trivium_cipher.system, keeloq_cipher.system):
        assert simulate(system, (0,) * system.r, 100) == (0,) * system.r


def test_state_length_is_checked(bivium_cipher):
    with pytest.raises(SystemDefinitionError):
        simulate(bivium_cipher.system, (0,) * 10, 1)


# Transition endomorphism ---------------------------------------------------------------


@pytest.mark.parametrize("method", ["substitution", "normal_form"])
def test_bivium_keystream_iterate_68(bivium_cipher, method):
    system = bivium_cipher.system
    image = endo_iterate(system, bivium_cipher.keystream, 68, method)
    assert image == parse_polynomial(F68, system.ring)


def test_iterate_agrees_with_simulation(bivium_cipher, rng):
    system = bivium_cipher.system
    f = bivium_cipher.keystream
    image = endo_iterate(system, f, 120)
    for _ in range(5):
        state = _random_state(rng, system)
        later = system.assignment(simulate(system, state, 120))
        assert int(image.evaluate(system.assignment(state))) == int(f.evaluate(later))


def test_iterate_methods_agree_over_gf7():
    system = example_2_3(7)
    f = parse_polynomial("x0 + 3*y0", system.ring)
    assert endo_iterate(system, f, 3) == endo_iterate(system, f, 3, "normal_form")


def _iterates_agree(system, f, steps):
    basis = DifferenceBasis(system)
    image = f
    for t in range(1, steps + 1):
        image = endo_iterate(system, image, 1)
        assert image == endo_iterate(system, f, t, "normal_form", basis=basis), t


def test_iterate_methods_agree_on_random_systems(rng):
    for _ in range(10):
        system, f = _random_system(rng, 6)
        _iterates_agree(system, f, 20)


@pytest.mark.slow
def test_iterate_methods_agree_on_large_random_systems(rng):
    for _ in range(100):
        system, f = _random_system(rng, 12)
        _iterates_agree(system, f, 50)


def _check_transition_identity(system, f, t):
    image = endo_iterate(system, f, t)
    for state in itertools.product((0, 1), repeat=system.r):
        later = simulate(system, state, t)
        assert int(image.evaluate(system.assignment(state))) == int(f.evaluate(system.assignment(later)))


def test_iterated_polynomial_evaluates_the_stepped_state(rng):
    for _ in range(10):
        system, f = _random_system(rng, 8)
        for t in (1, 3):
            _check_transition_identity(system, f, t)


@pytest.mark.slow
def test_iterated_polynomial_evaluates_every_stepped_state(rng):
    for _ in range(100):
        system, f = _random_system(rng, 12)
        _check_transition_identity(system, f, 1)


def test_difference_normal_form_matches_groebner_reduction():
    system = parse_system(
        "field 2\nstream a order 3\nstream b order 2\nupdate a = a0 + a1*b0\nupdate b = b0 + a2 + b1*a1\n"
    ).system
    ring = system.ring
    basis = DifferenceBasis(system)
    f = parse_polynomial("a2*b1 + a0 + b0*a1 + 1", ring)
    for t in range(1, 5):
        shifted = f.shift(t)
        top = shifted.max_clock()
        variables = [Var(i, c) for c in range(top + 1) for i in range(system.n)]
        finite = groebner.buchberger(basis.generators(top), ClockBased(), variables=variables, ring=ring)
        assert groebner.normal_form(shifted, finite) == basis.normal_form(shifted), t


def test_iterate_term_cap(bivium_cipher):
    with pytest.raises(TermCapExceeded):
        endo_iterate(bivium_cipher.system, bivium_cipher.keystream, 400, term_cap=50)


def test_iterate_rejects_non_state_polynomials(bivium_cipher):
    ring = bivium_cipher.system.ring
    with pytest.raises(SystemDefinitionError):
        endo_iterate(bivium_cipher.system, parse_polynomial("x93", ring), 1)


def test_difference_basis_needs_a_difference_ordering(bivium_cipher):
    system = bivium_cipher.system
    with pytest.raises(OrderingError):
        DifferenceBasis(system, BoundedDegRevLex(system.state_vars()))


def test_difference_basis_generators(bivium_cipher):
    basis = DifferenceBasis(bivium_cipher.system)
    gens = basis.generators(94)
    ring = bivium_cipher.system.ring
    # x93, x94 and y84..y94
    assert len(gens) == 2 + 11
    assert gens[0] == parse_polynomial("x93 + y0 + y15 + x24 + y1*y2", ring)


# Inversion ------------------------------------------------------------------------------


def test_trivium_inverse_matches_hand_derivation(trivium_cipher):
    system = trivium_cipher.system
    result = invert_system(system)
    assert result.invertible
    ring = system.ring
    assert result.inverse.update("x") == parse_polynomial("y0 + x66 + y78 + x91*x92", ring)
    assert result.inverse.update("y") == parse_polynomial("z0 + y69 + z87 + y82*y83", ring)
    assert result.inverse.update("z") == parse_polynomial("x0 + x69 + z66 + z109*z110", ring)


def test_bivium_full_inverse_agrees_with_quick(bivium_cipher):
    system = bivium_cipher.system
    quick = invert_system(system, "quick")
    full = invert_system(system, "full")
    assert quick.method == "quick" and full.method == "full"
    assert quick.inverse == full.inverse


@pytest.mark.slow
def test_trivium_full_inverse_agrees_with_quick(trivium_cipher):
    system = trivium_cipher.system
    assert invert_system(system, "full").inverse == invert_system(system, "quick").inverse


def test_keeloq_inverse(keeloq_cipher):
    system = keeloq_cipher.system
    result = invert_system(system)
    assert result.invertible
    assert result.inverse.update("k") == parse_polynomial("k0", system.ring)
    assert result.inverse.update("x") == parse_polynomial(KEELOQ_INVERSE_X, system.ring)


def test_non_invertible_systems_carry_a_witness():
    singular = _lfsr(2, [1])
    result = invert_system(singular, "full")
    assert not result.invertible
    assert result.witness is not None
    assert not invert_system(example_2_3(7), "full").invertible
    assert not invert_system(singular, "quick").invertible


def test_backstep_undoes_simulate(bivium_cipher, keeloq_cipher, rng):
    for system in (bivium_cipher.system, keeloq_cipher.system):
        state = _random_state(rng, system)
        assert backstep(system, simulate(system, state, 300), 300) == state


def test_backstep_needs_an_inverse():
    singular = _lfsr(3, [1, 2])
    with pytest.raises(NotInvertibleError):
        backstep(singular, (1, 0, 1), 2)


# Structure and periods --------------------------------------------------------------------


def test_keeloq_key_subsystem(keeloq_cipher):
    sub = subsystem_split(keeloq_cipher.system, 1)
    assert sub is not None
    assert sub.orders == (64,)
    assert sub.update("k") == parse_polynomial("k0", sub.ring)
    inverse = invert_system(keeloq_cipher.system).inverse
    assert subsystem_split(inverse, 1) == invert_system(sub).inverse


def test_bivium_does_not_split(bivium_cipher):
    assert subsystem_split(bivium_cipher.system, 1) is None
    with pytest.raises(SystemDefinitionError):
        subsystem_split(bivium_cipher.system, 2)


def test_keeloq_key_period_is_64(keeloq_cipher, rng):
    key_system = keeloq_cipher.key_system
    assert period(key_system, "linear_primitive").period == 64
    unknown = period(key_system)
    assert not unknown.known
    key = _random_state(rng, key_system)
    assert simulate(key_system, key, 64) == key


@pytest.mark.parametrize(
    "order, taps, expected",
    [
        (4, [0, 1], 15),
        (5, [0, 2], 31),
        (7, [0, 1], 127),
        (4, [0, 1, 2, 3], 5),
    ],
)
def test_lfsr_periods_agree_across_strategies(order, taps, expected):
    system = _lfsr(order, taps)
    assert period(system, "linear_primitive").period == expected
    assert period(system, "orbit_lcm").period == expected
    assert period(system, "brute_force").period == expected


def test_companion_polynomial_is_lowest_degree_first():
    assert companion_polynomial(_lfsr(4, [0, 1])) == [1, 1, 0, 0, 1]


def test_period_over_gf3():
    # x(2) = x(0) + x(1): t^2 - t - 1 over GF(3) is primitive
    system = _lfsr(2, [0, 1], p=3)
    assert period(system, "linear_primitive").period == 8
    assert period(system).period == 8


def test_periods_of_non_permutations():
    with pytest.raises(NotInvertibleError):
        period(example_2_3(7))
    with pytest.raises(NotInvertibleError):
        period(_lfsr(3, [1, 2]), "linear_primitive")


def test_period_respects_state_space_cap(bivium_cipher):
    result = period(bivium_cipher.system, state_space_cap=2**20)
    assert result.period is None and result.cap == 2**20


def test_transition_table_matches_simulation():
    for system in (_lfsr(4, [0, 1]), _lfsr(2, [0, 1], p=3), example_2_3(5)):
        table = transition_table(system, chunk=3)
        assert len(table) == system.p**system.r
        for state in itertools.product(range(system.p), repeat=system.r):
            index = _state_number(state, system.p)
            assert table[index] == _state_number(simulate(system, state, 1), system.p)


def test_brute_force_rejects_non_permutations():
    with pytest.raises(NotInvertibleError):
        period(example_2_3(7), "brute_force")
    with pytest.raises(NotInvertibleError):
        period(_lfsr(3, [1, 2]), "brute_force")


@pytest.mark.slow
def test_brute_force_period_of_a_24_bit_lfsr():
    # t^24 + t^7 + t^2 + t + 1
    system = _lfsr(24, [0, 1, 2, 7])
    expected = period(system, "linear_primitive").period
    assert expected == 2**24 - 1
    assert period(system, "brute_force", state_space_cap=2**24).period == expected


@pytest.mark.slow
def test_random_primitive_trinomials_agree_across_strategies(rng):
    trinomials = [
        (r, k)
        for r in range(2, 17)
        for k in range(1, r)
        if is_primitive([1] + [int(j == k) for j in range(1, r)] + [1], 2)
    ]
    for pick in rng.choice(len(trinomials), size=10, replace=False):
        r, k = trinomials[int(pick)]
        system = _lfsr(r, [0, k])
        assert period(system, "linear_primitive").period == 2**r - 1
        assert period(system, "orbit_lcm").period == 2**r - 1
        assert period(system, "brute_force").period == 2**r - 1
