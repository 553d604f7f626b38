import pytest

from diffcipher.algebra import DifferenceRing, LinearityError, Var, gaussian_eliminate, parse_polynomials


def test_gf2_elimination_pivots_earliest_columns(xyz):
    polys = parse_polynomials("x0 + y0 + 1\nx1 + y0\nx0 + x1 + z0", xyz)
    result = gaussian_eliminate(polys)
    assert result.consistent
    assert result.pivot_vars == (Var(0, 0), Var(0, 1), Var(2, 0))
    assert result.free_vars == (Var(1, 0),)
    subs = result.substitutions()
    for f in polys:
        present = {v: subs[v] for v in f.variables() if v in subs}
        assert f.substitute(present).is_zero


def test_gf2_inconsistency_is_detected(xyz):
    result = gaussian_eliminate(parse_polynomials("x0 + y0\nx0 + y0 + 1", xyz))
    assert not result.consistent
    assert result.solution() is None


def test_unique_solution_over_gf5():
    ring = DifferenceRing.over(5, ["a", "b"])
    polys = parse_polynomials("2*a0 + b0 + 1\na0 + b0", ring)
    result = gaussian_eliminate(polys)
    solution = result.solution()
    assert solution is not None
    for f in polys:
        assert int(f.evaluate(solution)) == 0
    assert result.rank == 2


def test_rows_reproduce_the_generators_span(xyz):
    polys = parse_polynomials("x0 + y0\nx0 + z0\ny0 + z0", xyz)
    result = gaussian_eliminate(polys)
    assert result.rank == 2
    assert len(result.polys()) == 2


def test_nonlinear_generators_are_rejected(xyz):
    with pytest.raises(LinearityError):
        gaussian_eliminate(parse_polynomials("x0*y0 + 1", xyz))


def test_empty_slice_needs_a_ring(xyz):
    assert gaussian_eliminate([], ring=xyz).rank == 0
    with pytest.raises(ValueError):
        gaussian_eliminate([])
