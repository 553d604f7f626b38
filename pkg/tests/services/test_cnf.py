import itertools

import pytest

from diffcipher.algebra import DifferenceRing, Var, parse_polynomials
from diffcipher.services.cnf import CnfError, export_cnf


def _models(formula):
    """Every satisfying assignment as a list of signed literals."""
    out = []
    for bits in itertools.product((0, 1), repeat=formula.num_vars):
        if all(any((lit > 0) == bool(bits[abs(lit) - 1]) for lit in clause) for clause in formula.clauses):
            out.append([k + 1 if b else -(k + 1) for k, b in enumerate(bits)])
    return out


def _solutions(polys, variables):
    out = []
    for values in itertools.product((0, 1), repeat=len(variables)):
        assignment = dict(zip(variables, values))
        if all(int(f.evaluate(assignment)) == 0 for f in polys):
            out.append(assignment)
    return out


def test_single_product_term(xyz):
    formula = export_cnf(parse_polynomials("x0*y0 + x0 + 1", xyz))
    assert formula.num_vars == 3
    assert len(formula.clauses) == 5
    assert formula.variables == {Var(0, 0): 1, Var(1, 0): 2}
    assert [formula.project(m) for m in _models(formula)] == [{Var(0, 0): 1, Var(1, 0): 0}]
    assert formula.var_map() == "1 x0\n2 y0\n3 x0*y0\n"


def test_dimacs_text(xyz):
    text = export_cnf(parse_polynomials("x0 + 1", xyz)).to_dimacs()
    assert text == "p cnf 1 1\n1 0\n"


@pytest.mark.parametrize(
    "text",
    [
        "x0*y0 + z0\nx0 + y0*z0 + 1",
        "x0 + x1 + y0 + y1 + z0 + z1 + 1\nx0*x1 + y0",
        "x0*y0*z0 + x1 + 1\ny1*z1 + x0 + y0 + z0 + x1",
        "x0*y0 + 1\nx0 + y0",
    ],
)
@pytest.mark.parametrize("cut_width", [3, 4, 8])
def test_models_match_solutions(xyz, text, cut_width):
    polys = parse_polynomials(text, xyz)
    variables = sorted({v for f in polys for v in f.variables()}, key=lambda v: (v.stream, v.clock))
    formula = export_cnf(polys, cut_width=cut_width)
    assert sorted(formula.variables, key=lambda v: (v.stream, v.clock)) == variables
    assert sorted(formula.variables.values()) == list(range(1, len(variables) + 1))
    expected = _solutions(polys, variables)
    projected = [formula.project(m) for m in _models(formula)]
    # auxiliary variables are functions of the originals
    assert len(projected) == len(expected)
    assert all(p in expected for p in projected)


def test_cut_width_bounds_clause_length(xyz):
    polys = parse_polynomials("x0 + x1 + x2 + x3 + x4 + x5 + x6", xyz)
    assert max(len(c) for c in export_cnf(polys, cut_width=3).clauses) == 3
    assert max(len(c) for c in export_cnf(polys, cut_width=8).clauses) == 7


def test_shared_monomials_get_one_variable(xyz):
    formula = export_cnf(parse_polynomials("x0*y0 + z0\nx0*y0 + 1", xyz))
    assert list(formula.names.values()).count("x0*y0") == 1


def test_contradiction_gives_an_empty_clause(xyz):
    formula = export_cnf([xyz.const(1)], ring=xyz)
    assert () in formula.clauses
    assert _models(formula) == []


def test_export_errors(xyz):
    with pytest.raises(CnfError):
        export_cnf(parse_polynomials("x0 + 1", xyz), cut_width=2)
    gf3 = DifferenceRing.over(3, ["x"])
    with pytest.raises(CnfError):
        export_cnf(parse_polynomials("x0 + 1", gf3))
    assert export_cnf([]).num_vars == 0


# Randomized equivalence ----------------------------------------------------------------------


def _random_polys(ring, rng, max_vars):
    pool = [Var(s, c) for s in range(ring.n) for c in range(6)]
    picks = rng.choice(len(pool), size=int(rng.integers(1, max_vars + 1)), replace=False)
    variables = [pool[int(k)] for k in picks]
    polys = []
    for _ in range(int(rng.integers(1, 5))):
        f = ring.const(int(rng.integers(0, 2)))
        for _ in range(int(rng.integers(1, 6))):
            degree = int(rng.integers(1, min(3, len(variables)) + 1))
            term = ring.one()
            for k in rng.choice(len(variables), size=degree, replace=False):
                term = term * ring.gen(variables[int(k)])
            f = f + term
        polys.append(f)
    return polys


def _extend(formula, assignment):
    """Values forced on every CNF variable by unit propagation from ``assignment``;
    None when a clause is violated or a variable stays free."""
    values = {formula.variables[v]: bool(b) for v, b in assignment.items() if v in formula.variables}
    changed = True
    while changed:
        changed = False
        for clause in formula.clauses:
            if any(abs(lit) in values and values[abs(lit)] == (lit > 0) for lit in clause):
                continue
            free = [lit for lit in clause if abs(lit) not in values]
            if not free:
                return None
            if len(free) == 1:
                values[abs(free[0])] = free[0] > 0
                changed = True
    if len(values) != formula.num_vars:
        return None
    return [k if values[k] else -k for k in range(1, formula.num_vars + 1)]


def _check_equivalence(polys, cut_width):
    variables = sorted({v for f in polys for v in f.variables()}, key=lambda v: (v.stream, v.clock))
    formula = export_cnf(polys, cut_width=cut_width, ring=polys[0].ring)
    expected = _solutions(polys, variables)
    projected = []
    for values in itertools.product((0, 1), repeat=len(variables)):
        model = _extend(formula, dict(zip(variables, values)))
        if model is not None:
            projected.append(formula.project(model))
    assert (not projected) == (not expected)
    assert len(projected) == len(expected)
    assert all(p in expected for p in projected)


def test_random_systems_keep_their_solutions(xyz, rng):
    for _ in range(25):
        _check_equivalence(_random_polys(xyz, rng, 8), int(rng.integers(3, 6)))


@pytest.mark.slow
def test_random_systems_keep_their_solutions_up_to_16_variables(xyz, rng):
    for _ in range(200):
        _check_equivalence(_random_polys(xyz, rng, 16), int(rng.integers(3, 9)))
