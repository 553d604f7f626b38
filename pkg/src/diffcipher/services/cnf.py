"""DIMACS export of GF(2) polynomial systems.

Every nonlinear monomial becomes an auxiliary variable tied to its factors
by AND clauses; every polynomial becomes an XOR constraint, cut into
chunks of ``cut_width`` literals with auxiliary parity variables.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from diffcipher.algebra.diffpoly import DifferenceRing, Monomial, Poly, Var, format_monomial

logger = logging.getLogger(__name__)

DEFAULT_CUT_WIDTH = 4

Clause = Tuple[int, ...]


class CnfError(ValueError):
    """Raised for systems that cannot be exported as CNF."""


@dataclass
class CnfFormula:
    """Clauses over variables ``1 .. num_vars`` and what each variable stands for."""

    num_vars: int = 0
    clauses: List[Clause] = field(default_factory=list)
    names: Dict[int, str] = field(default_factory=dict)
    variables: Dict[Var, int] = field(default_factory=dict)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines.extend(" ".join(str(lit) for lit in clause + (0,)) for clause in self.clauses)
        return "\n".join(lines) + "\n"

    def var_map(self) -> str:
        return "".join(f"{index} {self.names[index]}\n" for index in sorted(self.names))

    def project(self, model: Sequence[int]) -> Dict[Var, int]:
        """Values of the original variables in a model given as signed literals."""
        true = {lit for lit in model if lit > 0}
        return {v: int(index in true) for v, index in self.variables.items()}


class _Encoder:
    def __init__(self, ring: DifferenceRing, cut_width: int) -> None:
        self.ring = ring
        self.cut_width = cut_width
        self.formula = CnfFormula()
        self._monomials: Dict[Monomial, int] = {}
        self._cuts = 0

    def _new(self, name: str) -> int:
        self.formula.num_vars += 1
        index = self.formula.num_vars
        self.formula.names[index] = name
        return index

    def declare(self, variables: Sequence[Var]) -> None:
        for v in variables:
            self.formula.variables[v] = self._new(self.ring.var_name(v))

    def monomial(self, m: Monomial) -> int:
        factors = [v for v, _ in self.ring.factors(m)]
        if len(factors) == 1:
            return self.formula.variables[factors[0]]
        index = self._monomials.get(m)
        if index is not None:
            return index
        index = self._new(format_monomial(self.ring, m))
        self._monomials[m] = index
        inputs = [self.formula.variables[v] for v in factors]
        for lit in inputs:
            self.formula.clauses.append((-index, lit))
        self.formula.clauses.append((index,) + tuple(-lit for lit in inputs))
        return index

    def xor(self, literals: List[int], parity: int) -> None:
        """Adds ``literals[0] + .. + literals[-1] = parity``."""
        while len(literals) > self.cut_width:
            self._cuts += 1
            head = literals[: self.cut_width - 1]
            link = self._new(f"xor_cut_{self._cuts}")
            self._xor_clauses(head + [link], 0)
            literals = [link] + literals[self.cut_width - 1 :]
        self._xor_clauses(literals, parity)

    def _xor_clauses(self, literals: List[int], parity: int) -> None:
        if not literals:
            if parity:
                self.formula.clauses.append(())
            return
        for signs in itertools.product((0, 1), repeat=len(literals)):
            if sum(signs) % 2 == parity:
                continue
            self.formula.clauses.append(tuple(-lit if bit else lit for lit, bit in zip(literals, signs)))


def export_cnf(
    polys: Sequence[Poly],
    *,
    cut_width: int = DEFAULT_CUT_WIDTH,
    ring: Optional[DifferenceRing] = None,
) -> CnfFormula:
    """Equisatisfiable CNF for the equations ``f = 0``, ``f`` in ``polys``.

    Original variables are numbered first, sorted by stream and clock.

    Raises:
        CnfError: Over fields other than GF(2) or for a cut width below 3.
    """
    if cut_width < 3:
        raise CnfError("XOR cut width must be at least 3")
    if ring is None:
        if not polys:
            return CnfFormula()
        ring = polys[0].ring
    if ring.p != 2:
        raise CnfError(f"CNF export needs GF(2), got GF({ring.p})")
    variables = set()
    for f in polys:
        if f.ring.p != 2:
            raise CnfError("CNF export needs GF(2) polynomials")
        variables.update(f.variables())
    encoder = _Encoder(ring, cut_width)
    encoder.declare(sorted(variables, key=lambda v: (v.stream, v.clock)))
    for f in polys:
        literals = [encoder.monomial(m) for m, _ in sorted(f.terms.items()) if m]
        encoder.xor(literals, f.constant_term())
    formula = encoder.formula
    logger.info(
        "Exported %d polynomials: %d variables (%d original), %d clauses",
        len(polys),
        formula.num_vars,
        len(formula.variables),
        len(formula.clauses),
    )
    return formula


__all__ = ["CnfError", "CnfFormula", "DEFAULT_CUT_WIDTH", "export_cnf"]
