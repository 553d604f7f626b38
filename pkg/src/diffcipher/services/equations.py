"""Key equations of stream ciphers and their linear structure."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from diffcipher.algebra.diffpoly import Poly, Var
from diffcipher.algebra.linear import LinearSlice, gaussian_eliminate
from diffcipher.algebra.system import (
    DEFAULT_TERM_CAP,
    DifferenceBasis,
    NotInvertibleError,
    StateVec,
    backstep,
    invert_system,
)

from .cipher import CipherError, StreamCipher

logger = logging.getLogger(__name__)

OFFSET_STATE = "offset_state"
INITIAL_STATE = "initial_state"


@dataclass(frozen=True)
class KeyEquations:
    """Generators ``f'_t - b(T + t)`` over the state variables of one clock.

    ``target_clock`` is the clock whose state the variables stand for: ``T``
    for the offset state, ``0`` for the initial state.
    """

    cipher: StreamCipher
    generators: Tuple[Poly, ...]
    target: str
    target_clock: int
    keystream: Tuple[int, ...]
    iterates: Tuple[Poly, ...] = field(repr=False, compare=False, default=())

    @property
    def count(self) -> int:
        return len(self.generators)

    @property
    def variables(self) -> Tuple[Var, ...]:
        return self.cipher.system.state_vars()

    @property
    def max_degree(self) -> int:
        return max((g.degree() for g in self.generators), default=-1)

    @property
    def linear_count(self) -> int:
        return sum(1 for g in self.generators if g.degree() <= 1)

    def term_counts(self) -> List[int]:
        return [len(g) for g in self.generators]

    def stats(self) -> Dict[str, object]:
        counts = self.term_counts()
        return {
            "count": self.count,
            "max_degree": self.max_degree,
            "linear": self.linear_count,
            "max_terms": max(counts, default=0),
            "total_terms": sum(counts),
        }


def key_equations(
    cipher: StreamCipher,
    keystream: Sequence[int],
    target: str = OFFSET_STATE,
    *,
    term_cap: int = DEFAULT_TERM_CAP,
) -> KeyEquations:
    """Key equations for the keystream values ``b(T) .. b(T + len - 1)``.

    Raises:
        NotInvertibleError: When ``offset_state`` is asked of a non-invertible system.
        TermCapExceeded: When an iterate grows past ``term_cap``.
    """
    system = cipher.system
    if target not in {OFFSET_STATE, INITIAL_STATE}:
        raise CipherError(f"unknown attack target {target!r}")
    if target == OFFSET_STATE and not invert_system(system).invertible:
        raise NotInvertibleError("attacking the offset state needs an invertible system")
    basis = DifferenceBasis(system, term_cap=term_cap)
    start = 0 if target == OFFSET_STATE else cipher.offset
    ring = system.ring
    p = system.p
    iterates: List[Poly] = []
    generators: List[Poly] = []
    for t, value in enumerate(keystream):
        image = basis.normal_form(cipher.keystream.shift(start + t))
        iterates.append(image)
        generators.append(image - ring.const(int(value) % p))
    equations = KeyEquations(
        cipher,
        tuple(generators),
        target,
        cipher.offset if target == OFFSET_STATE else 0,
        tuple(int(v) % p for v in keystream),
        tuple(iterates),
    )
    logger.info(
        "Built %d key equations for %s (%s): max degree %d, %d linear",
        equations.count,
        cipher.name,
        target,
        equations.max_degree,
        equations.linear_count,
    )
    return equations


def clock_stride(f: Poly) -> int:
    """Gcd of the clock differences among the variables of ``f`` (at least 1)."""
    clocks = sorted({v.clock for v in f.variables()})
    stride = 0
    for c in clocks[1:]:
        stride = math.gcd(stride, c - clocks[0])
    return stride or 1


@dataclass(frozen=True)
class SliceResult:
    slices: Tuple[LinearSlice, ...]
    substitutions: Dict[Var, Poly]
    consistent: bool
    generator_counts: Tuple[int, ...]


def linear_slice(eqs: KeyEquations) -> SliceResult:
    """Row-reduces the affine key equations, one slice per clock residue.

    Linear generators are grouped by their lowest clock modulo the clock
    stride of the keystream polynomial. The returned substitutions come from
    eliminating all linear generators together, so each pivot is expressed
    in free variables only.
    """
    ring = eqs.cipher.system.ring
    stride = clock_stride(eqs.cipher.keystream)
    groups: List[List[Poly]] = [[] for _ in range(stride)]
    linear = [g for g in eqs.generators if g.degree() <= 1 and not g.is_zero]
    for g in linear:
        residue = g.min_clock() % stride if g.degree() == 1 else 0
        groups[residue].append(g)
    slices = tuple(gaussian_eliminate(group, ring=ring) for group in groups)
    combined = gaussian_eliminate(linear, ring=ring)
    logger.info(
        "Linear slices of %s: %s generators, %s pivots",
        eqs.cipher.name,
        [len(group) for group in groups],
        [s.rank for s in slices],
    )
    return SliceResult(
        slices,
        combined.substitutions(),
        combined.consistent and all(s.consistent for s in slices),
        tuple(len(group) for group in groups),
    )


def apply_substitutions(polys: Sequence[Poly], mapping: Mapping[Var, Poly]) -> List[Poly]:
    """Substitutes and drops generators that vanish."""
    out = []
    for g in polys:
        present = {v: mapping[v] for v in g.variables() if v in mapping}
        h = g.substitute(present) if present else g
        if not h.is_zero:
            out.append(h)
    return out


def recover_initial(cipher: StreamCipher, state_at_t: Sequence[int]) -> StateVec:
    """The 0-state whose ``T``-state is ``state_at_t``.

    Raises:
        NotInvertibleError: When the system has no inverse.
    """
    return backstep(cipher.system, tuple(state_at_t), cipher.offset)


def state_from_assignment(cipher: StreamCipher, assignment: Mapping[Var, int]) -> Optional[StateVec]:
    """The state vector of a full assignment of the state variables."""
    try:
        return tuple(int(assignment[v]) for v in cipher.system.state_vars())
    except KeyError:
        return None


__all__ = [
    "INITIAL_STATE",
    "KeyEquations",
    "OFFSET_STATE",
    "SliceResult",
    "apply_substitutions",
    "clock_stride",
    "key_equations",
    "linear_slice",
    "recover_initial",
    "state_from_assignment",
]
