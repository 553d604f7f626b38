"""Gaussian elimination on affine generators.

Over GF(2) rows are Python integers used as bit vectors (bit ``j`` is column
``j``, the top bit the constant), so one row operation is a single xor.
Other primes use a :mod:`numpy` matrix reduced modulo ``p``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .diffpoly import DifferenceRing, Poly, Var, collect_variables

logger = logging.getLogger(__name__)


class LinearityError(ValueError):
    """Raised when a generator handed to Gaussian elimination is not affine."""


@dataclass(frozen=True)
class LinearSlice:
    """A system of affine equations in reduced row-echelon form.

    ``rows[k]`` holds the coefficients of ``columns`` followed by the
    constant; row ``k`` has its pivot on ``pivot_vars[k]``.
    """

    ring: DifferenceRing
    columns: Tuple[Var, ...]
    rows: Tuple[Tuple[int, ...], ...]
    pivot_vars: Tuple[Var, ...]
    free_vars: Tuple[Var, ...]
    consistent: bool = True

    @property
    def rank(self) -> int:
        return len(self.pivot_vars)

    def substitutions(self) -> Dict[Var, Poly]:
        """Each pivot variable as an affine polynomial in the free variables."""
        ring = self.ring
        p = ring.p
        out: Dict[Var, Poly] = {}
        for pivot, row in zip(self.pivot_vars, self.rows):
            expr = ring.const(-row[-1])
            for column, coeff in zip(self.columns, row[:-1]):
                if coeff and column != pivot:
                    expr = expr + ring.gen(column).scale((-coeff) % p)
            out[pivot] = expr
        return out

    def solution(self) -> Optional[Dict[Var, int]]:
        """The unique solution when there are no free variables."""
        if not self.consistent or self.free_vars:
            return None
        return {v: int(f.constant_term()) for v, f in self.substitutions().items()}

    def polys(self) -> List[Poly]:
        ring = self.ring
        out = []
        for row in self.rows:
            raw = [(c, [v]) for v, c in zip(self.columns, row[:-1]) if c]
            raw.append((row[-1], []))
            out.append(ring.poly(raw))
        return out


def _column_order(variables: Sequence[Var]) -> Tuple[Var, ...]:
    return tuple(sorted(set(variables), key=lambda v: (v.stream, v.clock)))


def _check_affine(polys: Sequence[Poly]) -> None:
    for f in polys:
        if f.degree() > 1:
            raise LinearityError(f"generator {f} has degree {f.degree()}")


def _eliminate_gf2(rows: List[int], ncols: int) -> Tuple[List[int], List[int]]:
    pivots: List[int] = []
    rank = 0
    for col in range(ncols):
        bit = 1 << col
        found = next((k for k in range(rank, len(rows)) if rows[k] & bit), None)
        if found is None:
            continue
        rows[rank], rows[found] = rows[found], rows[rank]
        pivot_row = rows[rank]
        for k in range(len(rows)):
            if k != rank and rows[k] & bit:
                rows[k] ^= pivot_row
        pivots.append(col)
        rank += 1
    return rows, pivots


def _eliminate_mod_p(matrix: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    rows, cols = matrix.shape
    pivots: List[int] = []
    rank = 0
    for col in range(cols - 1):
        nonzero = np.nonzero(matrix[rank:, col])[0]
        if nonzero.size == 0:
            continue
        found = rank + int(nonzero[0])
        matrix[[rank, found]] = matrix[[found, rank]]
        inv = pow(int(matrix[rank, col]), p - 2, p)
        matrix[rank] = matrix[rank] * inv % p
        for k in range(rows):
            if k != rank and matrix[k, col]:
                matrix[k] = (matrix[k] - matrix[k, col] * matrix[rank]) % p
        pivots.append(col)
        rank += 1
        if rank == rows:
            break
    return matrix, pivots


def gaussian_eliminate(
    polys: Sequence[Poly],
    *,
    ring: Optional[DifferenceRing] = None,
    columns: Optional[Sequence[Var]] = None,
) -> LinearSlice:
    """Row-reduces affine generators.

    Columns default to the generators' variables ordered stream by stream,
    ascending clock, so the earliest clock of the first stream is pivoted first.

    Raises:
        LinearityError: When a generator has degree above one.
    """
    _check_affine(polys)
    if ring is None:
        if not polys:
            raise ValueError("a ring is required for an empty slice")
        ring = polys[0].ring
    cols = _column_order(columns if columns is not None else collect_variables(polys))
    index = {v: j for j, v in enumerate(cols)}
    ncols = len(cols)
    p = ring.p
    if p == 2:
        packed = []
        for f in polys:
            row = 0
            for m, _ in f:
                if m == 0:
                    row ^= 1 << ncols
                else:
                    (v, _e), = ring.factors(m)
                    row ^= 1 << index[v]
            if row:
                packed.append(row)
        reduced, pivots = _eliminate_gf2(packed, ncols)
        dense = [
            tuple((row >> j) & 1 for j in range(ncols + 1)) for row in reduced if row
        ]
    else:
        matrix = np.zeros((len(polys), ncols + 1), dtype=np.int64)
        for k, f in enumerate(polys):
            for m, c in f:
                if m == 0:
                    matrix[k, ncols] = c
                else:
                    (v, _e), = ring.factors(m)
                    matrix[k, index[v]] = c
        reduced_matrix, pivots = _eliminate_mod_p(matrix, p)
        dense = [tuple(int(x) for x in row) for row in reduced_matrix.tolist() if any(row)]
    consistent = all(any(row[:-1]) for row in dense)
    pivot_rows = [row for row in dense if any(row[:-1])]
    pivot_vars = tuple(cols[j] for j in pivots)
    pivot_set = set(pivot_vars)
    free_vars = tuple(v for v in cols if v not in pivot_set)
    logger.debug(
        "Eliminated %d generators: %d pivots, %d free, consistent=%s",
        len(polys),
        len(pivot_vars),
        len(free_vars),
        consistent,
    )
    return LinearSlice(ring, cols, tuple(pivot_rows), pivot_vars, free_vars, consistent)


__all__ = ["LinearSlice", "LinearityError", "gaussian_eliminate"]
