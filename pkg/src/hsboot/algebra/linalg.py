"""Gaussian elimination over finite fields."""

from __future__ import annotations

from typing import Sequence

from ..errors import FormatError, SpecMismatchError
from .field import FieldElement, FieldSpec


def rref(F: FieldSpec, rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; pivots are taken at the lowest available column."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == len(work):
            break
        piv = next((i for i in range(r, len(work)) if work[i][col]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = F.inv(work[r][col])
        work[r] = [F.mul(v, inv) for v in work[r]]
        pivot_row = work[r]
        for i in range(len(work)):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(work[i], pivot_row)]
        pivots.append(col)
        r += 1
    return work[:r], pivots


def kernel_vector(F: FieldSpec, rows: Sequence[Sequence[int]], ncols: int) -> list[int] | None:
    """Canonical nonzero kernel vector, or None when the kernel is trivial.

    The lowest-index free column is set to 1 and every other free column
    to 0; pivot columns follow by back-substitution.
    """
    for row in rows:
        if len(row) != ncols:
            raise FormatError(f"row of length {len(row)} in a system with {ncols} columns")
    reduced, pivots = rref(F, rows, ncols)
    pivot_set = set(pivots)
    free = next((c for c in range(ncols) if c not in pivot_set), None)
    if free is None:
        return None
    v = [0] * ncols
    v[free] = 1
    for row, p in zip(reduced, pivots):
        v[p] = F.neg(row[free])
    return v


def nullspace_vector(rows: Sequence[Sequence[FieldElement]], num_cols: int) -> list[FieldElement] | None:
    F = None
    for row in rows:
        if len(row) != num_cols:
            raise FormatError(f"ragged matrix: row of length {len(row)}, expected {num_cols}")
        for x in row:
            if F is None:
                F = x.field
            elif x.field != F:
                raise SpecMismatchError("matrix entries span several fields")
    if F is None:
        # no constraints: the first unit vector spans part of the kernel, but without
        # a field we cannot build elements
        raise FormatError("nullspace_vector needs at least one entry to determine the field")
    v = kernel_vector(F, [[x.value for x in row] for row in rows], num_cols)
    return None if v is None else [FieldElement(F, x) for x in v]
