"""
Sparse linear solves over the residue field F_p and over the rationals.

Several constructions reduce to one linear system per step: lifting a
solution of a δ-linear equation digit by digit, solving for the coefficients
of a Frobenius lift on a matrix group, expressing a symmetrized polynomial
through elementary symmetric functions. Rows are given as dictionaries
{column: value}; the systems are handed to sympy's DomainMatrix in sparse
format and reduced to row echelon form.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from sympy import QQ
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

Row = Dict[int, int]


def _augmented(rows: Sequence[Dict[int, object]], rhs: Sequence[object], ncols: int, domain):
    dod = {}
    for i, row in enumerate(rows):
        entries = {j: domain.convert(v) for j, v in row.items() if v}
        entries = {j: v for j, v in entries.items() if v}
        if rhs[i]:
            value = domain.convert(rhs[i])
            if value:
                entries[ncols] = value
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, (max(len(rows), 1), ncols + 1), domain)


def _solve(rows, rhs, ncols, domain) -> Optional[Dict[int, object]]:
    if not rows:
        return {}
    reduced, pivots = _augmented(rows, rhs, ncols, domain).rref()
    if ncols in pivots:
        return None
    dod = reduced.to_dod()
    solution = {}
    for i, col in enumerate(pivots):
        value = dod.get(i, {}).get(ncols)
        if value:
            solution[col] = value
    return solution


def solve_mod_p(rows: Sequence[Row], rhs: Sequence[int], ncols: int, p: int) -> Optional[List[int]]:
    """
    One solution of rows·x = rhs over F_p, free unknowns set to 0.

    Returns None when the system is inconsistent.
    """
    K = GF(p)
    logger.debug("solving %d x %d system over F_%d", len(rows), ncols, p)
    solution = _solve(rows, [v % p for v in rhs], ncols, K)
    if solution is None:
        return None
    x = [0] * ncols
    for col, value in solution.items():
        x[col] = int(value) % p
    return x


def rank_mod_p(rows: Sequence[Row], ncols: int, p: int) -> int:
    if not rows:
        return 0
    K = GF(p)
    dod = {}
    for i, row in enumerate(rows):
        entries = {j: K(v % p) for j, v in row.items() if v % p}
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, (len(rows), max(ncols, 1)), K).rank()


def solve_rational(rows: Sequence[Dict[int, Fraction]], rhs: Sequence[Fraction],
                   ncols: int) -> Optional[List[Fraction]]:
    """One rational solution of rows·x = rhs, or None when inconsistent."""
    converted_rows = [{j: QQ(v.numerator, v.denominator) for j, v in row.items()} for row in rows]
    converted_rhs = [QQ(Fraction(v).numerator, Fraction(v).denominator) for v in rhs]
    solution = _solve(converted_rows, converted_rhs, ncols, QQ)
    if solution is None:
        return None
    x = [Fraction(0)] * ncols
    for col, value in solution.items():
        x[col] = Fraction(int(value.numerator), int(value.denominator))
    return x


def matrix_mod_p_inverse(matrix: Sequence[Sequence[int]], p: int) -> Optional[List[List[int]]]:
    """Inverse over F_p of a square integer matrix, None when singular."""
    n = len(matrix)
    K = GF(p)
    M = DomainMatrix([[K(v % p) for v in row] for row in matrix], (n, n), K)
    if M.rank() < n:
        return None
    return [[int(v) % p for v in row] for row in M.inv().to_list()]
