"""Two-phase dense-tableau primal simplex with Bland's anti-cycling rule.

Built for desk-scale covering LPs (up to a few thousand variables): the whole
tableau is a dense numpy array, pivots are vectorized row operations, and the
pivot tolerance is fixed at 1e-9.  Determinism matters more than speed here:
Bland's rule (lowest eligible index enters, lowest basis index breaks ratio
ties) makes every solve reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SimplexResult", "simplex_solve", "OPTIMAL", "INFEASIBLE", "UNBOUNDED"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

PIVOT_TOL = 1e-9


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    pivots: int = 0


class SimplexError(RuntimeError):
    pass


def simplex_solve(
    c,
    A,
    b,
    senses,
    tol: float = PIVOT_TOL,
    max_pivots: int = 500_000,
) -> SimplexResult:
    """Minimize c@x subject to A x (<=,>=,==) b, x >= 0.

    senses is a sequence of "<=", ">=", "==" per row.  Returns OPTIMAL with the
    structural solution vector, or INFEASIBLE / UNBOUNDED.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,) or len(senses) != m:
        raise ValueError("inconsistent LP dimensions")

    A = A.copy()
    senses = list(senses)
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            senses[i] = {"<=": ">=", ">=": "<=", "==": "=="}[senses[i]]

    n_slack = sum(1 for s in senses if s == "<=")
    n_surplus = sum(1 for s in senses if s == ">=")
    n_art = sum(1 for s in senses if s in (">=", "=="))
    total = n + n_slack + n_surplus + n_art

    T = np.zeros((m, total + 1))
    T[:, :n] = A
    T[:, -1] = b
    basis = np.empty(m, dtype=int)
    art_cols: list[int] = []
    js, jp, ja = n, n + n_slack, n + n_slack + n_surplus
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, js] = 1.0
            basis[i] = js
            js += 1
        elif s == ">=":
            T[i, jp] = -1.0
            T[i, ja] = 1.0
            basis[i] = ja
            art_cols.append(ja)
            jp += 1
            ja += 1
        else:
            T[i, ja] = 1.0
            basis[i] = ja
            art_cols.append(ja)
            ja += 1
    is_art = np.zeros(total, dtype=bool)
    is_art[art_cols] = True

    # Cost rows carried through every pivot: phase-1 (artificial sum) and phase-2.
    cost2 = np.zeros(total + 1)
    cost2[:n] = c
    cost1 = np.zeros(total + 1)
    cost1[art_cols] = 1.0
    for i in np.flatnonzero(is_art[basis]):
        cost1 -= T[i]

    pivots = 0

    def pivot(row: int, col: int):
        nonlocal pivots
        T[row] /= T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T[:, :] -= np.outer(colvals, T[row])
        for cr in (cost1, cost2):
            if cr[col] != 0.0:
                cr[:] -= cr[col] * T[row]
        basis[row] = col
        pivots += 1

    def run_phase(cost: np.ndarray, allowed: np.ndarray) -> str:
        nonlocal pivots
        while True:
            if pivots > max_pivots:
                raise SimplexError("pivot cap exceeded")
            red = cost[:total]
            elig = np.flatnonzero((red < -tol) & allowed)
            if elig.size == 0:
                return OPTIMAL
            col = int(elig[0])  # Bland: lowest index enters
            colv = T[:, col]
            pos = np.flatnonzero(colv > tol)
            if pos.size == 0:
                return UNBOUNDED
            ratios = T[pos, -1] / colv[pos]
            best = ratios.min()
            cand = pos[ratios <= best + tol]
            row = int(cand[np.argmin(basis[cand])])  # Bland: lowest basis index leaves
            pivot(row, col)

    if art_cols:
        status = run_phase(cost1, ~is_art)
        if status != OPTIMAL or -cost1[-1] > 1e-7:
            return SimplexResult(INFEASIBLE, pivots=pivots)
        # Drive leftover artificials out of the basis; rows with no eligible
        # pivot entry are redundant and stay parked at zero.
        for row in np.flatnonzero(is_art[basis]):
            entries = np.flatnonzero((np.abs(T[row, :total]) > tol) & ~is_art)
            if entries.size:
                pivot(int(row), int(entries[0]))

    status = run_phase(cost2, ~is_art)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, pivots=pivots)
    x = np.zeros(total)
    x[basis] = T[:, -1]
    return SimplexResult(OPTIMAL, x=x[:n].copy(), objective=float(c @ x[:n]), pivots=pivots)
