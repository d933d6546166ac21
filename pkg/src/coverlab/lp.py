"""Time-indexed covering LP: model building, knapsack-cover separation, relaxation solve.

Variables are x[v,t] (vertex v scheduled at slot t) and u[e,t] (edge e still
uncovered at the start of slot t), for t = 1..T with horizon T = n_vertices.
The objective is sum over (e,t) of multiplicity(e) * (t^p - (t-1)^p) * u[e,t].

Rows:
  * packing: sum_v x[v,t] <= 1 for every slot,
  * covering at (e,t) for an ignored subset S of e with |S| < k_e:
        (k_e-|S|) u[e,t] + sum_{v in e\\S} x[v,<t] >= k_e - |S|,
  * completion rows at t = T+1 (same covering rows with u fixed to 0), which
    pin u[e,T+1] = 0 so per-edge telescopes are exact.  Integral schedules place
    every vertex by slot T, so completion rows keep the LP a valid relaxation.

Covering rows with S != {} are generated lazily by cutting planes; there are
2^|e| * m * T of them, but the exchange rule separates exactly in O(|e| log |e|).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instances import Instance, Violation, validate
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, SimplexResult, simplex_solve

__all__ = [
    "LPModel",
    "FractionalSolution",
    "CutRow",
    "build_lp",
    "kc_separate",
    "solve_relaxation",
    "lp_edge_cost",
    "edge_demand_column",
    "kc_tightest_residual",
    "RelaxationError",
]

SEPARATION_TOL = 1e-7
BASIC = "basic"
KC_SEED = "kc-seed"


@dataclass(frozen=True)
class CutRow:
    """A covering row: edge index, time slot (1..T+1), ignored subset S."""

    edge: int
    t: int
    ignored: tuple[int, ...]

    def describe(self) -> str:
        return f"cover(e={self.edge}, t={self.t}, S={list(self.ignored)})"


@dataclass
class LPModel:
    instance: Instance
    p: float
    constraint_mode: str
    T: int
    objective: np.ndarray  # over the packed variable vector
    cut_rows: list[CutRow] = field(default_factory=list)

    @property
    def n_x(self) -> int:
        return self.instance.n_vertices * self.T

    @property
    def n_u(self) -> int:
        return self.instance.n_edges * self.T

    @property
    def n_vars(self) -> int:
        return self.n_x + self.n_u

    def x_index(self, v: int, t: int) -> int:
        return v * self.T + (t - 1)

    def u_index(self, e: int, t: int) -> int:
        return self.n_x + e * self.T + (t - 1)


@dataclass
class FractionalSolution:
    """LP solution: x is (n, T), u is (m, T); u[e, T+1] is 0 by construction."""

    x: np.ndarray
    u: np.ndarray
    objective: float
    instance: Instance | None = None

    @property
    def T(self) -> int:
        return self.x.shape[1]

    def x_prefix(self) -> np.ndarray:
        """P[v, t] = sum_{t' < t} x[v, t'] for t = 1..T+1, shape (n, T+1)."""
        n = self.x.shape[0]
        return np.hstack([np.zeros((n, 1)), np.cumsum(self.x, axis=1)])

    def check(self, instance: Instance, p: float = 1.0, tol: float = 1e-6) -> list[str]:
        problems = []
        if np.any(self.x.sum(axis=0) > 1 + tol):
            problems.append("slot load exceeds 1")
        if np.any(self.x < -tol) or np.any(self.u < -tol):
            problems.append("negative variable")
        if np.any(self.u > 1 + tol):
            problems.append("u above 1")
        mult = np.array([e.multiplicity for e in instance.edges], dtype=float)
        obj = float(mult @ (self.u @ _time_weights(self.T, p)))
        if abs(obj - self.objective) > tol * max(1.0, abs(obj)):
            problems.append("objective does not match weighted u sum")
        return problems


def _time_weights(T: int, p: float) -> np.ndarray:
    t = np.arange(1, T + 1, dtype=float)
    return t**p - (t - 1) ** p


def build_lp(instance: Instance, p: float = 1.0, constraint_mode: str = KC_SEED) -> LPModel:
    """LP with packing rows and the S = {} covering rows (full KC arrives via separation).

    In "basic" mode the covering rows are the unscaled form
    u[e,t] + sum_{v in e} x[v,<t] >= 1; for k_e = 1 both builders coincide.
    """
    bad = validate(instance)
    if bad:
        raise ValueError("invalid instance: " + "; ".join(map(str, bad)))
    if constraint_mode not in (BASIC, KC_SEED):
        raise ValueError(f"unknown constraint_mode {constraint_mode!r}")
    T = instance.n_vertices
    model = LPModel(instance, p, constraint_mode, T, objective=np.zeros(0))
    obj = np.zeros(model.n_vars)
    w = _time_weights(T, p)
    for e, edge in enumerate(instance.edges):
        for t in range(1, T + 1):
            obj[model.u_index(e, t)] = edge.multiplicity * w[t - 1]
    model.objective = obj
    for e in range(instance.n_edges):
        for t in range(1, T + 2):
            model.cut_rows.append(CutRow(e, t, ()))
    return model


class RelaxationError(RuntimeError):
    def __init__(self, message: str, last_solution: "FractionalSolution | None" = None):
        super().__init__(message)
        self.last_solution = last_solution


def _solve_model(model: LPModel) -> FractionalSolution:
    inst, T = model.instance, model.T
    n, m = inst.n_vertices, inst.n_edges
    A, b, senses = _dense(model)
    res = simplex_solve(model.objective, A, b, senses)
    if res.status != OPTIMAL:
        # Covering LPs here are always feasible and bounded; anything else is a builder bug.
        raise RelaxationError(f"simplex returned {res.status}")
    x = res.x[: model.n_x].reshape(n, T)
    u = res.x[model.n_x :].reshape(m, T)
    return FractionalSolution(x=x, u=u, objective=res.objective, instance=inst)


def _dense(model: LPModel) -> tuple[np.ndarray, np.ndarray, list[str]]:
    inst, T = model.instance, model.T
    n = inst.n_vertices
    nrows = T + len(model.cut_rows)
    A = np.zeros((nrows, model.n_vars))
    b = np.zeros(nrows)
    senses: list[str] = []
    for t in range(1, T + 1):
        A[t - 1, (np.arange(n) * T) + (t - 1)] = 1.0
        b[t - 1] = 1.0
        senses.append("<=")
    r = T
    for cut in model.cut_rows:
        edge = inst.edges[cut.edge]
        if model.constraint_mode == BASIC and not cut.ignored:
            need = 1
        else:
            need = edge.k - len(cut.ignored)
        if cut.t <= T:
            A[r, model.u_index(cut.edge, cut.t)] = float(need)
        ignored = set(cut.ignored)
        for v in edge.vertices:
            if v in ignored:
                continue
            if cut.t > 1:
                A[r, model.x_index(v, 1) : model.x_index(v, 1) + (cut.t - 1)] = 1.0
        b[r] = float(need)
        senses.append(">=")
        r += 1
    return A, b, senses


def kc_separate(
    instance: Instance,
    candidate: FractionalSolution,
    tol: float = SEPARATION_TOL,
) -> list[CutRow]:
    """Most-violated KC row per (e, t), by the exchange rule.

    A vertex belongs in the ignored set S exactly when x[v,<t] > 1 - u[e,t]
    (moving v into S changes the slack by (1 - u) - x[v,<t]); at most k_e - 1
    such vertices are kept, largest prefixes first, ties broken by vertex id.
    Includes the u = 0 completion slot t = T+1.  Empty result certifies every
    KC row holds within tol.
    """
    T = candidate.T
    prefix = candidate.x_prefix()
    out: list[CutRow] = []
    for e, edge in enumerate(instance.edges):
        k = edge.k
        members = np.array(edge.vertices)
        for t in range(1, T + 2):
            u = float(candidate.u[e, t - 1]) if t <= T else 0.0
            pre = prefix[members, t - 1]
            eligible = np.flatnonzero(pre > 1.0 - u)
            if eligible.size > k - 1:
                # keep the k-1 largest prefixes; ties resolved by lower vertex id
                order = sorted(eligible, key=lambda j: (-pre[j], members[j]))
                eligible = np.array(order[: k - 1])
            S = tuple(sorted(int(members[j]) for j in eligible))
            need = k - len(S)
            rest = float(pre.sum() - pre[eligible].sum()) if eligible.size else float(pre.sum())
            slack = need * u + rest - need
            if slack < -tol:
                out.append(CutRow(e, t, S))
    return out


def solve_relaxation(
    instance: Instance,
    p: float = 1.0,
    max_rounds: int = 200,
) -> FractionalSolution:
    """Cutting-plane loop: solve, separate, add rows, repeat until no violation.

    Uses the basic rows alone when every k_e = 1 (the S = {} row is the whole
    family then); otherwise seeds with S = {} KC rows and separates.  The result
    satisfies all KC rows within 1e-7.
    """
    all_unit = all(e.k == 1 for e in instance.edges)
    mode = BASIC if all_unit else KC_SEED
    model = build_lp(instance, p=p, constraint_mode=mode)
    seen = set(model.cut_rows)
    sol: FractionalSolution | None = None
    for _ in range(max_rounds):
        sol = _solve_model(model)
        violated = kc_separate(instance, sol)
        fresh = [cut for cut in violated if cut not in seen]
        if not fresh:
            return sol
        model.cut_rows.extend(fresh)
        seen.update(fresh)
    raise RelaxationError(f"no KC convergence after {max_rounds} rounds", last_solution=sol)


def lp_edge_cost(solution: FractionalSolution, e: int, p: float = 1.0) -> float:
    """Single-copy LP cost of edge e: sum_t (t^p - (t-1)^p) u[e,t]."""
    return float(_time_weights(solution.T, p) @ solution.u[e])


def edge_demand_column(solution: FractionalSolution, e: int, clamp: float = 1e-9) -> np.ndarray:
    """x_e[t] = u[e,t] - u[e,t+1] with u[e,T+1] = 0; tiny negative LP noise clamped."""
    u = solution.u[e]
    col = np.empty_like(u)
    col[:-1] = u[:-1] - u[1:]
    col[-1] = u[-1]
    small = (col < 0) & (col > -clamp)
    col[small] = 0.0
    if np.any(col < 0):
        raise ValueError(f"edge {e}: u not non-increasing beyond clamp tolerance")
    return col


def kc_tightest_residual(instance: Instance, prefix: np.ndarray, e: int, t: int) -> float:
    """max over ignored-prefix sets S of ((k-|S|) - sum_{v not in S} x[v,<t])_+ / (k-|S|).

    This is the pointwise lower envelope the KC rows place on u[e,t]; at an
    optimum u[e,t] matches it.  S candidates are the j largest prefixes for
    j = 0..k-1, which is exhaustive for this ratio form.
    """
    edge = instance.edges[e]
    pre = np.sort(prefix[np.array(edge.vertices), t - 1])[::-1]
    total = pre.sum()
    best = 0.0
    dropped = 0.0
    for j in range(edge.k):
        need = edge.k - j
        val = (need - (total - dropped)) / need
        best = max(best, val)
        dropped += pre[j] if j < len(pre) else 0.0
    return max(0.0, best)
