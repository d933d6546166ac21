"""Hypergraph instances with covering requirements, validation, I/O, and generators.

An instance is a hypergraph on vertices 0..n-1 where each hyperedge carries a
covering requirement k (the edge is covered once k of its vertices have been
scheduled) and an integer multiplicity (a weight; costs are always
multiplicity-weighted sums, so large copy counts never materialize edge lists).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Edge",
    "Instance",
    "ProblemMode",
    "Violation",
    "validate",
    "infer_mode",
    "gen_random",
    "gen_msvc_gap",
    "gen_scaled_copies",
    "gen_partition_blocks",
    "to_json",
    "from_json",
    "save",
    "load",
]

# Scale constants larger than this make downstream float costs unreliable.
_SCALE_OVERFLOW_BITS = 62


@dataclass(frozen=True)
class Edge:
    """A hyperedge: vertex ids, covering requirement k, and multiplicity weight."""

    vertices: tuple[int, ...]
    k: int = 1
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))


@dataclass(frozen=True)
class Instance:
    n_vertices: int
    edges: tuple[Edge, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.edges)

    def digest(self) -> str:
        """Stable hash of the canonical instance text (meta excluded)."""
        doc = to_json(self, include_meta=False)
        return hashlib.sha256(doc.encode("utf-8")).hexdigest()


class ProblemMode(str, Enum):
    MSSC = "mssc"
    MSVC = "msvc"
    MIN_LATENCY = "latency"
    GMSSC = "gmssc"


@dataclass(frozen=True)
class Violation:
    edge_index: int | None
    message: str

    def __str__(self):
        where = "instance" if self.edge_index is None else f"edge {self.edge_index}"
        return f"{where}: {self.message}"


def validate(instance: Instance, mode: ProblemMode | None = None) -> list[Violation]:
    """Return every invariant violation; an empty list means the instance is well-formed.

    Violations are data, not failures: callers that need a hard guarantee should
    raise on a non-empty result.
    """
    out: list[Violation] = []
    if instance.n_vertices < 1:
        out.append(Violation(None, "n_vertices must be >= 1"))
    for i, e in enumerate(instance.edges):
        vs = e.vertices
        if len(vs) == 0:
            out.append(Violation(i, "vertex_set empty"))
            continue
        if len(set(vs)) != len(vs):
            out.append(Violation(i, "duplicate vertex in vertex_set"))
        if any(v < 0 or v >= instance.n_vertices for v in vs):
            out.append(Violation(i, "vertex id out of range"))
        if e.k < 1:
            out.append(Violation(i, "k_e < 1"))
        elif e.k > len(vs):
            out.append(Violation(i, "k_e > |e|"))
        if e.multiplicity < 1:
            out.append(Violation(i, "multiplicity < 1"))
        if mode is ProblemMode.MSSC and e.k != 1:
            out.append(Violation(i, "mssc requires k_e = 1"))
        elif mode is ProblemMode.MSVC:
            if len(vs) != 2:
                out.append(Violation(i, "edge size != 2"))
            if e.k != 1:
                out.append(Violation(i, "msvc requires k_e = 1"))
        elif mode is ProblemMode.MIN_LATENCY and e.k != len(vs):
            out.append(Violation(i, "latency requires k_e = |e|"))
    return out


def infer_mode(instance: Instance) -> ProblemMode:
    """Most specific mode consistent with the instance."""
    if all(len(e.vertices) == 2 and e.k == 1 for e in instance.edges):
        return ProblemMode.MSVC
    if all(e.k == 1 for e in instance.edges):
        return ProblemMode.MSSC
    if all(e.k == len(e.vertices) for e in instance.edges):
        return ProblemMode.MIN_LATENCY
    return ProblemMode.GMSSC


def _require_valid(instance: Instance, what: str):
    bad = validate(instance)
    if bad:
        raise ValueError(f"{what}: invalid instance: " + "; ".join(map(str, bad)))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

_REQ_MODES = ("all-one", "all-size", "all-but-one", "uniform")


def gen_random(
    n: int,
    m: int,
    max_edge_size: int,
    req_mode: str = "all-one",
    seed: int = 0,
) -> Instance:
    """Random instance: m edges with sizes uniform in [1, max_edge_size].

    req_mode picks requirements: all-one (k=1), all-size (k=|e|),
    all-but-one (k=max(1,|e|-1)), uniform (k uniform in [1,|e|]).
    Deterministic for a fixed seed.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if not (1 <= max_edge_size <= n):
        raise ValueError("need 1 <= max_edge_size <= n_vertices")
    if req_mode not in _REQ_MODES:
        raise ValueError(f"req_mode must be one of {_REQ_MODES}")
    rng = np.random.default_rng(seed)
    edges = []
    for _ in range(m):
        size = int(rng.integers(1, max_edge_size + 1))
        vs = tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
        if req_mode == "all-one":
            k = 1
        elif req_mode == "all-size":
            k = size
        elif req_mode == "all-but-one":
            k = max(1, size - 1)
        else:
            k = int(rng.integers(1, size + 1))
        edges.append(Edge(vs, k=k, multiplicity=1))
    return Instance(n, tuple(edges), meta={"generator": "random", "seed": seed})


def gap_clique_sizes(N: int, epsilon: float, k: int) -> list[int]:
    """Clique sizes N*i^-(2/3+eps), rounded to nearest then clamped strictly decreasing.

    Raises if the clamp would push any size below 2.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if N < max(k, 2):
        raise ValueError("need N >= max(k, 2)")
    if not (0 < epsilon < 1 / 3):
        raise ValueError("need epsilon in (0, 1/3)")
    alpha = 2.0 / 3.0 + epsilon
    sizes: list[int] = []
    prev = None
    for i in range(1, k + 1):
        ni = int(math.floor(N * i ** (-alpha) + 0.5))
        if prev is not None:
            ni = min(ni, prev - 1)
        if ni < 2:
            raise ValueError(f"clique {i} would have {ni} < 2 vertices; shrink k or grow N")
        sizes.append(ni)
        prev = ni
    return sizes


def gen_msvc_gap(N: int, epsilon: float, k: int) -> Instance:
    """Disjoint cliques with polynomially decaying sizes (the worst-case family for MSVC).

    Clique boundaries are recorded in meta["clique_starts"] / meta["clique_sizes"].
    """
    sizes = gap_clique_sizes(N, epsilon, k)
    edges = []
    starts = []
    base = 0
    for ni in sizes:
        starts.append(base)
        for a in range(ni):
            for b in range(a + 1, ni):
                edges.append(Edge((base + a, base + b)))
        base += ni
    return Instance(
        base,
        tuple(edges),
        meta={
            "generator": "msvc-gap",
            "clique_sizes": sizes,
            "clique_starts": starts,
            "N": N,
            "epsilon": epsilon,
        },
    )


def gen_scaled_copies(base: Instance, k: int, exponent: float) -> Instance:
    """k disjoint copies of `base`; copy i carries multiplicity round(a / i^exponent).

    For integral exponents a = lcm(1..k)^exponent, so every copy multiplicity is
    an exact integer; otherwise a = k^exponent and multiplicities are rounded.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if exponent < 1:
        raise ValueError("need exponent >= 1")
    _require_valid(base, "gen_scaled_copies")
    integral = float(exponent).is_integer()
    if integral:
        a: int | float = math.lcm(*range(1, k + 1)) ** int(exponent)
        if int(a).bit_length() > _SCALE_OVERFLOW_BITS:
            raise OverflowError(f"scale constant a needs {int(a).bit_length()} bits; reduce k")
        mults = [int(a) // i ** int(exponent) for i in range(1, k + 1)]
    else:
        a = float(k) ** exponent
        mults = [max(1, int(math.floor(a / i**exponent + 0.5))) for i in range(1, k + 1)]
    n0 = base.n_vertices
    edges = []
    starts = []
    for i in range(k):
        starts.append(i * n0)
        off = i * n0
        for e in base.edges:
            edges.append(
                Edge(
                    tuple(v + off for v in e.vertices),
                    k=e.k,
                    multiplicity=e.multiplicity * mults[i],
                )
            )
    return Instance(
        n0 * k,
        tuple(edges),
        meta={
            "generator": "scaled-copies",
            "scale_a": a,
            "copies": k,
            "exponent": exponent,
            "copy_n": n0,
            "copy_starts": starts,
            "base_edges": base.n_edges,
            "copy_multiplicities": mults,
        },
    )


def gen_partition_blocks(n: int, r: int, parts: int = 1, seed: int = 0) -> Instance:
    """k=1 hypergraph whose edges are vertex blocks of size n/r (r blocks per partition).

    The first partition is the identity layout; further partitions are random.
    Every edge has exactly n/r vertices, the shape needed by uniform-rate
    preemptive schedules to finish each edge exactly at a block boundary.
    """
    if n % r != 0:
        raise ValueError("r must divide n")
    size = n // r
    rng = np.random.default_rng(seed)
    edges = []
    for p in range(parts):
        perm = np.arange(n) if p == 0 else rng.permutation(n)
        for b in range(r):
            vs = tuple(sorted(int(v) for v in perm[b * size : (b + 1) * size]))
            edges.append(Edge(vs))
    return Instance(n, tuple(edges), meta={"generator": "partition-blocks", "r": r})


# ---------------------------------------------------------------------------
# text format: {"n": int, "edges": [{"v": [...], "k": int, "mult": int}], "meta": {...}}
# ---------------------------------------------------------------------------


def to_json(instance: Instance, include_meta: bool = True) -> str:
    doc: dict = {
        "n": instance.n_vertices,
        "edges": [
            {"v": list(e.vertices), "k": e.k, "mult": e.multiplicity} for e in instance.edges
        ],
    }
    if include_meta and instance.meta:
        doc["meta"] = instance.meta
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> Instance:
    doc = json.loads(text)
    edges = tuple(
        Edge(tuple(rec["v"]), k=int(rec.get("k", 1)), multiplicity=int(rec.get("mult", 1)))
        for rec in doc["edges"]
    )
    return Instance(int(doc["n"]), edges, meta=doc.get("meta", {}))


def save(instance: Instance, path: str):
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_json(instance))
        f.write("\n")


def load(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as f:
        return from_json(f.read())
