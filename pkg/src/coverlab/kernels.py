"""Kernel transforms of fractional schedule columns, with lazy prefix machinery.

Two kernel families:

  * harmonic(beta):  K(t,t') = beta/t for t' <= t.  Row sums are exactly beta;
    cumulative mass grows like beta*log(t), so every positive column
    eventually exceeds any threshold.
  * msvc:            K(t,t') = 4 t'(t'+1) / (t(t+1)(t+2)) for t' <= t.  Row sums
    are exactly 4/3; cumulative mass converges to 2*||a||_1.

Prefixes are evaluated in closed form for arbitrary t:

  harmonic:  z_{<=t} = beta * sum_{t''<=min(t,T)} a_{t''} (H_t - H_{t''-1})
  msvc:      z_{<=t} = sum_{t''<=min(t,T)} a_{t''} * 2(1 - t''(t''+1)/((t+1)(t+2)))

with H the harmonic numbers (memoized, digamma beyond the cached range).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

__all__ = ["Kernel", "KernelizedMass", "transform", "total_load", "log_lower_bound"]

_EULER = 0.57721566490153286060651209008240243

# Memoized harmonic numbers H_0..; extended on demand.  Idempotent fill keeps
# concurrent readers safe.
_HARMONIC = np.zeros(1)


def _harmonic_upto(t: int) -> np.ndarray:
    """Array of H_0..H_t."""
    global _HARMONIC
    if t >= len(_HARMONIC):
        size = max(t + 1, 2 * len(_HARMONIC))
        fresh = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, size))])
        _HARMONIC = fresh
    return _HARMONIC[: t + 1]


def harmonic_number(t) -> np.ndarray | float:
    """H_t, vectorized; exact cumulative sums for small t, digamma beyond."""
    t_arr = np.asarray(t, dtype=float)
    out = digamma(t_arr + 1.0) + _EULER
    small = t_arr < 64
    if np.any(small):
        table = _harmonic_upto(64)
        out = np.where(small, table[np.minimum(t_arr.astype(int), 64)], out)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class Kernel:
    kind: str  # "harmonic" | "msvc"
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("harmonic", "msvc"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "harmonic" and self.beta < 1:
            raise ValueError("harmonic kernel needs beta >= 1")

    @classmethod
    def harmonic(cls, beta: float) -> "Kernel":
        return cls("harmonic", beta)

    @classmethod
    def msvc(cls) -> "Kernel":
        return cls("msvc")

    def entry(self, t: int, tp: int) -> float:
        if tp > t or tp < 1:
            return 0.0
        if self.kind == "harmonic":
            return self.beta / t
        return 4.0 * tp * (tp + 1) / (t * (t + 1) * (t + 2))

    @property
    def load_bound(self) -> float:
        """Per-slot mass bound when the source columns pack to at most 1."""
        return self.beta if self.kind == "harmonic" else 4.0 / 3.0


def total_load(kernel: Kernel, t: int) -> float:
    """Exact row sum sum_{t'<=t} K(t,t'): beta for harmonic, 4/3 for msvc."""
    if t < 1:
        raise ValueError("t >= 1 required")
    if kernel.kind == "harmonic":
        return kernel.beta
    # telescoping: sum t'(t'+1) over t'<=t equals t(t+1)(t+2)/3
    return 4.0 / 3.0


class KernelizedMass:
    """A transformed column z = K a with memoized prefix sums and inverse queries."""

    def __init__(self, kernel: Kernel, a: np.ndarray):
        a = np.asarray(a, dtype=float)
        if a.ndim != 1:
            raise ValueError("column must be one-dimensional")
        if np.any(a < 0):
            raise ValueError("column entries must be non-negative")
        self.kernel = kernel
        # trim trailing zeros: support is all that matters
        nz = np.flatnonzero(a)
        self.support_end = int(nz[-1]) + 1 if nz.size else 0
        self.a = a[: self.support_end].copy()
        self.mass = float(self.a.sum())
        ts = np.arange(1, self.support_end + 1, dtype=float)
        if kernel.kind == "harmonic":
            H = _harmonic_upto(self.support_end)
            # prefix(t) = beta * (A_t H_t - C_t) for t <= T, beta*(mass*H_t - C) beyond
            self._A = np.cumsum(self.a)
            self._C = np.cumsum(self.a * H[:-1])  # H_{t''-1}
            self._C_total = float(self._C[-1]) if self.support_end else 0.0
        else:
            self._A = np.cumsum(self.a)
            self._D = np.cumsum(self.a * ts * (ts + 1))
            self._D_total = float(self._D[-1]) if self.support_end else 0.0
        self._dense = self._prefix_dense(self.support_end)

    # -- closed-form prefixes -------------------------------------------------

    def _prefix_dense(self, T: int) -> np.ndarray:
        """prefix(1..T) as an array."""
        if T == 0:
            return np.zeros(0)
        t = np.arange(1, T + 1, dtype=float)
        if self.kernel.kind == "harmonic":
            H = _harmonic_upto(T)[1:]
            return self.kernel.beta * (self._A * H - self._C)
        return 2.0 * self._A - 2.0 * self._D / ((t + 1.0) * (t + 2.0))

    def prefix(self, t) -> np.ndarray | float:
        """z_{<=t}, vectorized over t (t <= 0 gives 0)."""
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros(t_arr.shape)
        if self.support_end == 0:
            return out if out.shape else 0.0
        inside = (t_arr >= 1) & (t_arr <= self.support_end)
        beyond = t_arr > self.support_end
        if np.any(inside):
            idx = t_arr[inside].astype(int) - 1
            out[inside] = self._dense[idx]
        if np.any(beyond):
            tb = t_arr[beyond]
            if self.kernel.kind == "harmonic":
                out[beyond] = self.kernel.beta * (self.mass * harmonic_number(tb) - self._C_total)
            else:
                out[beyond] = 2.0 * self.mass - 2.0 * self._D_total / ((tb + 1.0) * (tb + 2.0))
        return out if out.shape else float(out)

    def strict_prefix(self, t) -> np.ndarray | float:
        """z_{<t}."""
        return self.prefix(np.asarray(t) - 1)

    def at(self, t) -> np.ndarray | float:
        """Single entry z_t."""
        return self.prefix(t) - self.prefix(np.asarray(t) - 1)

    @property
    def limit(self) -> float:
        """sup_t prefix(t): infinite for harmonic (nonzero column), 2*||a||_1 for msvc."""
        if self.mass == 0.0:
            return 0.0
        return np.inf if self.kernel.kind == "harmonic" else 2.0 * self.mass

    @property
    def harmonic_weight(self) -> float:
        """sum_t a_t H_{t-1}; the constant in the harmonic prefix beyond the support."""
        if self.kernel.kind != "harmonic":
            raise AttributeError("harmonic_weight is defined for harmonic kernels")
        return self._C_total

    @property
    def quad_weight(self) -> float:
        """sum_t a_t t(t+1); the constant in the msvc prefix beyond the support."""
        if self.kernel.kind != "msvc":
            raise AttributeError("quad_weight is defined for the msvc kernel")
        return self._D_total

    # -- inverse query ----------------------------------------------------------

    def first_reach(self, alpha) -> np.ndarray | float:
        """Minimal t with prefix(t) >= alpha (inf if the mass never gets there).

        Vectorized; values beyond the dense range are found by inverting the
        closed forms (digamma inversion for harmonic, quadratic for msvc).
        """
        al = np.atleast_1d(np.asarray(alpha, dtype=float))
        out = np.full(al.shape, np.inf)
        nonpos = al <= 0
        out[nonpos] = 1.0
        if self.support_end == 0:
            res = np.where(nonpos, 1.0, np.inf)
            return res if np.asarray(alpha).shape else float(res[0])
        top = self._dense[-1] if self.support_end else 0.0
        inside = (~nonpos) & (al <= top)
        if np.any(inside):
            out[inside] = np.searchsorted(self._dense, al[inside], side="left") + 1.0
        beyond = (~nonpos) & (al > top) & (al < self.limit)
        if np.any(beyond):
            out[beyond] = self._invert_beyond(al[beyond])
        res = out
        return res if np.asarray(alpha).shape else float(res[0])

    def _invert_beyond(self, al: np.ndarray) -> np.ndarray:
        if self.kernel.kind == "harmonic":
            # smallest integer t with H_t >= y
            y = (al / self.kernel.beta + self._C_total) / self.mass
            guess = np.maximum(np.exp(y - _EULER) - 0.5, self.support_end + 1.0)
            t = np.floor(guess).astype(np.int64).astype(float)
            t = np.maximum(t, self.support_end + 1.0)
            for _ in range(4):
                t = np.where(harmonic_number(t - 1) >= y, t - 1, t)
                t = np.where(harmonic_number(t) < y, t + 1, t)
            t = np.maximum(t, self.support_end + 1.0)
        else:
            # (t+1)(t+2) >= 2 D / (2 mass - alpha)
            q = 2.0 * self._D_total / (2.0 * self.mass - al)
            t = np.ceil((-3.0 + np.sqrt(1.0 + 4.0 * q)) / 2.0)
            t = np.maximum(t, self.support_end + 1.0)
            for _ in range(2):
                ok = (t + 1.0) * (t + 2.0) >= q
                t = np.where(ok & ((t) * (t + 1.0) >= q), t - 1.0, t)
                t = np.where((t + 1.0) * (t + 2.0) < q, t + 1.0, t)
            t = np.maximum(t, self.support_end + 1.0)
        return t


def transform(kernel: Kernel, a) -> KernelizedMass:
    """Apply the kernel to a non-negative finite-support column."""
    return KernelizedMass(kernel, np.asarray(a, dtype=float))


def log_lower_bound(kernel: Kernel, a, t: int) -> float:
    """beta * sum_{t'<=t} a_{t'} ln(t/t'): a guaranteed lower bound on z_{<t}.

    Harmonic kernels only (the bound comes from sum_{i=c}^{d-1} 1/i >= ln(d/c)).
    """
    if kernel.kind != "harmonic":
        raise ValueError("log lower bound applies to harmonic kernels only")
    a = np.asarray(a, dtype=float)
    hi = min(len(a), t)
    if hi <= 0:
        return 0.0
    ts = np.arange(1, hi + 1, dtype=float)
    return float(kernel.beta * np.sum(a[:hi] * np.log(t / ts)))
