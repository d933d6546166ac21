"""Lower-tail bounds for Bernoulli sums, exact Poisson-binomial tails, and the
per-edge distortion integral r(beta) with its grid verifiers.

The bound P(gamma) caps Pr[S <= k-1] for a sum S of independent Bernoulli
variables with E[S] = gamma*k, gamma >= 1 (P = 1 below gamma = 1: nothing can
be said there).  Three variants:

  weak         P(g) = e^(1-g) / 2
  strong       P(g) = e^(-g) * (e/2)^(e^(1-g))
  conjectured  P(g) = e^(-g) * (e/2)^(e^(c(1-g)))   (numerically supported only;
               quarantined from every acceptance gate and flagged in reports)

r(beta) = e^(1/beta) * (1 + (1/beta) * int_1^inf P(x) e^((x-1)/beta) dx).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TailVariant",
    "WEAK",
    "STRONG",
    "p_bound",
    "exact_left_tail",
    "poisson_left_tail",
    "r_beta",
    "minimize_beta_r",
    "adaptive_simpson",
    "verify_analysis_grids",
]

_THETA = 1.0 - math.log(2.0)  # ln(e/2)


@dataclass(frozen=True)
class TailVariant:
    kind: str  # "weak" | "strong" | "conjectured"
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("weak", "strong", "conjectured"):
            raise ValueError(f"unknown tail variant {self.kind!r}")

    @property
    def label(self) -> str:
        return f"conjectured(c={self.c:g})" if self.kind == "conjectured" else self.kind

    @property
    def proven(self) -> bool:
        return self.kind != "conjectured"


WEAK = TailVariant("weak")
STRONG = TailVariant("strong")


def conjectured(c: float = 13.3) -> TailVariant:
    return TailVariant("conjectured", c=c)


def p_bound(variant: TailVariant, gamma):
    """The variant's tail bound, vectorized; 1 for gamma < 1."""
    g = np.asarray(gamma, dtype=float)
    if variant.kind == "weak":
        val = np.exp(1.0 - g) / 2.0
    elif variant.kind == "strong":
        val = np.exp(-g) * (math.e / 2.0) ** np.exp(1.0 - g)
    else:
        val = np.exp(-g) * (math.e / 2.0) ** np.exp(variant.c * (1.0 - g))
    out = np.where(g < 1.0, 1.0, val)
    return out if out.shape else float(out)


def check_variant_shape(
    variant: TailVariant, grid: np.ndarray | None = None, tol: float = 1e-9
) -> None:
    """Assert P is non-increasing and convex on [1, inf) and P(1) <= 1 (grid check)."""
    if grid is None:
        grid = np.linspace(1.0, 50.0, 4001)
    vals = p_bound(variant, grid)
    if vals[0] > 1.0 + tol:
        raise ValueError(f"{variant.label}: P(1) > 1")
    d = np.diff(vals)
    if np.any(d > tol):
        raise ValueError(f"{variant.label}: not non-increasing on the grid")
    dd = np.diff(vals, 2)
    if np.any(dd < -tol):
        raise ValueError(f"{variant.label}: not convex on the grid")


def exact_left_tail(probs, k: int) -> float:
    """Pr[sum of Bernoulli(p_i) <= k-1] by the convolution DP; exact up to float error.

    O(n*k).  When k-1 >= n the tail is 1.
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    p = np.asarray(probs, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    if k - 1 >= p.size:
        return 1.0
    # dp[j] = Pr[j successes so far], j capped at k-1 (overflow mass dropped)
    dp = np.zeros(k)
    dp[0] = 1.0
    for pi in p:
        dp[1:] = dp[1:] * (1.0 - pi) + dp[:-1] * pi
        dp[0] *= 1.0 - pi
    return float(dp.sum())


def exact_left_tail_batch(p_matrix: np.ndarray, k_max: int) -> np.ndarray:
    """Row-wise Pr[S <= k-1] for every k = 1..k_max: shape (rows, k_max).

    Padding a row with zeros does not change its distribution, so ragged prob
    vectors can share one matrix.
    """
    rows, n = p_matrix.shape
    dp = np.zeros((rows, k_max))
    dp[:, 0] = 1.0
    for i in range(n):
        pi = p_matrix[:, i : i + 1]
        dp[:, 1:] = dp[:, 1:] * (1.0 - pi) + dp[:, :-1] * pi
        dp[:, 0:1] *= 1.0 - pi
    tails = np.cumsum(dp, axis=1)
    too_big = np.arange(1, k_max + 1)[None, :] - 1 >= n
    return np.where(too_big, 1.0, tails)


def poisson_left_tail(k: int, lam: float) -> float:
    """Pr[Poisson(lam) <= k-1] = e^-lam * sum_{i<k} lam^i / i!, summed in the log domain."""
    if k < 1:
        raise ValueError("k >= 1 required")
    if lam <= 0:
        raise ValueError("lam > 0 required")
    i = np.arange(k, dtype=float)
    logs = i * math.log(lam) - lam - np.array([math.lgamma(v + 1.0) for v in i])
    m = logs.max()
    return float(math.exp(m) * np.exp(logs - m).sum())


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 48) -> float:
    """Adaptive Simpson integration with a vectorized interval worklist.

    f must accept numpy arrays.  Intervals whose Richardson error estimate
    exceeds their share of tol are split; everything pending is evaluated in
    one batch per round.
    """
    if b <= a:
        return 0.0
    lo = np.array([a])
    hi = np.array([b])
    flo, fhi = f(lo), f(hi)
    fmid = f((lo + hi) / 2.0)
    simp = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    total = 0.0
    for _ in range(max_depth):
        mid = (lo + hi) / 2.0
        lm = (lo + mid) / 2.0
        rm = (mid + hi) / 2.0
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = (left + right - simp) / 15.0
        share = tol * (hi - lo) / (b - a)
        done = np.abs(err) <= share
        total += float(np.sum(left[done] + right[done] + err[done]))
        if np.all(done):
            return total
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([flm[keep], frm[keep]])
        simp = np.concatenate([left[keep], right[keep]])
    return total + float(np.sum(simp))


# ---------------------------------------------------------------------------
# r(beta)
# ---------------------------------------------------------------------------

_TAIL_EPS = 1e-14


def _r_beta_quadrature(beta: float, variant: TailVariant) -> tuple[float, float]:
    """(r(beta), truncation error bound)."""
    x_max = 1.0 + (beta / (beta - 1.0)) * math.log(1.0 / _TAIL_EPS)
    integrand = lambda x: p_bound(variant, x) * np.exp((x - 1.0) / beta)
    integral = adaptive_simpson(integrand, 1.0, x_max, tol=1e-12)
    # beyond x_max: P(x) <= (e/2) e^{-x} for every variant, so the envelope
    # decays like e^{-(x-1)(1-1/beta)}
    trunc = (math.e / 2.0) * _TAIL_EPS * beta / (beta - 1.0)
    return math.exp(1.0 / beta) * (1.0 + integral / beta), math.exp(1.0 / beta) * trunc / beta


def r_beta(beta: float, variant: TailVariant) -> float:
    """The per-edge distortion factor e^(1/beta) (1 + (1/beta) int_1^inf P(x) e^((x-1)/beta) dx).

    For the weak variant the closed form beta*r(beta) = beta(2beta-1)e^(1/beta)/(2beta-2)
    is returned after asserting agreement with quadrature to 1e-9.
    """
    if beta <= 1:
        raise ValueError("beta > 1 required (the distortion integral diverges at beta = 1)")
    check_variant_shape(variant)
    val, _ = _r_beta_quadrature(beta, variant)
    if variant.kind == "weak":
        closed = (2.0 * beta - 1.0) * math.exp(1.0 / beta) / (2.0 * beta - 2.0)
        if abs(closed - val) > 1e-9:
            raise AssertionError(f"weak-variant quadrature drifted from closed form: {val} vs {closed}")
        return closed
    return val


def minimize_beta_r(variant: TailVariant, lo: float = 1.3, hi: float = 3.5) -> tuple[float, float]:
    """Golden-section minimum of beta * r(beta); returns (beta*, value)."""
    check_variant_shape(variant)
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    f = lambda b: b * _r_beta_quadrature(b, variant)[0]
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    beta_star = (a + b) / 2.0
    return beta_star, f(beta_star)


# ---------------------------------------------------------------------------
# grid verifiers
# ---------------------------------------------------------------------------


@dataclass
class GridConfig:
    poisson_k_max: int = 30
    poisson_gamma_step: float = 0.05
    fuzz_vectors: int = 10_000
    fuzz_n_max: int = 40
    fuzz_seed: int = 20260810
    ratio_a_points: int = 240
    ratio_a_max: float = 50.0
    appendix_k_max: int = 200
    appendix_gamma_max: float = 10.0


def _ratio_integrals(s: float, beta: float, a_grid: np.ndarray, variant: TailVariant):
    """Evaluate f(a)/g(a) where
       f(a) = 1 + int_1^a P(1+s*beta*ln x) dx + a * int_1^inf P(1+beta*s*ln a + beta*ln y) dy
       g(a) = s e^(-1/(s beta)) + a(1-s).

    Both integrals are computed after exponential substitution (w = the bound's
    argument), where the integrands decay like e^(-w(1-1/beta)) and truncation
    is controlled by that envelope.
    """
    out = np.empty(a_grid.size)
    wtail = (beta / (beta - 1.0)) * math.log(1.0 / 1e-13)
    for i, a in enumerate(a_grid):
        # head: w = 1 + s*beta*ln x over [1, a]
        if a > 1.0:
            w_hi = 1.0 + s * beta * math.log(a)
            head = adaptive_simpson(
                lambda w: p_bound(variant, w) * np.exp((w - 1.0) / (s * beta)),
                1.0,
                w_hi,
                tol=1e-12,
            ) / (s * beta)
        else:
            head = 0.0
        # tail: w = 1 + c + beta*ln y with c = beta*s*ln a
        c = beta * s * math.log(a)
        tail = adaptive_simpson(
            lambda w: p_bound(variant, w) * np.exp((w - 1.0 - c) / beta),
            1.0 + c,
            1.0 + c + wtail,
            tol=1e-12,
        ) / beta
        f = 1.0 + head + a * tail
        g = s * math.exp(-1.0 / (s * beta)) + a * (1.0 - s)
        out[i] = f / g
    return out


def verify_analysis_grids(config: GridConfig | None = None) -> dict:
    """Numeric grid verification bundle; returns a report with worst margins.

    Parts: (a) Poisson tails under both proven bound variants, (b) random
    Poisson-binomial fuzz against the strong bound, (c) the identical-probability
    extremality spot check, (d) the distortion-ratio maximization at a = 1,
    (e) the induction inequality grid and the q(x) >= 0 polynomial check.
    The analytic statements hold on infinite domains; these finite grids are
    the substitute and the report says so.
    """
    cfg = config or GridConfig()
    report: dict = {"scope": "finite grids substitute for the full analytic ranges"}

    # (a) poisson_left_tail(k, gamma*k) <= P(gamma), both proven variants
    gammas = np.arange(1.0, 6.0 + 1e-12, cfg.poisson_gamma_step)
    worst = {"weak": np.inf, "strong": np.inf}
    witness = {}
    ok = True
    for k in range(1, cfg.poisson_k_max + 1):
        tails = np.array([poisson_left_tail(k, g * k) for g in gammas])
        for name, var in (("weak", WEAK), ("strong", STRONG)):
            margins = p_bound(var, gammas) - tails
            j = int(np.argmin(margins))
            if margins[j] < worst[name]:
                worst[name] = float(margins[j])
                witness[name] = {"k": k, "gamma": float(gammas[j])}
            if margins[j] < -1e-12:
                ok = False
    report["poisson_grid"] = {
        "passed": ok,
        "worst_margin": worst,
        "witness": witness,
        "k_range": [1, cfg.poisson_k_max],
        "gamma_range": [1.0, 6.0],
    }

    # (b) random Poisson-binomial fuzz vs the strong bound
    rng = np.random.default_rng(cfg.fuzz_seed)
    sizes = rng.integers(1, cfg.fuzz_n_max + 1, size=cfg.fuzz_vectors)
    pm = rng.random((cfg.fuzz_vectors, cfg.fuzz_n_max))
    pm[np.arange(cfg.fuzz_n_max)[None, :] >= sizes[:, None]] = 0.0
    mu = pm.sum(axis=1)
    kmax = int(np.floor(mu.max()))
    fuzz_ok, fuzz_worst, fuzz_wit, checked = True, np.inf, None, 0
    if kmax >= 1:
        tails = exact_left_tail_batch(pm, kmax)
        ks = np.arange(1, kmax + 1, dtype=float)
        gam = mu[:, None] / ks[None, :]
        valid = gam >= 1.0
        bounds = p_bound(STRONG, np.where(valid, gam, 1.0))
        margins = np.where(valid, bounds - tails, np.inf)
        checked = int(valid.sum())
        j = np.unravel_index(int(np.argmin(margins)), margins.shape)
        fuzz_worst = float(margins[j])
        fuzz_wit = {"vector": int(j[0]), "k": int(j[1] + 1), "gamma": float(gam[j])}
        fuzz_ok = fuzz_worst >= -1e-12
    report["bernoulli_fuzz"] = {
        "passed": fuzz_ok,
        "vectors": cfg.fuzz_vectors,
        "pairs_checked": checked,
        "worst_margin": fuzz_worst,
        "witness": fuzz_wit,
    }

    # (c) identical probabilities maximize the left tail at fixed mean:
    # mean-preserving pairwise transfers never increase the tail
    ident_ok, ident_worst = True, np.inf
    for n, k in ((10, 3), (20, 7), (40, 25), (8, 8)):
        for mu_target in (float(k), min(1.3 * k, float(n))):
            p0 = np.full(n, mu_target / n)
            base = exact_left_tail(p0, k)
            for _ in range(100):
                pert = p0.copy()
                for _ in range(5):
                    i, j = rng.integers(0, n, size=2)
                    if i == j:
                        continue
                    d = rng.random() * min(pert[i], 1.0 - pert[j])
                    pert[i] -= d
                    pert[j] += d
                m = base - exact_left_tail(pert, k)
                ident_worst = min(ident_worst, float(m))
                if m < -1e-12:
                    ident_ok = False
    report["identical_extremal"] = {"passed": ident_ok, "worst_margin": ident_worst}

    # (d) ratio maximized at a = 1 on the (s, beta) grid
    a_grid = np.concatenate([[1.0], np.geomspace(1.0 + 1e-4, cfg.ratio_a_max, cfg.ratio_a_points)])
    ratio_ok, ratio_worst, ratio_wit = True, np.inf, None
    for s in np.arange(0.1, 0.95, 0.1):
        for beta in (1.5, 2.0, 2.0715, 3.0):
            vals = _ratio_integrals(float(s), beta, a_grid, STRONG)
            margin = float(vals[0] - vals[1:].max())
            if margin < ratio_worst:
                ratio_worst = margin
                ratio_wit = {"s": round(float(s), 2), "beta": beta}
            if margin < -1e-6:
                ratio_ok = False
    report["ratio_max_at_one"] = {
        "passed": ratio_ok,
        "worst_margin": ratio_worst,
        "witness": ratio_wit,
        "tolerance": 1e-6,
    }

    # (e) induction inequality and the quadratic q
    ks = np.arange(2, cfg.appendix_k_max + 1, dtype=float)[:, None]
    gs = np.arange(1.0, cfg.appendix_gamma_max + 1e-12, 0.01)[None, :]
    th = _THETA
    lhs = np.log(1.0 - 1.0 / ks - (math.e * th / ks) * np.exp(-gs))
    rhs = -gs / (ks - 1.0) + math.e * th * (np.exp(-gs * ks / (ks - 1.0)) - np.exp(-gs))
    ind_margin = float(np.min(lhs - rhs))
    # monotonicity of the two sides in gamma (closed-form derivatives)
    dl = (math.e * th / ks) * np.exp(-gs) / (1.0 - 1.0 / ks - (math.e * th / ks) * np.exp(-gs))
    dr = -1.0 / (ks - 1.0) + math.e * th * (
        -(ks / (ks - 1.0)) * np.exp(-gs * ks / (ks - 1.0)) + np.exp(-gs)
    )
    xs = np.linspace(0.0, 1.0, 2001)
    q = 1.0 - th - th * th - 2.0 * th * xs + th * th * xs * xs
    report["induction_grid"] = {
        "passed": bool(ind_margin >= -1e-12 and np.all(dl >= -1e-12) and np.all(dr <= 1e-12)),
        "worst_margin": ind_margin,
        "lhs_derivative_min": float(dl.min()),
        "rhs_derivative_max": float(dr.max()),
        "k_range": [2, cfg.appendix_k_max],
        "gamma_range": [1.0, cfg.appendix_gamma_max],
    }
    report["quadratic_q"] = {
        "passed": bool(np.all(q >= -1e-12)),
        "min_value": float(q.min()),
        "value_at_one": float(q[-1]),
    }

    report["passed"] = all(
        report[part]["passed"]
        for part in (
            "poisson_grid",
            "bernoulli_fuzz",
            "identical_extremal",
            "ratio_max_at_one",
            "induction_grid",
            "quadratic_q",
        )
    )
    return report
