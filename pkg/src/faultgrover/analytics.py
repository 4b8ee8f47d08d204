"""Closed-form success probabilities, the query-rate function, and runtime bounds.

Success probabilities for one round of k Grover iterations over N elements:

  noiseless:      sin^2((2k+1) * arcsin(1/sqrt(N)))
  lower bound:    (1-p)^k * noiseless          (valid for any noise of strength p)
  depolarizing:   (1-(1-p)^k)/N + (1-p)^k * noiseless   (exact)

The rate R(N, k, p) counts queries per e-fold decrease of failure probability,
normalized by N.  Lower bounds on total queries are provided for memoryless
round-based algorithms and for exclusion algorithms, together with the two
technical inequalities used to derive them.

The convention 0^0 = 1 is used throughout, so p = 1 with k = 0 behaves like
a noiseless single guess.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

K_ASYMPTOTIC_CAP = 10**6


def p_success_noiseless(N: int, k: int) -> float:
    """Success probability of k noiseless Grover iterations over N elements."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    if k == 0:
        return 1.0 / N
    return math.sin((2 * k + 1) * math.asin(1.0 / math.sqrt(N))) ** 2


def p_success_lower(N: int, k: int, p: float) -> float:
    """Noise-free-history lower bound (1-p)^k * p_success_noiseless(N, k)."""
    return (1.0 - p) ** k * p_success_noiseless(N, k)


def p_success_depol_exact(N: int, k: int, p: float) -> float:
    """Exact round success probability under partial depolarizing noise."""
    survive = (1.0 - p) ** k
    return (1.0 - survive) / N + survive * p_success_noiseless(N, k)


def zalka_explicit_bound(N: int, k: int) -> float:
    """Upper bound (2k+1)^2 / N on any k-query search; caller clips at 1."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    return (2 * k + 1) ** 2 / N


def lemma1_gap(x: float, y: float, alpha: float) -> float:
    """RHS minus LHS of the tangent-plane inequality; nonnegative on its domain.

    sqrt(x y) + sqrt((1-x)(1-y)) <= 1 + (alpha-1) x/2 + (1/alpha - 1) y/2
    for x, y in [0, 1] and alpha > 0.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rhs = 1.0 + 0.5 * (alpha - 1.0) * x + 0.5 * (1.0 / alpha - 1.0) * y
    lhs = math.sqrt(x * y) + math.sqrt((1.0 - x) * (1.0 - y))
    return rhs - lhs


def zalka_bound_from_lemma1(N: int, k: int) -> float:
    """Explicit success bound obtained from the implicit one via lemma1_gap.

    Solving 4k^2 >= (1-a) N p_s - (1/a - 1) at a = 1/(2k+1) recovers the
    closed form (2k+1)^2/N; exposed so the algebra can be checked numerically.
    """
    if k < 1:
        raise ValueError("derivation needs k >= 1 (a = 1 degenerates at k = 0)")
    a = 1.0 / (2 * k + 1)
    return (4 * k * k + (1.0 / a - 1.0)) / ((1.0 - a) * N)


def thm1_bounds(N: int, k: int, p: float) -> tuple[float, float]:
    """Success-probability ceilings (1/N + 8/(N p^2), 8(k+1)/(N p)).

    Both are infinite at p = 0 (the bounds are vacuous without noise).
    """
    if p == 0.0:
        return math.inf, math.inf
    return 1.0 / N + 8.0 / (N * p * p), 8.0 * (k + 1) / (N * p)


VARIANT_EXACT = "exact-depolarizing"
VARIANT_LOWER = "lower-bound"


@dataclass(frozen=True)
class RatePoint:
    N: int | None  # None means the asymptotic (N -> infinity) rate
    k: int
    p: float
    R: float
    variant: str = VARIANT_EXACT


def rate(N: int | None, k: int, p: float, variant: str = VARIANT_EXACT) -> RatePoint:
    """Queries per e-fold failure decrease, normalized by N.

    Finite N:  R = (k+1) / (-N log(1 - p_s(N, k, p))) with p_s per ``variant``.
    N = None:  the large-N limit (k+1) / ((1-p)^k (2k+1)^2), which is the limit
    of the lower-bound variant.  Edge cases: R = 0 when p_s = 1, infinite when
    p_s = 0.
    """
    if N is None:
        denom = (1.0 - p) ** k * (2 * k + 1) ** 2
        r = math.inf if denom == 0.0 else (k + 1) / denom
        return RatePoint(None, k, p, r, variant)
    if variant == VARIANT_EXACT:
        ps = p_success_depol_exact(N, k, p)
    elif variant == VARIANT_LOWER:
        ps = p_success_lower(N, k, p)
    else:
        raise ValueError(f"unknown rate variant {variant!r}")
    if ps >= 1.0:
        return RatePoint(N, k, p, 0.0, variant)
    if ps <= 0.0:
        return RatePoint(N, k, p, math.inf, variant)
    return RatePoint(N, k, p, (k + 1) / (-N * math.log1p(-ps)), variant)


def k_opt(N: int | None, p: float, variant: str = VARIANT_EXACT) -> int:
    """Round length minimizing the rate; ties broken toward smaller k.

    Finite N searches k in 0..ceil(pi/4 sqrt(N)).  Asymptotic N searches
    k in 0..ceil(10/p) capped at 10^6; p = 0 there is unbounded and returns
    the cap with a RuntimeWarning.
    """
    if N is None:
        if p == 0.0:
            warnings.warn(
                "k_opt is unbounded for asymptotic N at p = 0; returning the cap",
                RuntimeWarning,
                stacklevel=2,
            )
            return K_ASYMPTOTIC_CAP
        kmax = min(math.ceil(10.0 / p), K_ASYMPTOTIC_CAP)
    else:
        kmax = math.ceil(math.pi / 4 * math.sqrt(N))
    best_k, best_r = 0, rate(N, 0, p, variant).R
    for k in range(1, kmax + 1):
        r = rate(N, k, p, variant).R
        if r < best_r:
            best_k, best_r = k, r
    return best_k


def crossing_p_asymptotic(k: int) -> float:
    """Noise level where the asymptotic rates of k-1 and k iterations cross.

    k_opt(None, p) equals k exactly on the interval (crossing(k+1), crossing(k)),
    with crossing(0) read as 1.
    """
    if k == 0:
        return 1.0
    if k < 0:
        raise ValueError("k must be nonnegative")
    return (4 * k * k + 4 * k - 1) / (k * (2 * k + 1) ** 2)


def lower_bound_memoryless(N: int, p: float, eps: float) -> float:
    """Minimum queries for memoryless round algorithms under depolarizing noise.

    Valid for p > 0 and N > 9/p^2 (the bound's own domain); raises otherwise.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    if p <= 0 or N * p * p <= 9.0:
        raise ValueError(f"bound needs N > 9/p^2; got N={N}, p={p}")
    x = N * p * p / 9.0
    bracket = -x * math.log1p(-1.0 / x)
    return (N * p * math.log(1.0 / eps) / 8.0) / bracket


def lower_bound_exclusion(N: int, p: float, eps: float) -> float:
    """Minimum queries for exclusion algorithms under depolarizing noise.

    The correction factor C solves C = 1/(1 - (1 + 8/p^2)/(N - q(C))) with
    q(C) = N / (1 + 8 C / (p log(1/eps))); solved by fixed-point iteration
    from C = 1.  Returns 0 with a RuntimeWarning if the iteration leaves the
    valid region N - q > 1 + 8/p^2.
    """
    if not (0 < p < 1) or not (0 < eps < 1):
        raise ValueError("bound needs p in (0,1) and eps in (0,1)")
    L = math.log(1.0 / eps)
    overhead = 1.0 + 8.0 / (p * p)
    C = 1.0
    for _ in range(100):
        q = N / (1.0 + 8.0 * C / (p * L))
        if N - q <= overhead:
            warnings.warn(
                "exclusion bound left its valid region; reporting 0",
                RuntimeWarning,
                stacklevel=2,
            )
            return 0.0
        C_next = 1.0 / (1.0 - overhead / (N - q))
        if abs(C_next - C) < 1e-12:
            C = C_next
            break
        C = C_next
    return N / (1.0 + 8.0 * C / (p * L))


def lemma2_sandwich(p: float, eps: float) -> tuple[float, float, float]:
    """The triple (L, M, U) with L <= M <= U used for constant-factor optimality.

    L = 1/(1 + 1/(p log(1/eps))),  M = min(1 - eps, p log(1/eps)),  U = 2 L.
    """
    if not (0 < p <= 1) or not (0 < eps < 1):
        raise ValueError("need p in (0,1] and eps in (0,1)")
    plog = p * math.log(1.0 / eps)
    lo = 1.0 / (1.0 + 1.0 / plog)
    mid = min(1.0 - eps, plog)
    return lo, mid, 2.0 * lo
