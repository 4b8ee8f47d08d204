"""Round-length schedules for repeated noisy Grover search.

A schedule is a sequence of round lengths k_g; round g costs k_g + 1 queries
(the +1 is the verification query).  Exclusion schedules strike the measured
element from the search set after each failed, verified round, so round g runs
on N - g surviving elements.

Constructors:

  schedule_known_p    repeat scheme tuned to a known noise level (c=5, p*=1/2)
  schedule_alg1       fault-ignorant memoryless sequence, k_g ~ a_g (pi/4) sqrt(N)
  schedule_alg2       fault-ignorant exclusion sequence with classical switch
  schedule_classical  test elements one by one
  schedule_dp         optimal exclusion schedule by dynamic programming
  schedule_iterative  infimum-based predecessor of alg1 (small N diagnostics)
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import analytics

DP_DIM_CAP = 512

# relative slack on "failure <= eps" comparisons: schedules whose failure hits
# eps exactly in real arithmetic must not flip feasibility on float rounding
FEASIBILITY_SLACK = 1e-12


class Provenance(enum.Enum):
    KNOWN_P = "knownp"
    ALG1 = "alg1"
    ALG2 = "alg2"
    CLASSICAL = "classical"
    DP = "dp"
    ITERATIVE = "iterative"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, tag: str) -> "Provenance":
        for member in cls:
            if member.value == tag:
                return member
        raise ValueError(f"unknown schedule provenance {tag!r}")


MEMORYLESS_PROVENANCE = {Provenance.KNOWN_P, Provenance.ALG1, Provenance.ITERATIVE}


@dataclass(frozen=True)
class Schedule:
    """A (possibly unbounded) sequence of round lengths plus the exclusion flag.

    ``rounds`` holds explicit lengths; ``length_fn`` serves unbounded schedules
    instead.  ``max_rounds`` is None only for unbounded schedules.  Instances
    are immutable and safe to share across trial workers.
    """

    provenance: Provenance
    N: int
    exclusion: bool
    rounds: tuple[int, ...] | None = None
    length_fn: Callable[[int], int] | None = field(default=None, repr=False)
    max_rounds: int | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.rounds is None) == (self.length_fn is None):
            raise ValueError("exactly one of rounds / length_fn must be given")
        if self.rounds is not None and self.max_rounds is None:
            object.__setattr__(self, "max_rounds", len(self.rounds))
        if self.exclusion and self.provenance in MEMORYLESS_PROVENANCE:
            raise ValueError(
                f"{self.provenance.value} schedules are memoryless; exclusion is invalid"
            )

    @property
    def unbounded(self) -> bool:
        return self.max_rounds is None

    def round_length(self, g: int) -> int:
        if g < 0 or (self.max_rounds is not None and g >= self.max_rounds):
            raise IndexError(f"round {g} outside schedule of {self.max_rounds} rounds")
        if self.rounds is not None:
            return self.rounds[g]
        return self.length_fn(g)

    def iter_rounds(self, limit: int | None = None) -> Iterator[int]:
        g = 0
        while limit is None or g < limit:
            if self.max_rounds is not None and g >= self.max_rounds:
                return
            yield self.round_length(g)
            g += 1

    def total_queries(self) -> int:
        """Sum of k_g + 1 over all rounds; finite schedules only."""
        if self.unbounded:
            raise ValueError("total_queries is undefined for unbounded schedules")
        return sum(k + 1 for k in self.iter_rounds())

    def to_text(self, max_rounds: int | None = None, summary: str | None = None) -> str:
        """Line-oriented serialization: header, one k_g per line, # comments."""
        if max_rounds is None:
            if self.unbounded:
                raise ValueError("an unbounded schedule needs an explicit max_rounds")
            max_rounds = self.max_rounds
        lines = [
            f"schedule v1 provenance={self.provenance.value} "
            f"N={self.N} exclusion={1 if self.exclusion else 0}"
        ]
        lines.extend(str(k) for k in self.iter_rounds(max_rounds))
        if summary:
            lines.append(f"# {summary}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Schedule":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("schedule v1 "):
            raise ValueError("not a schedule v1 file")
        fields = dict(part.split("=", 1) for part in lines[0].split()[2:])
        provenance = Provenance.parse(fields["provenance"])
        rounds = tuple(int(ln) for ln in lines[1:])
        if any(k < 0 for k in rounds):
            raise ValueError("round lengths must be nonnegative")
        return cls(
            provenance=provenance,
            N=int(fields["N"]),
            exclusion=fields["exclusion"] == "1",
            rounds=rounds,
        )


def _alpha(g: int, eps: float, c: float) -> float:
    return 1.0 / math.sqrt(1.0 + g / (c * math.log(1.0 / eps)))


def _check_eps_open(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps={eps} outside (0, 1)")


def schedule_known_p(N: int, p: float, eps: float, c: float = 5.0,
                     p_star: float = 0.5) -> Schedule:
    """Repeat scheme for a known noise level p; three regimes.

    p >= p*:            m = ceil(c N p^2 log(1/eps)) rounds of k = 0
    4/(pi sqrt(N)) < p: same m, k = floor(1/p)
    otherwise:          m = ceil(e^(beta pi/4) log(1/eps)) rounds of
                        k = floor(pi/4 sqrt(N)), with beta = p sqrt(N)
    """
    if N < 1:
        raise ValueError("N must be positive")
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps={eps} outside (0, 1]")
    L = math.log(1.0 / eps)
    if p >= p_star:
        m, k = math.ceil(c * N * p * p * L), 0
    elif p <= 4.0 / (math.pi * math.sqrt(N)):
        beta = p * math.sqrt(N)
        m = math.ceil(math.exp(beta * math.pi / 4.0) * L)
        k = math.floor(math.pi / 4.0 * math.sqrt(N))
    else:
        m, k = math.ceil(c * N * p * p * L), math.floor(1.0 / p)
    return Schedule(
        provenance=Provenance.KNOWN_P,
        N=N,
        exclusion=False,
        rounds=(k,) * m,
        params={"p": p, "eps": eps, "c": c, "p_star": p_star},
    )


def schedule_alg1(N: int, eps: float, c: float = 10.0) -> Schedule:
    """Fault-ignorant memoryless schedule: k_g = floor(a_g(eps) pi/4 sqrt(N)).

    a_g(eps) = 1/sqrt(1 + g/(c log(1/eps))); the sequence is unbounded and
    nonincreasing, reaching 0 once a_g (pi/4) sqrt(N) < 1.
    """
    if N < 1:
        raise ValueError("N must be positive")
    _check_eps_open(eps)
    lam = math.pi / 4.0 * math.sqrt(N)

    def length(g: int, _lam=lam, _eps=eps, _c=c) -> int:
        return math.floor(_alpha(g, _eps, _c) * _lam)

    return Schedule(
        provenance=Provenance.ALG1,
        N=N,
        exclusion=False,
        length_fn=length,
        max_rounds=None,
        params={"eps": eps, "c": c},
    )


def schedule_alg2(N: int, eps: float, c: float = 10.0) -> Schedule:
    """Fault-ignorant exclusion schedule with a switch to classical testing.

    k_g = floor(a_g(eps) pi/4 sqrt(N - g)) while the budget test
    k_0 + ... + k_{g-1} + g <= (1 - eps) N holds, and 0 afterwards.  At most
    N rounds (every element can be excluded once).
    """
    if N < 1:
        raise ValueError("N must be positive")
    _check_eps_open(eps)
    ks = []
    total = 0
    for g in range(N):
        if total + g <= (1.0 - eps) * N:
            k = math.floor(_alpha(g, eps, c) * math.pi / 4.0 * math.sqrt(N - g))
        else:
            k = 0
        ks.append(k)
        total += k
    return Schedule(
        provenance=Provenance.ALG2,
        N=N,
        exclusion=True,
        rounds=tuple(ks),
        params={"eps": eps, "c": c},
    )


def schedule_classical(N: int, eps: float) -> Schedule:
    """Test ceil(N (1 - eps)) elements one by one, excluding as you go."""
    if N < 1:
        raise ValueError("N must be positive")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps={eps} outside [0, 1)")
    m = math.ceil(N * (1.0 - eps))
    return Schedule(
        provenance=Provenance.CLASSICAL,
        N=N,
        exclusion=True,
        rounds=(0,) * m,
        params={"eps": eps},
    )


def _dp_success(N: int, k: int, p: float, variant: str) -> float:
    if N == 1:
        return 1.0
    if variant == analytics.VARIANT_EXACT:
        return analytics.p_success_depol_exact(N, k, p)
    return analytics.p_success_lower(N, k, p)


def schedule_dp(N: int, p: float, eps: float,
                variant: str = analytics.VARIANT_LOWER) -> Schedule:
    """Minimum-query exclusion schedule by dynamic programming.

    Minimizes sum(k_i + 1) subject to prod(1 - p_s(N-i+1, k_i, p)) <= eps,
    with p_s per ``variant``.  The table f[i, q] holds the least achievable
    accumulated log-failure using exactly i rounds and q queries; the answer
    is the least q whose column reaches log(eps).  Round lengths range over
    0..ceil(pi/4 sqrt(N)) and q over 0..ceil(N(1-eps)) + ceil(pi/4 sqrt(N)),
    a box that always contains the classical schedule.
    """
    if not 1 <= N <= DP_DIM_CAP:
        raise ValueError(f"schedule_dp supports N <= {DP_DIM_CAP}, got {N}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    _check_eps_open(eps)
    log_eps = math.log(eps) + FEASIBILITY_SLACK
    k_cap = math.ceil(math.pi / 4.0 * math.sqrt(N))
    q_max = math.ceil(N * (1.0 - eps)) + k_cap
    i_max = min(N, q_max)

    # weights[i-1][k] = log(1 - p_s) for round i at dimension N - i + 1
    f = np.full((i_max + 1, q_max + 1), np.inf)
    f[0, 0] = 0.0
    choice = np.full((i_max + 1, q_max + 1), -1, dtype=np.int64)
    for i in range(1, i_max + 1):
        M = N - i + 1
        prev = f[i - 1]
        for k in range(0, min(k_cap, q_max - 1) + 1):
            cost = k + 1
            ps = _dp_success(M, k, p, variant)
            if ps >= 1.0:
                # certain success: -inf log-failure wherever the prefix is feasible
                cand = np.where(np.isfinite(prev[: q_max + 1 - cost]), -np.inf, np.inf)
            else:
                cand = prev[: q_max + 1 - cost] + math.log1p(-ps)
            row = f[i, cost:]
            better = cand < row
            row[better] = cand[better]
            choice[i, cost:][better] = k
    reachable = np.min(f, axis=0) <= log_eps
    feasible = np.flatnonzero(reachable)
    if feasible.size == 0:
        raise RuntimeError(
            "dynamic program found no feasible schedule inside its query box; "
            "this cannot happen for the supported success models"
        )
    q_best = int(feasible[0])
    i_best = int(np.flatnonzero(f[:, q_best] <= log_eps)[0])
    ks = []
    i, q = i_best, q_best
    while i > 0:
        k = int(choice[i, q])
        ks.append(k)
        q -= k + 1
        i -= 1
    ks.reverse()
    return Schedule(
        provenance=Provenance.DP,
        N=N,
        exclusion=True,
        rounds=tuple(ks),
        params={"p": p, "eps": eps, "variant": variant},
    )


def schedule_iterative(N: int, eps: float, max_rounds: int = 64,
                       variant: str = analytics.VARIANT_EXACT) -> Schedule:
    """Infimum-based construction preceding the alg1 closed form.

    Round i uses k_i = k_opt(N, p_i) where p_i is the smallest noise level at
    which the failure probability of the rounds so far reaches eps, found by
    bisection (the failure product is increasing in p).  Small-N diagnostics
    only; superseded by schedule_alg1.
    """
    if N < 1:
        raise ValueError("N must be positive")
    _check_eps_open(eps)

    def failure(p: float, ks: list[int]) -> float:
        out = 1.0
        for k in ks:
            out *= 1.0 - _dp_success(N, k, p, variant)
        return out

    ks: list[int] = [analytics.k_opt(N, 0.0, variant)]
    while len(ks) < max_rounds:
        if failure(1.0, ks) < eps:
            p_i = 0.0  # the infimum set is empty: even p = 1 already meets eps
        else:
            lo, hi = 0.0, 1.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if failure(mid, ks) >= eps:
                    hi = mid
                else:
                    lo = mid
            p_i = hi
        ks.append(analytics.k_opt(N, p_i, variant))
    return Schedule(
        provenance=Provenance.ITERATIVE,
        N=N,
        exclusion=False,
        rounds=tuple(ks),
        params={"eps": eps, "variant": variant},
    )
