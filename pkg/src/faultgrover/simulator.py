"""Exact and stochastic simulation of noisy Grover rounds.

One round over N elements: prepare the uniform superposition, run k Grover
iterations with one noise hit before each oracle call (noise, oracle,
inversion about the mean), then measure in the computational basis.  State
preparation and the final measurement are noiseless.

Three evaluation routes:

  * full density matrix (N <= 256): the reference; handles every noise kind
    and arbitrary marked index,
  * symmetric five-coefficient representation: exact fast path for dephasing
    (and depolarizing) at any N, linear cost per iteration,
  * closed form for depolarizing (analytics.p_success_depol_exact).

For symmetric noise every state reachable in a round stays inside the span of
{P_x, S, A, P_u, I} where x is the marked index and u the uniform
superposition over the others:

  P_x = |x><x|,  S = |x><u| + |u><x|,  A = i(|x><u| - |u><x|),  P_u = |u><u|.

Closure under dephasing, the oracle, and the inversion is what makes the fast
path exact; the test suite checks it against the full matrix.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import analytics
from .noise import NoiseKind, NoiseModel, apply_noise
from .schedulers import Schedule

FULL_MATRIX_CAP = 256
DIM_CAP = 4096


@dataclass
class DensityState:
    """A full density matrix with its dimension; validation is explicit."""

    dim: int
    matrix: np.ndarray

    @classmethod
    def uniform(cls, dim: int) -> "DensityState":
        psi = np.full(dim, 1.0 / math.sqrt(dim))
        return cls(dim, np.outer(psi, psi).astype(complex))

    def validate(self, tol: float = 1e-10) -> None:
        m = self.matrix
        if m.shape != (self.dim, self.dim):
            raise ValueError("matrix shape disagrees with dim")
        if abs(np.trace(m) - 1.0) > tol:
            raise ValueError("trace deviates from 1")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise ValueError("matrix is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise ValueError("matrix is not positive semidefinite")


@dataclass(frozen=True)
class RoundResult:
    """Measurement statistics of one exact round.

    ``success`` is the marked-index diagonal entry, ``residual`` the total
    non-marked mass.  ``diagonal`` carries the full distribution when the
    round ran through the density matrix (None on fast paths).
    """

    success: float
    residual: float
    diagonal: np.ndarray | None = None


@dataclass(frozen=True)
class RunOutcome:
    """Per-trial record: each executed round g adds k_g + 1 queries."""

    succeeded: bool
    queries_used: int
    rounds_executed: int


# ---------------------------------------------------------------------------
# full density-matrix route


def _round_density(N: int, k: int, model: NoiseModel, marked: int) -> np.ndarray:
    """Evolve one round and return the final diagonal (real)."""
    state = DensityState.uniform(N)
    rho = state.matrix
    psi = np.full(N, 1.0 / math.sqrt(N))
    reflector = np.eye(N) - 2.0 * np.outer(psi, psi)
    for _ in range(k):
        rho = apply_noise(rho, model)
        rho[marked, :] *= -1.0
        rho[:, marked] *= -1.0
        rho = reflector @ rho @ reflector
    return np.diag(rho).real.copy()


def _reset_classes(N: int, model: NoiseModel) -> list[tuple[int, int]]:
    """(representative marked index, class size) groups with equal target weight.

    Marked indices with the same reset-target weight give the same success
    probability (relabeling symmetry), so the oracle average only needs one
    evaluation per weight class.
    """
    weights = model.reset_vector(N)
    groups: dict[float, list[int]] = {}
    for idx, w in enumerate(weights):
        groups.setdefault(round(float(w), 15), []).append(idx)
    return [(members[0], len(members)) for members in groups.values()]


def grover_round_exact(N: int, k: int, model: NoiseModel,
                       marked: int | None = None) -> RoundResult:
    """Measurement statistics of one exact round.

    With ``marked=None`` (the default) the result is the oracle average.  For
    symmetric noise every oracle gives the same value, so a single evolution
    suffices; reset noise with a non-uniform target breaks that symmetry and
    the average runs over target-weight classes.  An explicit ``marked`` index
    selects that single oracle instead.

    The full density matrix serves N <= FULL_MATRIX_CAP; beyond that the
    symmetric fast paths take over (and non-uniform reset noise errors out).
    """
    if N < 2:
        raise ValueError("grover_round_exact needs N >= 2")
    if N > DIM_CAP:
        raise ValueError(f"dimension {N} exceeds the capacity cap {DIM_CAP}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if marked is not None and not 0 <= marked < N:
        raise ValueError("marked index out of range")

    if k == 0:
        # measurement of the uniform preparation; exact by construction
        diag = np.full(N, 1.0 / N) if N <= FULL_MATRIX_CAP else None
        return RoundResult(1.0 / N, 1.0 - 1.0 / N, diag)

    symmetric = model.is_trivial or model.kind in (
        NoiseKind.DEPOLARIZING, NoiseKind.DEPHASING
    ) or model.is_uniform_reset(N)

    if N <= FULL_MATRIX_CAP:
        if symmetric or marked is not None:
            x = 0 if marked is None else marked
            diag = _round_density(N, k, model, x)
            success = float(diag[x])
            return RoundResult(success, float(1.0 - success), diag)
        # non-uniform reset, oracle average over target-weight classes
        success = 0.0
        for rep, size in _reset_classes(N, model):
            diag = _round_density(N, k, model, rep)
            success += size / N * float(diag[rep])
        return RoundResult(success, 1.0 - success, None)

    if not symmetric:
        raise ValueError(
            "reset noise with a non-uniform target needs the full-matrix route, "
            f"which is capped at N = {FULL_MATRIX_CAP}"
        )
    if model.is_trivial:
        success = analytics.p_success_noiseless(N, k)
    elif model.kind is NoiseKind.DEPHASING:
        success = grover_round_fastpath_dephasing(N, k, model.p)
    else:  # depolarizing, or reset with uniform target (the same channel)
        state = SymmetricDepolarizingState(N)
        for _ in range(k):
            state.step(model.p)
        success = state.success_probability()
    return RoundResult(success, 1.0 - success, None)


# ---------------------------------------------------------------------------
# symmetric fast paths


@dataclass
class SymmetricDephasingState:
    """Round state in the basis {P_x, S, A, P_u, I}; exact for dephasing.

    Coefficients (a, s, w, u, e) multiply the basis elements in that order.
    The trace is a + u + N e and the marked-index population a + e.  Dephasing
    moves P_u weight onto its diagonal (I - P_x)/(N-1); the oracle negates the
    off-diagonal pair (S, A); the inversion conjugates the 2x2 block spanned
    by |x> and |u> and leaves the I component alone.
    """

    dim: int
    a: float
    s: float
    w: float
    u: float
    e: float

    @classmethod
    def uniform(cls, dim: int) -> "SymmetricDephasingState":
        if dim < 2:
            raise ValueError("the symmetric basis needs dim >= 2")
        return cls(dim, 1.0 / dim, math.sqrt(dim - 1.0) / dim, 0.0,
                   (dim - 1.0) / dim, 0.0)

    def dephase(self, p: float) -> None:
        # diag(P_u) = (I - P_x)/(N-1), so dephased P_u weight lands on e and -a
        shift = p * self.u / (self.dim - 1.0)
        self.a -= shift
        self.e += shift
        self.s *= 1.0 - p
        self.w *= 1.0 - p
        self.u *= 1.0 - p

    def depolarize(self, p: float) -> None:
        tr = self.a + self.u + self.dim * self.e
        self.a *= 1.0 - p
        self.s *= 1.0 - p
        self.w *= 1.0 - p
        self.u *= 1.0 - p
        self.e = (1.0 - p) * self.e + p * tr / self.dim

    def oracle(self) -> None:
        self.s = -self.s
        self.w = -self.w

    def invert_about_mean(self) -> None:
        theta = math.asin(1.0 / math.sqrt(self.dim))
        c, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
        # 2x2 block in the (|x>, |u>) basis, conjugated by [[c, -s2], [-s2, -c]]
        b00 = self.a + self.e
        b11 = self.u + self.e
        br = self.s  # real part of <x|rho|u>
        bi = self.w  # imaginary part
        n00 = c * c * b00 + s2 * s2 * b11 - 2.0 * c * s2 * br
        n11 = s2 * s2 * b00 + c * c * b11 + 2.0 * c * s2 * br
        nr = c * s2 * (b11 - b00) + (s2 * s2 - c * c) * br
        self.a = n00 - self.e
        self.u = n11 - self.e
        self.s = nr
        self.w = -bi  # conjugation by a real reflector flips the antisymmetric part
        # e unchanged: the reflector acts as identity outside span{x, u}

    def success_probability(self) -> float:
        return self.a + self.e

    def trace(self) -> float:
        return self.a + self.u + self.dim * self.e

    def to_matrix(self, marked: int = 0) -> np.ndarray:
        """Reconstruct the full density matrix (test support, small dims)."""
        N = self.dim
        x = np.zeros(N)
        x[marked] = 1.0
        u = np.full(N, 1.0 / math.sqrt(N - 1.0))
        u[marked] = 0.0
        P_x = np.outer(x, x).astype(complex)
        P_u = np.outer(u, u).astype(complex)
        S = np.outer(x, u) + np.outer(u, x)
        A = 1j * (np.outer(x, u) - np.outer(u, x))
        return (self.a * P_x + self.s * S + self.w * A + self.u * P_u
                + self.e * np.eye(N))


def grover_round_fastpath_dephasing(N: int, k: int, p: float) -> float:
    """Exact dephasing-round success probability via the symmetric basis."""
    if N < 2:
        raise ValueError("need N >= 2")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p outside [0, 1]")
    if k == 0:
        return 1.0 / N
    state = SymmetricDephasingState.uniform(N)
    for _ in range(k):
        state.dephase(p)
        state.oracle()
        state.invert_about_mean()
    return state.success_probability()


@dataclass
class SymmetricDepolarizingState:
    """Depolarizing round state: survival weight on the rotating pure state.

    After j iterations the state is w |g_j><g_j| + (1 - w) I/N with
    w = (1-p)^j and |g_j> the noiseless Grover state at angle (2j+1) theta.
    """

    dim: int
    survival: float = 1.0
    iterations: int = 0

    def step(self, p: float) -> None:
        self.survival *= 1.0 - p
        self.iterations += 1

    def success_probability(self) -> float:
        pure = analytics.p_success_noiseless(self.dim, self.iterations)
        return self.survival * pure + (1.0 - self.survival) / self.dim


# ---------------------------------------------------------------------------
# per-round success dispatch and Monte Carlo trials


@functools.lru_cache(maxsize=1 << 18)
def round_success_probability(M: int, k: int, model: NoiseModel) -> float:
    """Exact success probability of one round on an M-element register.

    Used by the Monte Carlo engine and the analytic runner; exclusion rounds
    call it with the shrunken dimension.  M = 1 always succeeds.
    """
    if M < 1:
        raise ValueError("register dimension must be positive")
    if M == 1:
        return 1.0
    if k == 0 or model.is_trivial:
        return analytics.p_success_noiseless(M, k)
    if model.kind is NoiseKind.DEPOLARIZING or model.is_uniform_reset(M):
        return analytics.p_success_depol_exact(M, k, model.p)
    if model.kind is NoiseKind.DEPHASING:
        return grover_round_fastpath_dephasing(M, k, model.p)
    # non-uniform reset: exact only through the density matrix
    return grover_round_exact(M, k, model).success


def mc_trial(N: int, schedule: Schedule, model: NoiseModel,
             rng: np.random.Generator) -> RunOutcome:
    """Sample one run of a schedule; rounds succeed with their exact probability.

    Rounds are independent, so each is a single Bernoulli draw; with exclusion
    the register shrinks by one after every failure.  The identity of the
    excluded element is statistically irrelevant (the failure distribution
    over non-marked outcomes is uniform for symmetric noise), so only the
    count is tracked.  An unbounded schedule runs until success, capped at
    10^7 rounds as a safety net.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if schedule.exclusion and model.kind is NoiseKind.RESET:
        raise ValueError(
            "reset noise has no defined action on the shrunken register of an "
            "exclusion schedule"
        )
    queries = 0
    g = 0
    for k in schedule.iter_rounds():
        if g >= 10**7:
            raise RuntimeError("trial exceeded 10^7 rounds without succeeding")
        M = N - g if schedule.exclusion else N
        queries += k + 1
        if rng.random() < round_success_probability(max(M, 1), k, model):
            return RunOutcome(True, queries, g + 1)
        g += 1
    return RunOutcome(False, queries, g)
