"""Noise channels acting on the search register between oracle calls.

All channels have the form  D_p(rho) = p * T(rho) + (1 - p) * rho  where T is
one of three trace-preserving maps:

  depolarizing:  T(rho) = tr(rho) * I/d          (register erased)
  dephasing:     T(rho) = diag(rho)              (coherences erased, fixed basis)
  reset:         T(rho) = tr(rho) * diag(target) (register reset to a diagonal state)

The dephasing basis is the computational basis the oracles act in.  A reset
with uniform target is the same channel as depolarizing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TRACE_TOL = 1e-10


class NoiseKind(enum.Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    RESET = "reset"
    NONE = "none"


@dataclass(frozen=True)
class NoiseModel:
    """A noise channel kind plus its strength p in [0, 1].

    ``reset_target`` is a probability vector over basis indices (reset kind
    only).  ``None`` means all weight on basis index 0.  Stored as a tuple so
    models are hashable and usable as cache keys.
    """

    kind: NoiseKind = NoiseKind.NONE
    p: float = 0.0
    reset_target: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise strength p={self.p} outside [0, 1]")
        if self.reset_target is not None:
            if self.kind is not NoiseKind.RESET:
                raise ValueError("reset_target is only meaningful for reset noise")
            t = np.asarray(self.reset_target, dtype=float)
            if t.ndim != 1 or t.size == 0 or np.any(t < 0) or abs(t.sum() - 1.0) > 1e-9:
                raise ValueError("reset_target must be a probability vector")

    @classmethod
    def depolarizing(cls, p: float) -> "NoiseModel":
        return cls(NoiseKind.DEPOLARIZING, p)

    @classmethod
    def dephasing(cls, p: float) -> "NoiseModel":
        return cls(NoiseKind.DEPHASING, p)

    @classmethod
    def reset(cls, p: float, target=None) -> "NoiseModel":
        if target is not None:
            target = tuple(float(x) for x in target)
        return cls(NoiseKind.RESET, p, target)

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(NoiseKind.NONE, 0.0)

    @property
    def is_trivial(self) -> bool:
        """True when the channel is the identity (kind none, or p = 0)."""
        return self.kind is NoiseKind.NONE or self.p == 0.0

    def reset_vector(self, dim: int) -> np.ndarray:
        """The reset target as a length-``dim`` probability vector."""
        if self.reset_target is None:
            v = np.zeros(dim)
            v[0] = 1.0
            return v
        v = np.asarray(self.reset_target, dtype=float)
        if v.size != dim:
            raise ValueError(
                f"reset_target has dimension {v.size}, state has dimension {dim}"
            )
        return v

    def is_uniform_reset(self, dim: int) -> bool:
        if self.kind is not NoiseKind.RESET:
            return False
        try:
            v = self.reset_vector(dim)
        except ValueError:
            return False
        return bool(np.allclose(v, 1.0 / dim, atol=1e-12))

    def describe(self) -> str:
        if self.kind is NoiseKind.NONE:
            return "none"
        return f"{self.kind.value}(p={self.p:g})"


def _check_state(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    if state.ndim != 2 or state.shape[0] != state.shape[1]:
        raise ValueError(f"state must be a square matrix, got shape {state.shape}")
    tr = complex(np.trace(state))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"state trace {tr} deviates from 1 beyond {TRACE_TOL}")
    if not np.allclose(state, state.conj().T, atol=1e-10):
        raise ValueError("state is not Hermitian within 1e-10")
    return state


def apply_noise(state: np.ndarray, model: NoiseModel) -> np.ndarray:
    """Apply one noise hit to a density matrix.

    Returns p*T(rho) + (1-p)*rho for the model's map T.  The input must be a
    valid density matrix (Hermitian, trace one; positivity is assumed, not
    eigen-checked).
    """
    state = _check_state(state)
    if model.is_trivial:
        return state.copy()
    d = state.shape[0]
    p = model.p
    if model.kind is NoiseKind.DEPOLARIZING:
        mixed = np.eye(d, dtype=state.dtype) * (np.trace(state) / d)
        return p * mixed + (1 - p) * state
    if model.kind is NoiseKind.DEPHASING:
        return p * np.diag(np.diag(state)) + (1 - p) * state
    if model.kind is NoiseKind.RESET:
        target = np.diag(model.reset_vector(d)).astype(state.dtype)
        return p * np.trace(state) * target + (1 - p) * state
    raise ValueError(f"unknown noise kind {model.kind}")
