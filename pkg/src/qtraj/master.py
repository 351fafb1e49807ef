"""Deterministic reference evolution of the density matrix.

Two routes: a fixed-step classical RK4 integrator on the Lindblad right-hand
side, and an exact oracle that exponentiates the vectorized Liouvillian.
Acceptance of the stochastic unravelings always compares against the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IntegrationError, QtrajError
from .model import LindbladModel
from .statespace import DensityMatrix, _expm

# Trace drift beyond this before renormalization means dt is too large.
TRACE_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class MasterEvolutionConfig:
    dt: float
    t_final: float
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise QtrajError(f"dt must be positive, got {self.dt}")
        if not self.t_final > 0.0:
            raise QtrajError(f"t_final must be positive, got {self.t_final}")
        if self.dt > self.t_final:
            raise QtrajError(f"dt ({self.dt}) exceeds t_final ({self.t_final})")
        if self.record_every < 1:
            raise QtrajError(f"record_every must be >= 1, got {self.record_every}")


@dataclass(frozen=True)
class DensitySeries:
    """Recorded times and density-matrix snapshots of one evolution."""
    times: tuple[float, ...]
    states: tuple[DensityMatrix, ...]

    def __len__(self) -> int:
        return len(self.times)


def n_steps(dt: float, t_final: float) -> int:
    """Number of integration steps; t_final is snapped to steps * dt."""
    return max(1, int(round(t_final / dt)))


def _rhs(h: np.ndarray, ls: list[np.ndarray], rho: np.ndarray) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    for l in ls:
        ldl = l.conj().T @ l
        out += l @ rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def lindblad_rhs(m: LindbladModel, rho) -> np.ndarray:
    """drho/dt of the Lindblad master equation; Hermitian and traceless.

    Accepts a DensityMatrix or a raw square array (useful for testing the
    generator on non-state matrices).
    """
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if r.shape != (m.dim, m.dim):
        raise DimensionError(f"rho shape {r.shape} does not match model dim {m.dim}")
    return _rhs(m.hamiltonian.entries, [op.entries for op in m.lindblad_ops], r)


def rk4_evolve(m: LindbladModel, rho0: DensityMatrix, cfg: MasterEvolutionConfig) -> DensitySeries:
    """Classical fixed-step RK4 on lindblad_rhs.

    Snapshots (every record_every steps, t=0 included) are re-symmetrized and
    trace-renormalized; between snapshots the raw integrator state carries the
    drift so that a too-large dt shows up in the trace diagnostic instead of
    being silently repaired.
    """
    if rho0.dim != m.dim:
        raise DimensionError(f"rho0 dim {rho0.dim} does not match model dim {m.dim}")
    h = m.hamiltonian.entries
    ls = [op.entries for op in m.lindblad_ops]
    dt = cfg.dt
    steps = n_steps(dt, cfg.t_final)

    r = rho0.entries.copy()
    times = [0.0]
    states = [rho0]
    for s in range(1, steps + 1):
        k1 = _rhs(h, ls, r)
        k2 = _rhs(h, ls, r + (0.5 * dt) * k1)
        k3 = _rhs(h, ls, r + (0.5 * dt) * k2)
        k4 = _rhs(h, ls, r + dt * k3)
        r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(np.trace(r).real - 1.0)
        if not np.all(np.isfinite(r)) or drift > TRACE_DRIFT_LIMIT:
            raise IntegrationError(
                f"trace drift {drift:.3e} at step {s} exceeds {TRACE_DRIFT_LIMIT}; dt too large")
        if s % cfg.record_every == 0:
            r = 0.5 * (r + r.conj().T)
            r = r / np.trace(r).real
            times.append(s * dt)
            states.append(DensityMatrix(r))
    return DensitySeries(tuple(times), tuple(states))


def liouvillian_matrix(m: LindbladModel) -> np.ndarray:
    """dim^2 x dim^2 generator over column-stacked rho.

    Convention: vec(rho) stacks columns (Fortran order), under which
    vec(A X B) = (B^T kron A) vec(X). Then
    Liou = -i (I kron H - H^T kron I)
           + sum_k (conj(L_k) kron L_k - (1/2) I kron L_k+L_k - (1/2) (L_k+L_k)^T kron I).
    """
    d = m.dim
    eye = np.eye(d, dtype=np.complex128)
    h = m.hamiltonian.entries
    liou = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for op in m.lindblad_ops:
        l = op.entries
        ldl = l.conj().T @ l
        liou += (np.kron(l.conj(), l)
                 - 0.5 * np.kron(eye, ldl)
                 - 0.5 * np.kron(ldl.T, eye))
    return liou


def exact_evolve(m: LindbladModel, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Oracle: unvec(expm(Liou * t) vec(rho0)), re-symmetrized.

    Exact up to the matrix-exponential tolerance; no time discretization.
    """
    if rho0.dim != m.dim:
        raise DimensionError(f"rho0 dim {rho0.dim} does not match model dim {m.dim}")
    t = float(t)
    if t < 0.0:
        raise QtrajError(f"evolution time must be nonnegative, got {t}")
    if t == 0.0:
        return rho0
    d = m.dim
    vec = rho0.entries.reshape(-1, order="F")
    out = _expm(liouvillian_matrix(m) * t) @ vec
    r = out.reshape((d, d), order="F")
    r = 0.5 * (r + r.conj().T)
    r = r / np.trace(r).real
    return DensityMatrix(r)
