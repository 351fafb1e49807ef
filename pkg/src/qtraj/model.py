"""Lindblad models, re-representations of them, and the benchmark systems.

A master equation drho/dt = -i[H, rho] + sum_k (L_k rho L_k+ - (1/2){L_k+L_k, rho})
does not determine (H, {L_k}) uniquely: mixing the L_k by a unitary matrix u,
or shifting them by complex constants c_k while moving a compensating term
into H, yields the same generator. RepresentationTransform captures exactly
those two families.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InvariantError
from .statespace import HERM_TOL, OperatorMatrix

UNITARY_TOL = 1e-10


class LindbladModel:
    """Hamiltonian H plus an ordered list of Lindblad operators over one dim.

    H must be Hermitian within 1e-10; all operators share the dimension.
    K = 0 (no Lindblad operators) means closed-system unitary evolution.
    """

    __slots__ = ("_h", "_ls")

    def __init__(self, hamiltonian: OperatorMatrix, lindblad_ops=()):
        if not isinstance(hamiltonian, OperatorMatrix):
            hamiltonian = OperatorMatrix(hamiltonian)
        h = hamiltonian.entries
        herm_dev = float(np.max(np.abs(h - h.conj().T)))
        if herm_dev > HERM_TOL:
            raise InvariantError(f"Hamiltonian not Hermitian: max deviation {herm_dev:.3e}")
        ops = tuple(op if isinstance(op, OperatorMatrix) else OperatorMatrix(op)
                    for op in lindblad_ops)
        for k, op in enumerate(ops):
            if op.dim != hamiltonian.dim:
                raise DimensionError(
                    f"Lindblad operator {k} has dim {op.dim}, Hamiltonian has dim {hamiltonian.dim}")
        self._h = hamiltonian
        self._ls = ops

    @property
    def dim(self) -> int:
        return self._h.dim

    @property
    def hamiltonian(self) -> OperatorMatrix:
        return self._h

    @property
    def lindblad_ops(self) -> tuple[OperatorMatrix, ...]:
        return self._ls

    @property
    def n_channels(self) -> int:
        return len(self._ls)

    def __repr__(self) -> str:
        return f"LindbladModel(dim={self.dim}, channels={self.n_channels})"


class RepresentationTransform:
    """Unitary mixing matrix u and complex shift vector c re-expressing a model.

    u must be square and unitary within 1e-10 (channel-count-preserving
    re-representations only; isometric enlargements are out of scope).
    """

    __slots__ = ("_u", "_c")

    def __init__(self, mixing, shifts):
        u = np.array(mixing, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise InvariantError(f"mixing matrix must be square, got shape {u.shape}")
        dev = 0.0 if u.size == 0 else float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
        if dev > UNITARY_TOL:
            raise InvariantError(f"mixing matrix not unitary: max deviation {dev:.3e}")
        c = np.array(shifts, dtype=np.complex128)
        if c.ndim != 1 or c.shape[0] != u.shape[0]:
            raise DimensionError(
                f"shift vector shape {c.shape} incompatible with {u.shape[0]}x{u.shape[0]} mixing")
        u.setflags(write=False)
        c.setflags(write=False)
        self._u = u
        self._c = c

    @property
    def n_channels(self) -> int:
        return self._u.shape[0]

    @property
    def mixing(self) -> np.ndarray:
        return self._u

    @property
    def shifts(self) -> np.ndarray:
        return self._c

    def __repr__(self) -> str:
        return f"RepresentationTransform(channels={self.n_channels})"


class DrivePeriod:
    """Stroboscopic sampling period for time-periodic models."""

    __slots__ = ("period", "phase_offset")

    def __init__(self, period: float, phase_offset: float = 0.0):
        period = float(period)
        phase_offset = float(phase_offset)
        if not period > 0.0:
            raise InvariantError(f"period must be positive, got {period}")
        if not (0.0 <= phase_offset < period):
            raise InvariantError(
                f"phase_offset {phase_offset} outside [0, period={period})")
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "phase_offset", phase_offset)

    def __setattr__(self, name, value):
        raise AttributeError("DrivePeriod is immutable")

    def __repr__(self) -> str:
        return f"DrivePeriod(period={self.period}, phase_offset={self.phase_offset})"


def apply_transform(m: LindbladModel, t: RepresentationTransform) -> LindbladModel:
    """Re-express a model: L'_j = sum_k u_jk L_k + c_j, with the compensating
    Hamiltonian H' = H - (i/2) sum_j (c_j* Lmix_j - c_j Lmix_j+), mixing first.

    Generates an identical master equation (the lindblad_rhs equality tests
    are the oracle for that claim).
    """
    if t.n_channels != m.n_channels:
        raise DimensionError(
            f"transform has {t.n_channels} channels, model has {m.n_channels}")
    u = t.mixing
    c = t.shifts
    ls = [op.entries for op in m.lindblad_ops]
    dim = m.dim
    mixed = [sum((u[j, k] * ls[k] for k in range(len(ls))),
                 start=np.zeros((dim, dim), dtype=np.complex128))
             for j in range(len(ls))]
    h = m.hamiltonian.entries.copy()
    for j, lm in enumerate(mixed):
        h = h - 0.5j * (np.conj(c[j]) * lm - c[j] * lm.conj().T)
    shifted = [lm + c[j] * np.eye(dim) for j, lm in enumerate(mixed)]
    return LindbladModel(OperatorMatrix(0.5 * (h + h.conj().T)),
                         [OperatorMatrix(x) for x in shifted])


def qubit_decay_model(gamma: float, rabi: float = 0.0, detuning: float = 0.0) -> LindbladModel:
    """Driven, detuned, decaying two-level system.

    Basis order is (excited, ground) = ((1,0), (0,1)). H = (detuning/2) sigma_z
    + (rabi/2) sigma_x; single Lindblad operator sqrt(gamma) sigma_minus, where
    sigma_minus maps excited to ground. gamma = 0 keeps a zero operator so the
    channel count is stable across parameter sweeps.
    """
    gamma = float(gamma)
    if gamma < 0.0:
        raise InvariantError(f"decay rate must be nonnegative, got {gamma}")
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    sminus = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)
    h = 0.5 * float(detuning) * sz + 0.5 * float(rabi) * sx
    return LindbladModel(OperatorMatrix(h), [OperatorMatrix(np.sqrt(gamma) * sminus)])


def driven_duffing_model(fock_dim: int, kappa: float, anharmonicity: float,
                         drive_amplitude: float, drive_detuning: float) -> LindbladModel:
    """Damped, driven anharmonic oscillator in a truncated Fock basis.

    Rotating frame of the drive: H = drive_detuning a+a + anharmonicity (a+a)^2
    + drive_amplitude (a + a+), L = sqrt(kappa) a, with a|n> = sqrt(n)|n-1>.
    Time-independent in this frame; the stroboscopic period is
    2 pi / |drive_detuning| (see duffing_period).
    """
    fock_dim = int(fock_dim)
    if fock_dim < 2:
        raise InvariantError(f"fock_dim must be at least 2, got {fock_dim}")
    n = np.arange(fock_dim, dtype=np.float64)
    a = np.diag(np.sqrt(n[1:]), k=1).astype(np.complex128)
    num = np.diag(n).astype(np.complex128)
    h = (float(drive_detuning) * num
         + float(anharmonicity) * num @ num
         + float(drive_amplitude) * (a + a.conj().T))
    return LindbladModel(OperatorMatrix(h), [OperatorMatrix(np.sqrt(float(kappa)) * a)])


def duffing_period(drive_detuning: float, phase_offset: float = 0.0) -> DrivePeriod:
    """Stroboscopic period 2 pi / |drive_detuning| for the rotating-frame model."""
    d = float(drive_detuning)
    if d == 0.0:
        raise InvariantError("drive_detuning 0 has no finite stroboscopic period")
    return DrivePeriod(2.0 * np.pi / abs(d), phase_offset)
