"""States, operators, density matrices, and the dense linear-algebra substrate.

Everything is dense complex128; target dimensions are desk scale (tens to a
few hundred). All types are immutable after construction and all operations
are pure functions, so they are safe to share across workers.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InvariantError

NORM_TOL = 1e-10
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-8


def _as_complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise InvariantError(f"expected a nonempty 1-d amplitude vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError("amplitudes contain NaN or Inf")
    return arr


def _as_complex_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvariantError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError("matrix entries contain NaN or Inf")
    return arr


class StateVector:
    """Normalized complex amplitude vector over a finite basis.

    Construction enforces unit Euclidean norm within 1e-10; pass
    ``normalize=True`` to rescale an arbitrary nonzero vector instead.
    """

    __slots__ = ("_amp",)

    def __init__(self, amplitudes, *, normalize: bool = False):
        amp = _as_complex_vector(amplitudes)
        nrm = float(np.linalg.norm(amp))
        if normalize:
            if nrm == 0.0:
                raise InvariantError("cannot normalize the zero vector")
            amp = amp / nrm
        elif abs(nrm - 1.0) > NORM_TOL:
            raise InvariantError(f"state norm {nrm!r} deviates from 1 beyond {NORM_TOL}")
        amp.setflags(write=False)
        self._amp = amp

    @property
    def dim(self) -> int:
        return self._amp.shape[0]

    @property
    def amplitudes(self) -> np.ndarray:
        """Read-only amplitude array."""
        return self._amp

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim})"


class OperatorMatrix:
    """Square complex matrix acting on StateVectors of matching dim."""

    __slots__ = ("_mat",)

    def __init__(self, entries):
        mat = _as_complex_matrix(entries)
        mat.setflags(write=False)
        self._mat = mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only entry array."""
        return self._mat

    def __repr__(self) -> str:
        return f"OperatorMatrix(dim={self.dim})"


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix.

    Hermiticity and trace are enforced within 1e-10, the minimum eigenvalue
    within -1e-8 (numerical positive-semidefiniteness).
    """

    __slots__ = ("_mat",)

    def __init__(self, entries):
        mat = _as_complex_matrix(entries)
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > HERM_TOL:
            raise InvariantError(f"density matrix not Hermitian: max deviation {herm_dev:.3e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantError(f"density matrix trace {tr!r} deviates from 1 beyond {TRACE_TOL}")
        min_eig = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)).min())
        if min_eig < PSD_TOL:
            raise InvariantError(f"density matrix minimum eigenvalue {min_eig:.3e} below {PSD_TOL}")
        mat.setflags(write=False)
        self._mat = mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only entry array."""
        return self._mat

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def expectation(op: OperatorMatrix, psi: StateVector) -> complex:
    """<psi|A|psi>. Real within 1e-12 when A is Hermitian and psi normalized."""
    if op.dim != psi.dim:
        raise DimensionError(f"operator dim {op.dim} != state dim {psi.dim}")
    a = psi.amplitudes
    return complex(np.vdot(a, op.entries @ a))


def projector(psi: StateVector) -> DensityMatrix:
    """|psi><psi| as a DensityMatrix. Idempotent and trace 1 by construction."""
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) sum |eigenvalues of (a - b)|; metric in [0, 1] on density matrices.

    Computed from a Hermitian eigensolve of the difference. This avoids the
    catastrophic cancellation of fidelity-based shortcuts, which matters when
    asserting bounds near 1e-10 on nearly identical pure states.
    """
    if a.dim != b.dim:
        raise DimensionError(f"density matrix dims differ: {a.dim} != {b.dim}")
    d = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.entries - b.entries))))
    return min(max(d, 0.0), 1.0)


def trace_distance_raw(a: np.ndarray, b: np.ndarray) -> float:
    """trace_distance on raw Hermitian arrays, without construction checks.

    Used by the pathwise comparison loops where both arguments are projectors
    built in place.
    """
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


# Taylor scaling threshold: below 1-norm 0.5 the series converges to machine
# precision in well under _TAYLOR_MAX terms.
_SCALE_THRESHOLD = 0.5
_TAYLOR_MAX = 64


def _expm(a: np.ndarray) -> np.ndarray:
    n1 = float(np.linalg.norm(a, 1))
    if n1 == 0.0:
        return np.eye(a.shape[0], dtype=np.complex128)
    squarings = max(0, int(np.ceil(np.log2(n1 / _SCALE_THRESHOLD))))
    b = a / (2.0 ** squarings)
    result = np.eye(a.shape[0], dtype=np.complex128)
    term = np.eye(a.shape[0], dtype=np.complex128)
    for k in range(1, _TAYLOR_MAX + 1):
        term = term @ b / k
        result = result + term
        if np.linalg.norm(term, 1) <= 1e-18 * np.linalg.norm(result, 1):
            break
    else:
        raise InvariantError("matrix exponential series failed to converge")
    for _ in range(squarings):
        result = result @ result
    return result


def matrix_exp(a: OperatorMatrix) -> OperatorMatrix:
    """e^A via scaling-and-squaring with a truncated Taylor series.

    Relative accuracy on well-conditioned inputs is far below the 1e-10
    contract; feeds the exact master-equation oracle.
    """
    return OperatorMatrix(_expm(a.entries))
