import numpy as np
import pytest

from qtraj import DensityMatrix, LindbladModel, OperatorMatrix, StateVector

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)


def random_state(rng, dim: int) -> StateVector:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v))


def random_density(rng, dim: int) -> DensityMatrix:
    """Full-rank random density matrix via a Wishart-style construction."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def random_hermitian(rng, dim: int, norm: float) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (g + g.conj().T)
    return h * (norm / np.linalg.norm(h, 2))


def random_operator(rng, dim: int, norm: float) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g * (norm / np.linalg.norm(g, 2))


def random_unitary(rng, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def random_model(rng, dim: int, n_channels: int, norm: float = 3.0) -> LindbladModel:
    h = random_hermitian(rng, dim, rng.uniform(0.3, 1.0) * norm)
    ls = [random_operator(rng, dim, rng.uniform(0.3, 1.0) * norm)
          for _ in range(n_channels)]
    return LindbladModel(OperatorMatrix(h), [OperatorMatrix(l) for l in ls])


def coherent_state(fock_dim: int, alpha: complex) -> StateVector:
    """Truncated coherent state, renormalized after truncation."""
    n = np.arange(fock_dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, fock_dim)))))
    amp = np.exp(n * np.log(complex(alpha)) - 0.5 * log_fact) if alpha != 0 else None
    if alpha == 0:
        amp = np.zeros(fock_dim, dtype=np.complex128)
        amp[0] = 1.0
        return StateVector(amp)
    return StateVector(amp, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
