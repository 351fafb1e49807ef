import numpy as np
import pytest

from qtraj import (
    DensityMatrix,
    DimensionError,
    IntegrationError,
    LindbladModel,
    MasterEvolutionConfig,
    OperatorMatrix,
    QtrajError,
    RepresentationTransform,
    StateVector,
    apply_transform,
    exact_evolve,
    lindblad_rhs,
    liouvillian_matrix,
    projector,
    qubit_decay_model,
    rk4_evolve,
    trace_distance,
)
from conftest import SIGMA_Z, random_density, random_model, random_unitary

EXCITED = projector(StateVector([1.0, 0.0]))
PLUS = projector(StateVector([1.0, 1.0], normalize=True))


def zero_qubit_model() -> LindbladModel:
    return LindbladModel(OperatorMatrix(np.zeros((2, 2))))


class TestMasterEvolutionConfig:
    def test_valid(self):
        cfg = MasterEvolutionConfig(dt=0.1, t_final=1.0, record_every=5)
        assert cfg.record_every == 5

    @pytest.mark.parametrize("kwargs", [
        {"dt": 0.0, "t_final": 1.0, "record_every": 1},
        {"dt": -0.1, "t_final": 1.0, "record_every": 1},
        {"dt": 0.1, "t_final": 0.0, "record_every": 1},
        {"dt": 0.5, "t_final": 0.1, "record_every": 1},
        {"dt": 0.1, "t_final": 1.0, "record_every": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(QtrajError):
            MasterEvolutionConfig(**kwargs)


class TestLindbladRhs:
    def test_zero_model(self):
        out = lindblad_rhs(zero_qubit_model(), random_density(np.random.default_rng(0), 2))
        assert np.array_equal(out, np.zeros((2, 2)))

    def test_decay_from_excited(self):
        out = lindblad_rhs(qubit_decay_model(1.0), EXCITED)
        assert np.allclose(out, np.diag([-1.0, 1.0]), atol=1e-15)

    def test_hermitian_traceless(self, rng):
        for dim in (2, 3, 4):
            m = random_model(rng, dim, 2, norm=2.0)
            out = lindblad_rhs(m, random_density(rng, dim))
            assert np.max(np.abs(out - out.conj().T)) < 1e-12
            assert abs(np.trace(out)) < 1e-12

    def test_steady_state_annihilated(self):
        m = qubit_decay_model(1.0, rabi=2.0, detuning=0.5)
        w, v = np.linalg.eig(liouvillian_matrix(m))
        idx = int(np.argmin(np.abs(w)))
        r = v[:, idx].reshape((2, 2), order="F")
        r = 0.5 * (r + r.conj().T)
        r = r / np.trace(r).real
        assert np.max(np.abs(lindblad_rhs(m, DensityMatrix(r)))) < 1e-10

    def test_dim_mismatch(self, rng):
        with pytest.raises(DimensionError):
            lindblad_rhs(qubit_decay_model(1.0), random_density(rng, 3))


class TestRk4Evolve:
    def test_closed_qubit_phase(self):
        # H = (omega/2) sigma_z with omega = pi: off-diagonal reaches -1/2 at t = 1.
        m = LindbladModel(OperatorMatrix(0.5 * np.pi * SIGMA_Z))
        series = rk4_evolve(m, PLUS, MasterEvolutionConfig(1e-3, 1.0, record_every=1000))
        assert abs(series.states[-1].entries[0, 1] - (-0.5)) < 1e-8

    def test_exponential_decay(self):
        m = qubit_decay_model(1.0)
        series = rk4_evolve(m, EXCITED, MasterEvolutionConfig(1e-3, 2.0, record_every=500))
        for t_idx, t in ((1, 0.5), (2, 1.0), (4, 2.0)):
            assert series.times[t_idx] == pytest.approx(t, abs=1e-12)
            assert abs(series.states[t_idx].entries[0, 0].real - np.exp(-t)) < 1e-8

    def test_single_trivial_step(self):
        series = rk4_evolve(zero_qubit_model(), EXCITED,
                            MasterEvolutionConfig(0.1, 0.1, record_every=1))
        assert len(series) == 2
        assert np.array_equal(series.states[1].entries, EXCITED.entries)

    def test_state_invariants_along_run(self):
        m = qubit_decay_model(1.0, rabi=2.0)
        series = rk4_evolve(m, EXCITED, MasterEvolutionConfig(1e-3, 1.0, record_every=100))
        assert len(series) == 11
        for s in series.states:
            e = s.entries
            assert abs(np.trace(e).real - 1.0) <= 1e-9
            assert np.max(np.abs(e - e.conj().T)) <= 1e-12
            assert np.linalg.eigvalsh(e).min() >= -1e-7

    def test_fourth_order_convergence(self):
        m = qubit_decay_model(1.0, rabi=2.0)
        target = exact_evolve(m, EXCITED, 1.0)
        errs = []
        for dt in (0.05, 0.025):
            cfg = MasterEvolutionConfig(dt, 1.0, record_every=int(round(1.0 / dt)))
            errs.append(trace_distance(rk4_evolve(m, EXCITED, cfg).states[-1], target))
        assert 8.0 <= errs[0] / errs[1] <= 32.0

    def test_matches_exact_oracle(self, rng):
        m = random_model(rng, 3, 2, norm=2.0)
        rho0 = random_density(rng, 3)
        series = rk4_evolve(m, rho0, MasterEvolutionConfig(1e-3, 1.0, record_every=1000))
        assert trace_distance(series.states[-1], exact_evolve(m, rho0, 1.0)) <= 1e-8

    def test_unstable_step_flagged(self):
        m = qubit_decay_model(50.0)
        with pytest.raises(IntegrationError):
            rk4_evolve(m, EXCITED, MasterEvolutionConfig(1.0, 60.0, record_every=60))

    def test_dim_mismatch(self, rng):
        with pytest.raises(DimensionError):
            rk4_evolve(qubit_decay_model(1.0), random_density(rng, 3),
                       MasterEvolutionConfig(0.1, 1.0, record_every=1))


class TestLiouvillianMatrix:
    def test_zero_model(self):
        assert np.array_equal(liouvillian_matrix(zero_qubit_model()), np.zeros((4, 4)))

    def test_matches_rhs_on_random_states(self, rng):
        for dim in (2, 3, 4):
            m = random_model(rng, dim, 2, norm=2.0)
            liou = liouvillian_matrix(m)
            for _ in range(10):
                rho = random_density(rng, dim)
                lhs = liou @ rho.entries.reshape(-1, order="F")
                rhs = lindblad_rhs(m, rho).reshape(-1, order="F")
                assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_decay_generator_column(self):
        liou = liouvillian_matrix(qubit_decay_model(1.0))
        vec = EXCITED.entries.reshape(-1, order="F")
        expect = np.diag([-1.0, 1.0]).reshape(-1, order="F")
        assert np.allclose(liou @ vec, expect, atol=1e-15)

    def test_steady_eigenvalue_exists(self, rng):
        models = [qubit_decay_model(1.0, rabi=2.0, detuning=0.5),
                  random_model(rng, 3, 2, norm=2.0)]
        for m in models:
            w = np.linalg.eigvals(liouvillian_matrix(m))
            assert np.min(np.abs(w)) <= 1e-10


class TestExactEvolve:
    def test_zero_time_returns_initial(self):
        rho = exact_evolve(qubit_decay_model(1.0), EXCITED, 0.0)
        assert np.array_equal(rho.entries, EXCITED.entries)

    def test_decay_closed_form(self):
        rho = exact_evolve(qubit_decay_model(1.0), EXCITED, 1.0)
        assert abs(rho.entries[0, 0].real - np.exp(-1.0)) < 1e-10

    def test_trace_preserved(self, rng):
        m = random_model(rng, 4, 3, norm=2.0)
        rho = exact_evolve(m, random_density(rng, 4), 1.0)
        assert abs(np.trace(rho.entries).real - 1.0) < 1e-10

    def test_negative_time_rejected(self):
        with pytest.raises(QtrajError):
            exact_evolve(qubit_decay_model(1.0), EXCITED, -0.5)

    def test_transform_leaves_evolution_unchanged(self, rng):
        for dim, k in ((2, 1), (3, 2)):
            m = random_model(rng, dim, k, norm=1.5)
            u = random_unitary(rng, k)
            c = 0.4 * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
            m2 = apply_transform(m, RepresentationTransform(u, c))
            rho0 = random_density(rng, dim)
            d = trace_distance(exact_evolve(m, rho0, 1.0), exact_evolve(m2, rho0, 1.0))
            assert d <= 1e-9
