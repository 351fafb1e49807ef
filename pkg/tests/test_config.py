import json

import numpy as np
import pytest

from qtraj import (
    ConfigError,
    InvariantError,
    QtrajError,
    observable_matrix,
    parse_config,
    qubit_decay_model,
    render_config,
)
from qtraj.analysis import fock_quadratures

MINIMAL = {
    "model": {"kind": "qubit_decay", "gamma": 1.0},
    "method": "master",
    "dt": 0.001,
    "t_final": 1.0,
}


def cfg_text(**overrides) -> str:
    doc = dict(MINIMAL)
    doc.update(overrides)
    return json.dumps(doc)


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = parse_config(cfg_text())
        assert cfg.record_every == 1
        assert cfg.n_traj == 1
        assert cfg.master_seed == 0
        assert cfg.outputs == ("states",)
        assert cfg.initial_state == 0
        assert cfg.stepper == "euler"
        assert cfg.transform is None
        assert cfg.invariance_constant == 10.0

    def test_dt_beyond_t_final_names_both_fields(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(dt=0.5, t_final=0.1))
        msg = str(err.value)
        assert "dt" in msg and "t_final" in msg

    def test_transform_channel_mismatch(self):
        transform = {"mixing": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
                     "shifts": [[0, 0], [0, 0]]}
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(transform=transform))
        assert "transform" in str(err.value)

    def test_unknown_top_level_field(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(verbosity=3))
        assert "verbosity" in str(err.value)

    def test_unknown_nested_field(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(model={"kind": "qubit_decay", "gamma": 1.0, "gama": 2.0}))
        assert "gama" in str(err.value)

    def test_syntax_error_reports_position(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"model": \n  nonsense}')
        msg = str(err.value)
        assert msg.startswith("syntax error at line 2")

    def test_bad_method(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(method="euler"))
        assert "method" in str(err.value)

    def test_nonpositive_dt(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(dt=0.0))
        assert "dt" in str(err.value)

    def test_seed_range(self):
        parse_config(cfg_text(master_seed=2 ** 64 - 1))
        with pytest.raises(ConfigError):
            parse_config(cfg_text(master_seed=2 ** 64))
        with pytest.raises(ConfigError):
            parse_config(cfg_text(master_seed=-1))

    def test_initial_state_index_range(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(initial_state=2))
        assert "initial_state" in str(err.value)

    def test_initial_state_length_mismatch(self):
        with pytest.raises(ConfigError) as err:
            parse_config(cfg_text(initial_state=[[1, 0], [0, 0], [0, 0]]))
        assert "initial_state" in str(err.value)

    def test_outputs_forms(self):
        cfg = parse_config(cfg_text(outputs=["states",
                                             {"observable": "sigma_z"},
                                             {"poincare": {"period": 6.28}}]))
        assert cfg.outputs[0] == "states"
        assert cfg.outputs[1].observable == "sigma_z"
        assert cfg.outputs[2].poincare.period == 6.28

    def test_bad_output_entry(self):
        with pytest.raises(ConfigError):
            parse_config(cfg_text(outputs=["everything"]))

    def test_explicit_model_shape_errors(self):
        bad_row = {"kind": "explicit",
                   "hamiltonian": [[[0, 0], [1, 0]], [[1, 0]]]}
        with pytest.raises(ConfigError):
            parse_config(cfg_text(model=bad_row))
        bad_op = {"kind": "explicit",
                  "hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
                  "lindblad_ops": [[[[0, 0]]]]}
        with pytest.raises(ConfigError):
            parse_config(cfg_text(model=bad_op))


class TestBuilders:
    def test_qubit_decay_build_matches_builder(self):
        cfg = parse_config(cfg_text(model={"kind": "qubit_decay", "gamma": 2.0,
                                           "rabi": 1.0, "detuning": 0.5}))
        built = cfg.build_model()
        direct = qubit_decay_model(2.0, 1.0, 0.5)
        assert np.array_equal(built.hamiltonian.entries, direct.hamiltonian.entries)
        assert np.array_equal(built.lindblad_ops[0].entries, direct.lindblad_ops[0].entries)

    def test_explicit_model_decodes_pairs(self):
        model = {"kind": "explicit",
                 "hamiltonian": [[[0, 0], [0, -1]], [[0, 1], [0, 0]]],
                 "lindblad_ops": [[[[0, 0], [0, 0]], [[1.5, 0], [0, 0]]]]}
        cfg = parse_config(cfg_text(model=model))
        m = cfg.build_model()
        assert np.array_equal(m.hamiltonian.entries,
                              np.array([[0, -1j], [1j, 0]], dtype=complex))
        assert m.lindblad_ops[0].entries[1, 0] == 1.5 + 0.0j

    def test_explicit_non_hermitian_fails_at_build(self):
        model = {"kind": "explicit",
                 "hamiltonian": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}
        cfg = parse_config(cfg_text(model=model))
        with pytest.raises(InvariantError):
            cfg.build_model()

    def test_initial_state_one_hot(self):
        cfg = parse_config(cfg_text(initial_state=1))
        assert np.array_equal(cfg.build_initial_state().amplitudes,
                              np.array([0.0, 1.0], dtype=complex))

    def test_initial_state_normalized(self):
        cfg = parse_config(cfg_text(initial_state=[[3, 0], [0, 4]]))
        amp = cfg.build_initial_state().amplitudes
        assert np.allclose(amp, [0.6, 0.8j], atol=1e-15)

    def test_build_transform(self):
        transform = {"mixing": [[[0, 1]]], "shifts": [[0.5, -0.5]]}
        cfg = parse_config(cfg_text(transform=transform))
        t = cfg.build_transform()
        assert t.mixing[0, 0] == 1j
        assert t.shifts[0] == 0.5 - 0.5j

    def test_build_transform_requires_section(self):
        cfg = parse_config(cfg_text())
        with pytest.raises(QtrajError):
            cfg.build_transform()


class TestRoundTrip:
    def full_config(self) -> str:
        return cfg_text(
            method="qsd",
            n_traj=16,
            record_every=4,
            master_seed=99,
            initial_state=[[1, 0], [0, 1]],
            transform={"mixing": [[[0, 1]]], "shifts": [[0.25, 0]]},
            outputs=[{"observable": "sigma_x"}, "states"],
            out_path="runs/demo",
            stepper="split",
            invariance_constant=5.0,
        )

    def test_parse_render_parse_is_identity(self):
        cfg = parse_config(self.full_config())
        again = parse_config(render_config(cfg))
        assert again == cfg

    def test_render_is_canonical(self):
        cfg = parse_config(self.full_config())
        assert render_config(parse_config(render_config(cfg))) == render_config(cfg)

    def test_duffing_round_trip(self):
        text = cfg_text(model={"kind": "driven_duffing", "fock_dim": 10, "kappa": 0.125,
                               "anharmonicity": 0.5, "drive_amplitude": 5.0,
                               "drive_detuning": 1.0},
                        method="qsd",
                        outputs=[{"poincare": {"period": 6.2831853, "phase_offset": 0.0}}])
        cfg = parse_config(text)
        assert parse_config(render_config(cfg)) == cfg
        assert cfg.model.dim == 10


class TestObservableMatrix:
    def test_paulis(self):
        assert np.array_equal(observable_matrix("sigma_z", 2).entries,
                              np.diag([1.0, -1.0]).astype(complex))
        assert observable_matrix("sigma_y", 2).entries[0, 1] == -1j

    def test_pauli_requires_qubit(self):
        with pytest.raises(QtrajError):
            observable_matrix("sigma_x", 3)

    def test_quadratures_match_analysis_module(self):
        x, p = fock_quadratures(5)
        assert np.array_equal(observable_matrix("x", 5).entries, x.entries)
        assert np.array_equal(observable_matrix("p", 5).entries, p.entries)

    def test_number_operator(self):
        assert np.array_equal(observable_matrix("number", 4).entries,
                              np.diag([0.0, 1.0, 2.0, 3.0]).astype(complex))

    def test_population_projector(self):
        mat = observable_matrix("population:2", 4).entries
        assert mat[2, 2] == 1.0 and np.count_nonzero(mat) == 1

    def test_population_errors(self):
        with pytest.raises(QtrajError):
            observable_matrix("population:x", 4)
        with pytest.raises(QtrajError):
            observable_matrix("population:9", 4)

    def test_unknown_name(self):
        with pytest.raises(QtrajError):
            observable_matrix("energy", 4)
