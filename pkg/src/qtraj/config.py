"""Declarative run configuration: a strict JSON document.

Complex numbers appear everywhere as [re, im] pairs; matrices as nested rows
of pairs. Unknown fields are rejected rather than silently ignored, so a
typo cannot quietly change the physics of a run.
"""

from __future__ import annotations

import json
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import QtrajError
from .model import (
    LindbladModel,
    RepresentationTransform,
    driven_duffing_model,
    qubit_decay_model,
)
from .statespace import OperatorMatrix, StateVector

ComplexPair = tuple[float, float]
ComplexVector = tuple[ComplexPair, ...]
ComplexMatrix = tuple[ComplexVector, ...]


class ConfigError(QtrajError):
    """Configuration text failed to parse or validate."""


def _to_complex_matrix(rows: ComplexMatrix) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows],
                    dtype=np.complex128)


def _to_complex_vector(pairs: ComplexVector) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)


class QubitDecaySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["qubit_decay"]
    gamma: float = Field(ge=0.0)
    rabi: float = 0.0
    detuning: float = 0.0

    @property
    def dim(self) -> int:
        return 2

    @property
    def channels(self) -> int:
        return 1

    def build(self) -> LindbladModel:
        return qubit_decay_model(self.gamma, self.rabi, self.detuning)


class DrivenDuffingSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["driven_duffing"]
    fock_dim: int = Field(ge=2)
    kappa: float = Field(ge=0.0)
    anharmonicity: float
    drive_amplitude: float
    drive_detuning: float

    @property
    def dim(self) -> int:
        return self.fock_dim

    @property
    def channels(self) -> int:
        return 1

    def build(self) -> LindbladModel:
        return driven_duffing_model(self.fock_dim, self.kappa, self.anharmonicity,
                                    self.drive_amplitude, self.drive_detuning)


class ExplicitModelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["explicit"]
    hamiltonian: ComplexMatrix
    lindblad_ops: tuple[ComplexMatrix, ...] = ()

    @model_validator(mode="after")
    def _shapes(self):
        d = len(self.hamiltonian)
        if d < 1:
            raise ValueError("hamiltonian: matrix must be nonempty")
        for i, row in enumerate(self.hamiltonian):
            if len(row) != d:
                raise ValueError(f"hamiltonian: row {i} has {len(row)} entries, expected {d}")
        for k, op in enumerate(self.lindblad_ops):
            if len(op) != d or any(len(row) != d for row in op):
                raise ValueError(f"lindblad_ops[{k}]: expected a {d}x{d} matrix")
        return self

    @property
    def dim(self) -> int:
        return len(self.hamiltonian)

    @property
    def channels(self) -> int:
        return len(self.lindblad_ops)

    def build(self) -> LindbladModel:
        return LindbladModel(
            OperatorMatrix(_to_complex_matrix(self.hamiltonian)),
            [OperatorMatrix(_to_complex_matrix(op)) for op in self.lindblad_ops])


ModelSpec = Annotated[Union[QubitDecaySpec, DrivenDuffingSpec, ExplicitModelSpec],
                      Field(discriminator="kind")]


class TransformSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mixing: ComplexMatrix
    shifts: ComplexVector

    @model_validator(mode="after")
    def _shapes(self):
        k = len(self.mixing)
        if k < 1:
            raise ValueError("mixing: matrix must be nonempty")
        for i, row in enumerate(self.mixing):
            if len(row) != k:
                raise ValueError(f"mixing: row {i} has {len(row)} entries, expected {k}")
        if len(self.shifts) != k:
            raise ValueError(f"shifts: {len(self.shifts)} entries for {k}x{k} mixing")
        return self

    @property
    def channels(self) -> int:
        return len(self.mixing)

    def build(self) -> RepresentationTransform:
        return RepresentationTransform(_to_complex_matrix(self.mixing),
                                       _to_complex_vector(self.shifts))


class PoincareSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    period: float = Field(gt=0.0)
    phase_offset: float = Field(default=0.0, ge=0.0)


class PoincareOutput(BaseModel):
    model_config = ConfigDict(extra="forbid")
    poincare: PoincareSpec


class ObservableOutput(BaseModel):
    model_config = ConfigDict(extra="forbid")
    observable: str


OutputSpec = Union[Literal["states"], ObservableOutput, PoincareOutput]


class RunConfig(BaseModel):
    """Everything one run needs, minus the worker count (which must not be
    able to change results and therefore stays a CLI/request knob)."""
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    method: Literal["master", "qsd", "homodyne", "jump"]
    dt: float = Field(gt=0.0)
    t_final: float = Field(gt=0.0)
    record_every: int = Field(default=1, ge=1)
    n_traj: int = Field(default=1, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2 ** 64)
    transform: TransformSpec | None = None
    outputs: tuple[OutputSpec, ...] = ("states",)
    out_path: str | None = None
    # basis index, or explicit amplitudes (normalized on construction)
    initial_state: Union[int, ComplexVector] = 0
    stepper: Literal["euler", "split"] = "euler"
    # C in the qsd-shift pathwise bound C * dt used by invariance checks
    invariance_constant: float = Field(default=10.0, gt=0.0)

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.dt > self.t_final:
            raise ValueError(f"dt ({self.dt}) exceeds t_final ({self.t_final})")
        if self.transform is not None and self.transform.channels != self.model.channels:
            raise ValueError(
                f"transform: {self.transform.channels}x{self.transform.channels} mixing "
                f"for a model with {self.model.channels} noise channel(s)")
        if isinstance(self.initial_state, int):
            if not 0 <= self.initial_state < self.model.dim:
                raise ValueError(
                    f"initial_state: basis index {self.initial_state} out of range "
                    f"for dim {self.model.dim}")
        elif len(self.initial_state) != self.model.dim:
            raise ValueError(
                f"initial_state: {len(self.initial_state)} amplitudes "
                f"for dim {self.model.dim}")
        return self

    def build_model(self) -> LindbladModel:
        return self.model.build()

    def build_initial_state(self) -> StateVector:
        if isinstance(self.initial_state, int):
            amp = np.zeros(self.model.dim, dtype=np.complex128)
            amp[self.initial_state] = 1.0
            return StateVector(amp)
        return StateVector(_to_complex_vector(self.initial_state), normalize=True)

    def build_transform(self) -> RepresentationTransform:
        if self.transform is None:
            raise QtrajError("this run requires a transform section in the config")
        return self.transform.build()


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a JSON config document.

    Syntax errors report line and column; semantic errors name the offending
    field and the reason. Unknown fields are errors.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(f"invalid field {loc}: {first['msg']}") from exc


def render_config(cfg: RunConfig) -> str:
    """Canonical JSON form; parse_config(render_config(cfg)) == cfg."""
    return json.dumps(cfg.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def observable_matrix(name: str, dim: int) -> OperatorMatrix:
    """Named observables usable in config outputs.

    sigma_x / sigma_y / sigma_z (dim 2), x / p (quadratures), number (a+a),
    population:<k> (|k><k|).
    """
    if name in ("sigma_x", "sigma_y", "sigma_z"):
        if dim != 2:
            raise QtrajError(f"observable {name} requires dim 2, model has dim {dim}")
        mats = {
            "sigma_x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
            "sigma_y": np.array([[0.0, -1j], [1j, 0.0]], dtype=np.complex128),
            "sigma_z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
        }
        return OperatorMatrix(mats[name])
    if name in ("x", "p"):
        from .analysis import fock_quadratures

        x_op, p_op = fock_quadratures(dim)
        return x_op if name == "x" else p_op
    if name == "number":
        return OperatorMatrix(np.diag(np.arange(dim, dtype=np.float64)).astype(np.complex128))
    if name.startswith("population:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError:
            raise QtrajError(f"malformed observable {name!r}; expected population:<index>")
        if not 0 <= k < dim:
            raise QtrajError(f"observable {name}: index out of range for dim {dim}")
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[k, k] = 1.0
        return OperatorMatrix(mat)
    raise QtrajError(
        f"unknown observable {name!r}; expected sigma_x, sigma_y, sigma_z, x, p, "
        f"number, or population:<index>")
