"""HTTP facade over the engine.

Every run endpoint takes {"config": <RunConfig document>, "workers": n} and
returns plain-JSON results with complex numbers as [re, im] pairs. Model or
grid problems surface as 400 with a one-line detail; malformed request bodies
are rejected by schema validation (422). The worker count rides outside the
config because it must never influence numbers, only wall time.
"""

from __future__ import annotations

import functools

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .analysis import expectation_series, fock_quadratures, poincare_sample
from .config import PoincareOutput, ObservableOutput, RunConfig, observable_matrix
from .errors import QtrajError
from .master import MasterEvolutionConfig, rk4_evolve
from .model import DrivePeriod
from .statespace import projector
from .unravel import (
    TrajectoryConfig,
    compare_pathwise,
    run_ensemble,
    run_ensemble_mean,
    run_trajectory,
    split,
)

# Pathwise bound asserted for pure-mixing qsd comparisons. Mixing invariance
# holds exactly per step, so this only needs headroom over rounding noise.
QSD_MIXING_BOUND = 1e-10

app = FastAPI(title="qtraj", version=__version__)


def _pair(z: complex) -> tuple[float, float]:
    return (float(z.real), float(z.imag))


def _matrix_pairs(mat: np.ndarray) -> list[tuple[float, float]]:
    """Row-major [re, im] pairs of a square matrix snapshot."""
    return [_pair(z) for z in np.asarray(mat).reshape(-1)]


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    workers: int = Field(default=1, ge=1, le=256)


class HealthResponse(BaseModel):
    status: str
    version: str


class MasterResponse(BaseModel):
    times: list[float]
    dim: int
    # one entry per snapshot: dim*dim row-major [re, im] pairs
    states: list[list[tuple[float, float]]]


class TrajectoryPayload(BaseModel):
    index: int
    seed: int
    states: list[list[tuple[float, float]]] | None = None
    observables: dict[str, list[tuple[float, float]]] = {}
    jumps: list[tuple[float, int]] = []


class TrajectoryResponse(BaseModel):
    times: list[float]
    dim: int
    method: str
    trajectories: list[TrajectoryPayload]


class EnsembleResponse(BaseModel):
    times: list[float]
    dim: int
    n_traj: int
    mean_states: list[list[tuple[float, float]]]


class InvarianceResponse(BaseModel):
    times: list[float]
    trace_distances: list[float]
    max_distance: float
    # qsd-mixing and qsd-shift carry a pass/fail bound; homodyne is report-only
    mode: str
    bound: float | None
    passed: bool


class PoincareResponse(BaseModel):
    times: list[float]
    x: list[float]
    p: list[float]


def _translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except QtrajError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
    return wrapper


def _trajectory_config(cfg: RunConfig, traj_seed: int) -> TrajectoryConfig:
    return TrajectoryConfig(dt=cfg.dt, t_final=cfg.t_final, record_every=cfg.record_every,
                            seed=traj_seed, method=cfg.method, stepper=cfg.stepper)


def _require_method(cfg: RunConfig, allowed: tuple[str, ...], endpoint: str) -> None:
    if cfg.method not in allowed:
        raise QtrajError(
            f"{endpoint} requires method in {allowed}, config says {cfg.method!r}")


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/run/master", response_model=MasterResponse)
@_translate_errors
def run_master(req: RunRequest) -> MasterResponse:
    cfg = req.config
    _require_method(cfg, ("master",), "/run/master")
    m = cfg.build_model()
    rho0 = projector(cfg.build_initial_state())
    series = rk4_evolve(m, rho0, MasterEvolutionConfig(cfg.dt, cfg.t_final, cfg.record_every))
    return MasterResponse(
        times=list(series.times), dim=m.dim,
        states=[_matrix_pairs(rho.entries) for rho in series.states])


@app.post("/run/trajectory", response_model=TrajectoryResponse)
@_translate_errors
def run_trajectories(req: RunRequest) -> TrajectoryResponse:
    cfg = req.config
    _require_method(cfg, ("qsd", "homodyne", "jump"), "/run/trajectory")
    want_states = "states" in cfg.outputs
    names = [o.observable for o in cfg.outputs if isinstance(o, ObservableOutput)]
    if any(isinstance(o, PoincareOutput) for o in cfg.outputs):
        raise QtrajError("poincare output belongs to /run/poincare")
    m = cfg.build_model()
    psi0 = cfg.build_initial_state()
    ops = {name: observable_matrix(name, m.dim) for name in names}
    records = run_ensemble(m, psi0, _trajectory_config(cfg, 0), cfg.n_traj,
                           cfg.master_seed, req.workers)
    payloads = []
    for i, rec in enumerate(records):
        payloads.append(TrajectoryPayload(
            index=i, seed=rec.seed,
            states=[[_pair(z) for z in row] for row in rec.state_array] if want_states else None,
            observables={name: [_pair(v) for _, v in expectation_series(rec, op)]
                         for name, op in ops.items()},
            jumps=list(rec.jump_times)))
    return TrajectoryResponse(times=list(records[0].times), dim=m.dim,
                              method=cfg.method, trajectories=payloads)


@app.post("/run/ensemble", response_model=EnsembleResponse)
@_translate_errors
def run_ensemble_endpoint(req: RunRequest) -> EnsembleResponse:
    cfg = req.config
    _require_method(cfg, ("qsd", "homodyne", "jump"), "/run/ensemble")
    m = cfg.build_model()
    psi0 = cfg.build_initial_state()
    times, mean = run_ensemble_mean(m, psi0, _trajectory_config(cfg, 0), cfg.n_traj,
                                    cfg.master_seed, req.workers)
    return EnsembleResponse(times=list(times), dim=m.dim, n_traj=cfg.n_traj,
                            mean_states=[_matrix_pairs(snap) for snap in mean])


@app.post("/run/invariance", response_model=InvarianceResponse)
@_translate_errors
def run_invariance(req: RunRequest) -> InvarianceResponse:
    cfg = req.config
    _require_method(cfg, ("qsd", "homodyne"), "/run/invariance")
    transform = cfg.build_transform()
    m = cfg.build_model()
    psi0 = cfg.build_initial_state()
    comparison = compare_pathwise(m, transform, psi0,
                                  _trajectory_config(cfg, split(cfg.master_seed, 0)))
    if cfg.method == "qsd":
        pure_mixing = not np.any(transform.shifts)
        mode = "qsd-mixing" if pure_mixing else "qsd-shift"
        bound = QSD_MIXING_BOUND if pure_mixing else cfg.invariance_constant * cfg.dt
        passed = comparison.max_distance <= bound
    else:
        mode, bound, passed = "homodyne", None, True
    return InvarianceResponse(
        times=list(comparison.times),
        trace_distances=[float(d) for d in comparison.distances],
        max_distance=comparison.max_distance, mode=mode, bound=bound, passed=passed)


@app.post("/run/poincare", response_model=PoincareResponse)
@_translate_errors
def run_poincare(req: RunRequest) -> PoincareResponse:
    cfg = req.config
    _require_method(cfg, ("qsd", "homodyne", "jump"), "/run/poincare")
    specs = [o.poincare for o in cfg.outputs if isinstance(o, PoincareOutput)]
    if len(specs) != 1:
        raise QtrajError("/run/poincare requires exactly one poincare entry in outputs")
    spec = specs[0]
    m = cfg.build_model()
    psi0 = cfg.build_initial_state()
    rec = run_trajectory(m, psi0, _trajectory_config(cfg, split(cfg.master_seed, 0)))
    x_op, p_op = fock_quadratures(m.dim)
    section = poincare_sample(rec, DrivePeriod(spec.period, spec.phase_offset), x_op, p_op)
    return PoincareResponse(times=list(section.sample_times),
                            x=[pt[0] for pt in section.points],
                            p=[pt[1] for pt in section.points])
