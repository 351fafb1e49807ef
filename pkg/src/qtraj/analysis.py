"""Observables and post-processing over trajectory records.

Pure functions; reductions run in a fixed order so repeated calls and
parallel callers get identical floats.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, GridError, QtrajError
from .model import DrivePeriod
from .statespace import DensityMatrix, OperatorMatrix
from .unravel import TrajectoryRecord

# Minimum snapshots per drive period for stroboscopic sampling.
MIN_SAMPLES_PER_PERIOD = 20
GRID_TOL = 1e-9


class PoincareSection:
    """Stroboscopic (<x>, <p>) samples of one trajectory."""

    __slots__ = ("points", "sample_times")

    def __init__(self, points, sample_times):
        points = tuple((float(x), float(p)) for x, p in points)
        sample_times = tuple(float(t) for t in sample_times)
        if len(points) != len(sample_times):
            raise QtrajError(
                f"{len(points)} points but {len(sample_times)} sample times")
        if len(sample_times) >= 2:
            gaps = np.diff(sample_times)
            if np.max(np.abs(gaps - gaps[0])) > GRID_TOL:
                raise QtrajError("sample times are not an arithmetic progression")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "sample_times", sample_times)

    def __setattr__(self, name, value):
        raise AttributeError("PoincareSection is immutable")

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"PoincareSection(n={len(self.points)})"


def expectation_series(rec: TrajectoryRecord, op: OperatorMatrix) -> list[tuple[float, complex]]:
    """<psi_t|A|psi_t> at every snapshot, as (t, value) pairs.

    Imaginary parts stay at rounding level for Hermitian A.
    """
    if op.dim != rec.dim:
        raise DimensionError(f"operator dim {op.dim} != record dim {rec.dim}")
    states = rec.state_array
    values = np.sum(states.conj() * (states @ op.entries.T), axis=1)
    return [(t, complex(v)) for t, v in zip(rec.times, values)]


def ensemble_mean_projector(records, t_index: int) -> DensityMatrix:
    """Arithmetic mean of |psi><psi| over records at one snapshot index.

    Records must share the time grid; the sum runs in record order. When all
    states at the index are bit-identical (the t = 0 case of any ensemble),
    the mean is that single projector, computed directly.
    """
    records = list(records)
    if not records:
        raise QtrajError("need at least one record")
    t0 = records[0].times
    dim = records[0].dim
    for r in records[1:]:
        if r.times != t0:
            raise QtrajError("records do not share the time grid")
        if r.dim != dim:
            raise DimensionError("records do not share the dimension")
    if not -len(t0) <= t_index < len(t0):
        raise QtrajError(f"snapshot index {t_index} out of range for {len(t0)} snapshots")

    first = records[0].state_array[t_index]
    if all(np.array_equal(r.state_array[t_index], first) for r in records[1:]):
        return DensityMatrix(np.outer(first, first.conj()))
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for r in records:
        amp = r.state_array[t_index]
        acc += np.outer(amp, amp.conj())
    acc /= len(records)
    return DensityMatrix(0.5 * (acc + acc.conj().T))


def fock_quadratures(fock_dim: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Quadratures x = (a + a+)/sqrt(2), p = -i(a - a+)/sqrt(2), so [x, p] = i
    (up to the truncation edge of the Fock basis)."""
    n = np.arange(int(fock_dim), dtype=np.float64)
    a = np.diag(np.sqrt(n[1:]), k=1).astype(np.complex128)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = -1j * (a - a.conj().T) / np.sqrt(2.0)
    return OperatorMatrix(x), OperatorMatrix(p)


def poincare_sample(rec: TrajectoryRecord, period: DrivePeriod,
                    x_op: OperatorMatrix, p_op: OperatorMatrix) -> PoincareSection:
    """Sample (<x>, <p>) once per drive period, at t = phase_offset + n * period.

    The snapshot grid must resolve the period: period / snapshot spacing must
    be an integer (within 1e-9) of at least 20, and the record must span at
    least two periods. Non-commensurate grids are rejected with the spacing
    that would work.
    """
    if x_op.dim != rec.dim or p_op.dim != rec.dim:
        raise DimensionError("quadrature operator dims do not match the record")
    times = rec.times
    if len(times) < 2:
        raise GridError("record has fewer than two snapshots")
    spacing = times[1] - times[0]
    duration = times[-1] - times[0]
    if duration < 2.0 * period.period - GRID_TOL:
        raise GridError(
            f"record spans {duration:.6g}, needs at least two periods ({2 * period.period:.6g})")

    per_period = period.period / spacing
    per_period_int = int(round(per_period))
    if abs(per_period - per_period_int) > GRID_TOL or per_period_int < MIN_SAMPLES_PER_PERIOD:
        want = max(MIN_SAMPLES_PER_PERIOD, per_period_int if per_period_int > 0 else 1)
        raise GridError(
            f"snapshot spacing {spacing!r} does not resolve period {period.period!r}: "
            f"period/spacing = {per_period!r} must be an integer >= {MIN_SAMPLES_PER_PERIOD}; "
            f"use dt * record_every = period / {want} = {period.period / want!r}")

    offset_steps = (period.phase_offset - times[0]) / spacing
    offset_int = int(round(offset_steps))
    if abs(offset_steps - offset_int) > GRID_TOL or offset_int < 0:
        raise GridError(
            f"phase_offset {period.phase_offset!r} does not lie on the snapshot grid "
            f"(spacing {spacing!r})")

    idx = np.arange(offset_int, len(times), per_period_int)
    states = rec.state_array[idx]
    xs = np.real(np.sum(states.conj() * (states @ x_op.entries.T), axis=1))
    ps = np.real(np.sum(states.conj() * (states @ p_op.entries.T), axis=1))
    return PoincareSection(list(zip(xs, ps)), [times[i] for i in idx])
