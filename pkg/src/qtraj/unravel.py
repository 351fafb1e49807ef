"""Stochastic pure-state unravelings of the Lindblad master equation.

Three schemes share one execution engine:

- qsd: quantum state diffusion, one complex Wiener increment per Lindblad
  channel. Operationally this is the heterodyne unraveling; the two names
  refer to the same implementation. Pathwise invariant under
  re-representations of the master equation.
- homodyne: real Wiener increments, one per channel. Reproduces the master
  equation in the mean but is NOT pathwise invariant under re-representation.
- jump: deterministic non-Hermitian drift punctuated by discontinuous jumps
  L_k psi / ||L_k psi|| at rate <L_k+L_k>.

All SDEs are in the Ito convention, discretized by Euler-Maruyama with an
explicit renormalization after every step. Trajectories are stepped in
batches as (B, N) arrays; an ensemble is a sequence of fixed-size batches, so
results are independent of the worker count by construction.

Randomness is reproducible and splittable: trajectory i of an ensemble uses
stream seed split(master_seed, i), and each trajectory's noise is generated
in fixed-size blocks keyed by split(stream_seed, block_index). Identical
seeds give bit-identical paths; extending t_final leaves the common prefix
unchanged.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, IntegrationError, QtrajError
from .master import n_steps
from .model import LindbladModel, RepresentationTransform, apply_transform
from .statespace import StateVector

NOISE_KINDS = ("complex-wiener", "real-wiener", "uniform-jump")
METHODS = ("qsd", "homodyne", "jump")
STEPPERS = ("euler", "split")

# Noise is generated in fixed blocks of this many steps, each from its own
# generator, so a path's prefix never depends on how far it is extended.
NOISE_BLOCK = 4096

# Trajectories are executed in fixed batches of this size; the batch layout
# must not depend on the worker count or results would not be bit-stable.
ENSEMBLE_CHUNK = 64

# Step-size guard for the jump scheme: total jump probability per step.
JUMP_GUARD = 0.1

_SEED_MASK = (1 << 64) - 1
# splitmix64 constants (Steele, Lea, Flood 2014).
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def _mix64(x: int) -> int:
    x &= _SEED_MASK
    x ^= x >> 30
    x = (x * _MIX_A) & _SEED_MASK
    x ^= x >> 27
    x = (x * _MIX_B) & _SEED_MASK
    x ^= x >> 31
    return x


def split(seed: int, index: int) -> int:
    """Derive substream seed number `index` from a 64-bit master seed.

    This is the splitmix64 output function applied to seed + (index+1) * golden
    ratio increment. Used for trajectory streams (split(master_seed, i)) and,
    one level down, for noise blocks (split(stream_seed, block)).
    """
    seed = int(seed)
    index = int(index)
    if not 0 <= seed <= _SEED_MASK:
        raise QtrajError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if index < 0:
        raise QtrajError(f"substream index must be nonnegative, got {index}")
    return _mix64((seed + (index + 1) * _GOLDEN) & _SEED_MASK)


@dataclass(frozen=True)
class NoisePath:
    """Pregenerated noise increments for one trajectory.

    kinds: complex-wiener (dxi with M[dxi dxi*] = dt, M[dxi dxi] = 0),
    real-wiener (dW with M[dW^2] = dt), uniform-jump (one uniform in [0,1)
    per step driving both the jump decision and the channel choice).
    """
    kind: str
    steps: int
    channels: int
    dt: float
    increments: np.ndarray

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise QtrajError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.steps < 0 or self.channels < 0:
            raise QtrajError("steps and channels must be nonnegative")
        if not self.dt > 0.0:
            raise QtrajError(f"dt must be positive, got {self.dt}")
        inc = np.asarray(self.increments)
        want = np.complex128 if self.kind == "complex-wiener" else np.float64
        if want is np.float64 and np.iscomplexobj(inc):
            raise QtrajError(f"{self.kind} increments must be real, got complex data")
        inc = inc.astype(want, copy=False)
        if inc.shape != (self.steps, self.channels):
            raise DimensionError(
                f"increments shape {inc.shape} != (steps, channels) = {(self.steps, self.channels)}")
        inc = np.ascontiguousarray(inc)
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)


def _block_length(steps: int, block: int) -> int:
    start = block * NOISE_BLOCK
    return max(0, min(NOISE_BLOCK, steps - start))


def _noise_block(kind: str, channels: int, dt: float, stream_seed: int,
                 block: int, length: int) -> np.ndarray:
    """One block of increments. A full block is always drawn before slicing,
    so the content of step s never depends on the total path length."""
    rng = np.random.Generator(np.random.PCG64(split(stream_seed, block)))
    if kind == "complex-wiener":
        g = rng.standard_normal((NOISE_BLOCK, channels, 2))
        full = np.sqrt(dt / 2.0) * (g[..., 0] + 1j * g[..., 1])
    elif kind == "real-wiener":
        full = np.sqrt(dt) * rng.standard_normal((NOISE_BLOCK, channels))
    else:
        full = rng.random((NOISE_BLOCK, channels))
    return full[:length]


def make_noise(kind: str, steps: int, channels: int, dt: float, stream_seed: int) -> NoisePath:
    """Deterministic noise path for one trajectory stream.

    complex-wiener increments are built as sqrt(dt/2) (g1 + i g2) from
    independent standard normals. The same stream_seed always reproduces the
    identical array.
    """
    if kind not in NOISE_KINDS:
        raise QtrajError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
    steps = int(steps)
    channels = int(channels)
    if steps < 0 or channels < 0:
        raise QtrajError("steps and channels must be nonnegative")
    dtype = np.complex128 if kind == "complex-wiener" else np.float64
    out = np.empty((steps, channels), dtype=dtype)
    n_blocks = (steps + NOISE_BLOCK - 1) // NOISE_BLOCK
    for b in range(n_blocks):
        length = _block_length(steps, b)
        out[b * NOISE_BLOCK: b * NOISE_BLOCK + length] = _noise_block(
            kind, channels, dt, stream_seed, b, length)
    return NoisePath(kind, steps, channels, float(dt), out)


def transform_noise(t: RepresentationTransform, noise: NoisePath) -> NoisePath:
    """Noise counterpart of a representation transform: dxi'_j = sum_k conj(u)_jk dxi_k.

    Defined for complex-wiener noise only; shifts leave the noise unchanged.
    The transformed increments satisfy the same complex Wiener statistics
    (the complex Gaussian law is invariant under unitary mixing).
    """
    if noise.kind != "complex-wiener":
        raise QtrajError(f"transform_noise requires complex-wiener noise, got {noise.kind!r}")
    if noise.channels != t.n_channels:
        raise DimensionError(
            f"noise has {noise.channels} channels, transform has {t.n_channels}")
    new = noise.increments @ t.mixing.conj().T
    return NoisePath(noise.kind, noise.steps, noise.channels, noise.dt, new)


@dataclass(frozen=True)
class TrajectoryConfig:
    """Time grid, seed, and scheme selection for one stochastic run.

    stepper selects the discretization of the same SDE: "euler" is plain
    Euler-Maruyama; "split" applies the diagonal part of the deterministic
    linear drift exactly via elementwise exponentials each step and treats
    the rest explicitly. "split" exists for stiff diagonal Hamiltonians
    (large Fock-space anharmonicities), where plain Euler amplifies the
    highest levels unstably at any practical dt.
    """
    dt: float
    t_final: float
    record_every: int = 1
    seed: int = 0
    method: str = "qsd"
    stepper: str = "euler"

    def __post_init__(self):
        if not self.dt > 0.0:
            raise QtrajError(f"dt must be positive, got {self.dt}")
        if not self.t_final > 0.0:
            raise QtrajError(f"t_final must be positive, got {self.t_final}")
        if self.dt > self.t_final:
            raise QtrajError(f"dt ({self.dt}) exceeds t_final ({self.t_final})")
        if self.record_every < 1:
            raise QtrajError(f"record_every must be >= 1, got {self.record_every}")
        if not 0 <= int(self.seed) <= _SEED_MASK:
            raise QtrajError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.method not in METHODS:
            raise QtrajError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.stepper not in STEPPERS:
            raise QtrajError(f"unknown stepper {self.stepper!r}; expected one of {STEPPERS}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Snapshots of one stochastic run.

    state_array holds the raw (n_snapshots, dim) amplitudes; the states
    property wraps them as StateVectors on access. jump_times holds
    (time, channel) pairs for the jump method and is empty otherwise.
    """
    times: tuple[float, ...]
    state_array: np.ndarray
    jump_times: tuple[tuple[float, int], ...]
    seed: int
    method: str

    def __post_init__(self):
        arr = np.asarray(self.state_array, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "state_array", arr)

    @property
    def states(self) -> tuple[StateVector, ...]:
        return tuple(StateVector(row) for row in self.state_array)

    @property
    def dim(self) -> int:
        return self.state_array.shape[1]

    def __len__(self) -> int:
        return len(self.times)


class _Prepared:
    """Per-run arrays: transposed operators for (B, N) row-state stepping."""

    __slots__ = ("dim", "k", "l_t", "det_t", "exp_d", "split_mode")

    def __init__(self, h: np.ndarray, ls: list[np.ndarray], stepper: str, dt: float):
        dim = h.shape[0]
        a = -1j * h
        for l in ls:
            a = a - 0.5 * (l.conj().T @ l)
        self.dim = dim
        self.k = len(ls)
        self.l_t = [np.ascontiguousarray(l.T) for l in ls]
        self.split_mode = stepper == "split"
        if self.split_mode:
            d = np.diag(a).copy()
            self.det_t = np.ascontiguousarray((a - np.diag(d)).T)
            self.exp_d = np.exp(d * dt)
        else:
            self.det_t = np.ascontiguousarray(a.T)
            self.exp_d = None


def _renormalize(new: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(new, axis=1)
    if not np.all(np.isfinite(norms)) or np.any(norms == 0.0):
        raise IntegrationError("state norm blew up (NaN/Inf); dt too large for this model")
    return new / norms[:, None]


def _qsd_step_batch(prep: _Prepared, states: np.ndarray, dxi: np.ndarray, dt: float) -> np.ndarray:
    out = states + dt * (states @ prep.det_t)
    for k in range(prep.k):
        lp = states @ prep.l_t[k]
        ell = np.sum(states.conj() * lp, axis=1)[:, None]
        out = out + dt * (ell.conj() * lp - 0.5 * np.abs(ell) ** 2 * states)
        out = out + dxi[:, k][:, None] * (lp - ell * states)
    if prep.exp_d is not None:
        out = out * prep.exp_d
    return _renormalize(out)


def _homodyne_step_batch(prep: _Prepared, states: np.ndarray, dw: np.ndarray, dt: float) -> np.ndarray:
    out = states + dt * (states @ prep.det_t)
    for k in range(prep.k):
        lp = states @ prep.l_t[k]
        x = 2.0 * np.real(np.sum(states.conj() * lp, axis=1))[:, None]
        out = out + dt * (0.5 * x * lp - 0.125 * x ** 2 * states)
        out = out + dw[:, k][:, None] * (lp - 0.5 * x * states)
    if prep.exp_d is not None:
        out = out * prep.exp_d
    return _renormalize(out)


def _jump_step_batch(prep: _Prepared, states: np.ndarray, u: np.ndarray, dt: float):
    """One step of the jump scheme on a batch; returns (new states, jumped mask,
    channel indices). Jump probability in channel k is <L_k+L_k> dt; the single
    uniform decides occurrence and channel through the cumulative intervals."""
    b = states.shape[0]
    out = states + dt * (states @ prep.det_t)
    if prep.exp_d is not None:
        out = out * prep.exp_d
    if prep.k == 0:
        return _renormalize(out), np.zeros(b, dtype=bool), np.zeros(b, dtype=np.intp)
    lps = [states @ lt for lt in prep.l_t]
    dp = np.stack([dt * np.sum(np.abs(lp) ** 2, axis=1) for lp in lps])  # (K, B)
    total = dp.sum(axis=0)
    worst = float(total.max())
    if worst > JUMP_GUARD:
        raise IntegrationError(
            f"total jump probability per step {worst:.3e} exceeds guard {JUMP_GUARD}; dt too large")
    jumped = u < total
    channels = np.zeros(b, dtype=np.intp)
    if np.any(jumped):
        cum = np.cumsum(dp, axis=0)
        channels = np.minimum(np.sum(u[None, :] >= cum, axis=0), prep.k - 1)
        rows = np.nonzero(jumped)[0]
        targets = np.stack(lps)[channels[rows], rows]
        norms = np.linalg.norm(targets, axis=1)
        if np.any(norms == 0.0):
            raise QtrajError(
                "jump selected a channel that annihilates the state; "
                "this has probability zero and indicates an internal error")
        out[rows] = targets
    return _renormalize(out), jumped, channels


def _run_batch(h: np.ndarray, ls: list[np.ndarray], psi0: np.ndarray,
               cfg: TrajectoryConfig, seeds=None, noise_paths=None):
    """Advance a batch of trajectories on the shared time grid.

    Noise comes either from per-trajectory stream seeds (regenerated block by
    block, keeping memory bounded on long runs) or from pregenerated
    NoisePaths (the pathwise-comparison case, where two runs must share
    randomness). Returns (times, states (B, n_rec, N), jump lists).
    """
    method = cfg.method
    dt = cfg.dt
    steps = n_steps(dt, cfg.t_final)
    k = len(ls)
    channels = 1 if method == "jump" else k
    kind = {"qsd": "complex-wiener", "homodyne": "real-wiener", "jump": "uniform-jump"}[method]

    if noise_paths is not None:
        b = len(noise_paths)
        for p in noise_paths:
            if p.kind != kind:
                raise QtrajError(f"method {method!r} needs {kind!r} noise, got {p.kind!r}")
            if p.channels != channels or p.steps < steps:
                raise DimensionError(
                    f"noise path shape ({p.steps}, {p.channels}) too small for "
                    f"({steps}, {channels})")
            if abs(p.dt - dt) > 1e-12 * max(dt, 1.0):
                raise QtrajError(f"noise path dt {p.dt} does not match config dt {dt}")

        def block_of(idx: int, length: int) -> np.ndarray:
            lo = idx * NOISE_BLOCK
            return np.stack([p.increments[lo:lo + length] for p in noise_paths], axis=1)
    else:
        b = len(seeds)

        def block_of(idx: int, length: int) -> np.ndarray:
            return np.stack([_noise_block(kind, channels, dt, s, idx, length) for s in seeds],
                            axis=1)

    prep = _Prepared(h, ls, cfg.stepper, dt)
    states = np.tile(psi0, (b, 1))
    n_rec = steps // cfg.record_every + 1
    rec = np.empty((b, n_rec, prep.dim), dtype=np.complex128)
    rec[:, 0] = states
    jumps: list[list[tuple[float, int]]] = [[] for _ in range(b)]

    rec_idx = 1
    n_blocks = (steps + NOISE_BLOCK - 1) // NOISE_BLOCK
    s = 0
    for blk in range(n_blocks):
        length = _block_length(steps, blk)
        inc = block_of(blk, length)  # (length, B, channels)
        for j in range(length):
            if method == "qsd":
                states = _qsd_step_batch(prep, states, inc[j], dt)
            elif method == "homodyne":
                states = _homodyne_step_batch(prep, states, inc[j], dt)
            else:
                states, jumped, chans = _jump_step_batch(prep, states, inc[j, :, 0], dt)
                if np.any(jumped):
                    t_now = (s + 1) * dt
                    for row in np.nonzero(jumped)[0]:
                        jumps[row].append((t_now, int(chans[row])))
            s += 1
            if s % cfg.record_every == 0:
                rec[:, rec_idx] = states
                rec_idx += 1
    times = tuple(i * cfg.record_every * dt for i in range(n_rec))
    return times, rec, jumps


def _check_state(m: LindbladModel, psi0: StateVector) -> np.ndarray:
    if psi0.dim != m.dim:
        raise DimensionError(f"state dim {psi0.dim} does not match model dim {m.dim}")
    return psi0.amplitudes


def qsd_step(m: LindbladModel, psi: StateVector, dxi, dt: float) -> StateVector:
    """One Euler-Maruyama step of the quantum-state-diffusion SDE, renormalized.

    Ito form: |dpsi> = [-iH + sum_k (<L_k+> L_k - (1/2) L_k+L_k
    - (1/2) <L_k+><L_k>)] |psi> dt + sum_k (L_k - <L_k>) |psi> dxi_k,
    expectations taken in psi. One complex increment per channel.
    """
    amp = _check_state(m, psi)
    dxi = np.asarray(dxi, dtype=np.complex128).reshape(-1)
    if dxi.shape[0] != m.n_channels:
        raise DimensionError(f"got {dxi.shape[0]} increments for {m.n_channels} channels")
    prep = _Prepared(m.hamiltonian.entries, [op.entries for op in m.lindblad_ops], "euler", dt)
    out = _qsd_step_batch(prep, amp[None, :], dxi[None, :], float(dt))
    return StateVector(out[0])


def homodyne_step(m: LindbladModel, psi: StateVector, dw, dt: float) -> StateVector:
    """One Euler-Maruyama step of the homodyne SDE, renormalized.

    Ito form: |dpsi> = [-iH + sum_k ((1/2) <x_k> L_k - (1/2) L_k+L_k
    - (1/8) <x_k>^2)] |psi> dt + sum_k (L_k - (1/2) <x_k>) |psi> dW_k,
    with x_k = L_k + L_k+. One real increment per channel.
    """
    amp = _check_state(m, psi)
    dw = np.asarray(dw, dtype=np.float64).reshape(-1)
    if dw.shape[0] != m.n_channels:
        raise DimensionError(f"got {dw.shape[0]} increments for {m.n_channels} channels")
    prep = _Prepared(m.hamiltonian.entries, [op.entries for op in m.lindblad_ops], "euler", dt)
    out = _homodyne_step_batch(prep, amp[None, :], dw[None, :], float(dt))
    return StateVector(out[0])


def _single_record(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig,
                   noise: NoisePath | None = None) -> TrajectoryRecord:
    amp = _check_state(m, psi0)
    if noise is None:
        times, rec, jumps = _run_batch(
            m.hamiltonian.entries, [op.entries for op in m.lindblad_ops], amp, cfg,
            seeds=[cfg.seed])
    else:
        times, rec, jumps = _run_batch(
            m.hamiltonian.entries, [op.entries for op in m.lindblad_ops], amp, cfg,
            noise_paths=[noise])
    return TrajectoryRecord(times, rec[0], tuple(jumps[0]), cfg.seed, cfg.method)


def jump_trajectory(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig) -> TrajectoryRecord:
    """One jump-scheme trajectory; cfg.method is overridden to "jump"."""
    return _single_record(m, psi0, replace(cfg, method="jump"))


def run_trajectory(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig,
                   noise: NoisePath | None = None) -> TrajectoryRecord:
    """One stochastic trajectory, dispatched on cfg.method.

    Deterministic given (m, psi0, cfg): the same seed reproduces the record
    bit for bit. An explicit noise path overrides the seed-derived one; that
    is how convergence studies step the same Brownian path at several dt.
    """
    return _single_record(m, psi0, cfg, noise)


def _ensemble_chunk(args):
    """Worker entry point: one fixed batch of an ensemble. Top-level function
    so process pools can pickle it; results depend only on the arguments."""
    h, ls, psi0, cfg, start, seeds, want_mean = args
    times, rec, jumps = _run_batch(h, ls, psi0, cfg, seeds=seeds)
    if want_mean:
        partial = np.einsum("brn,brm->rnm", rec, rec.conj())
        return start, times, partial, len(seeds)
    return start, times, rec, jumps


def _ensemble_chunks(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig,
                     n_traj: int, master_seed: int, workers: int, want_mean: bool):
    """Run all batches, in parallel when workers > 1, and yield the results in
    chunk order regardless of completion order."""
    if n_traj < 1:
        raise QtrajError(f"n_traj must be >= 1, got {n_traj}")
    amp = _check_state(m, psi0)
    h = m.hamiltonian.entries
    ls = [op.entries for op in m.lindblad_ops]
    tasks = []
    for start in range(0, n_traj, ENSEMBLE_CHUNK):
        seeds = [split(master_seed, i) for i in range(start, min(start + ENSEMBLE_CHUNK, n_traj))]
        tasks.append((h, ls, amp, cfg, start, seeds, want_mean))
    if workers <= 1 or len(tasks) == 1:
        for task in tasks:
            yield _ensemble_chunk(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for result in pool.map(_ensemble_chunk, tasks):
            yield result


def run_ensemble(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig,
                 n_traj: int, master_seed: int, workers: int = 1) -> list[TrajectoryRecord]:
    """n_traj independent trajectories; trajectory i uses seed split(master_seed, i).

    Execution is batched in fixed chunks and reduced in trajectory-index
    order, so the result is identical for any worker count.
    """
    records: list[TrajectoryRecord] = []
    for start, times, rec, jumps in _ensemble_chunks(
            m, psi0, cfg, n_traj, master_seed, workers, want_mean=False):
        for row in range(rec.shape[0]):
            records.append(TrajectoryRecord(
                times, rec[row], tuple(jumps[row]), split(master_seed, start + row), cfg.method))
    return records


def run_ensemble_mean(m: LindbladModel, psi0: StateVector, cfg: TrajectoryConfig,
                      n_traj: int, master_seed: int, workers: int = 1):
    """Streamed ensemble reduction: (times, mean projector series as arrays).

    Returns the arithmetic mean of the trajectory projectors at every
    snapshot, accumulated in chunk order (bit-stable across worker counts),
    without retaining per-trajectory records. The t = 0 entry is the initial
    projector itself: every trajectory starts in psi0, so the mean is known
    exactly and is not recomputed through floating-point summation.
    """
    total = None
    times = None
    count = 0
    for start, t, partial, n in _ensemble_chunks(
            m, psi0, cfg, n_traj, master_seed, workers, want_mean=True):
        times = t
        total = partial if total is None else total + partial
        count += n
    mean = total / count
    amp = psi0.amplitudes
    mean[0] = np.outer(amp, amp.conj())
    return times, mean


@dataclass(frozen=True)
class PathwiseComparison:
    """Per-step projector trace distances between a run and its re-representation."""
    times: tuple[float, ...]
    distances: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.distances, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "distances", arr)

    @property
    def max_distance(self) -> float:
        return float(self.distances.max())


def _projector_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise trace distance between projectors of two state series (S, N).

    Eigensolve of the projector difference: no cancellation floor, which
    matters when asserting bounds near 1e-10. Processed in blocks to bound
    memory on long runs.
    """
    out = np.empty(a.shape[0], dtype=np.float64)
    blk = 4096
    for lo in range(0, a.shape[0], blk):
        sa = a[lo:lo + blk]
        sb = b[lo:lo + blk]
        diff = (sa[:, :, None] * sa.conj()[:, None, :]
                - sb[:, :, None] * sb.conj()[:, None, :])
        out[lo:lo + blk] = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)), axis=1)
    return out


def compare_pathwise(m: LindbladModel, t: RepresentationTransform, psi0: StateVector,
                     cfg: TrajectoryConfig, noise: NoisePath | None = None) -> PathwiseComparison:
    """Run cfg.method on (m, noise) and on (apply_transform(m, t),
    matching noise) and report the projector trace distance at every step.

    For qsd the noise is transformed alongside the model (dxi' = conj(u) dxi;
    shifts leave it unchanged). For homodyne the identical real record drives
    both runs: mixing has no real-noise counterpart, and exhibiting the
    resulting pathwise divergence is the point of the comparison. The jump
    method is unsupported.

    The noise defaults to the cfg.seed stream; passing it explicitly lets
    dt-scaling studies reuse one Brownian path across refinements.

    Expected behavior: qsd with pure mixing agrees to rounding at every step;
    qsd with shifts differs only through an accumulated global phase, so
    distances stay O(dt); homodyne under path-breaking transforms grows to
    order unity.
    """
    if cfg.method == "jump":
        raise QtrajError("pathwise comparison is unsupported for the jump method")
    amp = _check_state(m, psi0)
    m2 = apply_transform(m, t)
    steps = n_steps(cfg.dt, cfg.t_final)
    kind = "complex-wiener" if cfg.method == "qsd" else "real-wiener"
    if noise is None:
        noise = make_noise(kind, steps, m.n_channels, cfg.dt, cfg.seed)
    noise2 = transform_noise(t, noise) if cfg.method == "qsd" else noise

    per_step = replace(cfg, record_every=1)
    _, rec_a, _ = _run_batch(m.hamiltonian.entries, [op.entries for op in m.lindblad_ops],
                             amp, per_step, noise_paths=[noise])
    _, rec_b, _ = _run_batch(m2.hamiltonian.entries, [op.entries for op in m2.lindblad_ops],
                             amp, per_step, noise_paths=[noise2])
    distances = _projector_distances(rec_a[0], rec_b[0])
    times = tuple(i * cfg.dt for i in range(steps + 1))
    return PathwiseComparison(times, distances)
