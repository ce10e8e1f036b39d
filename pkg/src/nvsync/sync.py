"""Synchronization points and fidelity scans over the drive amplitude.

A drive amplitude is synchronized when the off-resonant blocks complete
whole rotations while the resonant block performs an odd half-turn:
m*b1 = (2n+1)*Omega(b1). Solving for b1 gives the exact family
b1 = |a|*(2n+1)/sqrt(4m^2-(2n+1)^2); everything else here measures how
fidelity behaves between and beyond those points.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .gates import (
    PulseSchedule,
    avg_gate_fidelity,
    compose_gate,
    conditional_x_target,
    phase_correction,
    rabi_frequency,
    rotation_phases,
    waiting_time,
    wrap_phase,
)
from .spinalg import expm_hermitian
from .systems import RwaModel, SystemSpec, build_rwa_model

__all__ = [
    "SyncPoint",
    "ScanResult",
    "b1_sync",
    "sync_gate_time",
    "analytic_sync_points",
    "sweep_b1",
    "scan_b1_tw",
    "find_sync_numeric",
    "optimized_schedule",
    "SWEEP_POLICIES",
    "GRID_PHASE_POLICIES",
]

SWEEP_POLICIES = ("corrected", "uncorrected", "phase_optimized")
GRID_PHASE_POLICIES = ("phase_optimized", "pi_half", "none")


@dataclass(frozen=True)
class SyncPoint:
    """One high-fidelity drive amplitude.

    Exact points carry their (n, m) family labels; numerically found
    points leave them unset. ``fidelity`` is scored at t_w = 0; for
    numeric points the wait-optimized variant is reported alongside.
    """

    n: int | None
    m: int | None
    b1: float
    t_g: float
    fidelity: float
    exact: bool
    t_w: float = 0.0
    fidelity_tw_opt: float | None = None
    t_w_opt: float | None = None


@dataclass(frozen=True)
class ScanResult:
    """Fidelity over one or two axes, plus enough metadata to replot it."""

    axis1_name: str
    axis1_values: np.ndarray
    fidelity: np.ndarray
    axis2_name: str | None = None
    axis2_values: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)
    threshold: float = 0.99

    def __post_init__(self):
        expected = (len(self.axis1_values),)
        if self.axis2_values is not None:
            expected = (len(self.axis1_values), len(self.axis2_values))
        if self.fidelity.shape != expected:
            raise ValueError(
                f"fidelity shape {self.fidelity.shape} does not match axes {expected}"
            )
        if self.fidelity.size and (
            self.fidelity.min() < -1e-9 or self.fidelity.max() > 1 + 1e-6
        ):
            raise ValueError("fidelity entries outside [0, 1]")

    @property
    def mask(self) -> np.ndarray:
        return self.fidelity > self.threshold


def b1_sync(n: int, m: int, a_par: float) -> float:
    """Exact synchronized amplitude for the (n, m) family, rad/us."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    if 2 * n + 1 >= 2 * m:
        raise ValueError(f"(n={n}, m={m}) violates 2n+1 < 2m")
    if a_par == 0:
        raise ValueError("a_par must be nonzero")
    odd = 2 * n + 1
    return abs(a_par) * odd / math.sqrt(4 * m * m - odd * odd)


def sync_gate_time(n: int, b1: float) -> float:
    """Gate time of the (n, m) point: the resonant block's odd half-turn."""
    return (2 * n + 1) * math.pi / b1


def analytic_sync_points(a_par: float, max_m: int) -> list[SyncPoint]:
    """All exact points with m <= max_m, sorted by descending amplitude.

    Fidelity is unity by construction (the exactness is what the tests
    verify by composing the gates).
    """
    if a_par == 0:
        raise ValueError("a_par must be nonzero")
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    points = []
    for m in range(1, max_m + 1):
        for n in range(m):  # 2n+1 < 2m
            b1 = b1_sync(n, m, a_par)
            points.append(
                SyncPoint(
                    n=n,
                    m=m,
                    b1=b1,
                    t_g=sync_gate_time(n, b1),
                    fidelity=1.0,
                    exact=True,
                )
            )
    points.sort(key=lambda p: (-p.b1, p.t_g))
    return points


# -- fast path ---------------------------------------------------------------
#
# Every model is a direct sum of driven two-level blocks and every target is
# block diagonal, so the fidelity trace splits into per-configuration traces
# z_c. Virtual phases rotate each z_c independently: the best achievable
# |Tr| is sum_c |z_c|, attained by phases aligning every z_c, and a fixed
# phase set is just a weighted sum. The wait enters as diagonal phases inside
# z_c, which vectorizes over a whole t_w axis at once.


def _block_amplitudes(h_diag, pairs, resonant, b1, t_g):
    """Per-block coefficients (a_c, b_c) of z_c(t_w) = a_c e^{-i h_i t_w} + b_c e^{-i h_j t_w}."""
    a = np.empty(len(pairs), dtype=complex)
    b = np.empty(len(pairs), dtype=complex)
    for c, (i, j) in enumerate(pairs):
        block = np.array(
            [[h_diag[i], b1 / 2], [b1 / 2, h_diag[j]]], dtype=complex
        )
        u = expm_hermitian(block, t_g)
        if c == resonant:
            a[c], b[c] = u[0, 1], u[1, 0]
        else:
            a[c], b[c] = u[0, 0], u[1, 1]
    return a, b


def _block_traces(h_diag, pairs, resonant, b1, t_g, tw_values):
    a, b = _block_amplitudes(h_diag, pairs, resonant, b1, t_g)
    hi = np.array([h_diag[i] for i, _ in pairs])
    hj = np.array([h_diag[j] for _, j in pairs])
    tw = np.asarray(tw_values)[:, None]
    return np.exp(-1j * tw * hi) * a + np.exp(-1j * tw * hj) * b


def _fidelity_from_traces(z, dim, phase_factors=None):
    if phase_factors is None:
        total = np.abs(z).sum(axis=-1)
    else:
        total = np.abs(z @ phase_factors)
    return (dim + total**2) / (dim * (dim + 1))


def _aligned_phases(z_row):
    """Phases aligning the block traces, first configuration fixed to zero."""
    raw = -np.angle(z_row)
    raw -= raw[0]
    return np.array([wrap_phase(p) for p in raw])


def _grid_chunk(args):
    h_diag, pairs, resonant, b1_chunk, tw_values, dim, phase_factors = args
    out = np.empty((len(b1_chunk), len(tw_values)))
    for r, b1 in enumerate(b1_chunk):
        z = _block_traces(h_diag, pairs, resonant, b1, math.pi / b1, tw_values)
        out[r] = _fidelity_from_traces(z, dim, phase_factors)
    return out


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("NVSYNC_WORKERS", "1"))
    return max(1, workers)


def sweep_b1(
    spec: SystemSpec,
    choice: dict[str, float],
    b1_values,
    schedule_policy: str = "corrected",
) -> ScanResult:
    """Fidelity versus drive amplitude at t_g = pi/b1.

    Policies:

    * ``corrected``: wait to a full precession period, virtual pi/2
      rotation (the weak-driving recipe; exact as b1 -> 0),
    * ``uncorrected``: no wait, correction angle from the synchronization
      formula with m inferred from the Rabi ratio (exact on the n=0
      family),
    * ``phase_optimized``: no wait, per-point optimal phases.
    """
    if schedule_policy not in SWEEP_POLICIES:
        raise ValueError(f"unknown policy {schedule_policy!r}; use one of {SWEEP_POLICIES}")
    model = build_rwa_model(spec, choice)
    target = conditional_x_target(model)
    b1_values = np.asarray(b1_values, dtype=float)
    if b1_values.size == 0 or np.any(b1_values <= 0):
        raise ValueError("b1 axis must be nonempty and positive")

    fid = np.empty(b1_values.shape)
    for k, b1 in enumerate(b1_values):
        t_g = math.pi / b1
        if schedule_policy == "corrected":
            schedule = PulseSchedule(
                b1=b1,
                t_g=t_g,
                t_w=waiting_time(model.a_eff, t_g),
                virtual_phases=rotation_phases(model, math.pi / 2),
            )
            fid[k] = avg_gate_fidelity(compose_gate(model, schedule), target)
        elif schedule_policy == "uncorrected":
            m_eff = max(1, round(rabi_frequency(b1, model.a_eff) / b1))
            theta = phase_correction(m_eff, t_g, model.a_eff)
            schedule = PulseSchedule(
                b1=b1, t_g=t_g, virtual_phases=rotation_phases(model, theta)
            )
            fid[k] = avg_gate_fidelity(compose_gate(model, schedule), target)
        else:
            z = _block_traces(
                model.h_diag, model.drive_pairs, model.resonant_pair, b1, t_g, [0.0]
            )
            fid[k] = _fidelity_from_traces(z, model.dim)[0]

    return ScanResult(
        axis1_name="b1",
        axis1_values=b1_values,
        fidelity=fid,
        metadata=_scan_metadata(spec, choice, model, policy=schedule_policy),
    )


def scan_b1_tw(
    spec: SystemSpec,
    choice: dict[str, float],
    b1_values,
    tw_values,
    phase_policy: str = "phase_optimized",
    workers: int | None = None,
) -> ScanResult:
    """Fidelity over the (b1, t_w) grid at t_g = pi/b1.

    Rows are independent; ``workers`` (default: the NVSYNC_WORKERS
    environment variable, else serial) splits them across processes.
    Results are merged by index and do not depend on the worker count.
    """
    if phase_policy not in GRID_PHASE_POLICIES:
        raise ValueError(f"unknown policy {phase_policy!r}; use one of {GRID_PHASE_POLICIES}")
    model = build_rwa_model(spec, choice)
    b1_values = np.asarray(b1_values, dtype=float)
    tw_values = np.asarray(tw_values, dtype=float)
    if b1_values.size == 0 or tw_values.size == 0:
        raise ValueError("grid axes must be nonempty")
    if np.any(b1_values <= 0) or np.any(tw_values < 0):
        raise ValueError("b1 must be positive and t_w nonnegative")

    if phase_policy == "phase_optimized":
        phase_factors = None
    elif phase_policy == "pi_half":
        phases = dict(rotation_phases(model, math.pi / 2))
        phase_factors = np.array(
            [np.exp(1j * phases[cfg]) for cfg in model.nuclear_configs]
        )
    else:
        phase_factors = np.ones(len(model.drive_pairs), dtype=complex)

    workers = _resolve_workers(workers)
    chunks = np.array_split(np.arange(len(b1_values)), min(workers, len(b1_values)))
    jobs = [
        (
            model.h_diag,
            model.drive_pairs,
            model.resonant_pair,
            b1_values[idx],
            tw_values,
            model.dim,
            phase_factors,
        )
        for idx in chunks
        if len(idx)
    ]
    if workers == 1 or len(jobs) <= 1:
        parts = [_grid_chunk(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_grid_chunk, jobs))

    return ScanResult(
        axis1_name="b1",
        axis1_values=b1_values,
        fidelity=np.vstack(parts),
        axis2_name="t_w",
        axis2_values=tw_values,
        metadata=_scan_metadata(spec, choice, model, policy=phase_policy),
    )


def _golden_max(fun, lo, hi, iters=80):
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fun(x1)
    return ((x1, f1) if f1 >= f2 else (x2, f2))


def find_sync_numeric(
    spec: SystemSpec,
    choice: dict[str, float],
    b1_range: tuple[float, float],
    threshold: float = 0.99,
    phase_policy: str = "phase_optimized",
    n_points: int = 600,
) -> list[SyncPoint]:
    """Search the amplitude window for high-fidelity operating points.

    Scans t_g = pi/b1 over a coarse grid, refines every interior local
    maximum by golden section, and keeps those whose phase-optimized
    fidelity at t_w = 0 exceeds ``threshold``. Each point also reports
    the best fidelity over one waiting period. Points carry no (n, m)
    labels; those belong to the exact family only.
    """
    lo, hi = b1_range
    if not (0 < lo < hi):
        raise ValueError(f"empty or invalid b1 range: {b1_range}")
    if not (0 < threshold < 1):
        raise ValueError("threshold must be in (0, 1)")
    if phase_policy != "phase_optimized":
        raise ValueError("only the phase_optimized policy is supported for the search")
    model = build_rwa_model(spec, choice)

    def fid_tw0(b1: float) -> float:
        z = _block_traces(
            model.h_diag, model.drive_pairs, model.resonant_pair, b1, math.pi / b1, [0.0]
        )
        return float(_fidelity_from_traces(z, model.dim)[0])

    grid = np.linspace(lo, hi, n_points)
    vals = np.array([fid_tw0(b) for b in grid])
    step = grid[1] - grid[0]

    points = []
    for k in range(1, n_points - 1):
        if vals[k] > vals[k - 1] and vals[k] >= vals[k + 1]:
            b1, f0 = _golden_max(fid_tw0, grid[k - 1], grid[k + 1])
            if f0 <= threshold:
                continue
            if points and abs(points[-1].b1 - b1) < step / 2:
                if f0 <= points[-1].fidelity:
                    continue
                points.pop()
            t_g = math.pi / b1
            period = 2 * math.pi / abs(model.a_eff)
            tws = np.linspace(0.0, period, 256, endpoint=False)
            z = _block_traces(
                model.h_diag, model.drive_pairs, model.resonant_pair, b1, t_g, tws
            )
            ftw = _fidelity_from_traces(z, model.dim)
            kbest = int(np.argmax(ftw))
            tw_lo = tws[max(0, kbest - 1)]
            tw_hi = tws[kbest + 1] if kbest + 1 < len(tws) else period

            def fid_at_tw(tw, _b1=b1, _tg=t_g):
                z = _block_traces(
                    model.h_diag, model.drive_pairs, model.resonant_pair, _b1, _tg, [tw]
                )
                return float(_fidelity_from_traces(z, model.dim)[0])

            tw_opt, f_opt = _golden_max(fid_at_tw, tw_lo, tw_hi)
            points.append(
                SyncPoint(
                    n=None,
                    m=None,
                    b1=float(b1),
                    t_g=t_g,
                    fidelity=f0,
                    exact=False,
                    t_w=0.0,
                    fidelity_tw_opt=f_opt,
                    t_w_opt=float(tw_opt),
                )
            )

    points.sort(key=lambda p: -p.b1)
    return points


def optimized_schedule(
    model: RwaModel, b1: float, t_g: float | None = None, t_w: float = 0.0
) -> PulseSchedule:
    """Schedule with the closed-form optimal virtual phases attached."""
    if t_g is None:
        t_g = math.pi / b1
    z = _block_traces(
        model.h_diag, model.drive_pairs, model.resonant_pair, b1, t_g, [t_w]
    )[0]
    phases = _aligned_phases(z)
    return PulseSchedule(
        b1=b1,
        t_g=t_g,
        t_w=t_w,
        virtual_phases=tuple(zip(model.nuclear_configs, phases)),
    )


def _scan_metadata(spec, choice, model, **extra):
    md = {
        "register": spec.register,
        "Bz": spec.Bz,
        "transition": dict(choice),
        "omega0": model.omega0,
        "a_eff": model.a_eff,
    }
    if spec.A_zz_13C is not None:
        md["A_zz_13C"] = spec.A_zz_13C
    md.update(extra)
    return md
