"""Lab-frame propagation under the bare cosine drive.

This is the validation side of the package: no rotating-wave step, the
full three-level electron, and a time-dependent Hamiltonian integrated
as a product of midpoint-rule exponentials. Unitarity is exact by
construction (each factor is an exponential of a Hermitian matrix),
which is what makes the fidelity comparisons against the rotating-frame
models trustworthy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import PulseSchedule, compose_gate
from .spinalg import kron, spin_ops
from .systems import (
    SystemSpec,
    build_rwa_model,
    build_static_hamiltonian,
    drive_frequency,
    nuclear_configs,
    static_basis_labels,
)

__all__ = [
    "DriveSpec",
    "drive_for",
    "propagate_lab",
    "to_rotating_frame",
    "RwaComparison",
    "compare_with_rwa",
]

# Batch size for the vectorized eigendecompositions; bounds peak memory at
# a few tens of MB for the 18-level register.
_CHUNK = 8192


@dataclass(frozen=True)
class DriveSpec:
    """Cosine drive B1_tilde * cos(omega0 t + phase) on the electron x-axis.

    ``b1_tilde`` is the full amplitude, sqrt(2) times the rotating-frame
    amplitude the schedules use.
    """

    b1_tilde: float
    omega0: float
    phase: float = 0.0

    def __post_init__(self):
        if self.b1_tilde < 0:
            raise ValueError("b1_tilde must be nonnegative")
        if self.omega0 == 0:
            raise ValueError("omega0 must be nonzero")


def drive_for(spec: SystemSpec, choice: dict[str, float], b1: float) -> DriveSpec:
    """Drive resonant with the chosen transition at rotating-frame amplitude b1."""
    return DriveSpec(b1_tilde=math.sqrt(2) * b1, omega0=drive_frequency(spec, choice))


def _electron_x(spec: SystemSpec) -> np.ndarray:
    nuc_dim = len(nuclear_configs(spec))
    return kron(spin_ops(1.0).sx, np.eye(nuc_dim, dtype=complex))


def propagate_lab(
    spec: SystemSpec, drive: DriveSpec, t: float, dt: float | None = None
) -> np.ndarray:
    """Time-ordered propagator over [0, t] on the full product space.

    Midpoint rule: the product of exp(-i H(t_k + dt/2) dt) with the step
    adjusted so an integer number covers t exactly. The default step is
    1/40 of a drive period; anything coarser than 1/20 is refused since
    the quadratic stepping error would be invisible in no test and wrong
    in every figure.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    period = 2 * math.pi / abs(drive.omega0)
    if dt is None:
        dt = period / 40
    if dt > period / 20 * (1 + 1e-12):
        raise ValueError(f"dt={dt} too coarse; need dt <= {period / 20} (a 20th of a drive period)")

    h0 = np.diag(build_static_hamiltonian(spec)).real
    sx = _electron_x(spec)
    dim = len(h0)
    u = np.eye(dim, dtype=complex)
    if t == 0:
        return u

    n_steps = max(1, math.ceil(t / dt - 1e-9))
    dt = t / n_steps
    midpoints = (np.arange(n_steps) + 0.5) * dt
    amplitudes = drive.b1_tilde * np.cos(drive.omega0 * midpoints + drive.phase)

    h0_mat = np.diag(h0.astype(complex))
    for start in range(0, n_steps, _CHUNK):
        amps = amplitudes[start : start + _CHUNK]
        hs = amps[:, None, None] * sx + h0_mat
        w, v = np.linalg.eigh(hs)
        phases = np.exp(-1j * w * dt)
        steps = np.einsum("kij,kj,klj->kil", v, phases, v.conj())
        for s in steps:
            u = s @ u
    return u


def _frame_phases(spec: SystemSpec, omega0: float, t: float) -> np.ndarray:
    """Diagonal of the frame generator K = H_nuclear - omega0 * S_z, times t.

    Chosen so the frame-transformed free evolution is exactly the
    rotating-frame static Hamiltonian on the m_s in {0, -1} block.
    """
    k_diag = []
    for ms, cfg in static_basis_labels(spec):
        nuc = sum(
            sp.gamma * spec.Bz * m + sp.quad * m * m
            for sp, m in zip(spec.species, cfg)
        )
        k_diag.append(nuc - omega0 * ms)
    return np.exp(1j * np.array(k_diag) * t)


def to_rotating_frame(
    u_lab: np.ndarray, spec: SystemSpec, choice: dict[str, float], t: float
) -> np.ndarray:
    """Frame-transform a lab propagator and project onto the model levels.

    Applies the frame unitary at time t on the left (the frame is the
    identity at t = 0, where the propagation started) and keeps the rows
    and columns of the model basis, in model order. The projection is
    subunitary exactly to the extent population left the m_s in {0, -1}
    block.
    """
    labels = static_basis_labels(spec)
    if u_lab.shape != (len(labels), len(labels)):
        raise ValueError(
            f"propagator shape {u_lab.shape} does not match the {len(labels)}-level register"
        )
    model = build_rwa_model(spec, choice)
    w = _frame_phases(spec, model.omega0, t)
    rotated = w[:, None] * u_lab
    sel = [labels.index((0.0 if e == 0 else -1.0, cfg)) for cfg, e in model.basis_labels]
    return rotated[np.ix_(sel, sel)]


@dataclass(frozen=True)
class RwaComparison:
    """Agreement scores between a lab-frame gate and its RWA counterpart."""

    fidelity: float
    max_entry_diff: float
    leakage_plus_one: float
    t: float
    dt: float


def compare_with_rwa(
    spec: SystemSpec,
    choice: dict[str, float],
    b1: float,
    t: float | None = None,
    dt: float | None = None,
) -> RwaComparison:
    """Propagate the cosine drive and score it against the RWA evolution.

    ``t`` defaults to a full resonant half-turn (pi/b1). The fidelity is
    the gate-comparison analog of the average gate fidelity, with the
    frame-projected lab gate in place of the target; leakage is the
    worst-case population ending in m_s = +1.
    """
    model = build_rwa_model(spec, choice)
    if t is None:
        t = math.pi / b1
    drive = drive_for(spec, choice, b1)
    period = 2 * math.pi / abs(drive.omega0)
    if dt is None:
        dt = period / 40

    u_lab = propagate_lab(spec, drive, t, dt)

    labels = static_basis_labels(spec)
    plus_rows = [k for k, (ms, _) in enumerate(labels) if ms == 1.0]
    model_cols = [
        labels.index((0.0 if e == 0 else -1.0, cfg)) for cfg, e in model.basis_labels
    ]
    leak = float(
        np.sum(np.abs(u_lab[np.ix_(plus_rows, model_cols)]) ** 2, axis=0).max()
    )

    u_rot = to_rotating_frame(u_lab, spec, choice, t)
    u_rwa = compose_gate(model, PulseSchedule(b1=b1, t_g=t))
    d = model.dim
    tr = np.trace(u_rwa.conj().T @ u_rot)
    return RwaComparison(
        fidelity=float((d + abs(tr) ** 2) / (d * (d + 1))),
        max_entry_diff=float(np.abs(u_rot - u_rwa).max()),
        leakage_plus_one=leak,
        t=t,
        dt=dt,
    )
