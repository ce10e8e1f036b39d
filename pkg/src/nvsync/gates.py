"""Pulse schedules, target gates, and the average-gate-fidelity metric.

A gate is drive, then virtual nuclear phases, then free evolution:
U = exp(-i H0 t_w) V exp(-i H(b1) t_g). The order is fixed for
reproducibility; the diagonal pieces commute, so regrouping is a phase
bookkeeping exercise, not new physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spinalg import expm_hermitian
from .systems import RwaModel

__all__ = [
    "PulseSchedule",
    "GateReport",
    "TargetGate",
    "TARGET_LABELS",
    "wrap_phase",
    "rabi_frequency",
    "waiting_time",
    "phase_correction",
    "rotation_phases",
    "compose_gate",
    "leakage",
    "avg_gate_fidelity",
    "build_target",
    "conditional_x_target",
    "projected_target",
    "gate_report",
]

TARGET_LABELS = ("CNOT_4", "CNOT_on_6", "CCNOT_on_12")

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def wrap_phase(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(theta, 2 * math.pi)
    if w <= -math.pi:
        w += 2 * math.pi
    return w


@dataclass(frozen=True)
class PulseSchedule:
    """One rectangular drive pulse with virtual phases and a wait.

    ``b1`` is the rotating-frame drive amplitude (rad/us), i.e. the
    full-amplitude cosine drive divided by sqrt(2). ``virtual_phases``
    assigns a phase (radians, wrapped to (-pi, pi]) per nuclear
    configuration label; omitted configurations get phase zero.
    """

    b1: float
    t_g: float
    t_w: float = 0.0
    virtual_phases: tuple[tuple[tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        if self.b1 < 0:
            raise ValueError("b1 must be nonnegative")
        if self.t_g <= 0:
            raise ValueError("t_g must be positive")
        if self.t_w < 0:
            raise ValueError("t_w must be nonnegative")
        seen = set()
        for label, phase in self.virtual_phases:
            if label in seen:
                raise ValueError(f"duplicate virtual phase for {label}")
            seen.add(label)
            if not (-math.pi < phase <= math.pi + 1e-12):
                raise ValueError(f"phase {phase} for {label} not in (-pi, pi]")


@dataclass(frozen=True)
class GateReport:
    """Composed gate with its scores against a target."""

    u_act: np.ndarray
    fidelity: float
    total_time: float
    leakage: float
    fidelity_projected: float | None = None


@dataclass(frozen=True)
class TargetGate:
    """Ideal unitary with the dimension the fidelity metric runs at.

    ``embed`` optionally names the rows/columns of a larger unitary this
    target compares against; without it, only same-dimension comparison
    (or the canonical 6-to-4 restriction) is possible.
    """

    dim: int
    u_target: np.ndarray
    label: str
    embed: tuple[int, ...] | None = None


def rabi_frequency(b1: float, delta: float) -> float:
    """Generalized Rabi rate of a detuned two-level block, rad/us."""
    return 0.5 * math.hypot(b1, delta)


def waiting_time(a_eff: float, t_g: float) -> float:
    """Wait closing the hyperfine precession to a whole number of turns.

    Returns the smallest nonnegative k*2*pi/|a_eff| - t_g. Gates shorter
    than one period get the single-period remainder; longer drives (weak
    driving) wrap over as many periods as they span.
    """
    if a_eff == 0:
        raise ValueError("a_eff must be nonzero")
    if t_g < 0:
        raise ValueError("t_g must be nonnegative")
    period = 2 * math.pi / abs(a_eff)
    k = math.ceil(t_g / period)
    t_w = k * period - t_g
    if t_w < 0:
        t_w += period
    return t_w


def phase_correction(m: int, t_g: float, a_par: float, n: int = 0) -> float:
    """Virtual z-rotation angle making a synchronized pulse an exact gate.

    For the (n, m) synchronization family the off-resonant block closes
    up to a diagonal phase that the nuclear rotation must undo:
    theta = pi/2 + a_par*t_g/2 + (m+n)*pi, wrapped to (-pi, pi]. The
    parity term flips the sign of the conditional pi/2 whenever the
    resonant half-turns and off-resonant full turns differ in parity.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    return wrap_phase(math.pi / 2 + a_par * t_g / 2 + (m + n) * math.pi)


def rotation_phases(model: RwaModel, theta: float) -> tuple[tuple[tuple[float, ...], float], ...]:
    """Per-configuration phases of a virtual z-rotation by theta.

    Each nuclear species is rotated by the same angle; configuration
    (m_1, ..., m_k) picks up exp(-i theta sum_j m_j).
    """
    return tuple(
        (cfg, wrap_phase(-theta * sum(cfg))) for cfg in model.nuclear_configs
    )


def _phase_vector(model: RwaModel, virtual_phases) -> np.ndarray:
    by_cfg = dict(virtual_phases)
    unknown = set(by_cfg) - set(model.nuclear_configs)
    if unknown:
        raise ValueError(f"virtual phases for unknown configurations: {sorted(unknown)}")
    return np.array(
        [np.exp(1j * by_cfg.get(cfg, 0.0)) for cfg, _ in model.basis_labels]
    )


def compose_gate(model: RwaModel, schedule: PulseSchedule) -> np.ndarray:
    """Materialize the schedule on the model and return its unitary.

    The drive only ever connects the two electron levels within one
    nuclear configuration, so the result is assembled block by block and
    is exactly zero across configurations.
    """
    u = np.zeros((model.dim, model.dim), dtype=complex)
    for i, j in model.drive_pairs:
        block = np.array(
            [
                [model.h_diag[i], schedule.b1 / 2],
                [schedule.b1 / 2, model.h_diag[j]],
            ],
            dtype=complex,
        )
        u[np.ix_((i, j), (i, j))] = expm_hermitian(block, schedule.t_g)
    diag = _phase_vector(model, schedule.virtual_phases)
    diag = diag * np.exp(-1j * model.h_diag * schedule.t_w)
    return diag[:, None] * u


def leakage(u: np.ndarray, computational_indices: tuple[int, ...]) -> float:
    """Worst-case population loss from the computational subspace.

    1 minus the smallest retained norm over computational basis inputs.
    """
    cols = np.asarray(computational_indices)
    retained = np.sum(np.abs(u[np.ix_(cols, cols)]) ** 2, axis=0)
    return float(max(0.0, 1.0 - retained.min()))


def _canonical_embed(target: TargetGate, dim_act: int) -> tuple[int, ...]:
    # The one conventional restriction: a 4-level CNOT inside the standard
    # 6-level layout (driven m=+1 first, m=0 second, m=-1 leakage last).
    if target.label == "CNOT_4" and target.dim == 4 and dim_act == 6:
        return (2, 3, 0, 1)
    raise ValueError(
        f"cannot project a {dim_act}-dim unitary onto target "
        f"{target.label} (dim {target.dim}) without explicit embedding"
    )


def avg_gate_fidelity(u_act: np.ndarray, target: TargetGate) -> float:
    """Average gate fidelity F = (d + |Tr(U_t^dag U_eff)|^2) / (d (d+1)).

    When ``u_act`` is larger than the target, it is first restricted to
    the target's subspace (the ``embed`` indices); the restriction is
    generally subunitary, which charges leakage against the fidelity.
    """
    u_act = np.asarray(u_act)
    d = target.dim
    if u_act.shape[0] == d:
        u_eff = u_act
    elif u_act.shape[0] > d:
        idx = target.embed if target.embed is not None else _canonical_embed(target, u_act.shape[0])
        u_eff = u_act[np.ix_(idx, idx)]
    else:
        raise ValueError(f"gate dim {u_act.shape[0]} smaller than target dim {d}")
    tr = np.trace(target.u_target.conj().T @ u_eff)
    return float((d + abs(tr) ** 2) / (d * (d + 1)))


def build_target(label: str, dim: int | None = None) -> TargetGate:
    """Canonical target gates in the standard basis layouts.

    CNOT_4 flips the electron on the second nuclear configuration;
    CNOT_on_6 and CCNOT_on_12 flip it on the first (the driven one) and
    act as identity elsewhere, including the leakage manifold.
    """
    if label not in TARGET_LABELS:
        raise ValueError(f"unknown target label: {label!r}")
    sizes = {"CNOT_4": 4, "CNOT_on_6": 6, "CCNOT_on_12": 12}
    size = sizes[label]
    if dim is not None and dim != size:
        raise ValueError(f"target {label} has dim {size}, not {dim}")
    u = np.eye(size, dtype=complex)
    if label == "CNOT_4":
        u[2:4, 2:4] = _X
    else:
        u[0:2, 0:2] = _X
    return TargetGate(dim=size, u_target=u, label=label)


def conditional_x_target(model: RwaModel) -> TargetGate:
    """Electron flip on the resonant configuration, identity elsewhere.

    Full model dimension, so leakage-manifold errors count against the
    fidelity. The label records the gate family for the model size.
    """
    u = np.eye(model.dim, dtype=complex)
    i, j = model.resonant_indices
    u[np.ix_((i, j), (i, j))] = _X
    label = {4: "CNOT_4", 6: "CNOT_on_6", 12: "CCNOT_on_12"}[model.dim]
    return TargetGate(dim=model.dim, u_target=u, label=label)


def projected_target(model: RwaModel) -> TargetGate:
    """Conditional flip restricted to the computational subspace.

    Qubit-word ordering per ``model.computational_indices``; the driven
    configuration is the all-ones word, so the flip sits in the last
    block. Dimension 4 or 8.
    """
    d = len(model.computational_indices)
    u = np.eye(d, dtype=complex)
    u[d - 2 :, d - 2 :] = _X
    label = "CNOT_4" if d == 4 else "projected_" + str(d)
    return TargetGate(dim=d, u_target=u, label=label, embed=model.computational_indices)


def gate_report(model: RwaModel, schedule: PulseSchedule, target: TargetGate | None = None) -> GateReport:
    """Compose the schedule and score it.

    The primary fidelity runs at full model dimension against ``target``
    (default: the conditional flip); the projected computational-subspace
    fidelity is reported alongside.
    """
    if target is None:
        target = conditional_x_target(model)
    u = compose_gate(model, schedule)
    return GateReport(
        u_act=u,
        fidelity=avg_gate_fidelity(u, target),
        total_time=schedule.t_g + schedule.t_w,
        leakage=leakage(u, model.computational_indices),
        fidelity_projected=avg_gate_fidelity(u, projected_target(model)),
    )
