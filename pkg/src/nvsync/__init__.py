"""Pulse-level simulator and parameter search for conditional electron-spin
gates in hyperfine-coupled NV-center registers."""

__version__ = "0.1.0"

from .spinalg import SpinOperators, expm_hermitian, kron, spin_ops
from .systems import (
    DEFAULT_TRANSITIONS,
    REGISTERS,
    TWO_PI,
    PhysicalConstants,
    RwaModel,
    SystemSpec,
    build_rwa_model,
    build_static_hamiltonian,
    detuning_margin,
    drive_frequency,
    gslac_resonance,
    nuclear_configs,
    static_basis_labels,
    validate_transition,
)
from .gates import (
    GateReport,
    PulseSchedule,
    TargetGate,
    avg_gate_fidelity,
    build_target,
    compose_gate,
    conditional_x_target,
    gate_report,
    leakage,
    phase_correction,
    rabi_frequency,
    rotation_phases,
    waiting_time,
    wrap_phase,
)
from .sync import (
    ScanResult,
    SyncPoint,
    analytic_sync_points,
    b1_sync,
    find_sync_numeric,
    optimized_schedule,
    scan_b1_tw,
    sweep_b1,
    sync_gate_time,
)
from .labframe import (
    DriveSpec,
    RwaComparison,
    compare_with_rwa,
    drive_for,
    propagate_lab,
    to_rotating_frame,
)
from .noise import (
    NoiseSpec,
    noise_averaged_fidelity,
    shifted_rwa_model,
    sigma_from_t2star,
)
