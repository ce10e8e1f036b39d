"""Lab-frame propagation against the rotating-frame models."""

import math

import numpy as np
import pytest

from nvsync.gates import PulseSchedule, compose_gate
from nvsync.labframe import (
    DriveSpec,
    compare_with_rwa,
    drive_for,
    propagate_lab,
    to_rotating_frame,
)
from nvsync.systems import (
    SystemSpec,
    build_rwa_model,
    build_static_hamiltonian,
    drive_frequency,
    static_basis_labels,
)


def drive_period(spec, choice):
    return 2 * math.pi / abs(drive_frequency(spec, choice))


def test_drive_spec_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        DriveSpec(b1_tilde=-1.0, omega0=1.0)
    with pytest.raises(ValueError, match="nonzero"):
        DriveSpec(b1_tilde=1.0, omega0=0.0)


def test_drive_for_amplitude_convention(n15):
    drive = drive_for(n15, {"N": -0.5}, 2.0)
    assert drive.b1_tilde == pytest.approx(2.0 * math.sqrt(2))
    assert drive.omega0 == drive_frequency(n15, {"N": -0.5})
    assert drive.phase == 0.0


def test_zero_time_is_identity(n15):
    drive = drive_for(n15, {"N": -0.5}, 1.0)
    assert np.array_equal(propagate_lab(n15, drive, 0.0), np.eye(6))


def test_negative_time_rejected(n15):
    drive = drive_for(n15, {"N": -0.5}, 1.0)
    with pytest.raises(ValueError, match="nonnegative"):
        propagate_lab(n15, drive, -0.1)


def test_too_coarse_step_rejected(n15):
    drive = drive_for(n15, {"N": -0.5}, 1.0)
    period = drive_period(n15, {"N": -0.5})
    with pytest.raises(ValueError, match="too coarse"):
        propagate_lab(n15, drive, 1.0, dt=period / 10)


def test_zero_amplitude_gives_free_evolution(n15):
    t = 200 * drive_period(n15, {"N": -0.5})
    drive = DriveSpec(b1_tilde=0.0, omega0=drive_frequency(n15, {"N": -0.5}))
    u = propagate_lab(n15, drive, t)
    h0 = np.diag(build_static_hamiltonian(n15)).real
    assert np.allclose(u, np.diag(np.exp(-1j * h0 * t)), atol=1e-9)


def test_propagator_is_unitary(n15):
    drive = drive_for(n15, {"N": -0.5}, 5.0)
    u = propagate_lab(n15, drive, 100 * drive_period(n15, {"N": -0.5}))
    assert np.allclose(u @ u.conj().T, np.eye(6), atol=1e-10)


def test_midpoint_rule_is_second_order(n15):
    choice = {"N": -0.5}
    model = build_rwa_model(n15, choice)
    drive = drive_for(n15, choice, 0.5 * model.a_eff)
    period = drive_period(n15, choice)
    t = 30 * period
    ref = propagate_lab(n15, drive, t, dt=period / 320)
    err40 = np.abs(propagate_lab(n15, drive, t, dt=period / 40) - ref).max()
    err80 = np.abs(propagate_lab(n15, drive, t, dt=period / 80) - ref).max()
    assert err40 / err80 == pytest.approx(4.0, rel=0.25)


def test_frame_transform_requires_full_space(n15):
    with pytest.raises(ValueError, match="does not match"):
        to_rotating_frame(np.eye(4), n15, {"N": -0.5}, 1.0)


def test_frame_transform_at_zero_time_is_projection(n15):
    rotated = to_rotating_frame(np.eye(6, dtype=complex), n15, {"N": -0.5}, 0.0)
    assert np.allclose(rotated, np.eye(4), atol=1e-14)


def test_free_evolution_matches_rwa_blocks(n15):
    """With the drive off, the frame-transformed lab propagator must equal
    the rotating-frame evolution exactly (same diagonal, no approximation)."""
    choice = {"N": -0.5}
    t = 0.37
    drive = DriveSpec(b1_tilde=0.0, omega0=drive_frequency(n15, choice))
    u_rot = to_rotating_frame(propagate_lab(n15, drive, t), n15, choice, t)
    model = build_rwa_model(n15, choice)
    expected = np.diag(np.exp(-1j * model.h_diag * t))
    assert np.allclose(u_rot, expected, atol=1e-8)


def test_full_gate_agreement_n15(n15):
    model = build_rwa_model(n15, {"N": -0.5})
    report = compare_with_rwa(n15, {"N": -0.5}, 0.1 * model.a_eff)
    assert report.fidelity >= 1 - 1e-3
    assert report.max_entry_diff <= 5e-3
    assert report.leakage_plus_one <= 1e-5
    assert report.t == pytest.approx(math.pi / (0.1 * model.a_eff))


def test_sync_amplitude_agreement_n15(n15):
    # the fastest exact point drives harder, so this bounds the worst case
    model = build_rwa_model(n15, {"N": -0.5})
    b1 = model.a_eff / math.sqrt(3)
    report = compare_with_rwa(n15, {"N": -0.5}, b1, t=0.25 * math.pi / b1)
    assert report.fidelity >= 1 - 1e-3
    assert report.max_entry_diff <= 5e-3


def test_partial_gate_agreement_n14(n14):
    model = build_rwa_model(n14, {"N": 1.0})
    report = compare_with_rwa(n14, {"N": 1.0}, 0.1 * model.a_eff, t=0.15)
    assert report.fidelity >= 1 - 1e-3
    assert report.leakage_plus_one <= 1e-5


def test_partial_gate_agreement_three_spins(n12):
    choice = {"N": 1.0, "C": 0.5}
    model = build_rwa_model(n12, choice)
    report = compare_with_rwa(n12, choice, 0.1 * model.a_eff, t=0.05)
    assert report.fidelity >= 1 - 1e-3
    assert report.leakage_plus_one <= 1e-5


def test_comparison_against_manual_composition(n15):
    """The comparison fidelity must be reproducible from the public pieces."""
    choice = {"N": -0.5}
    model = build_rwa_model(n15, choice)
    b1 = 0.3 * model.a_eff
    t = 0.2
    report = compare_with_rwa(n15, choice, b1, t=t)
    u_lab = propagate_lab(n15, drive_for(n15, choice, b1), t)
    u_rot = to_rotating_frame(u_lab, n15, choice, t)
    u_rwa = compose_gate(model, PulseSchedule(b1=b1, t_g=t))
    d = model.dim
    tr = abs(np.trace(u_rwa.conj().T @ u_rot))
    assert report.fidelity == pytest.approx((d + tr**2) / (d * (d + 1)), abs=1e-12)
    assert report.max_entry_diff == pytest.approx(np.abs(u_rot - u_rwa).max(), abs=1e-12)


def test_leakage_rows_are_the_upper_manifold(n15):
    # population in m_s=+1 rows is what the comparison reports as leakage
    labels = static_basis_labels(n15)
    assert [ms for ms, _ in labels[:2]] == [1.0, 1.0]
