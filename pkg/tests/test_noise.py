"""Quasi-static field noise and the Gauss-Hermite average."""

import dataclasses
import math

import numpy as np
import pytest

from nvsync.gates import avg_gate_fidelity, compose_gate, conditional_x_target, phase_correction, rotation_phases
from nvsync.gates import PulseSchedule
from nvsync.noise import NoiseSpec, noise_averaged_fidelity, shifted_rwa_model, sigma_from_t2star
from nvsync.sync import b1_sync, sync_gate_time
from nvsync.systems import build_rwa_model


def sync_schedule(model, n=0, m=1):
    a = model.a_eff
    b1 = b1_sync(n, m, a)
    t_g = sync_gate_time(n, b1)
    theta = phase_correction(m, t_g, a, n=n)
    return PulseSchedule(b1=b1, t_g=t_g, virtual_phases=rotation_phases(model, theta))


def test_sigma_from_t2star_value():
    assert sigma_from_t2star(2.0) == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    with pytest.raises(ValueError):
        sigma_from_t2star(0.0)
    with pytest.raises(ValueError):
        sigma_from_t2star(-1.0)


def test_sigma_reproduces_free_induction_decay():
    """A Gaussian field average must decay as exp(-(t/T2*)^2); integrate the
    characteristic function numerically and compare."""
    t2 = 2.0
    sigma = sigma_from_t2star(t2)
    t = 0.7
    deltas = np.linspace(-8 * sigma, 8 * sigma, 200_001)
    weights = np.exp(-(deltas**2) / (2 * sigma**2))
    weights /= weights.sum()
    envelope = np.sum(weights * np.cos(deltas * t))
    assert envelope == pytest.approx(math.exp(-((t / t2) ** 2)), abs=1e-6)


def test_noise_spec_validation():
    with pytest.raises(ValueError, match="exactly one"):
        NoiseSpec()
    with pytest.raises(ValueError, match="exactly one"):
        NoiseSpec(sigma=1.0, t2_star=1.0)
    with pytest.raises(ValueError, match="positive"):
        NoiseSpec(sigma=-1.0)
    with pytest.raises(ValueError, match="at least 3"):
        NoiseSpec(sigma=1.0, quadrature_order=2)
    assert NoiseSpec(sigma=0.5).sigma_value == 0.5
    assert NoiseSpec(t2_star=2.0).sigma_value == pytest.approx(math.sqrt(2) / 2)


def test_shifted_model_moves_only_electron_one_levels(n15_model):
    shifted = shifted_rwa_model(n15_model, 0.3)
    for k, (_, e) in enumerate(n15_model.basis_labels):
        if e == 1:
            assert shifted.h_diag[k] == n15_model.h_diag[k] - 0.3
        else:
            assert shifted.h_diag[k] == n15_model.h_diag[k]
    # the original model is untouched
    i, j = n15_model.resonant_indices
    assert n15_model.h_diag[j] == 0.0
    assert shifted.h_diag[j] == -0.3


def test_zero_noise_limit(n15, n15_model):
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    f0 = avg_gate_fidelity(compose_gate(n15_model, schedule), target)
    f_avg = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, NoiseSpec(sigma=1e-12)
    )
    assert f_avg == pytest.approx(f0, abs=1e-9)


def test_quadrature_matches_inline_monte_carlo(n15, n15_model):
    """Independent check: a seeded sampling loop written out here, against
    the 41-node quadrature."""
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    noise = NoiseSpec(t2_star=2.0)
    f_quad = noise_averaged_fidelity(n15, {"N": -0.5}, schedule, target, noise)

    rng = np.random.default_rng(1)
    sigma = noise.sigma_value
    shifts = rng.normal(0.0, sigma, 20_000)
    total = 0.0
    electron_one = np.array([e == 1 for _, e in n15_model.basis_labels])
    for delta in shifts:
        h = n15_model.h_diag - delta * electron_one
        model = dataclasses.replace(n15_model, h_diag=h)
        total += avg_gate_fidelity(compose_gate(model, schedule), target)
    f_mc = total / len(shifts)
    assert f_quad == pytest.approx(f_mc, abs=1.5e-3)


def test_package_monte_carlo_path(n15, n15_model):
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    noise = NoiseSpec(t2_star=2.0)
    f_quad = noise_averaged_fidelity(n15, {"N": -0.5}, schedule, target, noise)
    f_mc = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, noise, method="montecarlo", samples=20_000, seed=3
    )
    assert f_mc == pytest.approx(f_quad, abs=2e-3)
    again = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, noise, method="montecarlo", samples=20_000, seed=3
    )
    assert again == f_mc


def test_unknown_method_rejected(n15, n15_model):
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    with pytest.raises(ValueError, match="unknown method"):
        noise_averaged_fidelity(
            n15, {"N": -0.5}, schedule, target, NoiseSpec(sigma=0.1), method="exact"
        )


def test_average_is_monotone_in_sigma(n15, n15_model):
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    values = [
        noise_averaged_fidelity(n15, {"N": -0.5}, schedule, target, NoiseSpec(sigma=s))
        for s in (0.05, 0.2, 0.7, 2.0, 5.0)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_average_cannot_exceed_clean_fidelity(n15, n15_model):
    # the sync point is a local maximum in detuning, so averaging only hurts
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    f0 = avg_gate_fidelity(compose_gate(n15_model, schedule), target)
    f_avg = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, NoiseSpec(t2_star=7.0)
    )
    assert f_avg <= f0 + 1e-12


def test_quadrature_order_converged(n15, n15_model):
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    f41 = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, NoiseSpec(t2_star=2.0, quadrature_order=41)
    )
    f81 = noise_averaged_fidelity(
        n15, {"N": -0.5}, schedule, target, NoiseSpec(t2_star=2.0, quadrature_order=81)
    )
    assert f41 == pytest.approx(f81, abs=1e-9)


def test_t2_star_reference_values(n15, n15_model):
    """Frozen averages for the fastest exact gate at the three bath grades."""
    schedule = sync_schedule(n15_model)
    target = conditional_x_target(n15_model)
    expected = {2.0: 0.99531265, 7.0: 0.99961500, 90.0: 0.99999767}
    for t2, ref in expected.items():
        f = noise_averaged_fidelity(
            n15, {"N": -0.5}, schedule, target, NoiseSpec(t2_star=t2)
        )
        assert f == pytest.approx(ref, abs=1e-7)
