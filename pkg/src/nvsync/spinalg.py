"""Spin operators and small dense matrix exponentials.

Everything downstream lives in product bases of a spin-1 electron with one
or two nuclear spins, so matrices stay small (dimension 18 at most) and
dense eigendecompositions are the right tool throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SpinOperators", "spin_ops", "kron", "expm_hermitian"]

_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class SpinOperators:
    """Cartesian spin matrices for a single spin quantum number."""

    spin: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def spin_ops(s: float) -> SpinOperators:
    """Build spin-s operators in the descending-m basis.

    Parameters
    ----------
    s:
        Spin quantum number, 1/2 or 1. Other values are rejected rather
        than generalized; the registers modeled here contain nothing else.

    Returns
    -------
    SpinOperators
        Matrices of dimension 2s+1 in the basis |s, m> with m descending,
        in units of hbar.
    """
    if s not in (0.5, 1.0):
        raise ValueError(f"unsupported spin quantum number: {s!r}")
    dim = int(round(2 * s + 1))
    m = s - np.arange(dim)
    sz = np.diag(m.astype(complex))
    # raising operator: <m+1|S+|m> = sqrt(s(s+1) - m(m+1)) on the superdiagonal
    ladder = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = ladder
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / 2j
    return SpinOperators(spin=s, sx=sx, sy=sy, sz=sz)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor as the major index."""
    return np.kron(np.asarray(a), np.asarray(b))


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Evolution operator exp(-i h t) for a Hermitian generator.

    Parameters
    ----------
    h:
        Hermitian matrix in rad/us. Hermiticity is checked to 1e-12
        (scaled by the largest element); violations raise ValueError,
        since a non-Hermitian generator yields a non-unitary propagator
        and silently corrupts every fidelity computed downstream.
    t:
        Duration in us. Negative t gives the inverse evolution.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(float(np.abs(h).max()), 1.0)
    if float(np.abs(h - h.conj().T).max()) > _HERMITICITY_TOL * scale:
        raise ValueError("generator is not Hermitian to 1e-12")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T
