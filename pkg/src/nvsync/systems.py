"""Register definitions, static Hamiltonians, and rotating-frame models.

Three registers are supported: the NV electron spin (S=1) coupled to its
intrinsic 15N or 14N nucleus, optionally extended by one 13C. Every term
that matters for conditional gates (secular hyperfine, quadrupole, Zeeman)
is diagonal in the product basis, so static Hamiltonians are diagonal and
the rotating-frame model decomposes into independent two-level blocks,
one per nuclear spin configuration.

Conventions fixed here and relied on everywhere else:

* energies and couplings are angular (rad/us); linear-MHz values enter
  only through ``PhysicalConstants.from_linear_mhz`` and the CLI,
* the electron qubit is {m_s=0, m_s=-1}; m_s=+1 never appears in a model,
* nuclear configurations are ordered by descending magnetic quantum
  number (lexicographically across species), electron index minor, which
  places the driven configuration of the default transitions first and
  the 14N m=-1 leakage manifold last.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .spinalg import kron, spin_ops

__all__ = [
    "TWO_PI",
    "PhysicalConstants",
    "SystemSpec",
    "RwaModel",
    "REGISTERS",
    "DEFAULT_TRANSITIONS",
    "nuclear_configs",
    "static_basis_labels",
    "build_static_hamiltonian",
    "validate_transition",
    "drive_frequency",
    "build_rwa_model",
    "detuning_margin",
    "gslac_resonance",
]

TWO_PI = 2.0 * math.pi

REGISTERS = ("N15", "N14", "N14_C13")

# Nuclear-condition map per register used when the caller does not pick one:
# the transitions the conditional gates are defined on.
DEFAULT_TRANSITIONS = {
    "N15": {"N": -0.5},
    "N14": {"N": 1.0},
    "N14_C13": {"N": 1.0, "C": 0.5},
}

_DEFAULT_A_ZZ_13C = TWO_PI * 0.43


@dataclass(frozen=True)
class PhysicalConstants:
    """NV and nuclear constants, all angular (rad/us, rad/(us*T)).

    Field names follow the usual spectroscopic symbols; defaults are the
    room-temperature NV values. ``A_*`` are the secular (parallel to z)
    and transverse hyperfine components of the intrinsic nitrogen.
    """

    D: float = TWO_PI * 2880.0
    gamma_e: float = TWO_PI * 28000.0
    gamma_n_15N: float = TWO_PI * -4.3
    gamma_n_14N: float = TWO_PI * 3.1
    gamma_n_13C: float = TWO_PI * 10.705
    A_par_15N: float = TWO_PI * 3.03
    A_perp_15N: float = TWO_PI * 3.65
    A_par_14N: float = TWO_PI * -2.16
    A_perp_14N: float = TWO_PI * -2.7
    Q_14N: float = TWO_PI * -4.96

    @classmethod
    def from_linear_mhz(cls, overrides: dict[str, float] | None = None) -> "PhysicalConstants":
        """Defaults with selected fields replaced by linear-MHz values.

        This is the single place where the 2*pi conversion happens for
        user-facing input.
        """
        values = {f.name: getattr(cls(), f.name) for f in dataclasses.fields(cls)}
        for name, mhz in (overrides or {}).items():
            if name not in values:
                raise KeyError(f"unknown constant: {name}")
            values[name] = TWO_PI * float(mhz)
        return cls(**values)

    def as_linear_mhz(self) -> dict[str, float]:
        return {
            f.name: getattr(self, f.name) / TWO_PI
            for f in dataclasses.fields(self)
        }


class Species(NamedTuple):
    """One nuclear spin: label, quantum number, and diagonal couplings."""

    label: str
    spin: float
    gamma: float
    a_par: float
    quad: float


@dataclass(frozen=True)
class SystemSpec:
    """A register at a given static field.

    ``A_zz_13C`` is the secular hyperfine of the 13C and is meaningful
    (and defaulted) only for the N14_C13 register; supplying it for the
    two-spin registers is rejected.
    """

    register: str
    Bz: float = 0.5
    A_zz_13C: float | None = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if self.register not in REGISTERS:
            raise ValueError(f"unknown register: {self.register!r}")
        if self.register == "N14_C13":
            if self.A_zz_13C is None:
                object.__setattr__(self, "A_zz_13C", _DEFAULT_A_ZZ_13C)
        elif self.A_zz_13C is not None:
            raise ValueError("A_zz_13C is only meaningful for the N14_C13 register")

    @property
    def species(self) -> tuple[Species, ...]:
        c = self.constants
        if self.register == "N15":
            return (Species("N", 0.5, c.gamma_n_15N, c.A_par_15N, 0.0),)
        nitrogen = Species("N", 1.0, c.gamma_n_14N, c.A_par_14N, c.Q_14N)
        if self.register == "N14":
            return (nitrogen,)
        return (nitrogen, Species("C", 0.5, c.gamma_n_13C, self.A_zz_13C, 0.0))


def _m_values(spin: float) -> tuple[float, ...]:
    dim = int(round(2 * spin + 1))
    return tuple(spin - k for k in range(dim))


def nuclear_configs(spec: SystemSpec) -> tuple[tuple[float, ...], ...]:
    """All nuclear configurations, lexicographically descending in m."""
    return tuple(itertools.product(*(_m_values(sp.spin) for sp in spec.species)))


def static_basis_labels(spec: SystemSpec) -> tuple[tuple[float, tuple[float, ...]], ...]:
    """Full-space basis as (m_s, nuclear configuration), electron major."""
    return tuple(
        (ms, cfg) for ms in (1.0, 0.0, -1.0) for cfg in nuclear_configs(spec)
    )


def build_static_hamiltonian(spec: SystemSpec) -> np.ndarray:
    """Static Hamiltonian on the full product space, in rad/us.

    Zero-field splitting, electron and nuclear Zeeman, quadrupole, and the
    secular hyperfine terms. All terms are diagonal in the product basis;
    the matrix is returned dense so callers needing operators (rather than
    levels) can use it directly.
    """
    c = spec.constants
    dims = [3] + [int(round(2 * sp.spin + 1)) for sp in spec.species]

    def embed(op: np.ndarray, slot: int) -> np.ndarray:
        out = np.eye(1, dtype=complex)
        for k, d in enumerate(dims):
            out = kron(out, op if k == slot else np.eye(d, dtype=complex))
        return out

    sz_e = embed(spin_ops(1.0).sz, 0)
    h = c.D * (sz_e @ sz_e) + c.gamma_e * spec.Bz * sz_e
    for k, sp in enumerate(spec.species, start=1):
        iz = embed(spin_ops(sp.spin).sz, k)
        h = h + sp.gamma * spec.Bz * iz + sp.quad * (iz @ iz) + sp.a_par * (sz_e @ iz)
    return h


def _static_levels(spec: SystemSpec) -> np.ndarray:
    return np.diag(build_static_hamiltonian(spec)).real.copy()


def _level_index(spec: SystemSpec, ms: float, cfg: tuple[float, ...]) -> int:
    return static_basis_labels(spec).index((ms, cfg))


def validate_transition(spec: SystemSpec, choice: dict[str, float]) -> tuple[float, ...]:
    """Check a nuclear-condition map and return its configuration tuple.

    The map assigns one magnetic quantum number per nuclear species; the
    driven electron transition is always m_s = 0 <-> -1 on that
    configuration.
    """
    expected = [sp.label for sp in spec.species]
    if sorted(choice) != sorted(expected):
        raise ValueError(
            f"transition must give exactly the species {expected}, got {sorted(choice)}"
        )
    cfg = []
    for sp in spec.species:
        m = float(choice[sp.label])
        if m not in _m_values(sp.spin):
            raise ValueError(
                f"species {sp.label} has no m={m}; allowed: {_m_values(sp.spin)}"
            )
        cfg.append(m)
    return tuple(cfg)


def drive_frequency(spec: SystemSpec, choice: dict[str, float]) -> float:
    """Resonance of the m_s = 0 <-> -1 transition on the chosen configuration.

    Signed difference of static levels, rad/us. Negative past the level
    inversion (gamma_e*Bz > D), as at the default 0.5 T.
    """
    cfg = validate_transition(spec, choice)
    levels = _static_levels(spec)
    return float(levels[_level_index(spec, -1.0, cfg)] - levels[_level_index(spec, 0.0, cfg)])


@dataclass(frozen=True)
class RwaModel:
    """Rotating-frame model: independent driven blocks per configuration.

    ``basis_labels`` pairs each level with (configuration, electron index),
    electron index 0 for m_s=0 and 1 for m_s=-1. ``h_diag`` holds the
    frame-transformed static energies: zero on every electron-0 level and
    the detuning from the drive on every electron-1 level. ``drive_pairs``
    lists the levels the drive connects (one pair per configuration) and
    ``resonant_pair`` indexes the pair with zero detuning.

    ``computational_indices`` orders the 2^k * 2 computational levels as
    qubit words with the nuclear controls major and the driven
    configuration last; for 14N registers the m=-1 manifold is excluded
    (leakage). ``a_eff`` is the precession rate that sets the waiting-time
    period.
    """

    dim: int
    basis_labels: tuple[tuple[tuple[float, ...], int], ...]
    h_diag: np.ndarray
    drive_pairs: tuple[tuple[int, int], ...]
    resonant_pair: int
    omega0: float
    a_eff: float
    computational_indices: tuple[int, ...]

    @property
    def nuclear_configs(self) -> tuple[tuple[float, ...], ...]:
        return tuple(self.basis_labels[i][0] for i, _ in self.drive_pairs)

    @property
    def resonant_indices(self) -> tuple[int, int]:
        return self.drive_pairs[self.resonant_pair]

    @property
    def leakage_indices(self) -> tuple[int, ...]:
        comp = set(self.computational_indices)
        return tuple(i for i in range(self.dim) if i not in comp)


def _qubit_pair(spin: float, driven_m: float) -> tuple[float, float]:
    # (|0>, |1>) m-values for one species; for spin 1 the partner of the
    # driven level is the adjacent m, leaving one m as leakage.
    if spin == 0.5:
        return (-driven_m, driven_m)
    partner = 0.0 if driven_m != 0.0 else 1.0
    return (partner, driven_m)


def build_rwa_model(spec: SystemSpec, choice: dict[str, float]) -> RwaModel:
    """Rotating-frame model for driving the given transition.

    Detunings are exact differences of static levels, so the resonant pair
    comes out at identically zero and every other block carries the full
    hyperfine mismatch, signed.
    """
    driven = validate_transition(spec, choice)
    configs = nuclear_configs(spec)
    levels = _static_levels(spec)
    omega0 = drive_frequency(spec, choice)

    h_diag = np.zeros(2 * len(configs))
    labels = []
    pairs = []
    for k, cfg in enumerate(configs):
        labels.append((cfg, 0))
        labels.append((cfg, 1))
        pairs.append((2 * k, 2 * k + 1))
        gap = levels[_level_index(spec, -1.0, cfg)] - levels[_level_index(spec, 0.0, cfg)]
        h_diag[2 * k + 1] = gap - omega0

    qubit_words = itertools.product(
        *(_qubit_pair(sp.spin, m) for sp, m in zip(spec.species, driven))
    )
    comp = []
    for word in qubit_words:
        k = configs.index(word)
        comp.extend((2 * k, 2 * k + 1))

    c = spec.constants
    if spec.register == "N15":
        a_eff = abs(c.A_par_15N)
    elif spec.register == "N14":
        a_eff = abs(c.A_par_14N)
    else:
        a_eff = abs(c.A_par_14N + spec.A_zz_13C / 2)

    return RwaModel(
        dim=2 * len(configs),
        basis_labels=tuple(labels),
        h_diag=h_diag,
        drive_pairs=tuple(pairs),
        resonant_pair=configs.index(driven),
        omega0=omega0,
        a_eff=a_eff,
        computational_indices=tuple(comp),
    )


def detuning_margin(spec: SystemSpec) -> float:
    """Spectral distance protecting the m_s=+1 manifold from the drive."""
    c = spec.constants
    zeeman = c.gamma_e * spec.Bz
    return 2 * zeeman if zeeman < c.D else 2 * c.D


def gslac_resonance(spec: SystemSpec) -> tuple[float, float]:
    """Ground-state level-anticrossing fields (T) for the 15N register.

    The two branches where an electron flip is degenerate with a nuclear
    flip-flop, (D + A/2)/(gamma_e - gamma_n) and (D - A/2)/(gamma_e + gamma_n).
    """
    if spec.register != "N15":
        raise ValueError("level-anticrossing branches are defined for N15 only")
    c = spec.constants
    a = c.A_par_15N
    return (
        (c.D + a / 2) / (c.gamma_e - c.gamma_n_15N),
        (c.D - a / 2) / (c.gamma_e + c.gamma_n_15N),
    )
