"""
Physical scenario and Hamiltonian of a Chain-Lambda atom.

A chain with ``n_ground`` ground states has ``2*n_ground - 1`` levels,
ordered g1, e1, g2, e2, ..., g_n. The probe couples g_j-e_j with Rabi
frequency P_j and the coupling field couples g_{j+1}-e_j with C_j.

Frequencies (Rabi frequencies, detunings, rates) are angular frequencies in
units of a reference linewidth; ``ChainConfig.frequency_unit`` gives that
unit in rad/s and is only used where SI quantities are needed (kappa, chi,
group velocity). The Hamiltonian is stored as H/hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy import constants as sc

from .errors import ConfigurationError, UnsupportedChainLengthError
from .linalg import SymmetricTridiagonal

EPSILON_0 = sc.epsilon_0
HBAR = sc.hbar
SPEED_OF_LIGHT = sc.c

DEFAULT_DENSITY = 3e15  # m^-3
DEFAULT_DIPOLE = 2e-29  # C m
DEFAULT_LINEWIDTH_HZ = 5.6e6
DEFAULT_FREQUENCY_UNIT = 2 * math.pi * DEFAULT_LINEWIDTH_HZ  # rad/s
DEFAULT_WAVELENGTH = 780e-9  # m


def angular_frequency_from_wavelength(wavelength: float) -> float:
    """Optical angular frequency (rad/s) for a vacuum wavelength in metres."""
    if wavelength <= 0:
        raise ConfigurationError("wavelength must be positive")
    return 2 * math.pi * SPEED_OF_LIGHT / wavelength


def state_labels(n_ground: int) -> list[str]:
    labels = []
    for j in range(1, n_ground + 1):
        labels.append(f"g{j}")
        if j < n_ground:
            labels.append(f"e{j}")
    return labels


def ground_index(j: int) -> int:
    """Position of g_j (1-based j) in the state ordering."""
    return 2 * (j - 1)


def excited_index(j: int) -> int:
    """Position of e_j (1-based j) in the state ordering."""
    return 2 * j - 1


def _as_floats(name, values, length):
    try:
        out = tuple(float(v) for v in values)
    except TypeError:
        raise ConfigurationError(f"{name} must be a sequence of numbers") from None
    if len(out) != length:
        raise ConfigurationError(f"{name} has {len(out)} entries, expected {length}")
    return out


@dataclass(frozen=True)
class ChainConfig:
    """
    Physical scenario for a Chain-Lambda atom.

    Parameters
    ----------
    n_ground : int
        Number of ground states (>= 2); the atom has ``2*n_ground - 1`` states.
    probe_rabi, coupling_rabi : sequence of float
        P_j and C_j, ``n_ground - 1`` entries each.
    gamma : float
        Total decay rate of each excited state.
    dephasing : sequence of float
        m-photon dephasing rates for m = 2 .. 2*(n_ground-1), i.e.
        ``2*n_ground - 3`` entries. Empty means all zero.
    atomic_density : float
        Number density in m^-3.
    dipole_moments : sequence of float
        Dipole moment of each probe transition in C m. Empty means
        ``DEFAULT_DIPOLE`` for all of them.
    probe_angular_frequency : float
        Optical probe frequency omega_p in rad/s.
    frequency_unit : float
        rad/s represented by 1.0 in the internal frequency units.
    """

    n_ground: int
    probe_rabi: tuple[float, ...]
    coupling_rabi: tuple[float, ...]
    gamma: float = 1.0
    dephasing: tuple[float, ...] = ()
    atomic_density: float = DEFAULT_DENSITY
    dipole_moments: tuple[float, ...] = ()
    probe_angular_frequency: float = field(
        default_factory=lambda: angular_frequency_from_wavelength(DEFAULT_WAVELENGTH)
    )
    frequency_unit: float = DEFAULT_FREQUENCY_UNIT

    def __post_init__(self):
        n = self.n_ground
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ConfigurationError(f"n_ground must be an integer >= 2, got {n!r}")
        m = n - 1
        object.__setattr__(self, "probe_rabi", _as_floats("probe_rabi", self.probe_rabi, m))
        object.__setattr__(self, "coupling_rabi", _as_floats("coupling_rabi", self.coupling_rabi, m))
        n_deph = 2 * n - 3
        deph = self.dephasing if len(self.dephasing) else (0.0,) * n_deph
        object.__setattr__(self, "dephasing", _as_floats("dephasing", deph, n_deph))
        dip = self.dipole_moments if len(self.dipole_moments) else (DEFAULT_DIPOLE,) * m
        object.__setattr__(self, "dipole_moments", _as_floats("dipole_moments", dip, m))

        if not self.gamma >= 0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma}")
        if any(not g >= 0 for g in self.dephasing):
            raise ConfigurationError("dephasing rates must be >= 0")
        if not self.atomic_density > 0:
            raise ConfigurationError(f"atomic_density must be > 0, got {self.atomic_density}")
        if not self.probe_angular_frequency > 0:
            raise ConfigurationError("probe_angular_frequency must be > 0")
        if not self.frequency_unit > 0:
            raise ConfigurationError("frequency_unit must be > 0")

    @classmethod
    def equal(cls, n_ground: int, probe: float, coupling: float, **kwargs) -> ChainConfig:
        """Chain with identical P_j = probe and C_j = coupling on every transition."""
        m = n_ground - 1
        return cls(n_ground, (probe,) * m, (coupling,) * m, **kwargs)

    @property
    def n_states(self) -> int:
        return 2 * self.n_ground - 1

    def with_probe(self, probe_rabi) -> ChainConfig:
        return replace(self, probe_rabi=tuple(probe_rabi))

    def with_rabi(self, probe_rabi, coupling_rabi) -> ChainConfig:
        return replace(self, probe_rabi=tuple(probe_rabi), coupling_rabi=tuple(coupling_rabi))

    def dephasing_for(self, photons: int) -> float:
        """Dephasing rate of coherences between states ``photons`` steps apart."""
        if photons < 2:
            return 0.0
        return self.dephasing[photons - 2]


@dataclass(frozen=True)
class Detunings:
    """Probe and coupling detunings; ``two_photon`` is probe - coupling."""

    probe: float = 0.0
    coupling: float = 0.0

    @property
    def two_photon(self) -> float:
        return self.probe - self.coupling


def build_hamiltonian(config: ChainConfig, det: Detunings = Detunings()) -> SymmetricTridiagonal:
    """
    H/hbar of the chain in the rotating frame.

    Diagonal: g_j -> (j-1)(dp - dc), e_j -> j*dp - (j-1)*dc.
    Off-diagonal: alternating P_1, C_1, P_2, C_2, ...
    """
    n = config.n_ground
    diag = []
    for j in range(1, n + 1):
        diag.append((j - 1) * det.two_photon)
        if j < n:
            diag.append(j * det.probe - (j - 1) * det.coupling)
    offdiag = []
    for p, c in zip(config.probe_rabi, config.coupling_rabi):
        offdiag += [p, c]
    return SymmetricTridiagonal(diag, offdiag)


# Ratios relative to the first Lambda system for an F=n -> F'=n transition
# with sigma+ probe and sigma- coupling, starting from m = -F.
_CG_RATIOS = {
    3: {
        "probe": (1.0, math.sqrt(3 / 2)),
        "coupling": (1.0, math.sqrt(2 / 3)),
    },
    4: {
        "probe": (1.0, 2 / math.sqrt(2), math.sqrt(15) / 3),
        "coupling": (1.0, 6 / math.sqrt(30), 3 / math.sqrt(15)),
    },
}


def clebsch_gordan_couplings(n_ground: int, base_probe: float, base_coupling: float,
                             base_dipole: float):
    """
    Rabi frequencies and dipoles of a 5- or 7-state chain built on a real
    F -> F' = F transition.

    Returns
    -------
    probe_rabi, coupling_rabi, dipole_moments : tuple of float
        Each scaled from the first transition's value. Dipoles follow the
        probe ratios.
    """
    if n_ground not in _CG_RATIOS:
        raise UnsupportedChainLengthError(
            f"Clebsch-Gordan ratios are tabulated for n_ground in {sorted(_CG_RATIOS)}, "
            f"got {n_ground}"
        )
    r = _CG_RATIOS[n_ground]
    probe = tuple(base_probe * k for k in r["probe"])
    coupling = tuple(base_coupling * k for k in r["coupling"])
    dipole = tuple(base_dipole * k for k in r["probe"])
    return probe, coupling, dipole


def clebsch_gordan_config(template: ChainConfig, base_probe: float) -> ChainConfig:
    """Copy of ``template`` with couplings rescaled by the CG ratios from P_1, C_1, mu_1."""
    p, c, mu = clebsch_gordan_couplings(
        template.n_ground, base_probe, template.coupling_rabi[0], template.dipole_moments[0]
    )
    return replace(template, probe_rabi=p, coupling_rabi=c, dipole_moments=mu)


def kappa(config: ChainConfig) -> float:
    """2 pi N / (epsilon_0 hbar) in SI units."""
    return 2 * math.pi * config.atomic_density / (EPSILON_0 * HBAR)
