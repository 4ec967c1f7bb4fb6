"""
Probe susceptibility, intensity-dependent dispersion and group velocity.

The dispersion of a chain is

    R = (1/P) d/d(dp) sum_j rho_{g_j e_j}

evaluated at zero probe detuning with a resonant coupling field. For equal
couplings it has closed forms for 3, 5 and 7 states; otherwise it is
obtained by central differences of the dark-state coherences. For unequal
(Clebsch-Gordan) couplings the 1/P prefactor uses P_1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np

from .darkstate import DarkState, dark_state_numeric
from .errors import (
    BranchCutError,
    ConfigurationError,
    DegenerateInputError,
    StepSizeError,
    UnsupportedChainLengthError,
)
from .model import (
    SPEED_OF_LIGHT,
    ChainConfig,
    Detunings,
    build_hamiltonian,
    clebsch_gordan_config,
    kappa,
)

DEFAULT_STEP = 1e-4  # in units of gamma
MAX_STEP_FRACTION = 0.1
BETA_BRACKET = (0.0, 4.0)
BETA_TOL = 1e-6

CouplingMode = Literal["equal", "clebsch-gordan"]


@dataclass(frozen=True)
class Susceptibility:
    value: complex

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    @property
    def absorption(self) -> float:
        """-Im chi, positive for an absorbing medium."""
        return -self.value.imag


@dataclass(frozen=True)
class DispersionResult:
    r: float
    r_gamma_sq: float


@dataclass(frozen=True)
class GroupVelocityResult:
    v_g: float  # m/s
    refractive_slope: float  # d Re(eta) / d dp, in s


class SweepRow(NamedTuple):
    p: float
    r_gamma_sq: float
    v_g: float


def susceptibility_from_coherences(config: ChainConfig, coherences) -> Susceptibility:
    """chi = kappa * sum_j mu_j^2 / P_j * rho_j with P_j converted to rad/s."""
    coherences = np.asarray(coherences)
    if coherences.shape != (config.n_ground - 1,):
        raise ConfigurationError(
            f"expected {config.n_ground - 1} coherences, got shape {coherences.shape}"
        )
    probe = np.asarray(config.probe_rabi)
    if np.any(probe == 0):
        raise DegenerateInputError("susceptibility needs every probe Rabi frequency nonzero")
    mu2 = np.asarray(config.dipole_moments) ** 2
    weights = mu2 / (probe * config.frequency_unit)
    return Susceptibility(complex(kappa(config) * np.sum(weights * coherences)))


def susceptibility_from_state(config: ChainConfig, state: DarkState) -> Susceptibility:
    if state.n_ground != config.n_ground:
        raise ConfigurationError("dark state and config describe different chains")
    return susceptibility_from_coherences(config, state.coherences())


def dispersion_analytic(n_ground: int, p: float, c: float, gamma: float = 1.0) -> DispersionResult:
    """Closed-form dispersion for equal couplings, n_ground in (2, 3, 4)."""
    if p == 0 and c == 0:
        raise DegenerateInputError("P and C cannot both vanish")
    p2 = p * p
    o2 = c * c + p2
    o4 = o2 * o2
    if n_ground == 2:
        r = c * c / o4
    elif n_ground == 3:
        r = c * c * (o4 + 2 * p2 * o2 - 2 * p2 * p2) / (o4 - p2 * o2 + p2 * p2) ** 2
    elif n_ground == 4:
        p4 = p2 * p2
        r = (c * c * (o4 * o4 + 4 * p4 * o4 - 8 * p4 * p2 * o2 + 4 * p4 * p4)
             / (o4 * (o4 - 2 * p2 * o2 + 2 * p4) ** 2))
    else:
        raise UnsupportedChainLengthError(
            f"closed-form dispersion exists for n_ground in (2, 3, 4), got {n_ground}"
        )
    return DispersionResult(r, r * gamma * gamma)


def richardson_central_difference(f: Callable[[float], float], h: float) -> float:
    # f is odd about 0 here, so the central difference error is a series in h^2
    d1 = (f(h) - f(-h)) / (2 * h)
    d2 = (f(h / 2) - f(-h / 2)) / h
    return (4 * d2 - d1) / 3


def _rabi_scale(config: ChainConfig) -> float:
    return min(min(abs(x) for x in config.probe_rabi), min(abs(x) for x in config.coupling_rabi))


def default_step(config: ChainConfig) -> float:
    """1e-4 gamma, shrunk for weak fields so it stays well inside the small-detuning regime."""
    unit = config.gamma if config.gamma > 0 else 1.0
    return min(DEFAULT_STEP * unit, 1e-2 * _rabi_scale(config))


def _check_step(config: ChainConfig, step: float) -> None:
    if not step > 0:
        raise StepSizeError(f"step must be positive, got {step}")
    scale = _rabi_scale(config)
    if step > MAX_STEP_FRACTION * scale:
        raise StepSizeError(
            f"step {step:.3g} exceeds {MAX_STEP_FRACTION} * min(P, C) = {MAX_STEP_FRACTION * scale:.3g}"
        )


def _dark_coherence_sum(config: ChainConfig, dp: float) -> float:
    state = dark_state_numeric(build_hamiltonian(config, Detunings(dp, 0.0)))
    return float(np.sum(state.coherences()))


def dispersion_numeric(config: ChainConfig, step: float | None = None) -> DispersionResult:
    """
    Dispersion from the numerically computed dark state.

    Central differences at +-step and +-step/2 combined by Richardson
    extrapolation, at zero probe and coupling detuning. Divides by P_1.
    """
    if step is None:
        step = default_step(config)
    _check_step(config, step)
    p = config.probe_rabi[0]
    slope = richardson_central_difference(lambda dp: _dark_coherence_sum(config, dp), step)
    r = slope / p
    return DispersionResult(r, r * config.gamma**2)


def chi_slope(config: ChainConfig, step: float | None = None) -> tuple[complex, float]:
    """
    Susceptibility at resonance and d Re(chi) / d dp in seconds, from the
    numeric dark state.
    """
    if step is None:
        step = default_step(config)
    _check_step(config, step)

    def chi(dp):
        state = dark_state_numeric(build_hamiltonian(config, Detunings(dp, 0.0)))
        return susceptibility_from_state(config, state).value

    chi0 = chi(0.0)
    slope = richardson_central_difference(lambda dp: chi(dp).real, step)
    return chi0, slope / config.frequency_unit


def group_velocity(chi_slope: float, chi0: complex, omega_p: float) -> GroupVelocityResult:
    """
    v_g = c / (1 + omega_p dRe(eta)/d dp) with eta = sqrt(1 + chi).

    ``chi_slope`` is d Re(chi) / d dp in seconds and ``omega_p`` the probe
    angular frequency in rad/s.
    """
    base = 1 + complex(chi0)
    if not base.real > 0:
        raise BranchCutError(f"1 + chi = {base} has no positive real part")
    slope = (chi_slope / (2 * cmath.sqrt(base))).real
    return GroupVelocityResult(SPEED_OF_LIGHT / (1 + omega_p * slope), slope)


def group_velocity_numeric(config: ChainConfig, step: float | None = None) -> GroupVelocityResult:
    chi0, slope = chi_slope(config, step)
    return group_velocity(slope, chi0, config.probe_angular_frequency)


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Maximiser of a unimodal ``f`` on the open interval (a, b), to within ``tol``."""
    invphi = (math.sqrt(5) - 1) / 2
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    return (a + b) / 2


def _dispersion_curve(n_ground: int, c: float, numeric: bool, **config_kwargs):
    """R as a function of P for equal couplings."""
    if not numeric and n_ground in (2, 3, 4):
        return lambda p: dispersion_analytic(n_ground, p, c).r

    def r(p):
        return dispersion_numeric(ChainConfig.equal(n_ground, p, c, **config_kwargs)).r

    return r


def dispersion_maximum(n_ground: int, c: float, numeric: bool = False,
                       tol: float = BETA_TOL) -> tuple[float, float]:
    """
    Probe/coupling ratio beta that maximises the equal-coupling dispersion.

    Golden-section search over P/C in ``BETA_BRACKET``. Closed forms are used
    for n_ground <= 4 unless ``numeric`` is set; the numeric curve cannot be
    evaluated at P = 0, so there the lower end is only approached.

    Returns
    -------
    beta : float
        Maximising P/C.
    r_max : float
        Dispersion at the maximum, in units of 1/c^2 of the given ``c``.
    """
    if not c > 0:
        raise ConfigurationError("coupling Rabi frequency must be positive")
    use_numeric = numeric or n_ground not in (2, 3, 4)
    r = _dispersion_curve(n_ground, c, use_numeric)
    lo, hi = BETA_BRACKET
    beta = golden_section_max(lambda x: r(x * c), lo, hi, tol)
    r_max = r(beta * c)
    if not use_numeric and r(lo * c) >= r_max:
        beta, r_max = lo, r(lo * c)
    return beta, r_max


def group_velocity_minimum(n_ground: int, c: float, tol: float = BETA_TOL,
                           **config_kwargs) -> tuple[float, float]:
    """P/C minimising v_g (numeric dark state, equal couplings) and the minimal v_g."""
    if not c > 0:
        raise ConfigurationError("coupling Rabi frequency must be positive")

    def neg_vg(x):
        cfg = ChainConfig.equal(n_ground, x * c, c, **config_kwargs)
        return -group_velocity_numeric(cfg).v_g

    lo, hi = BETA_BRACKET
    x = golden_section_max(neg_vg, lo, hi, tol)
    return x, -neg_vg(x)


def check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ConfigurationError("grid must not be empty")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("grid must be strictly ascending")
    return grid


def config_for_probe(template: ChainConfig, p: float, mode: CouplingMode) -> ChainConfig:
    """``template`` with probe P on the first transition, others set per ``mode``."""
    if mode == "equal":
        m = template.n_ground - 1
        return template.with_rabi((p,) * m, (template.coupling_rabi[0],) * m)
    if mode == "clebsch-gordan":
        return clebsch_gordan_config(template, p)
    raise ConfigurationError(f"unknown coupling mode {mode!r}")


def sweep_dispersion(template: ChainConfig, p_grid: Sequence[float],
                     mode: CouplingMode = "equal") -> list[SweepRow]:
    """
    Dispersion and group velocity along a grid of P_1 values.

    Returns one ``SweepRow(p, r_gamma_sq, v_g)`` per grid point, with ``p``
    as given (internal units).
    """
    grid = check_grid(p_grid)
    rows = []
    for p in grid:
        cfg = config_for_probe(template, float(p), mode)
        d = dispersion_numeric(cfg)
        vg = group_velocity_numeric(cfg)
        rows.append(SweepRow(float(p), d.r_gamma_sq, vg.v_g))
    return rows
