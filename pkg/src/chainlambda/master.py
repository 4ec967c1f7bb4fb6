"""
Open-system treatment of the chain: Liouvillian, steady state, time
evolution and susceptibility from the density matrix.

Density matrices are vectorised row-major, ``vec[i*d + k] = rho[i, k]``,
so ``vec(A rho B) = kron(A, B.T) vec(rho)``. The coherent part is built
from the commutator with H/hbar directly instead of from tabulated
superoperator blocks. The tabulated 5-state blocks use column stacking:
block row k of that table is column k of rho, and with that reading they
equal ``kron(I, H) - kron(H.T, I)`` (the generator is -i times it).

Two loss models are available:

``canonical-lindblad``
    Each e_j decays to g_j and to g_{j+1}, each channel at gamma/2, through
    jump operators |g><e|. Coherences between states m photons apart
    (index distance m >= 2 in the state ordering) get an extra pure
    dephasing rate from ``ChainConfig.dephasing``. Any chain length.
``paper-faithful``
    5-state chain only. Coherence damping rates transcribed from the
    tabulated loss blocks, with the g1-g2 entry taken as -Gamma_2 (it is
    printed with a positive sign, which damps rho[g1, g2] and rho[g2, g1]
    differently and lets one of them grow), plus the gamma/2 refill of
    ground populations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np

from .darkstate import DarkState, dark_state_numeric
from .errors import (
    ConfigurationError,
    IntegrationInstabilityError,
    NonUniqueSteadyStateError,
    SingularSystemError,
    StepSizeError,
    UnsupportedModeError,
)
from .linalg import solve_complex_linear
from .model import ChainConfig, Detunings, build_hamiltonian, excited_index, ground_index
from .optics import (
    DispersionResult,
    Susceptibility,
    richardson_central_difference,
    check_grid,
    susceptibility_from_coherences,
)

LossMode = Literal["canonical-lindblad", "paper-faithful"]
MODES = ("canonical-lindblad", "paper-faithful")

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-9
EVOLVE_TOL = 1e-6
MAX_STABLE_DT_NORM = 0.1


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix in the state order g1, e1, g2, ..., g_n."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ConfigurationError(f"density matrix must be square, got shape {data.shape}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @classmethod
    def pure(cls, vec) -> DensityMatrix:
        vec = np.asarray(vec, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def basis(cls, dim: int, k: int) -> DensityMatrix:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[k, k] = 1.0
        return cls(rho)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def trace_error(self) -> float:
        return float(abs(np.trace(self.data) - 1.0))

    def min_eigenvalue(self) -> float:
        herm = (self.data + self.data.conj().T) / 2
        return float(np.linalg.eigvalsh(herm)[0])

    def is_valid(self, herm_tol=HERMITICITY_TOL, trace_tol=TRACE_TOL, eig_tol=EIGENVALUE_TOL) -> bool:
        return (
            self.hermiticity_error() <= herm_tol
            and self.trace_error() <= trace_tol
            and self.min_eigenvalue() >= -eig_tol
        )

    def fidelity(self, state) -> float:
        """<psi|rho|psi> for a state vector or DarkState (normalised here)."""
        vec = state.alpha if isinstance(state, DarkState) else np.asarray(state)
        vec = vec / np.linalg.norm(vec)
        return float((vec.conj() @ self.data @ vec).real)

    def probe_coherences(self) -> np.ndarray:
        """<e_j|rho|g_j> for j = 1 .. n-1.

        For a pure state sum_k alpha_k |k> this is alpha_{g_j}^* alpha_{e_j},
        and -Im of it is positive for absorption.
        """
        n_ground = (self.dim + 1) // 2
        j = np.arange(1, n_ground)
        return self.data[excited_index(j), ground_index(j)]


@dataclass(frozen=True)
class Liouvillian:
    """Generator of d vec(rho)/dt acting on row-major vectorised density matrices."""

    matrix: np.ndarray
    n_states: int
    mode: str
    config: ChainConfig

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, rho) -> np.ndarray:
        data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        d = self.n_states
        return (self.matrix @ data.reshape(d * d)).reshape(d, d)


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def _decay_channels(n_ground: int):
    # (ground index, excited index) of every radiative channel
    for j in range(1, n_ground):
        e = excited_index(j)
        yield ground_index(j), e
        yield ground_index(j + 1), e


def _canonical_loss(config: ChainConfig) -> np.ndarray:
    d = config.n_states
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    rate = config.gamma / 2
    for g, e in _decay_channels(config.n_ground):
        jump = np.zeros((d, d))
        jump[g, e] = 1.0
        jdj = jump.T @ jump
        out += rate * (np.kron(jump, jump) - 0.5 * np.kron(jdj, eye) - 0.5 * np.kron(eye, jdj.T))
    for i in range(d):
        for k in range(d):
            out[i * d + k, i * d + k] -= config.dephasing_for(abs(i - k))
    return out


def _faithful_loss(config: ChainConfig) -> np.ndarray:
    if config.n_ground != 3:
        raise UnsupportedModeError(
            f"paper-faithful loss model is only defined for the 5-state chain, "
            f"got {config.n_states} states"
        )
    g = config.gamma
    g2, g3, g4 = config.dephasing
    # damping rate of rho[i, k], state order g1, e1, g2, e2, g3
    rates = np.array([
        [0.0, g / 2, g2, g3, g4],
        [g / 2, g, g / 2, g, g3],
        [g2, g / 2, 0.0, g / 2, g2],
        [g3, g, g / 2, g, g / 2],
        [g4, g3, g2, g / 2, 0.0],
    ])
    d = 5
    out = -np.diag(rates.reshape(-1)).astype(complex)
    for gi, ei in _decay_channels(3):
        out[gi * d + gi, ei * d + ei] += g / 2
    return out


def build_liouvillian(config: ChainConfig, det: Detunings = Detunings(),
                      mode: LossMode = "canonical-lindblad") -> Liouvillian:
    """Generator of d rho/dt = -i[H/hbar, rho] + L[rho]."""
    if mode == "canonical-lindblad":
        loss = _canonical_loss(config)
    elif mode == "paper-faithful":
        loss = _faithful_loss(config)
    else:
        raise UnsupportedModeError(f"unknown loss mode {mode!r}; choose from {MODES}")
    h = build_hamiltonian(config, det).to_dense()
    return Liouvillian(_commutator_superop(h) + loss, config.n_states, mode, config)


def steady_state(l: Liouvillian) -> DensityMatrix:
    """
    Stationary density matrix of ``l``.

    Solves L vec(rho) = 0 with the rho[g1, g1] equation replaced by
    trace(rho) = 1.
    """
    if not l.config.gamma > 0:
        raise NonUniqueSteadyStateError("no radiative decay: the steady state is not unique")
    d = l.n_states
    a = l.matrix.copy()
    b = np.zeros(d * d, dtype=complex)
    a[0, :] = 0.0
    a[0, [i * d + i for i in range(d)]] = 1.0
    b[0] = 1.0
    try:
        x = solve_complex_linear(a, b)
    except SingularSystemError as exc:
        raise NonUniqueSteadyStateError(f"steady state is not unique: {exc}") from exc
    return DensityMatrix(x.reshape(d, d))


def susceptibility_from_rho(config: ChainConfig, rho: DensityMatrix) -> Susceptibility:
    if rho.dim != config.n_states:
        raise ConfigurationError("density matrix and config describe different chains")
    return susceptibility_from_coherences(config, rho.probe_coherences())


def solve_at(config: ChainConfig, probe_detuning: float,
             mode: LossMode = "canonical-lindblad") -> DensityMatrix:
    """Steady state at the given probe detuning with a resonant coupling field."""
    return steady_state(build_liouvillian(config, Detunings(probe_detuning, 0.0), mode))


def dispersion_master(config: ChainConfig, step: float = 1e-4,
                      mode: LossMode = "canonical-lindblad") -> DispersionResult:
    """
    Dispersion from steady states of the full master equation.

    d/d(dp) of sum_j Re rho_{e_j g_j}, by Richardson-extrapolated central
    differences around dp = 0, divided by P_1.
    """
    if not step > 0:
        raise StepSizeError(f"step must be positive, got {step}")
    if config.gamma > 0 and step > 0.1 * config.gamma:
        raise StepSizeError(f"step {step:.3g} is not small against gamma={config.gamma:.3g}")

    def coherence_sum(dp):
        return float(np.sum(solve_at(config, dp, mode).probe_coherences().real))

    r = richardson_central_difference(coherence_sum, step) / config.probe_rabi[0]
    return DispersionResult(r, r * config.gamma**2)


class SurfacePoint(NamedTuple):
    delta_p: float
    p: float
    absorption: float


def absorption_surface(config: ChainConfig, delta_grid: Sequence[float], p_grid: Sequence[float],
                       mode: LossMode = "canonical-lindblad") -> list[SurfacePoint]:
    """
    -Im chi over a (probe detuning, probe Rabi frequency) grid.

    Every probe transition gets the same P; couplings come from ``config``.
    Rows are ordered with the probe detuning varying fastest.
    """
    deltas = check_grid(delta_grid)
    probes = check_grid(p_grid)
    m = config.n_ground - 1
    rows = []
    for p in probes:
        cfg = config.with_probe((float(p),) * m)
        for dp in deltas:
            chi = susceptibility_from_rho(cfg, solve_at(cfg, float(dp), mode))
            rows.append(SurfacePoint(float(dp), float(p), chi.absorption))
    return rows


def linear_ramp(p_final: float, duration: float) -> Callable[[float], float]:
    """P(t) rising linearly from 0 to ``p_final`` over ``duration`` and then held."""
    return lambda t: p_final * min(max(t / duration, 0.0), 1.0)


def evolve(config: ChainConfig, rho0: DensityMatrix, probe_ramp: Callable[[float], float],
           t_final: float, dt: float | None = None, mode: LossMode = "canonical-lindblad",
           det: Detunings = Detunings()) -> DensityMatrix:
    """
    Integrate d rho/dt = L(t) rho with classical fixed-step RK4.

    ``probe_ramp(t)`` gives P_1(t); the other probe transitions keep their
    ratio to P_1 from ``config`` (all equal if ``config`` has P_1 = 0).
    The default step is 0.01 / max(gamma, Omega) with Omega the largest
    sqrt(P^2 + C^2) seen along the ramp.
    """
    if rho0.dim != config.n_states:
        raise ConfigurationError("initial state and config describe different chains")
    if not rho0.is_valid():
        raise ConfigurationError("initial state is not a valid density matrix")
    if not t_final >= 0:
        raise ConfigurationError("t_final must be non-negative")

    p_ref = config.probe_rabi[0]
    weights = np.asarray(config.probe_rabi) / p_ref if p_ref != 0 else np.ones(config.n_ground - 1)
    # L depends linearly on the probe amplitude
    l0 = build_liouvillian(config.with_probe(np.zeros_like(weights)), det, mode).matrix
    l1 = build_liouvillian(config.with_probe(weights), det, mode).matrix - l0

    samples = [probe_ramp(t) for t in np.linspace(0.0, t_final, 101)]
    if not np.all(np.isfinite(samples)):
        raise ConfigurationError("probe ramp returned a non-finite value")
    p_max = max(abs(p) for p in samples)
    c_max = max(abs(c) for c in config.coupling_rabi)
    omega = math.hypot(p_max * np.max(np.abs(weights)), c_max)
    if dt is None:
        scale = max(config.gamma, omega)
        dt = 0.01 / scale if scale > 0 else max(t_final, 1.0)
    if not dt > 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    dt = t_final / n_steps
    lnorm = np.linalg.norm(l0 + p_max * l1, 2)
    if dt * lnorm >= MAX_STABLE_DT_NORM:
        raise StepSizeError(f"dt * |L| = {dt * lnorm:.3g} >= {MAX_STABLE_DT_NORM}")

    def rhs(t, y):
        return l0 @ y + probe_ramp(t) * (l1 @ y)

    d = config.n_states
    y = rho0.data.reshape(d * d).copy()
    t = 0.0
    for k in range(n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (k + 1) * dt

    rho = DensityMatrix(y.reshape(d, d))
    if not rho.is_valid(EVOLVE_TOL, EVOLVE_TOL, EVOLVE_TOL):
        raise IntegrationInstabilityError(
            f"state left the physical region: hermiticity {rho.hermiticity_error():.2e}, "
            f"trace {rho.trace_error():.2e}, min eigenvalue {rho.min_eigenvalue():.2e}"
        )
    return rho


def adiabatic_fidelity(config: ChainConfig, ramp_time: float,
                       mode: LossMode = "canonical-lindblad") -> float:
    """
    Prepare the dark state by ramping the probe.

    Starts in g1 with the coupling field on, ramps P_1 linearly from 0 to
    ``config.probe_rabi[0]`` over ``ramp_time``, and returns the overlap with
    the resonant dark state of the final Hamiltonian.
    """
    rho0 = DensityMatrix.basis(config.n_states, 0)
    rho = evolve(config, rho0, linear_ramp(config.probe_rabi[0], ramp_time), ramp_time, mode=mode)
    return rho.fidelity(dark_state_numeric(build_hamiltonian(config)))
