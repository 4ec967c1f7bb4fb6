import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlambda.darkstate import dark_state_numeric
from chainlambda.errors import (
    ConfigurationError,
    IntegrationInstabilityError,
    NonUniqueSteadyStateError,
    StepSizeError,
    UnsupportedModeError,
)
from chainlambda.master import (
    DensityMatrix,
    absorption_surface,
    adiabatic_fidelity,
    build_liouvillian,
    dispersion_master,
    evolve,
    linear_ramp,
    solve_at,
    steady_state,
    susceptibility_from_rho,
)
from chainlambda.model import ChainConfig, Detunings, build_hamiltonian, kappa
from chainlambda.optics import dispersion_analytic

C = 0.25


def _random_hermitian(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


def _random_density(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _lindblad_rhs(config, det, rho):
    """Direct matrix-form master equation, independent of any vectorisation."""
    h = build_hamiltonian(config, det).to_dense()
    d = config.n_states
    out = -1j * (h @ rho - rho @ h)
    for j in range(1, config.n_ground):
        e = 2 * j - 1
        for g in (e - 1, e + 1):
            jump = np.zeros((d, d))
            jump[g, e] = 1.0
            jdj = jump.T @ jump
            out += config.gamma / 2 * (jump @ rho @ jump.T - 0.5 * (jdj @ rho + rho @ jdj))
    for i in range(d):
        for k in range(d):
            out[i, k] -= config.dephasing_for(abs(i - k)) * rho[i, k]
    return out


def _column_stacking(matrix, d):
    """Re-express a row-major superoperator in column-stacked coordinates."""
    perm = np.array([i * d + k for k in range(d) for i in range(d)])
    return matrix[np.ix_(perm, perm)]


def _printed_coherent_blocks(p1, p2, c1, c2, dp, dc):
    """Tabulated 5-state Hamiltonian superoperator (before the -i factor)."""
    dcp = dp - dc

    def block(d0, d1, d2, d3, d4):
        return np.array([
            [d0, p1, 0, 0, 0],
            [p1, d1, c1, 0, 0],
            [0, c1, d2, p2, 0],
            [0, 0, p2, d3, c2],
            [0, 0, 0, c2, d4],
        ], dtype=float)

    diag = [
        block(0, dp, dcp, 2 * dp - dc, 2 * dcp),
        block(-dp, 0, -dc, dcp, dp - 2 * dc),
        block(-dp, 0, -dc, dcp, dp - 2 * dc),
        block(-2 * dp + dc, -dcp, -dp, 0, -dc),
        block(-2 * dcp, -dp + 2 * dc, -dcp, dc, 0),
    ]
    off = {(0, 1): -p1, (1, 2): -c1, (2, 3): -p2, (3, 4): -c2}
    out = np.zeros((25, 25))
    for k in range(5):
        out[5 * k:5 * k + 5, 5 * k:5 * k + 5] = diag[k]
    for (k, l), v in off.items():
        out[5 * k:5 * k + 5, 5 * l:5 * l + 5] = v * np.eye(5)
        out[5 * l:5 * l + 5, 5 * k:5 * k + 5] = v * np.eye(5)
    return out


def _printed_loss(g, g2, g3, g4, fix_sign=True):
    diag = [
        (0, -g / 2, -g2, -g3, -g4),
        (-g / 2, -g, -g / 2, -g, -g3),
        (-g2 if fix_sign else g2, -g / 2, 0, -g / 2, -g2),
        (-g3, -g, -g / 2, -g, -g / 2),
        (-g4, -g3, -g2, -g / 2, 0),
    ]
    out = np.diag(np.concatenate(diag)).astype(float)
    for k, l in [(0, 1), (2, 1), (2, 3), (4, 3)]:
        out[5 * k + k, 5 * l + l] = g / 2
    return out


FIVE = ChainConfig(3, [0.11, 0.17], [0.23, 0.29], dephasing=[0.01, 0.02, 0.03])


def test_coherent_part_matches_printed_blocks_at_resonant_coupling():
    det = Detunings(0.07, 0.0)
    lossless = ChainConfig(3, FIVE.probe_rabi, FIVE.coupling_rabi, gamma=0.0)
    ours = _column_stacking(build_liouvillian(lossless, det).matrix, 5)
    printed = -1j * _printed_coherent_blocks(0.11, 0.17, 0.23, 0.29, 0.07, 0.0)
    np.testing.assert_allclose(ours, printed, atol=1e-15)


def test_printed_blocks_differ_only_in_h33_off_resonance():
    det = Detunings(0.07, 0.05)
    lossless = ChainConfig(3, FIVE.probe_rabi, FIVE.coupling_rabi, gamma=0.0)
    ours = _column_stacking(build_liouvillian(lossless, det).matrix, 5)
    printed = -1j * _printed_coherent_blocks(0.11, 0.17, 0.23, 0.29, 0.07, 0.05)
    diff = np.abs(ours - printed) > 1e-15
    assert diff.any()
    mask = np.zeros_like(diff)
    mask[10:15, 10:15] = True
    assert not (diff & ~mask).any()


def test_faithful_loss_matches_printed_table_with_sign_fix():
    g, (g2, g3, g4) = 1.0, FIVE.dephasing
    coherent = build_liouvillian(ChainConfig(3, FIVE.probe_rabi, FIVE.coupling_rabi, gamma=0.0))
    full = build_liouvillian(FIVE, mode="paper-faithful")
    loss = _column_stacking(full.matrix - coherent.matrix, 5)
    np.testing.assert_allclose(loss, _printed_loss(g, g2, g3, g4), atol=1e-15)


def test_printed_sign_breaks_physicality():
    coherent = -1j * _printed_coherent_blocks(0.11, 0.17, 0.23, 0.29, 0.0, 0.0)
    printed = coherent + _printed_loss(1.0, 0.5, 0.0, 0.0, fix_sign=False)
    fixed = coherent + _printed_loss(1.0, 0.5, 0.0, 0.0)
    # rho[g1, g2] and rho[g2, g1] are damped differently, so hermiticity is lost
    rho = _random_hermitian(5, np.random.default_rng(1)).T.reshape(-1)
    for gen, broken in ((printed, True), (fixed, False)):
        out = (gen @ rho).reshape(5, 5).T
        assert (np.max(np.abs(out - out.conj().T)) > 1e-3) == broken
    # and a mode grows without bound
    assert np.linalg.eigvals(printed).real.max() > 0.1
    assert np.linalg.eigvals(fixed).real.max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_canonical_matches_direct_lindblad(n):
    rng = np.random.default_rng(n)
    cfg = ChainConfig(n, rng.uniform(0.1, 1, n - 1), rng.uniform(0.1, 1, n - 1),
                      gamma=0.8, dephasing=rng.uniform(0, 0.2, 2 * n - 3))
    det = Detunings(0.13, -0.04)
    l = build_liouvillian(cfg, det)
    for _ in range(3):
        rho = _random_density(cfg.n_states, rng)
        np.testing.assert_allclose(l.apply(rho), _lindblad_rhs(cfg, det, rho), atol=1e-13)


def test_modes_coincide_at_reduced_rates():
    canon = build_liouvillian(ChainConfig(3, [0.1, 0.2], [0.25, 0.3]), Detunings(0.05, 0.02))
    faithful = build_liouvillian(ChainConfig(3, [0.1, 0.2], [0.25, 0.3], dephasing=[0, 0.5, 0]),
                                 Detunings(0.05, 0.02), mode="paper-faithful")
    np.testing.assert_array_equal(canon.matrix, faithful.matrix)


def test_canonical_decay_and_refill_rates():
    l = build_liouvillian(ChainConfig.equal(3, 0.0, 0.0, gamma=1.0))
    d = 5
    e1 = 1 * d + 1
    assert l.matrix[e1, e1] == pytest.approx(-1.0)
    assert l.matrix[0, e1] == pytest.approx(0.5)
    assert l.matrix[2 * d + 2, e1] == pytest.approx(0.5)


def test_unsupported_modes():
    with pytest.raises(UnsupportedModeError):
        build_liouvillian(ChainConfig.equal(2, 0.1, C), mode="paper-faithful")
    with pytest.raises(UnsupportedModeError):
        build_liouvillian(ChainConfig.equal(3, 0.1, C), mode="bogus")


@pytest.mark.parametrize("mode", ["canonical-lindblad", "paper-faithful"])
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_generator_preserves_trace_and_hermiticity(mode, seed):
    rng = np.random.default_rng(seed)
    cfg = ChainConfig(3, rng.uniform(0, 1, 2), rng.uniform(0, 1, 2), gamma=rng.uniform(0, 2),
                      dephasing=rng.uniform(0, 0.5, 3))
    l = build_liouvillian(cfg, Detunings(*rng.uniform(-1, 1, 2)), mode)
    rho = _random_hermitian(5, rng)
    out = l.apply(rho)
    assert abs(np.trace(out)) < 1e-12 * max(1.0, np.abs(rho).max())
    assert np.max(np.abs(out - out.conj().T)) < 1e-12 * max(1.0, np.abs(rho).max())


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_trace_functional_annihilated(n):
    cfg = ChainConfig.equal(n, 0.2, C, dephasing=[0.05] * (2 * n - 3))
    l = build_liouvillian(cfg, Detunings(0.1, 0.02)).matrix
    d = cfg.n_states
    t = np.eye(d).reshape(-1)
    assert np.max(np.abs(t @ l)) < 1e-12


def test_dark_state_is_stationary_without_loss():
    cfg = ChainConfig(3, [0.1, 0.2], [0.25, 0.3], gamma=0.0)
    rho = DensityMatrix.pure(dark_state_numeric(build_hamiltonian(cfg)).alpha)
    assert np.max(np.abs(build_liouvillian(cfg).apply(rho))) < 1e-15


def test_optical_pumping():
    rho = solve_at(ChainConfig.equal(3, 0.0, C), 0.0)
    np.testing.assert_allclose(rho.data, DensityMatrix.basis(5, 0).data, atol=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_resonant_steady_state_is_dark(n):
    cfg = ChainConfig.equal(n, 0.15, C)
    rho = solve_at(cfg, 0.0)
    dark = dark_state_numeric(build_hamiltonian(cfg))
    np.testing.assert_allclose(rho.data, DensityMatrix.pure(dark.alpha).data, atol=1e-10)
    assert np.max(np.abs(np.diag(rho.data)[1::2])) < 1e-10
    assert rho.fidelity(dark) == pytest.approx(1, abs=1e-10)


def test_no_decay_is_not_unique():
    with pytest.raises(NonUniqueSteadyStateError):
        steady_state(build_liouvillian(ChainConfig.equal(3, 0.1, C, gamma=0.0)))


def test_isolated_state_is_not_unique():
    # g3 decouples when P2 = C2 = 0: two stationary states
    with pytest.raises(NonUniqueSteadyStateError):
        solve_at(ChainConfig(3, [0.1, 0.0], [C, 0.0]), 0.1)


def test_susceptibility_from_rho_zero_cases():
    cfg = ChainConfig.equal(3, 0.15, C)
    scale = kappa(cfg) * cfg.dipole_moments[0] ** 2 / cfg.frequency_unit
    assert abs(susceptibility_from_rho(cfg, solve_at(cfg, 0.0)).value) < 1e-10 * scale
    assert susceptibility_from_rho(cfg, DensityMatrix.basis(5, 0)).value == 0
    with pytest.raises(ConfigurationError):
        susceptibility_from_rho(cfg, DensityMatrix.basis(3, 0))


@pytest.mark.parametrize("dp", [-0.4, -0.05, 0.02, 0.3, 1.5])
def test_weak_probe_lambda_coherence(dp):
    """Linear-response Lambda EIT: rho_eg = P / (C^2/dp - dp + i gamma/2)."""
    p = 1e-4
    rho = solve_at(ChainConfig.equal(2, p, C), dp)
    expected = p / (C * C / dp - dp + 0.5j)
    assert rho.probe_coherences()[0] == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("dp", [-0.3, 0.07, 0.6])
def test_three_state_reduction(dp):
    three = ChainConfig.equal(2, 0.2, C)
    rho3 = solve_at(three, dp)
    five = ChainConfig(3, [0.2, 0.0], [C, 0.0])
    rho5 = np.zeros((5, 5), dtype=complex)
    rho5[:3, :3] = rho3.data
    # the embedded Lambda steady state is stationary for the 5-state generator
    residual = build_liouvillian(five, Detunings(dp, 0)).apply(rho5)
    assert np.max(np.abs(residual)) < 1e-12
    assert DensityMatrix(rho5).probe_coherences()[0] == rho3.probe_coherences()[0]


@pytest.mark.parametrize("dp", [-0.6, -0.1, 0.05, 0.4])
def test_weak_probe_slice_matches_lambda(dp):
    p = 1e-3
    chi5 = susceptibility_from_rho(ChainConfig.equal(3, p, C), solve_at(ChainConfig.equal(3, p, C), dp))
    chi3 = susceptibility_from_rho(ChainConfig.equal(2, p, C), solve_at(ChainConfig.equal(2, p, C), dp))
    assert chi5.value == pytest.approx(chi3.value, rel=1e-4)


def test_dispersion_weak_probe_limit():
    r = dispersion_master(ChainConfig.equal(3, 0.01, C)).r
    assert r * C * C == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("p", [0.1, 0.4, 1.0])
def test_dispersion_tracks_closed_form(p):
    r = dispersion_master(ChainConfig.equal(3, p, C)).r_gamma_sq
    assert r == pytest.approx(dispersion_analytic(3, p, C).r_gamma_sq, rel=0.1)


def test_dispersion_collapses_under_raman_dephasing():
    clean = dispersion_master(ChainConfig.equal(3, 0.1, C)).r
    dephased = dispersion_master(ChainConfig.equal(3, 0.1, C, dephasing=[10.0, 0, 0])).r
    assert dephased < 0.1 * clean
    # without the Raman coherence only the bare two-level slope is left
    assert dephased < 0


def test_dispersion_step_validation():
    with pytest.raises(StepSizeError):
        dispersion_master(ChainConfig.equal(3, 0.1, C), step=0.5)
    with pytest.raises(StepSizeError):
        dispersion_master(ChainConfig.equal(3, 0.1, C), step=-1e-4)


def test_surface_layout_and_symmetry():
    deltas = np.linspace(-1, 1, 21)
    probes = [0.05, 0.3, 0.8]
    rows = absorption_surface(ChainConfig.equal(3, 0.0, C), deltas, probes)
    assert len(rows) == 63
    assert [r.delta_p for r in rows[:21]] == pytest.approx(deltas)
    assert {r.p for r in rows[:21]} == {0.05}
    grid = np.array([r.absorption for r in rows]).reshape(3, 21)
    for line in grid:
        peak = line.max()
        np.testing.assert_allclose(line, line[::-1], atol=1e-8 * peak)
        assert line[10] < 1e-8 * peak
        assert np.all(line >= -1e-10 * peak)


def test_surface_grid_validation():
    with pytest.raises(ConfigurationError):
        absorption_surface(ChainConfig.equal(3, 0.0, C), [0.1, -0.1], [0.1])


def test_evolve_trivial_generator():
    cfg = ChainConfig.equal(3, 0.0, 0.0, gamma=0.0)
    rho0 = DensityMatrix(_random_density(5, np.random.default_rng(0)))
    out = evolve(cfg, rho0, lambda t: 0.0, 10.0, dt=0.5)
    np.testing.assert_allclose(out.data, rho0.data, atol=1e-15)


def test_evolve_matches_matrix_exponential():
    cfg = ChainConfig.equal(3, 0.2, C)
    rho0 = DensityMatrix.basis(5, 0)
    out = evolve(cfg, rho0, lambda t: 0.2, 7.0)
    l = build_liouvillian(cfg).matrix
    exact = (scipy.linalg.expm(7.0 * l) @ rho0.data.reshape(-1)).reshape(5, 5)
    np.testing.assert_allclose(out.data, exact, atol=1e-9)


def test_evolve_step_validation():
    cfg = ChainConfig.equal(3, 0.2, C)
    with pytest.raises(StepSizeError):
        evolve(cfg, DensityMatrix.basis(5, 0), lambda t: 0.2, 10.0, dt=1.0)
    with pytest.raises(ConfigurationError):
        evolve(cfg, DensityMatrix(2 * np.eye(5)), lambda t: 0.2, 1.0)
    with pytest.raises(ConfigurationError):
        evolve(cfg, DensityMatrix.basis(3, 0), lambda t: 0.2, 1.0)


def test_evolve_rejects_non_finite_ramp():
    cfg = ChainConfig.equal(3, 0.2, C)
    with pytest.raises(ConfigurationError):
        evolve(cfg, DensityMatrix.basis(5, 0), lambda t: float("nan"), 1.0, dt=0.01)


def test_evolve_detects_invariant_violation(monkeypatch):
    import chainlambda.master as master

    # round-off alone must trip a zero tolerance
    monkeypatch.setattr(master, "EVOLVE_TOL", -1.0)
    with pytest.raises(IntegrationInstabilityError):
        evolve(ChainConfig.equal(3, 0.2, C), DensityMatrix.basis(5, 0), lambda t: 0.2, 1.0)


def test_linear_ramp():
    ramp = linear_ramp(0.25, 100.0)
    assert [ramp(-1), ramp(0), ramp(50), ramp(100), ramp(200)] == [0, 0, 0.125, 0.25, 0.25]


def test_adiabatic_preparation_fast_vs_slow():
    cfg = ChainConfig.equal(3, 0.25, C)
    fast, slow = adiabatic_fidelity(cfg, 20.0), adiabatic_fidelity(cfg, 200.0)
    assert fast < slow
    assert slow > 0.98


def test_density_matrix_checks():
    rho = DensityMatrix(np.diag([0.5, 0.5, 0, 0, 0]))
    assert rho.is_valid()
    bad = DensityMatrix(np.array([[1.0, 1e-3], [0, 0]]))
    assert bad.hermiticity_error() == pytest.approx(1e-3)
    assert not bad.is_valid()
    assert DensityMatrix(np.diag([1.5, -0.5])).min_eigenvalue() == pytest.approx(-0.5)
    with pytest.raises(ConfigurationError):
        DensityMatrix(np.zeros((2, 3)))
