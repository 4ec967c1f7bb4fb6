"""
Command-line front end.

Frequencies on the command line are in units of the excited-state
linewidth Gamma; SI quantities enter only through the density, dipole,
wavelength and linewidth options. Every option may also be given in a JSON
scenario file (keys are the option names with dashes replaced by
underscores); explicit options override the file.

Exit codes: 0 on success, 2 on usage or configuration errors, 3 on
numeric failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import figures, master, optics
from .darkstate import align_sign, dark_state_analytic, dark_state_numeric, normalize
from .errors import ChainLambdaError, ConfigurationError, IntegrationInstabilityError, UnsupportedModeError
from .figures import Table
from .model import (
    ChainConfig,
    Detunings,
    angular_frequency_from_wavelength,
    build_hamiltonian,
    state_labels,
)
from .output import to_csv, to_json

SUBCOMMANDS = (
    "hamiltonian", "darkstate", "dispersion", "beta",
    "groupvelocity", "steadystate", "surface", "figure",
)
EXIT_USAGE = 2
EXIT_NUMERIC = 3


@dataclass
class Scenario:
    states: int = 5
    probe: float = 0.25
    coupling: float = 0.25
    detuning: float = 0.0
    coupling_detuning: float = 0.0
    dephasing: tuple = ()
    density: float = 3e15
    dipole: float = 2e-29
    wavelength_nm: float = 780.0
    linewidth_mhz: float = 5.6
    couplings: str = "equal"
    loss: str = "canonical-lindblad"
    p_grid: tuple | None = None
    detuning_grid: tuple | None = None
    format: str = "csv"

    def validate(self) -> None:
        if isinstance(self.states, bool) or not isinstance(self.states, int):
            raise ConfigurationError("states must be an integer")
        if self.states < 3 or self.states % 2 == 0:
            raise ConfigurationError(f"states must be odd and >= 3, got {self.states}")
        if self.couplings not in ("equal", "clebsch-gordan"):
            raise ConfigurationError(f"unknown couplings mode {self.couplings!r}")
        if self.couplings == "clebsch-gordan" and self.states not in (5, 7):
            raise UnsupportedModeError("clebsch-gordan couplings are tabulated for 5 and 7 states only")
        if self.loss not in master.MODES:
            raise ConfigurationError(f"unknown loss mode {self.loss!r}")
        if self.loss == "paper-faithful" and self.states != 5:
            raise UnsupportedModeError("paper-faithful loss model exists for 5 states only")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"unknown output format {self.format!r}")
        for name in ("p_grid", "detuning_grid"):
            spec = getattr(self, name)
            if spec is not None:
                _grid(spec, name)

    @property
    def n_ground(self) -> int:
        return (self.states + 1) // 2

    def config(self, probe: float | None = None) -> ChainConfig:
        p = self.probe if probe is None else probe
        n = self.n_ground
        base = ChainConfig.equal(
            n, p, self.coupling,
            dephasing=tuple(self.dephasing),
            atomic_density=self.density,
            dipole_moments=(self.dipole,) * (n - 1),
            probe_angular_frequency=angular_frequency_from_wavelength(self.wavelength_nm * 1e-9),
            frequency_unit=2 * math.pi * self.linewidth_mhz * 1e6,
        )
        return optics.config_for_probe(base, p, self.couplings)

    def detunings(self) -> Detunings:
        return Detunings(self.detuning, self.coupling_detuning)

    def p_values(self, default=None) -> np.ndarray:
        if self.p_grid is None:
            return np.array([self.probe]) if default is None else default
        return _grid(self.p_grid, "p_grid")

    def detuning_values(self, default) -> np.ndarray:
        return default if self.detuning_grid is None else _grid(self.detuning_grid, "detuning_grid")

    def meta(self) -> dict:
        out = asdict(self)
        out["dephasing"] = list(self.dephasing) or "zero"
        for key in ("p_grid", "detuning_grid"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


def _grid(spec, name) -> np.ndarray:
    if isinstance(spec, dict) and "values" in spec:
        return optics.check_grid(spec["values"])
    try:
        start, stop, num = spec
        start, stop, num_f = float(start), float(stop), float(num)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be [start, stop, num] or {{'values': [...]}}") from None
    if num_f != int(num_f) or num_f < 1:
        raise ConfigurationError(f"{name}: num must be a positive integer")
    return optics.check_grid(np.linspace(start, stop, int(num_f)))


def load_scenario(args: argparse.Namespace) -> Scenario:
    values = {}
    if args.scenario is not None:
        try:
            data = json.loads(Path(args.scenario).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"scenario file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("scenario file must hold a JSON object")
        known = {f.name for f in fields(Scenario)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown scenario keys: {sorted(unknown)}")
        values.update(data)
    for f in fields(Scenario):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    if "dephasing" in values:
        values["dephasing"] = tuple(values["dephasing"])
    sc = Scenario(**values)
    sc.validate()
    return sc


def cmd_hamiltonian(sc: Scenario) -> Table:
    h = build_hamiltonian(sc.config(), sc.detunings()).to_dense()
    labels = state_labels(sc.n_ground)
    rows = [(labels[i], *map(float, h[i])) for i in range(len(labels))]
    return Table(["state"] + labels, rows)


def cmd_darkstate(sc: Scenario) -> Table:
    cfg = sc.config()
    state = dark_state_numeric(build_hamiltonian(cfg, sc.detunings()))
    analytic = None
    if (sc.couplings == "equal" and sc.n_ground <= 4 and sc.probe != 0
            and sc.coupling_detuning == 0):
        analytic = align_sign(normalize(dark_state_analytic(sc.n_ground, sc.probe, sc.coupling, sc.detuning)), state)
    rows = []
    for k, label in enumerate(state_labels(sc.n_ground)):
        rows.append((label, float(state.alpha[k]),
                     None if analytic is None else float(analytic.alpha[k])))
    return Table(["state", "alpha", "alpha_analytic"], rows, {"energy_over_gamma": state.energy})


def cmd_dispersion(sc: Scenario) -> Table:
    template = sc.config()
    rows = []
    for p in sc.p_values():
        cfg = optics.config_for_probe(template, float(p), sc.couplings)
        num = optics.dispersion_numeric(cfg).r_gamma_sq
        ana = None
        if sc.couplings == "equal" and sc.n_ground <= 4:
            ana = optics.dispersion_analytic(sc.n_ground, float(p), sc.coupling).r_gamma_sq
        rows.append((float(p), num, ana))
    return Table(["P_over_gamma", "R_gamma_sq", "R_gamma_sq_analytic"], rows)


def cmd_beta(sc: Scenario) -> Table:
    beta, r_max = optics.dispersion_maximum(sc.n_ground, sc.coupling)
    return Table(["states", "beta", "R_max_gamma_sq"], [(sc.states, beta, r_max)])


def cmd_groupvelocity(sc: Scenario) -> Table:
    template = sc.config()
    rows = []
    for p in sc.p_values():
        cfg = optics.config_for_probe(template, float(p), sc.couplings)
        chi0, slope = optics.chi_slope(cfg)
        vg = optics.group_velocity(slope, chi0, cfg.probe_angular_frequency).v_g
        rows.append((float(p), slope, vg, math.log10(vg)))
    return Table(["P_over_gamma", "chi_slope_s", "v_g_m_per_s", "log10_v_g"], rows)


def cmd_steadystate(sc: Scenario) -> Table:
    cfg = sc.config()
    rho = master.steady_state(master.build_liouvillian(cfg, sc.detunings(), sc.loss))
    meta = {
        "hermiticity_error": rho.hermiticity_error(),
        "trace_error": rho.trace_error(),
        "min_eigenvalue": rho.min_eigenvalue(),
    }
    if all(p != 0 for p in cfg.probe_rabi):
        chi = master.susceptibility_from_rho(cfg, rho).value
        meta.update(chi_real=chi.real, chi_imag=chi.imag)
    labels = state_labels(sc.n_ground)
    rows = [
        (labels[i], labels[k], float(rho.data[i, k].real), float(rho.data[i, k].imag))
        for i in range(rho.dim) for k in range(rho.dim)
    ]
    return Table(["row", "col", "re", "im"], rows, meta)


def cmd_surface(sc: Scenario) -> Table:
    cfg = sc.config()
    pts = master.absorption_surface(
        cfg,
        sc.detuning_values(np.linspace(-1.0, 1.0, 41)),
        sc.p_values(np.linspace(0.02, 1.0, 20)),
        sc.loss,
    )
    return Table(["delta_p_over_gamma", "P_over_gamma", "minus_im_chi"], [tuple(p) for p in pts])


def cmd_figure(sc: Scenario, name: str) -> Table:
    grid = None if sc.p_grid is None else sc.p_values()
    base = sc.config()
    if name == "fig3":
        return figures.fig3(grid, sc.coupling)
    if name == "fig4":
        return figures.fig4(grid, sc.coupling, base, sc.loss)
    if name == "fig5":
        return figures.fig5(grid, sc.coupling, base)
    if name == "fig6":
        return figures.fig6(grid, sc.coupling)
    deltas = None if sc.detuning_grid is None else sc.detuning_values(None)
    return figures.fig7(deltas, grid, sc.coupling, base, sc.loss)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, help="JSON scenario file")
    common.add_argument("--states", type=int, help="number of states in the chain (odd, >= 3)")
    common.add_argument("--probe", type=float, help="probe Rabi frequency P_1 / Gamma")
    common.add_argument("--coupling", type=float, help="coupling Rabi frequency C_1 / Gamma")
    common.add_argument("--detuning", type=float, help="probe detuning / Gamma")
    common.add_argument("--coupling-detuning", type=float, help="coupling detuning / Gamma")
    common.add_argument("--dephasing", type=float, nargs="+",
                        help="m-photon dephasing rates / Gamma for m = 2 .. states-1")
    common.add_argument("--density", type=float, help="atomic density in m^-3")
    common.add_argument("--dipole", type=float, help="dipole moment of the first probe transition in C m")
    common.add_argument("--wavelength-nm", type=float, help="probe wavelength in nm")
    common.add_argument("--linewidth-mhz", type=float, help="Gamma / 2 pi in MHz")
    common.add_argument("--couplings", choices=("equal", "clebsch-gordan"))
    common.add_argument("--loss", choices=master.MODES)
    common.add_argument("--p-grid", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    common.add_argument("--detuning-grid", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", type=Path, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="chainlambda",
        description="Dark states, dispersion and absorption of Chain-Lambda atoms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "hamiltonian": "print H/hbar",
        "darkstate": "near-zero-energy dressed state",
        "dispersion": "intensity-dependent dispersion R",
        "beta": "probe/coupling ratio maximising R",
        "groupvelocity": "group velocity from the dark-state dispersion",
        "steadystate": "steady-state density matrix of the master equation",
        "surface": "-Im chi over probe detuning and probe strength",
        "figure": "data behind a standard figure",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "figure":
            p.add_argument("name", choices=sorted(figures.FIGURES))
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        sc = load_scenario(args)
        if args.command == "figure":
            table = cmd_figure(sc, args.name)
        else:
            table = globals()[f"cmd_{args.command}"](sc)
        command = args.command if args.command != "figure" else f"figure {args.name}"
        table.meta = {"command": command, **sc.meta(), **table.meta}
        text = to_json(table) if sc.format == "json" else to_csv(table)
        if args.out is not None:
            args.out.write_text(text)
        else:
            sys.stdout.write(text)
    except (np.linalg.LinAlgError, IntegrationInstabilityError, FloatingPointError) as exc:
        print(f"chainlambda: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ChainLambdaError, OSError, TypeError) as exc:
        print(f"chainlambda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main() -> None:
    sys.exit(run())
