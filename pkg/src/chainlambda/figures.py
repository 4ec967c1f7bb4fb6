"""
Data tables behind the standard figures: dispersion and group velocity
against probe strength, master-equation comparison, Clebsch-Gordan curves
and the absorption surface of the 5-state chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import master, optics
from .model import ChainConfig

DEFAULT_COUPLING = 0.25
CHAIN_STATES = (3, 5, 7, 9)
# absorption surface grid, in units of gamma
FIG7_DELTA_GRID = np.linspace(-1.0, 1.0, 81)
FIG7_P_GRID = np.linspace(0.02, 1.0, 50)
FIG7_DELTA_GRID.flags.writeable = False
FIG7_P_GRID.flags.writeable = False


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]
    meta: dict[str, Any] = field(default_factory=dict)


def _n_ground(states: int) -> int:
    return (states + 1) // 2


def _template(states: int, base: ChainConfig | None, coupling: float) -> ChainConfig:
    """Equal-coupling config with zero probe, taking SI constants from ``base``."""
    n = _n_ground(states)
    m = n - 1
    if base is None:
        return ChainConfig.equal(n, 0.0, coupling)
    deph = base.dephasing if base.n_ground == n else ()
    return replace(
        base, n_ground=n, probe_rabi=(0.0,) * m, coupling_rabi=(coupling,) * m,
        dephasing=deph, dipole_moments=(base.dipole_moments[0],) * m,
    )


def fig3(p_grid=None, coupling=DEFAULT_COUPLING) -> Table:
    """R*Gamma^2 against P/Gamma for 3-9 state chains with equal couplings.

    Closed forms for 3, 5 and 7 states, numeric dark state for 9.
    """
    grid = np.linspace(0.01, 2.0, 200) if p_grid is None else optics.check_grid(p_grid)
    rows = []
    for p in grid:
        row = [float(p)]
        for states in CHAIN_STATES:
            n = _n_ground(states)
            if n <= 4:
                row.append(optics.dispersion_analytic(n, float(p), coupling).r_gamma_sq)
            else:
                cfg = ChainConfig.equal(n, float(p), coupling)
                row.append(optics.dispersion_numeric(cfg).r_gamma_sq)
        rows.append(tuple(row))
    cols = ["P_over_gamma"] + [f"R_gamma_sq_{s}" for s in CHAIN_STATES]
    return Table(cols, rows, {"coupling_over_gamma": coupling, "couplings": "equal"})


def fig4(p_grid=None, coupling=DEFAULT_COUPLING, base: ChainConfig | None = None,
         mode: master.LossMode = "canonical-lindblad") -> Table:
    """Master-equation against closed-form dispersion, 5-state chain."""
    grid = np.linspace(0.02, 1.0, 50) if p_grid is None else optics.check_grid(p_grid)
    template = _template(5, base, coupling)
    rows = []
    for p in grid:
        cfg = template.with_probe((float(p),) * 2)
        me = master.dispersion_master(cfg, mode=mode).r_gamma_sq
        an = optics.dispersion_analytic(3, float(p), coupling).r_gamma_sq
        rows.append((float(p), me, an))
    meta = {
        "coupling_over_gamma": coupling,
        "loss_mode": mode,
        "dephasing_over_gamma": list(template.dephasing),
    }
    return Table(["P_over_gamma", "R_gamma_sq_master", "R_gamma_sq_analytic"], rows, meta)


def fig5(p_grid=None, coupling=DEFAULT_COUPLING, base: ChainConfig | None = None) -> Table:
    """log10 of the group velocity (m/s) against P/Gamma for 3-9 state chains."""
    grid = np.linspace(0.01, 2.0, 200) if p_grid is None else optics.check_grid(p_grid)
    templates = {s: _template(s, base, coupling) for s in CHAIN_STATES}
    rows = []
    for p in grid:
        row = [float(p)]
        for states in CHAIN_STATES:
            cfg = optics.config_for_probe(templates[states], float(p), "equal")
            row.append(math.log10(optics.group_velocity_numeric(cfg).v_g))
        rows.append(tuple(row))
    t = templates[3]
    meta = {
        "coupling_over_gamma": coupling,
        "probe_angular_frequency": t.probe_angular_frequency,
        "frequency_unit_rad_per_s": t.frequency_unit,
        "atomic_density": t.atomic_density,
        "dipole_moment": t.dipole_moments[0],
    }
    return Table(["P_over_gamma"] + [f"log10_v_g_{s}" for s in CHAIN_STATES], rows, meta)


def fig6(p_grid=None, coupling=DEFAULT_COUPLING) -> Table:
    """Dispersion against P_1 with Clebsch-Gordan weighted couplings, 5 and 7 states."""
    grid = np.linspace(0.01, 2.0, 200) if p_grid is None else optics.check_grid(p_grid)
    sweeps = {
        s: optics.sweep_dispersion(_template(s, None, coupling), grid, "clebsch-gordan")
        for s in (5, 7)
    }
    rows = [
        (float(p), sweeps[5][i].r_gamma_sq, sweeps[7][i].r_gamma_sq)
        for i, p in enumerate(grid)
    ]
    meta = {"coupling_over_gamma": coupling, "couplings": "clebsch-gordan"}
    return Table(["P1_over_gamma", "R_gamma_sq_5", "R_gamma_sq_7"], rows, meta)


def fig7(delta_grid=None, p_grid=None, coupling=DEFAULT_COUPLING, base: ChainConfig | None = None,
         mode: master.LossMode = "canonical-lindblad") -> Table:
    """-Im chi of the 5-state chain over probe detuning and probe strength."""
    deltas = FIG7_DELTA_GRID if delta_grid is None else delta_grid
    probes = FIG7_P_GRID if p_grid is None else p_grid
    template = _template(5, base, coupling)
    pts = master.absorption_surface(template.with_probe((1.0, 1.0)), deltas, probes, mode)
    meta = {
        "coupling_over_gamma": coupling,
        "loss_mode": mode,
        "dephasing_over_gamma": list(template.dephasing),
        "atomic_density": template.atomic_density,
        "dipole_moment": template.dipole_moments[0],
        "frequency_unit_rad_per_s": template.frequency_unit,
    }
    return Table(["delta_p_over_gamma", "P_over_gamma", "minus_im_chi"], [tuple(p) for p in pts], meta)


FIGURES = {"fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig7": fig7}
