"""
The dark dressed state: the eigenvector of H/hbar whose energy is closest
to zero.

Closed forms are available for 3-, 5- and 7-state chains with equal
couplings (P_j = P, C_j = C), resonant coupling field and small probe
detuning. They are first order in the probe detuning. Longer chains, or
unequal couplings, go through the numeric eigensolve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, UnsupportedChainLengthError, ValidityWarning
from .linalg import SymmetricTridiagonal, nearest_zero_eigenpair
from .model import excited_index, ground_index

NORM_TOL = 1e-12
# |dp| beyond this fraction of min(P, C) is outside the small-detuning regime
SMALL_DETUNING_FRACTION = 0.1


@dataclass(frozen=True)
class DarkState:
    """Coefficients alpha in the order g1, e1, g2, ..., g_n."""

    alpha: np.ndarray
    normalized: bool = False
    energy: float | None = None

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).reshape(-1)
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)

    @property
    def n_states(self) -> int:
        return self.alpha.size

    @property
    def n_ground(self) -> int:
        return (self.alpha.size + 1) // 2

    def ground(self) -> np.ndarray:
        return self.alpha[0::2]

    def excited(self) -> np.ndarray:
        return self.alpha[1::2]

    def coherences(self) -> np.ndarray:
        """rho_{g_j e_j} = alpha_{g_j} alpha_{e_j} / |alpha|^2, j = 1 .. n-1."""
        norm2 = float(self.alpha @ self.alpha)
        j = np.arange(1, self.n_ground)
        return self.alpha[ground_index(j)] * self.alpha[excited_index(j)] / norm2


def normalize(state: DarkState) -> DarkState:
    norm = float(np.linalg.norm(state.alpha))
    if norm == 0.0:
        raise DegenerateInputError("cannot normalise the zero vector")
    if abs(norm - 1.0) <= NORM_TOL:
        return DarkState(state.alpha, normalized=True, energy=state.energy)
    return DarkState(state.alpha / norm, normalized=True, energy=state.energy)


def align_sign(state: DarkState, reference: DarkState) -> DarkState:
    """Flip the global sign of ``state`` so its overlap with ``reference`` is >= 0."""
    if float(state.alpha @ reference.alpha) < 0:
        return DarkState(-state.alpha, normalized=state.normalized, energy=state.energy)
    return state


def _coefficients(n_ground, p, c, dp, printed):
    o2 = c * c + p * p
    o4 = o2 * o2
    if n_ground == 2:
        return [c / p, dp * c / o2, -1.0]
    if n_ground == 3:
        d = o4 - c * c * p * p
        e2 = dp * c * (2 * o2 - p * p) / d
        return [
            c * c / (p * p),
            dp * c * c * (o2 + p * p) / (p * d),
            -c / p,
            e2 if printed else -e2,
            1.0,
        ]
    if n_ground == 4:
        d = o4 - c * c * p * p
        # C^4 + P^4, written in the same variables as the 7-state dispersion
        q = o4 - 2 * p * p * o2 + 2 * p**4
        if printed:
            e1 = dp * c * (o2 - p * p) * (o2 + 2 * p * p) / (o2 * d)
            e2 = dp * 2 * c * c * o2 / (p * d)
        else:
            e1 = -dp * c**3 * (o4 + 2 * p**4) / (p * p * o2 * q)
            e2 = dp * 2 * c * c * o2 / (p * q)
        return [
            -(c**3) / p**3,
            e1,
            c * c / (p * p),
            e2,
            -c / p,
            dp * c * (o4 + 2 * c**4) / (o2 * (2 * c * c * p * p - o4)),
            1.0,
        ]
    raise UnsupportedChainLengthError(
        f"closed-form dark state exists for n_ground in (2, 3, 4), got {n_ground}"
    )


def dark_state_analytic(n_ground: int, p: float, c: float, delta_p: float,
                        printed: bool = False) -> DarkState:
    """
    Unnormalised first-order dark state for equal couplings and resonant
    coupling field.

    Parameters
    ----------
    n_ground : int
        2, 3 or 4 (3-, 5- and 7-state chains).
    p, c : float
        Common probe and coupling Rabi frequencies.
    delta_p : float
        Probe detuning; should satisfy ``|delta_p| << min(P, C)``.
    printed : bool
        Return the coefficients exactly as originally tabulated. That table
        carries a sign error in the 5-state alpha_e2 and wrong e1, e2 entries
        for 7 states; the default returns the corrected expressions, which
        match the eigensolve to first order.
    """
    if p == 0:
        raise DegenerateInputError("probe Rabi frequency must be nonzero")
    if abs(delta_p) > SMALL_DETUNING_FRACTION * min(abs(p), abs(c)):
        warnings.warn(
            f"|delta_p|={abs(delta_p):.3g} is not small against min(P, C)={min(abs(p), abs(c)):.3g}",
            ValidityWarning,
            stacklevel=2,
        )
    return DarkState(_coefficients(n_ground, p, c, delta_p, printed))


def dark_state_numeric(h: SymmetricTridiagonal) -> DarkState:
    """Normalised eigenvector of ``h`` with eigenvalue closest to zero."""
    energy, vec = nearest_zero_eigenpair(h)
    return DarkState(vec, normalized=True, energy=energy)
