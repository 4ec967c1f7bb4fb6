"""
Small dense numeric kernel: symmetric tridiagonal eigenproblems and
complex linear solves.

Matrices here are tiny (at most 81x81 for a 9-state chain Liouvillian), so
everything is dense and backed by LAPACK through scipy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import ConfigurationError, SingularSystemError

# reciprocal condition number below which a system is treated as singular
RCOND_MIN = 1e-13


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Real symmetric tridiagonal matrix stored as its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float).reshape(-1)
        offdiag = np.array(self.offdiag, dtype=float).reshape(-1)
        if diag.size < 1:
            raise ConfigurationError("tridiagonal matrix needs dimension >= 1")
        if offdiag.size != diag.size - 1:
            raise ConfigurationError(
                f"offdiag has length {offdiag.size}, expected {diag.size - 1}"
            )
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.offdiag, 1)
            + np.diag(self.offdiag, -1)
        )

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(np.sum(self.diag**2) + 2 * np.sum(self.offdiag**2)))


def _fix_sign(v: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    # first component that is not round-off made positive
    scale = np.max(np.abs(v))
    for x in v:
        if abs(x) > rel_tol * scale:
            return v if x > 0 else -v
    return v


def eig_symmetric_tridiagonal(m: SymmetricTridiagonal) -> list[tuple[float, np.ndarray]]:
    """
    Full eigendecomposition of a real symmetric tridiagonal matrix.

    Returns
    -------
    list of (eigenvalue, eigenvector)
        Sorted by ascending eigenvalue. Eigenvectors have unit norm and their
        first non-negligible component is positive.
    """
    if m.dim == 1:
        return [(float(m.diag[0]), np.ones(1))]
    w, v = scipy.linalg.eigh_tridiagonal(m.diag, m.offdiag)
    return [(float(w[k]), _fix_sign(v[:, k].copy())) for k in range(w.size)]


def nearest_zero_eigenpair(m: SymmetricTridiagonal) -> tuple[float, np.ndarray]:
    """Eigenpair whose eigenvalue has the smallest magnitude.

    Exact ties go to the pair that comes first in ascending order.
    """
    pairs = eig_symmetric_tridiagonal(m)
    k = int(np.argmin([abs(lam) for lam, _ in pairs]))
    return pairs[k]


def solve_complex_linear(a, b) -> np.ndarray:
    """
    Solve ``a @ x = b`` by LU factorisation with partial pivoting.

    Raises
    ------
    SingularSystemError
        If a pivot vanishes or the estimated reciprocal condition number is
        below ``RCOND_MIN``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"matrix must be square, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise ConfigurationError(
            f"right-hand side has shape {b.shape}, expected ({a.shape[0]},)"
        )

    lu, piv, info = lapack.zgetrf(a)
    if info > 0:
        raise SingularSystemError(f"exactly zero pivot at position {info - 1}")
    anorm = np.linalg.norm(a, 1)
    if anorm == 0.0:
        raise SingularSystemError("zero matrix")
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if rcond < RCOND_MIN:
        raise SingularSystemError(f"matrix is singular to working precision (rcond={rcond:.3e})")
    x, info = lapack.zgetrs(lu, piv, b)
    return x
