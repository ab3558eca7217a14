"""Symplectic phase-space toolkit for zero-mean Gaussian states.

Quadratures are ordered mode by mode, ``(q_1, p_1, ..., q_M, p_M)``, and
second moments follow the symmetrized convention

    cov[i, j] = <x_i x_j + x_j x_i>,

so the vacuum of every mode is the 2x2 identity and the ground state of the
whole system is the identity matrix.  All states handled here have zero mean,
which is preserved by the quadratic dynamics this package deals with, so a
state is just a covariance matrix plus a tuple of mode labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

#: relative tolerance for accepting a matrix as symmetric
SYMMETRY_RTOL = 1e-12

#: default uncertainty-relation slack in ``is_physical``
PHYSICALITY_TOL = 1e-9

#: per-dimension budget for the symplectic-identity residual of a transform
SYMPLECTIC_RTOL = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the 2M x 2M symplectic form for ``n_modes`` modes.

    The form is block diagonal with ``[[0, 1], [-1, 0]]`` per mode, matching
    the interleaved (q, p) quadrature ordering used throughout.
    """
    if n_modes < 1:
        raise ValueError("mode count must be at least 1")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(int(n_modes)), block)


def _as_symmetric(matrix: np.ndarray, what: str) -> np.ndarray:
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {mat.shape}")
    if mat.shape[0] % 2 != 0 or mat.shape[0] == 0:
        raise ValueError(f"{what} must have even dimension, got {mat.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(mat))))
    defect = float(np.max(np.abs(mat - mat.T)))
    if defect > SYMMETRY_RTOL * scale:
        raise ValueError(f"{what} is not symmetric (defect {defect:.3e})")
    sym = 0.5 * (mat + mat.T)
    sym.setflags(write=False)
    return sym


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state: a covariance matrix with labeled modes.

    Parameters
    ----------
    cov:
        Symmetric 2M x 2M covariance matrix in the interleaved quadrature
        ordering.  It is symmetrized and frozen on construction.
    mode_labels:
        One identifier per mode, e.g. ``("d1", "d2", "k1")``.  Labels must be
        unique; they are how callers address detector and field modes.
    """

    cov: np.ndarray
    mode_labels: tuple[str, ...]

    def __post_init__(self):
        cov = _as_symmetric(self.cov, "covariance matrix")
        labels = tuple(str(l) for l in self.mode_labels)
        if len(labels) != cov.shape[0] // 2:
            raise ValueError(
                f"{len(labels)} mode labels for {cov.shape[0] // 2} modes"
            )
        if len(set(labels)) != len(labels):
            raise ValueError("mode labels must be unique")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mode_labels", labels)

    @property
    def n_modes(self) -> int:
        return len(self.mode_labels)

    def mode_index(self, label: str) -> int:
        try:
            return self.mode_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown mode label {label!r}") from None

    def block(self, label_i: str, label_j: str) -> np.ndarray:
        """2x2 covariance block between two labeled modes."""
        i = 2 * self.mode_index(label_i)
        j = 2 * self.mode_index(label_j)
        return self.cov[i : i + 2, j : j + 2].copy()

    @classmethod
    def vacuum(cls, mode_labels: Sequence[str]) -> "GaussianState":
        labels = tuple(mode_labels)
        return cls(np.eye(2 * len(labels)), labels)


@dataclass(frozen=True)
class SymplecticTransform:
    """Linear phase-space transform S with S Omega S^T = Omega.

    Construction fails if the symplectic identity is violated beyond
    ``SYMPLECTIC_RTOL`` times the matrix dimension, which catches corrupted
    propagators early instead of letting unphysical states propagate.
    """

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError(f"transform must be an even square matrix, got {mat.shape}")
        omega = symplectic_form(mat.shape[0] // 2)
        residual = float(np.max(np.abs(mat @ omega @ mat.T - omega)))
        if residual > SYMPLECTIC_RTOL * mat.shape[0]:
            raise ValueError(
                f"matrix is not symplectic: residual {residual:.3e} exceeds "
                f"{SYMPLECTIC_RTOL * mat.shape[0]:.3e}"
            )
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def n_modes(self) -> int:
        return self.mat.shape[0] // 2

    def apply(self, state: GaussianState) -> GaussianState:
        """Return the state with covariance S cov S^T, labels unchanged."""
        if state.n_modes != self.n_modes:
            raise ValueError(
                f"transform acts on {self.n_modes} modes, state has {state.n_modes}"
            )
        return GaussianState(self.mat @ state.cov @ self.mat.T, state.mode_labels)


StateLike = Union[GaussianState, np.ndarray]


def _cov_of(state: StateLike) -> np.ndarray:
    if isinstance(state, GaussianState):
        return state.cov
    return _as_symmetric(np.asarray(state, dtype=float), "covariance matrix")


def symplectic_eigenvalues(state: StateLike) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending, one per mode.

    The moduli of the eigenvalues of ``i Omega cov`` come in equal pairs; one
    representative per pair is returned.  Physical states have every value
    >= 1, with equality exactly on pure modes.
    """
    cov = _cov_of(state)
    omega = symplectic_form(cov.shape[0] // 2)
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * omega @ cov)))
    return np.ascontiguousarray(moduli[::2])


def is_physical(state: StateLike, tol: float = PHYSICALITY_TOL) -> bool:
    """Whether the covariance matrix satisfies the uncertainty relation.

    Accepts states whose smallest symplectic eigenvalue is >= 1 - tol.
    Non-symmetric input is simply unphysical, not an error.
    """
    try:
        nu = symplectic_eigenvalues(state)
    except ValueError:
        return False
    return bool(np.min(nu) >= 1.0 - tol)


def partial_trace(state: GaussianState, keep: Iterable[str]) -> GaussianState:
    """Reduced state over ``keep``, preserving the state's own mode order.

    For Gaussian states the partial trace just selects the corresponding
    2x2 blocks of the covariance matrix.
    """
    kept = list(keep)
    if not kept:
        raise ValueError("must keep at least one mode")
    if len(set(kept)) != len(kept):
        raise ValueError("duplicate labels in keep")
    indices = sorted(state.mode_index(label) for label in kept)
    rows = np.concatenate([[2 * i, 2 * i + 1] for i in indices])
    cov = state.cov[np.ix_(rows, rows)]
    labels = tuple(state.mode_labels[i] for i in indices)
    return GaussianState(cov, labels)


def global_purity_defect(state: StateLike) -> float:
    """Largest deviation of the symplectic spectrum from 1.

    Zero for pure states; for a unitarily evolved vacuum this measures
    accumulated numerical error and should stay at round-off level.
    """
    nu = symplectic_eigenvalues(state)
    return float(np.max(np.abs(nu - 1.0)))
