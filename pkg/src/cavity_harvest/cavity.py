"""Cavity mode structure and quadratic Hamiltonians in phase space.

A massless scalar field lives on a 1-D cavity of length L with either
periodic or Dirichlet (perfectly reflecting) walls.  Harmonic-oscillator
detectors sit at fixed positions and couple linearly, detector position
quadrature to the local field amplitude, with a sharp switching function.
Everything quadratic in quadratures is represented by the symmetric matrix F
of the Hamiltonian H = (1/2) x^T F x over the interleaved quadrature vector,
detectors first, then field modes.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .gaussian import _as_symmetric


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class CavitySpec:
    """Cavity geometry and mode truncation.

    ``cutoff`` counts retained field modes.  With periodic walls modes come in
    +/- wavenumber pairs (the spatially constant mode is dropped), so the
    cutoff must be even; with Dirichlet walls it is simply the highest
    harmonic kept.
    """

    length: float
    boundary: Boundary
    cutoff: int

    def __post_init__(self):
        length = float(self.length)
        if not np.isfinite(length) or length <= 0:
            raise ValueError(f"cavity length must be positive, got {length}")
        boundary = Boundary(self.boundary)
        cutoff = int(self.cutoff)
        if cutoff < 1:
            raise ValueError(f"mode cutoff must be at least 1, got {cutoff}")
        if boundary is Boundary.PERIODIC:
            if cutoff % 2:
                raise ValueError("periodic cutoff must be even")
            if cutoff < 2:
                raise ValueError("periodic cutoff must be at least 2")
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "cutoff", cutoff)


@dataclass(frozen=True)
class DetectorArraySpec:
    """Identical detectors: positions, common gap ``omega``, coupling strength.

    Duplicate positions are allowed (two detectors on top of each other are a
    legitimate if odd configuration) but flagged with a warning.
    """

    positions: tuple[float, ...]
    omega: float
    coupling: float

    def __post_init__(self):
        positions = tuple(float(x) for x in self.positions)
        if not positions:
            raise ValueError("need at least one detector position")
        if not all(np.isfinite(positions)):
            raise ValueError(f"detector positions must be finite, got {positions}")
        omega = float(self.omega)
        if not np.isfinite(omega) or omega <= 0:
            raise ValueError(f"detector gap must be positive, got {omega}")
        coupling = float(self.coupling)
        if not np.isfinite(coupling) or coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {coupling}")
        if len(set(positions)) != len(positions):
            warnings.warn(
                f"duplicate detector positions in {positions}", stacklevel=2
            )
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "coupling", coupling)

    @property
    def count(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric matrix F of a quadratic Hamiltonian (1/2) x^T F x."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "matrix", _as_symmetric(self.matrix, "Hamiltonian matrix")
        )

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


def mode_numbers(cavity: CavitySpec) -> np.ndarray:
    """Integer mode indices, in the fixed storage order of the field block."""
    n = cavity.cutoff
    if cavity.boundary is Boundary.PERIODIC:
        half = n // 2
        return np.array([m for m in range(-half, half + 1) if m != 0])
    return np.arange(1, n + 1)


def mode_wavenumbers(cavity: CavitySpec) -> np.ndarray:
    """Signed wavenumbers k_n for every retained mode.

    Periodic cavities have k_n = 2 pi n / L with n = -N/2..N/2 excluding 0;
    Dirichlet cavities have k_n = pi n / L with n = 1..N.
    """
    if cavity.boundary is Boundary.PERIODIC:
        return 2.0 * np.pi * mode_numbers(cavity) / cavity.length
    return np.pi * mode_numbers(cavity) / cavity.length


def mode_frequencies(cavity: CavitySpec) -> np.ndarray:
    """Mode frequencies |k_n| of the massless field."""
    return np.abs(mode_wavenumbers(cavity))


def detector_labels(count: int) -> tuple[str, ...]:
    return tuple(f"d{i + 1}" for i in range(count))


def field_labels(cavity: CavitySpec) -> tuple[str, ...]:
    return tuple(f"k{n}" for n in mode_numbers(cavity))


def system_labels(cavity: CavitySpec, detectors: DetectorArraySpec) -> tuple[str, ...]:
    return detector_labels(detectors.count) + field_labels(cavity)


def _check_positions(cavity: CavitySpec, detectors: DetectorArraySpec):
    length = cavity.length
    for x in detectors.positions:
        if cavity.boundary is Boundary.DIRICHLET:
            # at a reflecting wall every mode function vanishes, so the
            # detector would silently decouple; reject instead
            if not 0.0 < x < length:
                raise ValueError(
                    f"detector at x={x} must lie strictly inside (0, {length}) "
                    "for Dirichlet walls, where a wall position decouples the "
                    "detector from every mode"
                )
        elif not 0.0 <= x <= length:
            raise ValueError(
                f"detector at x={x} lies outside the periodic cavity [0, {length}]"
            )


def build_free_hamiltonian(
    cavity: CavitySpec, detectors: DetectorArraySpec
) -> QuadraticForm:
    """Uncoupled part: each detector at gap omega, each field mode at |k_n|.

    In the symmetrized quadrature convention the diagonal carries each
    frequency twice, once for q and once for p.
    """
    freqs = np.concatenate(
        [np.full(detectors.count, detectors.omega), mode_frequencies(cavity)]
    )
    return QuadraticForm(np.diag(np.repeat(freqs, 2)))


def build_coupling_matrix(
    cavity: CavitySpec, detectors: DetectorArraySpec
) -> np.ndarray:
    """Detector-field coupling block X, shape (2 D, 2 N).

    Row 2j holds the mode-function amplitudes seen by detector j's position
    quadrature; all momentum rows vanish because the interaction couples
    positions only.  The field is expanded in real standing or running-wave
    quadratures with the 1/sqrt(4 pi |n|) amplitude normalization of the
    massless mode functions (Dirichlet modes combine the +/-k pair into a
    single sine, absorbing a sqrt(2)).
    """
    _check_positions(cavity, detectors)
    numbers = mode_numbers(cavity)
    wavenumbers = mode_wavenumbers(cavity)
    x = np.asarray(detectors.positions)
    block = np.zeros((2 * detectors.count, 2 * len(numbers)))
    if cavity.boundary is Boundary.PERIODIC:
        amp = 1.0 / np.sqrt(4.0 * np.pi * np.abs(numbers))
        block[::2, ::2] = np.cos(np.outer(x, wavenumbers)) * amp
        block[::2, 1::2] = -np.sin(np.outer(x, wavenumbers)) * amp
    else:
        amp = 1.0 / np.sqrt(np.pi * numbers)
        block[::2, ::2] = np.sin(np.outer(x, wavenumbers)) * amp
    return block


def build_interaction_hamiltonian(
    cavity: CavitySpec, detectors: DetectorArraySpec
) -> QuadraticForm:
    """Off-diagonal interaction part, lambda-scaled, zero detector and field blocks."""
    block = detectors.coupling * build_coupling_matrix(cavity, detectors)
    nd = 2 * detectors.count
    nf = 2 * cavity.cutoff
    matrix = np.zeros((nd + nf, nd + nf))
    # factor 2 because H_int = lambda q_j phi appears once per (row, column)
    # pair of the symmetric matrix in (1/2) x^T F x
    matrix[:nd, nd:] = 2.0 * block
    matrix[nd:, :nd] = 2.0 * block.T
    return QuadraticForm(matrix)


def build_total_hamiltonian(
    cavity: CavitySpec, detectors: DetectorArraySpec
) -> QuadraticForm:
    """Full quadratic Hamiltonian, free plus interaction."""
    total = build_free_hamiltonian(cavity, detectors).matrix.copy()
    total += build_interaction_hamiltonian(cavity, detectors).matrix
    return QuadraticForm(total)
