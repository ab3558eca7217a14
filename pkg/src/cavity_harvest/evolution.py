"""Exact phase-space evolution of the coupled detector-field system.

The quadratic Hamiltonian (1/2) x^T F x generates the linear flow
S(t) = exp(A t) with A = Omega F, and the vacuum covariance evolves as
sigma(t) = S(t) S(t)^T.  A is diagonalized once and the matrix exponential
is then a cheap reconstruction for every requested time, which is what makes
dense time sweeps affordable.  If the eigenbasis is ill conditioned the
engine falls back to scipy's Pade exponential per time step.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .cavity import (
    CavitySpec,
    DetectorArraySpec,
    QuadraticForm,
    build_total_hamiltonian,
    system_labels,
)
from .gaussian import GaussianState, SymplecticTransform, partial_trace, symplectic_form

#: condition-number ceiling for trusting the cached eigendecomposition
CONDITION_LIMIT = 1e8

#: absolute tolerance on trace(A); A is similar to -A^T so the trace vanishes
TRACE_TOL = 1e-10

#: relative budgets for eigen-reconstruction and leftover imaginary parts
RECONSTRUCTION_RTOL = 1e-9
IMAG_RTOL = 1e-9


class ConditioningError(RuntimeError):
    """Raised when the generator is too ill conditioned for a reliable propagator."""


class EvolutionEngine:
    """Propagator factory for one fixed Hamiltonian.

    Parameters
    ----------
    form:
        Quadratic Hamiltonian matrix of the full system.
    mode_labels:
        Labels for all modes, detectors first.
    condition_limit:
        Eigenbasis condition number above which the engine abandons the
        cached diagonalization and uses Pade exponentials instead.
    """

    def __init__(
        self,
        form: QuadraticForm,
        mode_labels: Sequence[str],
        condition_limit: float = CONDITION_LIMIT,
    ):
        labels = tuple(mode_labels)
        if len(labels) != form.n_modes:
            raise ValueError(
                f"{len(labels)} labels for a {form.n_modes}-mode Hamiltonian"
            )
        generator = symplectic_form(form.n_modes) @ form.matrix
        trace = float(np.trace(generator))
        if abs(trace) > TRACE_TOL:
            raise ValueError(f"flow generator has non-zero trace {trace:.3e}")
        generator.setflags(write=False)
        self.form = form
        self.mode_labels = labels
        self.generator = generator
        self._eig = self._try_diagonalize(generator, condition_limit)

    @staticmethod
    def _try_diagonalize(generator: np.ndarray, condition_limit: float):
        values, vectors = np.linalg.eig(generator)
        if np.linalg.cond(vectors) > condition_limit:
            return None
        inverse = np.linalg.inv(vectors)
        rebuilt = (vectors * values) @ inverse
        scale = max(1.0, float(np.max(np.abs(generator))))
        if np.max(np.abs(rebuilt - generator)) > RECONSTRUCTION_RTOL * scale:
            return None
        return values, vectors, inverse

    @classmethod
    def from_specs(
        cls,
        cavity: CavitySpec,
        detectors: DetectorArraySpec,
        condition_limit: float = CONDITION_LIMIT,
    ) -> "EvolutionEngine":
        form = build_total_hamiltonian(cavity, detectors)
        return cls(form, system_labels(cavity, detectors), condition_limit)

    @property
    def n_modes(self) -> int:
        return len(self.mode_labels)

    @property
    def uses_eigendecomposition(self) -> bool:
        return self._eig is not None

    def propagator(self, t: float) -> SymplecticTransform:
        """S(t) = exp(A t) as a validated symplectic transform.

        Negative times are rejected: the physics here only ever evolves the
        vacuum forward from switch-on.
        """
        t = float(t)
        if not np.isfinite(t):
            raise ValueError(f"evolution time must be finite, got {t}")
        if t < 0:
            raise ValueError(f"evolution time must be non-negative, got {t}")
        if self._eig is None:
            return SymplecticTransform(expm(self.generator * t))
        values, vectors, inverse = self._eig
        prop = (vectors * np.exp(values * t)) @ inverse
        scale = max(1.0, float(np.max(np.abs(prop.real))))
        residue = float(np.max(np.abs(prop.imag)))
        if residue > IMAG_RTOL * scale:
            raise ConditioningError(
                f"propagator at t={t} has imaginary residue {residue:.3e}; "
                "the eigendecomposition is unreliable"
            )
        return SymplecticTransform(prop.real)

    def evolve_vacuum(self, duration: float) -> GaussianState:
        """State of the full system after evolving the joint vacuum for ``duration``."""
        s = self.propagator(duration).mat
        return GaussianState(s @ s.T, self.mode_labels)


def detector_state(state: GaussianState, n_detectors: int) -> GaussianState:
    """Reduced state of the first ``n_detectors`` modes (the detector block)."""
    if not 1 <= n_detectors <= state.n_modes:
        raise ValueError(
            f"cannot keep {n_detectors} detectors from a {state.n_modes}-mode state"
        )
    return partial_trace(state, state.mode_labels[:n_detectors])
