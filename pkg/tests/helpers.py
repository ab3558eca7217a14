"""Shared oracles and generators for the test suite.

The oracles here deliberately avoid the code paths they check: the RK4
integrator never calls the eigendecomposition propagator, the Fock-space
negativity never touches covariance matrices, and the square-root route to
the symplectic spectrum avoids the non-Hermitian eigensolver used by the
package.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh, expm, sqrtm

from cavity_harvest import Boundary, CavitySpec, DetectorArraySpec, ScenarioSpec
from cavity_harvest.gaussian import symplectic_form


def rk4_propagator(generator: np.ndarray, t: float, steps: int) -> np.ndarray:
    """Integrate dS/dt = A S from the identity with classic fourth-order RK."""
    dim = generator.shape[0]
    s = np.eye(dim)
    h = t / steps
    a = generator
    for _ in range(steps):
        k1 = a @ s
        k2 = a @ (s + 0.5 * h * k1)
        k3 = a @ (s + 0.5 * h * k2)
        k4 = a @ (s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


def rk4_steps_for(generator: np.ndarray, t: float, resolution: float = 0.01) -> int:
    """Step count keeping the fastest phase advance per step below ``resolution``."""
    rate = float(np.max(np.abs(np.linalg.eigvals(generator))))
    return max(100, int(math.ceil(rate * t / resolution)))


def two_mode_squeezed_cov(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum covariance, vacuum-is-identity convention."""
    c = math.cosh(2.0 * r)
    s = math.sinh(2.0 * r)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def fock_two_mode_squeezed_negativity(r: float, cutoff: int = 22) -> float:
    """Logarithmic negativity of a two-mode squeezed state via Fock truncation.

    Builds |psi> = sech r * sum tanh(r)^n |n, n>, partially transposes the
    density matrix by swapping one index pair, and takes log2 of the trace
    norm.  Truncation error falls like tanh(r)^(2 cutoff).
    """
    n = np.arange(cutoff)
    amps = np.tanh(r) ** n / math.cosh(r)
    rho = np.zeros((cutoff, cutoff, cutoff, cutoff))
    for i in range(cutoff):
        for j in range(cutoff):
            rho[i, i, j, j] = amps[i] * amps[j]
    # partial transpose on the second mode: (i a, j b) -> (i b, j a)
    rho_pt = np.transpose(rho, (0, 3, 2, 1)).reshape(cutoff * cutoff, cutoff * cutoff)
    eigs = np.linalg.eigvalsh(rho_pt)
    return float(np.log2(np.sum(np.abs(eigs))))


def sqrtm_symplectic_spectrum(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum via the Hermitian square-root route.

    With M = sqrt(cov), the matrix i M Omega M is Hermitian and its spectrum
    is +/- the symplectic eigenvalues; only Hermitian eigensolvers and the
    matrix square root are involved.
    """
    m = sqrtm(cov)
    m = np.real_if_close(0.5 * (m + m.T))
    omega = symplectic_form(cov.shape[0] // 2)
    herm = 1j * (m @ omega @ m)
    eigs = eigh(herm, eigvals_only=True)
    return np.sort(np.abs(eigs))[::2].copy()


def random_symplectic(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    """exp(Omega H) with a random symmetric H is always symplectic."""
    dim = 2 * n_modes
    h = rng.normal(scale=0.4, size=(dim, dim))
    h = 0.5 * (h + h.T)
    return expm(symplectic_form(n_modes) @ h)


def random_physical_cov(
    rng: np.random.Generator, n_modes: int, mixed: bool = True
) -> np.ndarray:
    """Williamson synthesis S diag(nu) S^T of a valid covariance matrix."""
    s = random_symplectic(rng, n_modes)
    if mixed:
        nu = 1.0 + rng.exponential(scale=0.5, size=n_modes)
    else:
        nu = np.ones(n_modes)
    return s @ np.diag(np.repeat(nu, 2)) @ s.T


def random_scenario(rng: np.random.Generator) -> ScenarioSpec:
    """A random small but well-posed scenario inside the weak-coupling regime."""
    boundary = Boundary.PERIODIC if rng.random() < 0.5 else Boundary.DIRICHLET
    length = float(rng.uniform(5.0, 20.0))
    cutoff = int(rng.integers(5, 21))
    if boundary is Boundary.PERIODIC:
        cutoff *= 2
    n_det = int(rng.choice([2, 3]))
    lo, hi = (0.05 * length, 0.95 * length)
    while True:
        positions = np.sort(rng.uniform(lo, hi, size=n_det))
        if np.min(np.diff(positions)) > 0.02 * length:
            break
    omega = float(rng.uniform(0.3, 7.0))
    coupling = float(rng.uniform(0.001, 0.02))
    duration = float(rng.uniform(0.1, 3.0)) * length / 3.0
    cavity = CavitySpec(length, boundary, cutoff)
    detectors = DetectorArraySpec(tuple(positions), omega, coupling)
    return ScenarioSpec(cavity, detectors, duration)
