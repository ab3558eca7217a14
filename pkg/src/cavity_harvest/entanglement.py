"""Logarithmic negativity of two- and three-detector Gaussian states.

Two routes to a one-vs-rest negativity are implemented.  The general route
takes the symplectic spectrum of the partially transposed covariance matrix.
The cheaper route applies when the two "rest" modes enter symmetrically: a
balanced beam splitter then concentrates all entanglement with the remaining
mode into a single output, reducing the problem to the closed-form two-mode
negativity.  Both are exposed, and the symmetric reduction is verified
against its precondition rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gaussian import GaussianState, partial_trace, symplectic_eigenvalues

#: results below this are reported as exactly zero (round-off noise floor)
NEGATIVITY_FLOOR = 1e-12

#: tolerance for treating two modes as exchange symmetric
SYMMETRY_TOL = 1e-8

#: discriminants more negative than this indicate a corrupted state
DISCRIMINANT_TOL = -1e-9

_LOG2 = math.log(2.0)


class NumericalInconsistencyError(RuntimeError):
    """An internal cross-check between independent quantities failed."""


def _floored(value: float) -> float:
    return 0.0 if value < NEGATIVITY_FLOOR else value


def two_mode_log_negativity(state: GaussianState) -> float:
    """Closed-form logarithmic negativity of a two-mode Gaussian state.

    Uses the partially transposed symplectic invariant: with the 2x2 blocks
    sigma_1, sigma_2, gamma of the covariance matrix,

        delta = det sigma_1 + det sigma_2 - 2 det gamma,
        2 nu^2 = delta - sqrt(delta^2 - 4 det cov),

    and E = max(0, -log2 nu).  A negative square-root discriminant beyond
    round-off means the input was not a physical covariance matrix.
    """
    if state.n_modes != 2:
        raise ValueError(f"need exactly 2 modes, got {state.n_modes}")
    cov = state.cov
    a = np.linalg.det(cov[0:2, 0:2])
    b = np.linalg.det(cov[2:4, 2:4])
    c = np.linalg.det(cov[0:2, 2:4])
    delta = a + b - 2.0 * c
    disc = delta * delta - 4.0 * np.linalg.det(cov)
    if disc < DISCRIMINANT_TOL * max(1.0, abs(delta) ** 2):
        raise NumericalInconsistencyError(
            f"negative discriminant {disc:.3e} in two-mode negativity; "
            "covariance matrix is not physical"
        )
    nu_sq = 0.5 * (delta - math.sqrt(max(disc, 0.0)))
    if nu_sq <= 0.0:
        raise NumericalInconsistencyError(
            f"non-positive partial-transpose eigenvalue squared {nu_sq:.3e}"
        )
    return max(0.0, -0.5 * math.log(nu_sq) / _LOG2)


def one_vs_rest_log_negativity(state: GaussianState, solo: str) -> float:
    """Negativity across the bipartition (solo mode) vs (all other modes).

    Implements the partial transpose directly: flip the sign of the solo
    mode's momentum, then sum -log2 of every symplectic eigenvalue below 1.
    Valid for any mode count; this is the general-purpose route.
    """
    if state.n_modes < 2:
        raise ValueError("need at least 2 modes for a bipartition")
    i = state.mode_index(solo)
    flip = np.ones(2 * state.n_modes)
    flip[2 * i + 1] = -1.0
    transposed = state.cov * np.outer(flip, flip)
    nu = symplectic_eigenvalues(transposed)
    # values within round-off of 1 carry no entanglement, only eigensolver noise
    small = nu[nu < 1.0 - NEGATIVITY_FLOOR]
    return float(np.sum(-np.log2(small))) if small.size else 0.0


def exchange_defect(state: GaussianState, pair: tuple[str, str]) -> float:
    """How far the state is from invariance under swapping the two modes."""
    i, j = (state.mode_index(label) for label in pair)
    perm = np.arange(state.n_modes)
    perm[i], perm[j] = perm[j], perm[i]
    rows = np.concatenate([[2 * m, 2 * m + 1] for m in perm])
    swapped = state.cov[np.ix_(rows, rows)]
    return float(np.max(np.abs(swapped - state.cov)))


def localize_symmetric(state: GaussianState, pair: tuple[str, str]) -> GaussianState:
    """Concentrate a symmetric pair's entanglement into the pair's second mode.

    Applies the balanced beam splitter (a, b) -> ((a - b)/sqrt2, (a + b)/sqrt2)
    to the two modes of ``pair``.  When the state is invariant under their
    exchange the antisymmetric output decouples completely, so all correlation
    with the remaining modes survives on the symmetric output (the mode that
    keeps the label ``pair[1]``).  Labels and mode order are unchanged.

    Raises ValueError if the pair is not exchange symmetric; for such states
    use one_vs_rest_log_negativity instead.
    """
    defect = exchange_defect(state, pair)
    if defect > SYMMETRY_TOL:
        raise ValueError(
            f"modes {pair} are not exchange symmetric (defect {defect:.3e}); "
            "the beam-splitter reduction does not apply, use "
            "one_vs_rest_log_negativity"
        )
    i, j = (state.mode_index(label) for label in pair)
    s = np.eye(2 * state.n_modes)
    ii, jj = 2 * i, 2 * j
    half = 1.0 / math.sqrt(2.0)
    for off in (0, 1):
        s[ii + off, ii + off] = half
        s[ii + off, jj + off] = -half
        s[jj + off, ii + off] = half
        s[jj + off, jj + off] = half
    rotated = GaussianState(s @ state.cov @ s.T, state.mode_labels)
    residual = _decoupling_residual(rotated, i)
    if residual > SYMMETRY_TOL:
        raise NumericalInconsistencyError(
            f"antisymmetric mode failed to decouple (residual {residual:.3e})"
        )
    return rotated


def _decoupling_residual(state: GaussianState, mode: int) -> float:
    cov = state.cov
    rows = slice(2 * mode, 2 * mode + 2)
    mask = np.ones(cov.shape[0], dtype=bool)
    mask[2 * mode : 2 * mode + 2] = False
    return float(np.max(np.abs(cov[rows, mask])))


def tripartite_estimator(e1: float, e2: float, e3: float) -> float:
    """Geometric mean of the three one-vs-rest negativities.

    A scalar summary of genuine three-way entanglement: it vanishes when any
    single bipartition is separable and equals the common value when all
    three agree (the equal case is returned exactly, not via cbrt round-off).
    """
    values = (e1, e2, e3)
    if any(v < 0 for v in values):
        raise ValueError(f"negativities must be non-negative, got {values}")
    if any(v == 0 for v in values):
        return 0.0
    if e1 == e2 == e3:
        return float(e1)
    return float(np.cbrt(e1 * e2 * e3))


@dataclass(frozen=True)
class EntanglementReport:
    """All entanglement measures computed for one detector state.

    ``methods`` records the route taken for each quantity ("closed-form",
    "localization", "pt-spectrum", "geometric-mean") so sweep output can be
    audited.  ``cutoff`` and ``elapsed_s`` are filled in by the sweep layer.
    """

    pairwise: dict
    one_vs_rest: dict
    tripartite: Optional[float]
    methods: dict
    cutoff: Optional[int] = None
    elapsed_s: Optional[float] = None


def analyze_detectors(
    state: GaussianState,
    symmetric_hint: bool = True,
    *,
    solos: Optional[tuple[str, ...]] = None,
) -> EntanglementReport:
    """Full entanglement analysis of a 2- or 3-detector reduced state.

    All pairwise negativities are always computed.  For three detectors the
    one-vs-rest values are added, via the beam-splitter localization whenever
    the complementary pair is exchange symmetric (checked, not trusted) and
    via the partial-transpose spectrum otherwise; ``symmetric_hint=False``
    forces the general route.  ``solos`` restricts which bipartitions are
    evaluated; the tripartite estimator is only formed when all three are.

    Consistency is enforced: a pairwise negativity exceeding the matching
    one-vs-rest value (beyond slack) is impossible for valid states and
    raises NumericalInconsistencyError.
    """
    n = state.n_modes
    if n not in (2, 3):
        raise ValueError(f"analysis supports 2 or 3 detectors, got {n}")
    labels = state.mode_labels
    pairwise = {}
    methods = {}
    for i in range(n):
        for j in range(i + 1, n):
            pair = (labels[i], labels[j])
            value = two_mode_log_negativity(partial_trace(state, pair))
            pairwise[pair] = _floored(value)
            methods[f"{pair[0]}-{pair[1]}"] = "closed-form"
    if n == 2:
        return EntanglementReport(pairwise, {}, None, methods)

    if solos is None:
        requested = labels
    else:
        requested = tuple(solos)
        for label in requested:
            state.mode_index(label)
        if len(set(requested)) != len(requested):
            raise ValueError(f"duplicate solo labels {requested}")

    symmetric_pair = {}
    if symmetric_hint:
        for solo in requested:
            rest = tuple(l for l in labels if l != solo)
            symmetric_pair[solo] = exchange_defect(state, rest) <= SYMMETRY_TOL

    one_vs_rest = {}
    fully_symmetric = (
        symmetric_hint
        and len(requested) == 3
        and all(symmetric_pair.get(s, False) for s in requested)
    )
    if fully_symmetric:
        # all three bipartitions are equivalent by symmetry; compute one and
        # report it for each
        value = _floored(_localized_negativity(state, requested[0]))
        for solo in requested:
            one_vs_rest[solo] = value
            methods[f"{solo}|rest"] = "localization"
    else:
        for solo in requested:
            if symmetric_pair.get(solo, False):
                value = _localized_negativity(state, solo)
                methods[f"{solo}|rest"] = "localization"
            else:
                value = one_vs_rest_log_negativity(state, solo)
                methods[f"{solo}|rest"] = "pt-spectrum"
            one_vs_rest[solo] = _floored(value)

    tripartite = None
    if len(one_vs_rest) == 3:
        tripartite = tripartite_estimator(*(one_vs_rest[l] for l in labels))
        methods["tripartite"] = "geometric-mean"

    for (a, b), value in pairwise.items():
        for solo in (a, b):
            if solo in one_vs_rest and value > one_vs_rest[solo] + 1e-9:
                raise NumericalInconsistencyError(
                    f"pair ({a},{b}) negativity {value:.6e} exceeds "
                    f"{solo}-vs-rest value {one_vs_rest[solo]:.6e}"
                )
    return EntanglementReport(pairwise, one_vs_rest, tripartite, methods)


def _localized_negativity(state: GaussianState, solo: str) -> float:
    rest = tuple(l for l in state.mode_labels if l != solo)
    rotated = localize_symmetric(state, rest)
    reduced = partial_trace(rotated, (rest[1], solo))
    return two_mode_log_negativity(reduced)
