"""Entanglement minor, ratio and squeezing witnesses, dephasing thresholds.

The central object is the 3x3 minor built from partially transposed field
moments. Its negativity certifies bipartite entanglement of the two detected
field modes. Two evaluation routes are kept deliberately separate:

* ``mu_full``: the determinant assembled from covariance-table entries, with
  two-field entries contracted by Cartesian dot products and the mean
  rows/columns contracted pairwise;
* ``mu_closed``: the closed form
  g1^2 g2^2 [N^2 b^2 - cos^2(t) b^2 |s12|^2 - sin^2(t) |s21|^4 |s1|^2 |s2|^2]
  with b = sigma22 - |sigma21|^2.

Their difference (``cross_term``) is reported rather than assumed away; it is
zero to machine precision for every phase configuration (see the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atoms import AtomicSteadyState, AtomParameters, coherence_ratio
from .correlations import covariance_table
from .errors import UndrivenAtomError
from .geometry import PhaseSums, SceneGeometry, emission_vector, phase_factors

_DEGENERATE_NORM = 1e-12


@dataclass(frozen=True)
class MinorEvaluation:
    """Result of one minor evaluation.

    ``entangled`` applies a scale-aware tolerance so boundary cases (ratio
    exactly N+1) do not flip on rounding noise. ``degenerate`` marks scenes
    where a pattern vector vanishes and the minor is identically zero.
    """

    mu_full: float
    mu_closed: float
    cross_term: float
    mu_normalized: float
    entangled: bool
    degenerate: bool = False


def assemble_minor(g11, g22, g12, c1, c2, m11, m12, m21, m22) -> float:
    """Determinant of the witness matrix from scalar moment entries.

    ``g11, g22, g12`` are the pattern-vector dot products; ``c_j`` the mean
    amplitudes; ``m_ij`` the second moments. The expression is real by
    construction (m21 = conj(m12)); rounding residue is dropped.
    """
    det = (
        g11 * g22 * m11 * m22
        - g12 * g12 * m12 * m21
        - g11 * g22 * abs(c1) ** 2 * m22
        - g11 * g22 * abs(c2) ** 2 * m11
        + g12 * g12 * (c1 * np.conj(c2) * m12 + np.conj(c1) * c2 * m21)
    )
    return float(np.real(det))


def closed_form_minor(
    n_atoms: int, state: AtomicSteadyState, g11: float, g22: float, g12: float,
    abs_s1: float, abs_s2: float, abs_s12: float,
) -> float:
    """Closed-form minor from the phase-sum moduli alone."""
    beta = state.beta
    mod4 = abs(state.sigma21) ** 4
    return (
        g11 * g22 * n_atoms * n_atoms * beta * beta
        - g12 * g12 * beta * beta * abs_s12 * abs_s12
        - (g11 * g22 - g12 * g12) * mod4 * abs_s1 * abs_s1 * abs_s2 * abs_s2
    )


def minor_mu(scene: SceneGeometry, state: AtomicSteadyState) -> MinorEvaluation:
    """Evaluate the entanglement minor for a scene and stationary state.

    Returns a flagged zero evaluation when a detector sits on the dipole
    axis (the emitted pattern vanishes there, so the minor is identically 0).
    """
    g1 = emission_vector(scene.detector_directions[0], scene.dipole_direction)
    g2 = emission_vector(scene.detector_directions[1], scene.dipole_direction)
    if np.linalg.norm(g1) < _DEGENERATE_NORM or np.linalg.norm(g2) < _DEGENERATE_NORM:
        return MinorEvaluation(0.0, 0.0, 0.0, 0.0, entangled=False, degenerate=True)
    g11 = float(g1 @ g1)
    g22 = float(g2 @ g2)
    g12 = float(g1 @ g2)
    phases = phase_factors(scene)
    table = covariance_table(phases, state)
    mu_full = assemble_minor(
        g11, g22, g12,
        table.c1, table.c2, table.m11, table.m12, table.m21, table.m22,
    )
    n = scene.n_atoms
    mu_closed = closed_form_minor(
        n, state, g11, g22, g12, abs(phases.s1), abs(phases.s2), abs(phases.s12)
    )
    scale = g11 * g22 * n * n * state.sigma22 * state.sigma22
    entangled = mu_full < -1e-12 * scale
    normalized = mu_full / (n * n * state.sigma22 * state.sigma22) if state.sigma22 > 0 else 0.0
    return MinorEvaluation(
        mu_full=mu_full,
        mu_closed=mu_closed,
        cross_term=mu_full - mu_closed,
        mu_normalized=normalized,
        entangled=bool(entangled),
    )


def normalized_minor(
    evaluation: MinorEvaluation, state: AtomicSteadyState, n_atoms: int
) -> float:
    """Minor scaled by N^2 sigma22^2 (dimensionless pattern vectors absorb
    the emission prefactor).

    Raises
    ------
    UndrivenAtomError
        If ``sigma22 == 0``.
    """
    if state.sigma22 == 0:
        raise UndrivenAtomError("normalization undefined for sigma22 = 0")
    return evaluation.mu_full / (n_atoms * n_atoms * state.sigma22 * state.sigma22)


def ratio_condition(n_atoms: int, state: AtomicSteadyState) -> bool:
    """True when sigma22/|sigma21|^2 < N + 1 (entanglement in the phase-free
    arrangement, sin(theta) != 0)."""
    if state.sigma21 == 0:
        raise UndrivenAtomError("ratio condition undefined for sigma21 = 0")
    return state.ratio < n_atoms + 1


def squeezing_witness(
    phases: PhaseSums, state: AtomicSteadyState, g, detector: int = 1
) -> float:
    """Minimal normally ordered quadrature variance of one detected mode.

    Minimizing over the quadrature phase gives
    2 g^2 [ <dA+ dA> - |<dA dA>| ] = 2 g^2 [ N b - |s21|^2 |sum_n e^{2i phi}| ].
    A negative value certifies squeezing of that mode.
    """
    gvec = np.asarray(g, dtype=float)
    gsq = float(gvec @ gvec) if gvec.ndim else float(g) ** 2
    n = phases.n_atoms
    mod2 = abs(state.sigma21) ** 2
    return 2.0 * gsq * (n * state.beta - mod2 * abs(phases.doubled_sum(detector)))


def two_by_two_minors(
    phases: PhaseSums, state: AtomicSteadyState, scene: SceneGeometry
) -> list[float]:
    """Centered one-mode second moments scaled by the pattern norms.

    These are the dimension-2 reductions of the witness matrix; they are
    non-negative for every state, so they never flag entanglement.
    """
    g1 = emission_vector(scene.detector_directions[0], scene.dipole_direction)
    g2 = emission_vector(scene.detector_directions[1], scene.dipole_direction)
    n = phases.n_atoms
    base = n * state.beta
    return [float(g1 @ g1) * base, float(g2 @ g2) * base]


@dataclass(frozen=True)
class DephasingPoint:
    """Feasibility of the two witnesses at one dephasing ratio."""

    gamma2: float
    entangled: bool
    squeezed: bool


def dephasing_scan(
    n_atoms: int,
    gamma2_values,
    rabi: float | None = None,
    gamma1: float = 1.0,
    detuning: float = 0.0,
) -> list[DephasingPoint]:
    """Tabulate witness feasibility against the dephasing ratio.

    With ``rabi=None`` the drive is assumed optimized below its bound, so the
    table answers "possible at any drive": entanglement iff
    gamma2/gamma1 < (N+1)/2, squeezing iff gamma2/gamma1 < 1. With a fixed
    ``rabi`` the coherence ratio at that drive decides both.
    """
    rows = []
    for g2 in gamma2_values:
        if rabi is None:
            ent = g2 / gamma1 < (n_atoms + 1) / 2.0
            sq = g2 / gamma1 < 1.0
        else:
            ratio = coherence_ratio(
                AtomParameters(gamma1=gamma1, gamma2=g2, rabi=rabi, detuning=detuning)
            )
            ent = ratio < n_atoms + 1
            sq = ratio < 2.0
        rows.append(DephasingPoint(gamma2=float(g2), entangled=ent, squeezed=sq))
    return rows
