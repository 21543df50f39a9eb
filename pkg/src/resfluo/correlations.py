"""Normally ordered moments of the two detected field amplitudes.

The scalar amplitude seen by detector j is A_j = sum_n exp(i phi_j^(n)) L_n,
where L_n lowers atom n. Atoms are independent, L_n^2 = 0, and a normally
ordered product therefore expands into per-atom factors that are one of
{1, raise, lower, raise*lower}. The moment engine runs a dynamic program over
atoms on the coefficient tensor of consumed operator counts, which stays
polynomial in the atom number and the powers; no joint Hilbert space is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atoms import AtomicSteadyState
from .errors import InvalidParametersError
from .geometry import PhaseSums


@dataclass(frozen=True)
class MomentSpec:
    """Powers of the normally ordered product A1+^p A2+^q A1^r A2^s."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        for v in (self.p, self.q, self.r, self.s):
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise InvalidParametersError("moment powers must be non-negative ints")
        if self.order < 1:
            raise InvalidParametersError("moment must contain at least one factor")

    @property
    def order(self) -> int:
        return self.p + self.q + self.r + self.s

    def exceeds(self, n_atoms: int) -> bool:
        """True when the moment is identically zero for ``n_atoms`` emitters."""
        return self.r + self.s > n_atoms or self.p + self.q > n_atoms


def moment(phases: PhaseSums, state: AtomicSteadyState, spec: MomentSpec) -> complex:
    """Exact moment <A1+^p A2+^q A1^r A2^s> for independent identical atoms.

    Returns exactly 0 when more raising (or lowering) factors are requested
    than there are atoms.
    """
    n = phases.n_atoms
    if spec.exceeds(n):
        return 0j
    p, q, r, s = spec.p, spec.q, spec.r, spec.s
    s21 = complex(state.sigma21)
    s12 = s21.conjugate()
    s22 = state.sigma22

    coef = np.zeros((p + 1, q + 1, r + 1, s + 1), dtype=complex)
    coef[0, 0, 0, 0] = 1.0
    for k in range(n):
        ph1, ph2 = phases.phases[k]
        em1, em2 = np.exp(-1j * ph1), np.exp(-1j * ph2)
        ep1, ep2 = np.exp(1j * ph1), np.exp(1j * ph2)
        new = coef.copy()
        # single raising / single lowering consumed by atom k
        if p:
            new[1:, :, :, :] += (s12 * em1) * coef[:-1, :, :, :]
        if q:
            new[:, 1:, :, :] += (s12 * em2) * coef[:, :-1, :, :]
        if r:
            new[:, :, 1:, :] += (s21 * ep1) * coef[:, :, :-1, :]
        if s:
            new[:, :, :, 1:] += (s21 * ep2) * coef[:, :, :, :-1]
        # one raising and one lowering on the same atom: projector expectation
        if p and r:
            new[1:, :, 1:, :] += (s22 * em1 * ep1) * coef[:-1, :, :-1, :]
        if p and s:
            new[1:, :, :, 1:] += (s22 * em1 * ep2) * coef[:-1, :, :, :-1]
        if q and r:
            new[:, 1:, 1:, :] += (s22 * em2 * ep1) * coef[:, :-1, :-1, :]
        if q and s:
            new[:, 1:, :, 1:] += (s22 * em2 * ep2) * coef[:, :-1, :, :-1]
        coef = new
    # identical operator copies distribute over distinct atoms in any order
    combinatorial = (
        math.factorial(p) * math.factorial(q) * math.factorial(r) * math.factorial(s)
    )
    return combinatorial * complex(coef[p, q, r, s])


@dataclass(frozen=True)
class CovarianceTable:
    """First and second moments of the two amplitudes, raw and centered."""

    c1: complex
    c2: complex
    m11: complex
    m12: complex
    m21: complex
    m22: complex
    anom1: complex
    anom2: complex

    @property
    def centered_m11(self) -> float:
        return float((self.m11 - abs(self.c1) ** 2).real)

    @property
    def centered_m22(self) -> float:
        return float((self.m22 - abs(self.c2) ** 2).real)

    @property
    def centered_anom1(self) -> complex:
        return self.anom1 - self.c1 * self.c1

    @property
    def centered_anom2(self) -> complex:
        return self.anom2 - self.c2 * self.c2


def covariance_table(phases: PhaseSums, state: AtomicSteadyState) -> CovarianceTable:
    """Closed forms for every entry the 3x3 witness needs.

    m_ij = beta * sum_n exp(i (phi_j - phi_i)) + |sigma21|^2 conj(s_i) s_j,
    with beta = sigma22 - |sigma21|^2; the anomalous moment subtracts the
    same-atom diagonal: <A_j^2> = sigma21^2 (s_j^2 - sum_n exp(2 i phi_j)).
    The centered diagonal N*beta is phase independent.
    """
    n = phases.n_atoms
    s21 = complex(state.sigma21)
    mod2 = abs(s21) ** 2
    beta = state.sigma22 - mod2
    s1, s2, s12 = phases.s1, phases.s2, phases.s12
    c1 = s21 * s1
    c2 = s21 * s2
    m11 = beta * n + mod2 * abs(s1) ** 2
    m22 = beta * n + mod2 * abs(s2) ** 2
    m12 = beta * s12.conjugate() + mod2 * s1.conjugate() * s2
    anom1 = s21 * s21 * (s1 * s1 - phases.doubled_sum(1))
    anom2 = s21 * s21 * (s2 * s2 - phases.doubled_sum(2))
    return CovarianceTable(
        c1=c1,
        c2=c2,
        m11=complex(m11),
        m12=m12,
        m21=m12.conjugate(),
        m22=complex(m22),
        anom1=anom1,
        anom2=anom2,
    )
