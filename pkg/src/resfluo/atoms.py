"""Single-atom stationary state and analytic driving-strength thresholds.

All rates are measured in units of the energy relaxation rate, so ``gamma1``
is normally 1. The stationary state of a driven, damped two-level atom is

    sigma22 = (W g2 / 2) / (g2^2 + d^2 + W g2)
    sigma21 = (sqrt(W) / 2) (d - i g2) / (g2^2 + d^2 + W g2)

with W = rabi^2 / gamma1, g2 = gamma2, d = detuning (gamma1 = 1 units used
throughout the docstrings; the code keeps gamma1 explicit). The ratio
sigma22 / |sigma21|^2 grows monotonically with the drive and controls every
threshold in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidParametersError, NoConvergenceError, UnreachableRatioError


@dataclass(frozen=True)
class AtomParameters:
    """Driving and relaxation rates of one two-level atom.

    Parameters
    ----------
    gamma1 : float
        Energy relaxation rate. Positive; the natural unit of all rates.
    gamma2 : float
        Phase relaxation rate. Must satisfy ``gamma2 >= gamma1 / 2``.
    rabi : float
        Rabi frequency of the drive, real and non-negative.
    detuning : float
        Laser frequency minus atomic transition frequency.
    """

    gamma1: float = 1.0
    gamma2: float = 0.5
    rabi: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        # normalize numpy scalars so every derived quantity is a plain float
        for name in ("gamma1", "gamma2", "rabi", "detuning"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.gamma1, self.gamma2, self.rabi, self.detuning)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParametersError("atom parameters must be finite")
        if self.gamma1 <= 0:
            raise InvalidParametersError("gamma1 must be positive")
        if self.gamma2 < self.gamma1 / 2:
            raise InvalidParametersError("gamma2 must be at least gamma1 / 2")
        if self.rabi < 0:
            raise InvalidParametersError("rabi must be non-negative")


@dataclass(frozen=True)
class AtomicSteadyState:
    """Stationary density-matrix elements of one atom.

    ``sigma22`` is the excited-state population, ``sigma21`` the optical
    coherence (expectation of the lowering flip operator).
    """

    sigma22: float
    sigma21: complex

    @property
    def beta(self) -> float:
        """Centered population factor sigma22 - |sigma21|^2 (always >= 0)."""
        return self.sigma22 - abs(self.sigma21) ** 2

    @property
    def ratio(self) -> float:
        """sigma22 / |sigma21|^2. Infinite for an undriven coherence."""
        m = abs(self.sigma21) ** 2
        return self.sigma22 / m if m > 0 else math.inf

    def validate(self, slack: float = 1e-14) -> None:
        """Assert density-matrix positivity within ``slack``."""
        m = abs(self.sigma21) ** 2
        if not (-slack <= self.sigma22 < 0.5 + slack):
            raise InvalidParametersError("sigma22 out of [0, 1/2)")
        if m > self.sigma22 * (1.0 - self.sigma22) + slack:
            raise InvalidParametersError("coherence violates positivity")


def steady_state(params: AtomParameters) -> AtomicSteadyState:
    """Closed-form stationary state of the driven two-level atom.

    Parameters
    ----------
    params : AtomParameters

    Returns
    -------
    AtomicSteadyState
    """
    g1, g2, w, d = params.gamma1, params.gamma2, params.rabi, params.detuning
    denom = g2 * g2 + d * d + w * w * g2 / g1
    sigma22 = (w * w * g2 / (2.0 * g1)) / denom
    sigma21 = (w / 2.0) * (d - 1j * g2) / denom
    return AtomicSteadyState(sigma22=sigma22, sigma21=sigma21)


def coherence_ratio(params: AtomParameters) -> float:
    """Ratio sigma22 / |sigma21|^2 as an explicit function of the rates.

    Equals ``(2 g2 / g1) * (1 + W g2 / (g1 (g2^2 + d^2)))`` with
    ``W = rabi^2``. Undefined (0/0) at zero drive.

    Raises
    ------
    InvalidParametersError
        If ``params.rabi == 0``.
    """
    if params.rabi == 0:
        raise InvalidParametersError("coherence ratio undefined for rabi = 0")
    g1, g2, w, d = params.gamma1, params.gamma2, params.rabi, params.detuning
    return (2.0 * g2 / g1) * (1.0 + w * w * g2 / (g1 * (g2 * g2 + d * d)))


def rabi_for_ratio(
    target_ratio: float,
    gamma1: float = 1.0,
    gamma2: float = 0.5,
    detuning: float = 0.0,
) -> float:
    """Drive strength that realizes a requested coherence ratio.

    Inverts :func:`coherence_ratio`. The ratio approaches ``2 gamma2/gamma1``
    from above as the drive vanishes, so targets at or below that infimum are
    unreachable.

    Raises
    ------
    UnreachableRatioError
        If ``target_ratio <= 2 gamma2 / gamma1``.
    """
    floor = 2.0 * gamma2 / gamma1
    if target_ratio <= floor:
        raise UnreachableRatioError(
            f"ratio {target_ratio} not reachable; must exceed {floor}"
        )
    w2 = (target_ratio * gamma1 / (2.0 * gamma2) - 1.0) * gamma1 * (
        gamma2 * gamma2 + detuning * detuning
    ) / gamma2
    return math.sqrt(w2)


def entanglement_rabi_bound(
    n_atoms: int,
    gamma1: float = 1.0,
    gamma2: float = 0.5,
    detuning: float = 0.0,
) -> float | None:
    """Largest Rabi frequency below which N-atom emission stays entangled.

    Returns ``sqrt(((N+1)/2 * g1^2/g2^2 - g1/g2) * (g2^2 + d^2))`` when the
    radicand is positive, otherwise ``None``: for
    ``gamma2/gamma1 >= (N+1)/2`` no driving strength yields entanglement.
    """
    if n_atoms < 1:
        raise InvalidParametersError("n_atoms must be >= 1")
    AtomParameters(gamma1=gamma1, gamma2=gamma2, detuning=detuning)
    rhs = ((n_atoms + 1) / 2.0 * gamma1 * gamma1 / (gamma2 * gamma2) - gamma1 / gamma2) * (
        gamma2 * gamma2 + detuning * detuning
    )
    if rhs <= 0.0:
        return None
    return math.sqrt(rhs)


@dataclass(frozen=True)
class BlochTrajectory:
    """Time-resolved solution of the single-atom Bloch equations."""

    times: np.ndarray
    sigma22: np.ndarray
    sigma21: np.ndarray

    @property
    def final(self) -> AtomicSteadyState:
        return AtomicSteadyState(
            sigma22=float(self.sigma22[-1]), sigma21=complex(self.sigma21[-1])
        )


def bloch_integrate(
    params: AtomParameters,
    initial: tuple[float, complex] = (0.0, 0.0),
    horizon: float = 100.0,
    n_report: int = 201,
) -> BlochTrajectory:
    """Integrate the Bloch equations; verification oracle for steady_state.

    Solves

        d sigma21/dt = (i d - g2) sigma21 - i (W/2) (1 - 2 sigma22)
        d sigma22/dt = -g1 sigma22 - W Im sigma21

    with adaptive high-order stepping (local error well below 1e-10). The
    dynamics are contractive, so the state at ``horizon >= 50/gamma1``
    matches the closed form to 1e-9 absolute.

    Raises
    ------
    NoConvergenceError
        If the trajectory leaves the physical region (integrator failure;
        the flow itself cannot).
    """
    s22_0, s21_0 = initial
    if not (0.0 <= s22_0 <= 1.0) or abs(s21_0) ** 2 > s22_0 * (1 - s22_0) + 1e-12:
        raise InvalidParametersError("initial state violates positivity")
    g1, g2, w, d = params.gamma1, params.gamma2, params.rabi, params.detuning

    def rhs(_t, y):
        s22, re21, im21 = y
        ds22 = -g1 * s22 - w * im21
        # complex RHS split into real and imaginary parts
        dre = -d * im21 - g2 * re21
        dim = d * re21 - g2 * im21 - (w / 2.0) * (1.0 - 2.0 * s22)
        return (ds22, dre, dim)

    y0 = (s22_0, s21_0.real, s21_0.imag)
    t_eval = np.linspace(0.0, horizon, n_report)
    sol = solve_ivp(
        rhs, (0.0, horizon), y0, method="DOP853", rtol=1e-12, atol=1e-12, t_eval=t_eval
    )
    if not sol.success:
        raise NoConvergenceError(f"integrator failed: {sol.message}")
    s22 = sol.y[0]
    s21 = sol.y[1] + 1j * sol.y[2]
    if not np.all(np.isfinite(s22)) or np.max(np.abs(s21)) > 1.0 or np.max(s22) > 1.0:
        raise NoConvergenceError("trajectory left the physical region")
    return BlochTrajectory(times=sol.t, sigma22=s22, sigma21=s21)
