"""Linear ion chain: Coulomb equilibria, position uncertainty, jitter.

The axial potential is harmonic plus pairwise Coulomb repulsion. In the
dimensionless form used here an ion at u_m balances

    u_m = sum_{n<m} (u_m - u_n)^-2  -  sum_{n>m} (u_n - u_m)^-2

and physical positions are z_m = gamma * u_m for an externally controlled
length scale gamma. The ground-state position spread of each ion is bounded
by

    delta_z = (4 pi eps0 hbar^2 gamma^3 / (M Q^2))^(1/4)

which grows as gamma^(3/4) and caps the usable chain scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParametersError, NoConvergenceError

# SI constants, pinned (exact elementary charge; CODATA hbar; 4*pi*eps0)
E_CHARGE = 1.602176634e-19
HBAR = 1.054571817e-34
FOUR_PI_EPS0 = 1.11265006e-10

MAX_IONS = 64


def force_residual(u: np.ndarray) -> np.ndarray:
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    return u - (np.sign(diff) / diff**2).sum(axis=1)


def chain_energy(u: np.ndarray) -> float:
    """Dimensionless potential (harmonic plus pairwise repulsion), ordered u."""
    diff = u[None, :] - u[:, None]
    iu = np.triu_indices(len(u), 1)
    return 0.5 * float(np.dot(u, u)) + float(np.sum(1.0 / diff[iu]))


def equilibrium_positions(n_ions: int, tol: float = 1e-12) -> np.ndarray:
    """Dimensionless equilibrium positions, strictly increasing.

    Damped Newton iteration from a uniformly spaced guess. The potential is
    strictly convex on the ordered cone (the Hessian is strictly diagonally
    dominant), so a step is accepted when it keeps the ordering and lowers
    either the energy or the residual norm: energy descent carries the far
    field, residual descent the quadratic endgame where energy differences
    drop below float resolution.

    The residual floor itself is roundoff-limited near n*eps, which is why
    the default tolerance is 1e-12 rather than tighter.

    Raises
    ------
    NoConvergenceError
        If the residual target is not met within the iteration budget.
    """
    if not 1 <= n_ions <= MAX_IONS:
        raise InvalidParametersError(f"n_ions must be in [1, {MAX_IONS}]")
    if n_ions == 1:
        return np.zeros(1)
    u = np.linspace(-(n_ions - 1) / 2, (n_ions - 1) / 2, n_ions) * 1.2
    e = chain_energy(u)
    fnorm = float(np.linalg.norm(force_residual(u)))
    for _ in range(400):
        f = force_residual(u)
        if np.max(np.abs(f)) < tol:
            return u
        diff = u[:, None] - u[None, :]
        np.fill_diagonal(diff, np.inf)
        inv3 = 2.0 / np.abs(diff) ** 3
        jac = np.diag(1.0 + inv3.sum(axis=1)) - inv3
        step = np.linalg.solve(jac, f)
        t = 1.0
        accepted = False
        for _ in range(80):
            cand = u - t * step
            if np.all(np.diff(cand) > 0):
                ec = chain_energy(cand)
                fc = float(np.linalg.norm(force_residual(cand)))
                if ec < e or fc < fnorm:
                    u, e, fnorm = cand, ec, fc
                    accepted = True
                    break
            t /= 2.0
        if not accepted:
            break
    if np.max(np.abs(force_residual(u))) < tol:
        return u
    raise NoConvergenceError(f"equilibrium solve stalled for n_ions={n_ions}")


def position_uncertainty(gamma_m: float, mass_kg: float, charge_c: float) -> float:
    """Ion position spread delta_z in meters for chain scale ``gamma_m``."""
    if gamma_m <= 0 or mass_kg <= 0 or charge_c <= 0:
        raise InvalidParametersError("gamma, mass and charge must be positive")
    return (FOUR_PI_EPS0 * HBAR**2 * gamma_m**3 / (mass_kg * charge_c**2)) ** 0.25


def max_scale(
    mass_kg: float,
    charge_c: float,
    wavelength_m: float,
    jitter_cap_lambda: float = 0.1,
) -> float:
    """Largest gamma (units of wavelength) with delta_z <= cap * wavelength.

    Closed-form inversion of the delta_z power law.
    """
    coeff = position_uncertainty(wavelength_m, mass_kg, charge_c) / wavelength_m
    return (jitter_cap_lambda / coeff) ** (4.0 / 3.0)


@dataclass(frozen=True)
class IonChain:
    """A scaled Coulomb chain with its position-uncertainty budget.

    ``scale_lambda`` is gamma in units of the wavelength; ``positions`` are
    the dimensionless equilibria; ``delta_z_m`` / ``delta_z_lambda`` give the
    per-ion spread at this scale.
    """

    count: int
    scale_lambda: float
    positions: np.ndarray
    mass_kg: float
    charge_c: float
    wavelength_m: float
    delta_z_m: float
    delta_z_lambda: float


def build_chain(
    n_ions: int,
    scale_lambda: float,
    mass_kg: float,
    charge_e: float = 1.0,
    wavelength_m: float = 1.942e-7,
) -> IonChain:
    """Solve the chain at a given scale and attach its jitter bound."""
    positions = equilibrium_positions(n_ions)
    charge_c = charge_e * E_CHARGE
    dz_m = position_uncertainty(scale_lambda * wavelength_m, mass_kg, charge_c)
    return IonChain(
        count=n_ions,
        scale_lambda=scale_lambda,
        positions=positions,
        mass_kg=mass_kg,
        charge_c=charge_c,
        wavelength_m=wavelength_m,
        delta_z_m=dz_m,
        delta_z_lambda=dz_m / wavelength_m,
    )


def draw_axial_offsets(
    rng: np.random.Generator, n: int, delta_z: float, distribution: str = "uniform"
) -> np.ndarray:
    """Per-ion axial deviations bounded by ``delta_z``.

    ``uniform``: flat on [-delta_z, +delta_z]. ``tgauss``: normal with
    sigma = delta_z / 2, redrawn until inside the bound.
    """
    if delta_z == 0:
        return np.zeros(n)
    if distribution == "uniform":
        return rng.uniform(-delta_z, delta_z, size=n)
    if distribution == "tgauss":
        out = rng.normal(0.0, delta_z / 2.0, size=n)
        bad = np.abs(out) > delta_z
        while bad.any():
            out[bad] = rng.normal(0.0, delta_z / 2.0, size=int(bad.sum()))
            bad = np.abs(out) > delta_z
        return out
    raise InvalidParametersError(f"unknown jitter distribution {distribution!r}")


def sample_jittered_positions(
    chain: IonChain,
    distribution: str = "uniform",
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """One draw of jittered ion positions as (N, 3) vectors in wavelength units.

    Deviations act along z only. A fresh generator is derived from ``seed``
    unless an explicit ``rng`` is supplied.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    delta = draw_axial_offsets(rng, chain.count, chain.delta_z_lambda, distribution)
    out = np.zeros((chain.count, 3))
    out[:, 2] = chain.scale_lambda * chain.positions + delta
    return out
