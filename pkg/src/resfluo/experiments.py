"""Experiment campaigns built on the lower modules.

Covers the angle scan of the normalized minor, the trap-scale optimizer, the
jitter Monte Carlo with its relative-negativity report, random-position
ensembles, and the threshold map. All stochastic steps draw sample i from a
generator seeded by (base seed, i), so results are independent of worker
scheduling, and aggregation uses compensated summation over the index-ordered
buffer.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atoms import AtomicSteadyState, entanglement_rabi_bound
from .config import ExperimentConfig
from .errors import ConfigError, VerificationError, ZeroIdealMinorError
from .geometry import SceneGeometry, detector_in_plane, phase_factors
from .kernels import minor_batch, scene_coefficients
from .oracle import MAX_ATOMS, build_joint_state, oracle_minor
from .trap import (
    E_CHARGE,
    draw_axial_offsets,
    equilibrium_positions,
    position_uncertainty,
)
from .witness import minor_mu

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

# two-sided 99% normal quantile
_Z99 = 2.5758293035489004


def golden_section(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Minimize a unimodal scalar function on [a, b]; returns the midpoint."""
    h = b - a
    c, d = a + INV_PHI2 * h, a + INV_PHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
    return (a + b) / 2.0


def scene_from_positions(config: ExperimentConfig, positions, phi2: float) -> SceneGeometry:
    return SceneGeometry(
        atom_positions=np.asarray(positions, dtype=float),
        laser_direction=config.laser,
        dipole_direction=config.dipole,
        detector_directions=(config.detector1, detector_in_plane(phi2)),
        wavelength=1.0,
    )


def chain_positions(config: ExperimentConfig, n_atoms: int) -> np.ndarray:
    """Ideal positions for one scene: regular chain or scaled trap chain."""
    out = np.zeros((n_atoms, 3))
    if config.trap_mode:
        out[:, 2] = config.trap_scale_lambda * equilibrium_positions(n_atoms)
    else:
        out[:, 2] = config.spacing_lambda * np.arange(n_atoms)
    return out


def _verify_against_oracle(scene: SceneGeometry, state, mu_full: float) -> None:
    """Re-check one emitted minor against the brute-force backend."""
    if scene.n_atoms > 6:
        return
    joint = build_joint_state(state, scene.n_atoms)
    reference = oracle_minor(joint, scene)
    scale = max(abs(reference), abs(mu_full), 1e-12)
    if abs(reference - mu_full) > 1e-10 * scale:
        raise VerificationError(
            f"minor {mu_full!r} disagrees with brute-force value {reference!r}"
        )


@dataclass(frozen=True)
class AngleScan:
    """Normalized minor over the second-detector angle, one column per N."""

    phi2: np.ndarray
    n_values: tuple[int, ...]
    columns: dict[int, np.ndarray]


def run_angle_scan(config: ExperimentConfig, verify: bool = False) -> AngleScan:
    state = config.state()
    grid = np.linspace(config.phi2_start, config.phi2_stop, config.phi2_steps)
    columns: dict[int, np.ndarray] = {}
    for n in config.n_atoms:
        base = chain_positions(config, n)
        vals = np.empty(grid.size)
        for i, phi2 in enumerate(grid):
            scene = scene_from_positions(config, base, float(phi2))
            ev = minor_mu(scene, state)
            vals[i] = ev.mu_normalized
            if verify and not ev.degenerate:
                _verify_against_oracle(scene, state, ev.mu_full)
        columns[n] = vals
    return AngleScan(phi2=grid, n_values=tuple(config.n_atoms), columns=columns)


@dataclass(frozen=True)
class ScaleOptimum:
    """Best trap scale found on the search interval."""

    gamma_star: float
    mu_ideal: float


def optimize_scale(
    u: np.ndarray,
    state: AtomicSteadyState,
    dipole,
    laser,
    detector1,
    detector2,
    gamma_min: float,
    gamma_max: float,
) -> ScaleOptimum:
    """Minimize the ideal (jitter-free) minor over the chain scale.

    Dense grid whose step keeps the largest per-ion phase change below
    1/200 of a cycle, followed by golden-section refinement of every local
    basin within 1% of the grid minimum. Ties within 1e-9 relative resolve
    to the smallest scale (smallest position uncertainty).
    """
    if not (gamma_min < gamma_max):
        raise ConfigError("scale search interval is empty")
    n = u.size
    wd1, wd2, c0, c12, cs = scene_coefficients(
        n, state, dipole, laser, detector1, detector2
    )

    def mu_of(gammas: np.ndarray) -> np.ndarray:
        pos = np.zeros((gammas.size, n, 3))
        pos[:, :, 2] = gammas[:, None] * u[None, :]
        return minor_batch(pos, wd1, wd2, c0, c12, cs)

    umax = float(np.abs(u).max())
    if umax == 0.0:
        return ScaleOptimum(gamma_star=gamma_min, mu_ideal=float(mu_of(np.array([gamma_min]))[0]))

    step = 1.0 / (200.0 * umax)
    grid = np.arange(gamma_min, gamma_max, step)
    grid = np.append(grid, gamma_max)
    vals = mu_of(grid)
    vmin = float(vals.min())
    band = vmin + 0.01 * abs(vmin)

    candidates = []
    for i in range(grid.size):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < grid.size - 1 else math.inf
        if vals[i] <= left and vals[i] <= right and vals[i] <= band:
            candidates.append(i)
    if not candidates:
        candidates = [int(np.argmin(vals))]

    def mu_scalar(g: float) -> float:
        return float(mu_of(np.array([g]))[0])

    best: tuple[float, float] | None = None
    for i in candidates:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, grid.size - 1)]
        g_star = golden_section(mu_scalar, float(a), float(b))
        v = mu_scalar(g_star)
        if best is None or v < best[1] - 1e-9 * abs(best[1]):
            best = (g_star, v)
    return ScaleOptimum(gamma_star=best[0], mu_ideal=best[1])


@dataclass(frozen=True)
class McReport:
    """Aggregate of one jitter campaign."""

    n_atoms: int
    samples: int
    mean_mu: float
    stderr_mu: float
    mean_mu_normalized: float
    relative_negativity: float
    quantile_05: float
    quantile_95: float
    gamma_star: float
    ideal_mu: float
    delta_z_lambda: float
    distribution: str
    seed: int

    def as_dict(self) -> dict:
        return {
            "n_atoms": self.n_atoms,
            "samples": self.samples,
            "mean_mu": self.mean_mu,
            "stderr_mu": self.stderr_mu,
            "mean_mu_normalized": self.mean_mu_normalized,
            "relative_negativity": self.relative_negativity,
            "quantile_05": self.quantile_05,
            "quantile_95": self.quantile_95,
            "gamma_star": self.gamma_star,
            "ideal_mu": self.ideal_mu,
            "delta_z_lambda": self.delta_z_lambda,
            "distribution": self.distribution,
            "seed": self.seed,
        }


def _chunk_bounds(total: int, workers: int) -> list[tuple[int, int]]:
    size = -(-total // workers)
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def run_monte_carlo(
    config: ExperimentConfig, workers: int = 1, verify: bool = False
) -> McReport:
    """Jitter campaign at the optimized scale.

    The scale is optimized on ideal positions first; jitter is then applied
    at that fixed scale, bounded by the position uncertainty the scale
    implies. Relative negativity R is the mean jittered minor over the ideal
    minor, defined whenever the ideal minor is nonzero.
    """
    n = config.single_n()
    seed = config.require_seed()
    state = config.state()
    u = equilibrium_positions(n)
    e2 = detector_in_plane(config.phi2_rad)
    opt = optimize_scale(
        u, state, config.dipole, config.laser, config.detector1, e2,
        config.gamma_min_lambda, config.gamma_max_lambda,
    )
    wd1, wd2, c0, c12, cs = scene_coefficients(
        n, state, config.dipole, config.laser, config.detector1, e2
    )
    if abs(opt.mu_ideal) <= 1e-12 * max(abs(c0), 1e-300):
        raise ZeroIdealMinorError("ideal minor vanishes; relative negativity undefined")

    charge_c = config.charge_e * E_CHARGE
    dz_lambda = (
        position_uncertainty(opt.gamma_star * config.wavelength_m, config.mass_kg, charge_c)
        / config.wavelength_m
    )

    total = config.mc_samples
    ideal_z = opt.gamma_star * u
    mu = np.empty(total)

    def fill(bounds: tuple[int, int]) -> None:
        lo, hi = bounds
        z = np.empty((hi - lo, n))
        for i in range(lo, hi):
            rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
            z[i - lo] = ideal_z + draw_axial_offsets(
                rng, n, dz_lambda, config.mc_distribution
            )
        pos = np.zeros((hi - lo, n, 3))
        pos[:, :, 2] = z
        mu[lo:hi] = minor_batch(pos, wd1, wd2, c0, c12, cs)

    bounds = _chunk_bounds(total, max(1, workers))
    if len(bounds) == 1:
        fill(bounds[0])
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            list(pool.map(fill, bounds))

    if verify:
        _verify_mc_subset(config, state, ideal_z, mu, seed, dz_lambda)

    mean = math.fsum(mu) / total
    if total > 1:
        var = math.fsum((x - mean) ** 2 for x in mu) / (total - 1)
        stderr = math.sqrt(var / total)
    else:
        stderr = 0.0
    q05, q95 = np.quantile(mu, [0.05, 0.95])
    norm = n * n * state.sigma22 * state.sigma22
    return McReport(
        n_atoms=n,
        samples=total,
        mean_mu=mean,
        stderr_mu=stderr,
        mean_mu_normalized=mean / norm,
        relative_negativity=mean / opt.mu_ideal,
        quantile_05=float(q05),
        quantile_95=float(q95),
        gamma_star=opt.gamma_star,
        ideal_mu=opt.mu_ideal,
        delta_z_lambda=dz_lambda,
        distribution=config.mc_distribution,
        seed=seed,
    )


def _verify_mc_subset(config, state, ideal_z, mu, seed, dz_lambda, count: int = 16):
    """Re-evaluate a fixed prefix of samples through the full witness path."""
    n = ideal_z.size
    if n > 6:
        return
    for i in range(min(count, mu.size)):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        z = ideal_z + draw_axial_offsets(rng, n, dz_lambda, config.mc_distribution)
        pos = np.zeros((n, 3))
        pos[:, 2] = z
        scene = scene_from_positions(config, pos, config.phi2_rad)
        ev = minor_mu(scene, state)
        scale = max(abs(ev.mu_full), abs(mu[i]), 1e-12)
        if abs(ev.mu_full - mu[i]) > 1e-9 * scale:
            raise VerificationError(f"sample {i} kernel/witness mismatch")
        _verify_against_oracle(scene, state, ev.mu_full)


@dataclass(frozen=True)
class EnsembleReport:
    """Minor statistics over uniformly random atom placements."""

    n_atoms: int
    samples: int
    box_lambda: float
    mean_mu: float
    stderr_mu: float
    ci99_low: float
    ci99_high: float
    regular_mu: float
    seed: int

    def as_dict(self) -> dict:
        return {
            "n_atoms": self.n_atoms,
            "samples": self.samples,
            "box_lambda": self.box_lambda,
            "mean_mu": self.mean_mu,
            "stderr_mu": self.stderr_mu,
            "ci99_low": self.ci99_low,
            "ci99_high": self.ci99_high,
            "regular_mu": self.regular_mu,
            "seed": self.seed,
        }


def run_random_ensemble(config: ExperimentConfig, verify: bool = False) -> EnsembleReport:
    """Minor statistics over atoms placed uniformly in a cube.

    The phase sums of random placements average out, so the ensemble mean is
    dominated by the positive diagonal term; the regular zero-phase value at
    the same parameters is reported alongside for contrast.
    """
    n = config.single_n()
    seed = config.require_seed()
    state = config.state()
    total = config.ensemble_samples
    half = config.box_lambda / 2.0
    e2 = detector_in_plane(config.phi2_rad)
    wd1, wd2, c0, c12, cs = scene_coefficients(
        n, state, config.dipole, config.laser, config.detector1, e2
    )
    positions = np.empty((total, n, 3))
    for i in range(total):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        positions[i] = rng.uniform(-half, half, size=(n, 3))
    mu = minor_batch(positions, wd1, wd2, c0, c12, cs)
    if verify:
        for i in range(min(16, total)):
            scene = scene_from_positions(config, positions[i], config.phi2_rad)
            _verify_against_oracle(scene, state, float(mu[i]))
    mean = math.fsum(mu) / total
    var = math.fsum((x - mean) ** 2 for x in mu) / (total - 1) if total > 1 else 0.0
    stderr = math.sqrt(var / total)
    # zero-phase reference: every interference sum reaches its maximum N
    regular = c0 - c12 * n * n - cs * float(n) ** 4
    return EnsembleReport(
        n_atoms=n,
        samples=total,
        box_lambda=config.box_lambda,
        mean_mu=mean,
        stderr_mu=stderr,
        ci99_low=mean - _Z99 * stderr,
        ci99_high=mean + _Z99 * stderr,
        regular_mu=regular,
        seed=seed,
    )


@dataclass(frozen=True)
class ThresholdRow:
    n_atoms: int
    gamma2: float
    detuning: float
    rabi_max: float | None
    entangled_possible: bool
    squeezed_possible: bool


def run_threshold_map(config: ExperimentConfig) -> list[ThresholdRow]:
    """Entanglement drive bound and squeezing feasibility over a grid."""
    rows = []
    for n in config.thresh_n:
        for g2 in config.thresh_gamma2:
            for det in config.thresh_detuning:
                bound = entanglement_rabi_bound(n, config.gamma1, g2, det)
                rows.append(
                    ThresholdRow(
                        n_atoms=n,
                        gamma2=g2,
                        detuning=det,
                        rabi_max=bound,
                        entangled_possible=bound is not None,
                        squeezed_possible=g2 / config.gamma1 < 1.0,
                    )
                )
    return rows


def verify_spot_checks(config: ExperimentConfig, seed: int = 0, trials: int = 25) -> dict:
    """Random-scene agreement between the engine and the brute-force backend.

    Returns the worst relative deviations for minors and for moments of
    order up to 4. Used by the CLI verify subcommand.
    """
    from .correlations import MomentSpec, moment
    from .oracle import oracle_moment

    state = config.state()
    rng = np.random.default_rng(seed)
    worst_minor = 0.0
    worst_moment = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        positions = rng.uniform(-config.box_lambda / 2, config.box_lambda / 2, size=(n, 3))
        phi2 = float(rng.uniform(0, 2 * np.pi))
        scene = scene_from_positions(config, positions, phi2)
        ev = minor_mu(scene, state)
        if not ev.degenerate and n <= MAX_ATOMS:
            joint = build_joint_state(state, n)
            ref = oracle_minor(joint, scene)
            scale = max(abs(ref), abs(ev.mu_full), 1e-12)
            worst_minor = max(worst_minor, abs(ref - ev.mu_full) / scale)
            phases = phase_factors(scene)
            for _ in range(4):
                powers = rng.integers(0, 3, size=4)
                if powers.sum() == 0 or powers.sum() > 4:
                    continue
                spec = MomentSpec(*(int(v) for v in powers))
                engine = moment(phases, state, spec)
                ref_m = oracle_moment(joint, phases, spec)
                scale = max(abs(ref_m), abs(engine), 1e-12)
                worst_moment = max(worst_moment, abs(ref_m - engine) / scale)
    return {"worst_minor_rel": worst_minor, "worst_moment_rel": worst_moment}
