"""Spatial scene, dipole pattern vectors, and interference phase sums.

Positions are stored in units of the driving wavelength. With that choice the
interference phase of atom n toward detector j is

    phi_j^(n) = 2 pi (k_laser - e_j) . r^(n)

and constant per-detector offsets are dropped (they cancel in every modulus
that enters the witness).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePatternError, InvalidParametersError

_UNIT_TOL = 1e-12

AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "-x": (-1.0, 0.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "-z": (0.0, 0.0, -1.0),
}


def _as_unit(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidParametersError(f"{name} must be a finite 3-vector")
    if abs(np.linalg.norm(arr) - 1.0) > _UNIT_TOL:
        raise InvalidParametersError(f"{name} must have unit norm")
    return arr


@dataclass(frozen=True)
class SceneGeometry:
    """Atoms plus laser, dipole, and detector directions.

    Attributes
    ----------
    atom_positions : (N, 3) array
        Positions in units of the wavelength.
    laser_direction, dipole_direction : unit 3-vectors
    detector_directions : pair of unit 3-vectors
    wavelength : float
        Physical wavelength in meters, kept only for dimensional output;
        all geometry is dimensionless.
    """

    atom_positions: np.ndarray
    laser_direction: np.ndarray
    dipole_direction: np.ndarray
    detector_directions: tuple[np.ndarray, np.ndarray]
    wavelength: float = 1.0

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.atom_positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise InvalidParametersError("atom_positions must be an (N, 3) array")
        if not np.all(np.isfinite(pos)):
            raise InvalidParametersError("atom positions must be finite")
        object.__setattr__(self, "atom_positions", pos)
        object.__setattr__(
            self, "laser_direction", _as_unit(self.laser_direction, "laser_direction")
        )
        object.__setattr__(
            self, "dipole_direction", _as_unit(self.dipole_direction, "dipole_direction")
        )
        d1, d2 = self.detector_directions
        object.__setattr__(
            self,
            "detector_directions",
            (_as_unit(d1, "detector 1"), _as_unit(d2, "detector 2")),
        )

    @property
    def n_atoms(self) -> int:
        return self.atom_positions.shape[0]


@dataclass(frozen=True)
class EmissionVectors:
    """Pattern vectors of the two detectors and the angle between them."""

    g1: np.ndarray
    g2: np.ndarray
    theta: float


@dataclass(frozen=True)
class PhaseSums:
    """Per-atom interference phases and the sums the witness consumes.

    ``phases[n, j]`` is phi of atom n toward detector j; ``s1``, ``s2`` are
    sum_n exp(i phi_j^(n)) and ``s12 = sum_n exp(i (phi_1^(n) - phi_2^(n)))``.
    """

    phases: np.ndarray
    s1: complex = field(init=False)
    s2: complex = field(init=False)
    s12: complex = field(init=False)

    def __post_init__(self):
        ph = np.atleast_2d(np.asarray(self.phases, dtype=float))
        if ph.ndim != 2 or ph.shape[1] != 2:
            raise InvalidParametersError("phases must be an (N, 2) array")
        object.__setattr__(self, "phases", ph)
        e = np.exp(1j * ph)
        object.__setattr__(self, "s1", complex(e[:, 0].sum()))
        object.__setattr__(self, "s2", complex(e[:, 1].sum()))
        object.__setattr__(
            self, "s12", complex(np.exp(1j * (ph[:, 0] - ph[:, 1])).sum())
        )

    @property
    def n_atoms(self) -> int:
        return self.phases.shape[0]

    def doubled_sum(self, detector: int) -> complex:
        """sum_n exp(2 i phi_j^(n)) for detector j in {1, 2}."""
        return complex(np.exp(2j * self.phases[:, detector - 1]).sum())


def emission_vector(detector_dir, dipole_dir) -> np.ndarray:
    """Far-field dipole pattern vector g = d - (d.e) e.

    Satisfies |g|^2 = 1 - (d.e)^2; the zero vector (detector on the dipole
    axis) is a legal degenerate output.
    """
    e = _as_unit(detector_dir, "detector_dir")
    d = _as_unit(dipole_dir, "dipole_dir")
    return d - (d @ e) * e


def pattern_angle(g1, g2) -> float:
    """Angle between two pattern vectors, in [0, pi].

    Raises
    ------
    DegeneratePatternError
        If either vector has norm below 1e-12.
    """
    a = np.asarray(g1, dtype=float)
    b = np.asarray(g2, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-12 or nb < 1e-12:
        raise DegeneratePatternError("pattern vector vanishes; angle undefined")
    c = float(a @ b) / (na * nb)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def emission_pair(scene: SceneGeometry) -> EmissionVectors:
    """Pattern vectors for both detectors of a scene (may raise degenerate)."""
    g1 = emission_vector(scene.detector_directions[0], scene.dipole_direction)
    g2 = emission_vector(scene.detector_directions[1], scene.dipole_direction)
    return EmissionVectors(g1=g1, g2=g2, theta=pattern_angle(g1, g2))


def phase_factors(scene: SceneGeometry) -> PhaseSums:
    """Interference phases and their sums for all atoms and both detectors."""
    k = scene.laser_direction
    phases = np.empty((scene.n_atoms, 2))
    for j, e in enumerate(scene.detector_directions):
        phases[:, j] = 2.0 * np.pi * (scene.atom_positions @ (k - e))
    return PhaseSums(phases=phases)


def detector_in_plane(phi2: float) -> np.ndarray:
    """Second-detector direction at angle phi2 in the x-y plane."""
    return np.array([np.cos(phi2), np.sin(phi2), 0.0])


def chain_scene(
    n_atoms: int,
    spacing: float,
    phi2: float,
    dipole="x",
    laser="z",
    detector1="y",
    wavelength: float = 1.0,
) -> SceneGeometry:
    """Linear chain along z at z_n = spacing * n with detectors in the x-y plane."""
    positions = np.zeros((n_atoms, 3))
    positions[:, 2] = spacing * np.arange(n_atoms)
    return positioned_scene(positions, phi2, dipole, laser, detector1, wavelength)


def direction(spec) -> np.ndarray:
    """Resolve an axis name ('x', '-z', ...) or explicit 3-vector."""
    if isinstance(spec, str):
        try:
            return np.asarray(AXES[spec], dtype=float)
        except KeyError:
            raise InvalidParametersError(f"unknown axis name {spec!r}") from None
    return np.asarray(spec, dtype=float)


def positioned_scene(
    positions, phi2: float, dipole="x", laser="z", detector1="y", wavelength: float = 1.0
) -> SceneGeometry:
    """Scene from explicit positions; directions given as axis names or vectors."""
    return SceneGeometry(
        atom_positions=np.asarray(positions, dtype=float),
        laser_direction=direction(laser),
        dipole_direction=direction(dipole),
        detector_directions=(direction(detector1), detector_in_plane(phi2)),
        wavelength=wavelength,
    )
