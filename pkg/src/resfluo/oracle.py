"""Brute-force verification backend on the full joint space.

Everything here is deliberately independent of the moment engine: amplitudes
are explicit (sparse) operators on the 2^N product space and expectations are
traces against the factored product state. Intended for tests and spot
checks, with a hard cap at 12 atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .atoms import AtomicSteadyState
from .correlations import MomentSpec
from .errors import InvalidParametersError, TooLargeError
from .geometry import PhaseSums, SceneGeometry, emission_vector, phase_factors
from .witness import assemble_minor

MAX_ATOMS = 12


@dataclass(frozen=True)
class JointState:
    """Product state of N identical atoms, kept in factored form."""

    n_atoms: int
    factor: np.ndarray  # single-atom 2x2 density matrix, basis (ground, excited)

    def density_matrix(self) -> np.ndarray:
        """Dense joint density matrix (atom 0 on the most significant bit)."""
        rho = np.array([[1.0 + 0j]])
        for _ in range(self.n_atoms):
            rho = np.kron(rho, self.factor)
        return rho


def build_joint_state(state: AtomicSteadyState, n_atoms: int) -> JointState:
    """Assemble the joint product state and assert its invariants.

    Raises
    ------
    TooLargeError
        For more than 12 atoms.
    """
    if n_atoms < 1:
        raise InvalidParametersError("n_atoms must be >= 1")
    if n_atoms > MAX_ATOMS:
        raise TooLargeError(f"joint space capped at {MAX_ATOMS} atoms")
    s22 = state.sigma22
    s21 = complex(state.sigma21)
    factor = np.array([[1.0 - s22, s21.conjugate()], [s21, s22]], dtype=complex)
    if abs(np.trace(factor).real - 1.0) > 1e-14:
        raise InvalidParametersError("single-atom state is not normalized")
    # PSD of the product state follows from PSD of the factor
    eig = np.linalg.eigvalsh(factor)
    if eig.min() < -1e-12:
        raise InvalidParametersError("single-atom state is not positive")
    return JointState(n_atoms=n_atoms, factor=factor)


def _lowering_amplitude(n_atoms: int, phase_col: np.ndarray) -> sp.csr_matrix:
    """A = sum_k exp(i phi_k) L_k as an explicit sparse operator.

    Basis index bit n_atoms-1-k holds atom k (matching the Kronecker order
    of ``density_matrix``); bit value 1 means excited.
    """
    dim = 1 << n_atoms
    idx = np.arange(dim)
    rows, cols, vals = [], [], []
    for k in range(n_atoms):
        mask = 1 << (n_atoms - 1 - k)
        excited = idx[(idx & mask) != 0]
        rows.append(excited ^ mask)
        cols.append(excited)
        vals.append(np.full(excited.size, np.exp(1j * phase_col[k]), dtype=complex))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def _expectation(joint: JointState, op: sp.spmatrix) -> complex:
    """Tr(rho op) using the factored state, never materializing rho."""
    coo = op.tocoo()
    if coo.nnz == 0:
        return 0j
    prod = coo.data.astype(complex, copy=True)
    # rho[col, row] = prod_k factor[bit_k(col), bit_k(row)]
    for k in range(joint.n_atoms):
        shift = joint.n_atoms - 1 - k
        rb = (coo.col >> shift) & 1
        cb = (coo.row >> shift) & 1
        prod *= joint.factor[rb, cb]
    return complex(prod.sum())


def _amplitude_operators(joint: JointState, phases: PhaseSums):
    a1 = _lowering_amplitude(joint.n_atoms, phases.phases[:, 0])
    a2 = _lowering_amplitude(joint.n_atoms, phases.phases[:, 1])
    return a1, a2


def oracle_moment(joint: JointState, phases: PhaseSums, spec: MomentSpec) -> complex:
    """<A1+^p A2+^q A1^r A2^s> by explicit operator products."""
    if phases.n_atoms != joint.n_atoms:
        raise InvalidParametersError("phase table does not match atom count")
    a1, a2 = _amplitude_operators(joint, phases)
    dim = 1 << joint.n_atoms
    op = sp.identity(dim, format="csr", dtype=complex)
    a1h = a1.conjugate().transpose().tocsr()
    a2h = a2.conjugate().transpose().tocsr()
    for _ in range(spec.p):
        op = op @ a1h
    for _ in range(spec.q):
        op = op @ a2h
    for _ in range(spec.r):
        op = op @ a1
    for _ in range(spec.s):
        op = op @ a2
    return _expectation(joint, op)


def oracle_minor(joint: JointState, scene: SceneGeometry) -> float:
    """Witness determinant evaluated entirely from operator traces."""
    phases = phase_factors(scene)
    a1, a2 = _amplitude_operators(joint, phases)
    a1h = a1.conjugate().transpose().tocsr()
    a2h = a2.conjugate().transpose().tocsr()
    c1 = _expectation(joint, a1)
    c2 = _expectation(joint, a2)
    m11 = _expectation(joint, a1h @ a1)
    m22 = _expectation(joint, a2h @ a2)
    m12 = _expectation(joint, a1h @ a2)
    m21 = _expectation(joint, a2h @ a1)
    g1 = emission_vector(scene.detector_directions[0], scene.dipole_direction)
    g2 = emission_vector(scene.detector_directions[1], scene.dipole_direction)
    return assemble_minor(
        float(g1 @ g1), float(g2 @ g2), float(g1 @ g2), c1, c2, m11, m12, m21, m22
    )
