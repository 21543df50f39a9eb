"""Brute-force joint-state backend used to cross-check the moment engine.

The oracle builds the product state explicitly and evaluates operator
expectations by factored traces over sparse amplitude operators. It shares no
algebra with the per-atom dynamic program, which is what makes the agreement
checks meaningful.
"""

import numpy as np
import pytest

from resfluo import (
    AtomParameters,
    MomentSpec,
    build_joint_state,
    minor_mu,
    moment,
    oracle_minor,
    oracle_moment,
    positioned_scene,
    rabi_for_ratio,
    steady_state,
)
from resfluo.geometry import PhaseSums
from resfluo.errors import TooLargeError


@pytest.fixture(scope="module")
def workhorse():
    return steady_state(AtomParameters(rabi=rabi_for_ratio(3.5)))


def test_density_matrix_is_a_state(workhorse):
    for n in (1, 2, 3):
        rho = build_joint_state(workhorse, n).density_matrix()
        assert rho.shape == (2**n, 2**n)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(rho, rho.conj().T)
        assert np.linalg.eigvalsh(rho).min() > -1e-14


def test_size_cap():
    st = steady_state(AtomParameters(rabi=1.0))
    with pytest.raises(TooLargeError):
        build_joint_state(st, 13)


def test_single_atom_intensity(workhorse):
    joint = build_joint_state(workhorse, 1)
    ph = PhaseSums(phases=np.array([[0.4, -1.1]]))
    got = oracle_moment(joint, ph, MomentSpec(1, 0, 1, 0))
    assert got == pytest.approx(workhorse.sigma22, abs=1e-14)


def test_over_order_zeros_are_structural(workhorse):
    # products with more than N lowering factors vanish atom by atom in the
    # sparse operator algebra, before any floating arithmetic
    joint = build_joint_state(workhorse, 2)
    ph = PhaseSums(phases=np.random.default_rng(0).uniform(-3, 3, size=(2, 2)))
    assert oracle_moment(joint, ph, MomentSpec(0, 0, 2, 1)) == 0j
    assert oracle_moment(joint, ph, MomentSpec(3, 0, 3, 0)) == 0j


def test_engine_agrees_with_oracle():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(1, 6))
        p = AtomParameters(
            gamma2=float(rng.uniform(0.5, 2.0)),
            rabi=float(rng.uniform(0.2, 3.0)),
            detuning=float(rng.uniform(-2.0, 2.0)),
        )
        st = steady_state(p)
        joint = build_joint_state(st, n)
        ph = PhaseSums(phases=rng.uniform(-np.pi, np.pi, size=(n, 2)))
        powers = [int(rng.integers(0, 3)) for _ in range(4)]
        if sum(powers) == 0:
            powers[1] = 2
        spec = MomentSpec(*powers)
        a = moment(ph, st, spec)
        b = oracle_moment(joint, ph, spec)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-14))
    assert worst < 1e-10


def test_minor_agrees_with_oracle():
    rng = np.random.default_rng(29)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        p = AtomParameters(
            gamma2=float(rng.uniform(0.5, 1.5)),
            rabi=float(rng.uniform(0.3, 2.5)),
            detuning=float(rng.uniform(-1.5, 1.5)),
        )
        st = steady_state(p)
        scene = positioned_scene(
            rng.uniform(-5, 5, size=(n, 3)), float(rng.uniform(0.1, 3.0))
        )
        ev = minor_mu(scene, st)
        om = oracle_minor(build_joint_state(st, n), scene)
        assert ev.mu_full == pytest.approx(om, abs=1e-10 * max(1.0, abs(om)))


def test_oracle_hermiticity(workhorse):
    joint = build_joint_state(workhorse, 3)
    ph = PhaseSums(phases=np.random.default_rng(31).uniform(-3, 3, size=(3, 2)))
    a = oracle_moment(joint, ph, MomentSpec(2, 1, 0, 1))
    b = oracle_moment(joint, ph, MomentSpec(0, 1, 2, 1))
    assert a == pytest.approx(np.conj(b), abs=1e-13)
