"""Moment engine and covariance entries for the two detected amplitudes."""

import numpy as np
import pytest

from resfluo import (
    AtomParameters,
    MomentSpec,
    covariance_table,
    moment,
    rabi_for_ratio,
    steady_state,
)
from resfluo.geometry import PhaseSums
from resfluo.errors import InvalidParametersError


def random_phases(rng, n):
    return PhaseSums(phases=rng.uniform(-np.pi, np.pi, size=(n, 2)))


def random_state(rng):
    p = AtomParameters(
        gamma2=float(rng.uniform(0.5, 2.0)),
        rabi=float(rng.uniform(0.2, 3.0)),
        detuning=float(rng.uniform(-2.0, 2.0)),
    )
    return steady_state(p)


def test_spec_validation():
    with pytest.raises(InvalidParametersError):
        MomentSpec(-1, 0, 0, 0)
    with pytest.raises(InvalidParametersError):
        MomentSpec(0, 0, 0, 0)
    assert MomentSpec(1, 2, 0, 1).order == 4
    assert MomentSpec(0, 0, 2, 1).exceeds(2)
    assert not MomentSpec(0, 0, 2, 0).exceeds(2)


def test_first_order_amplitudes():
    rng = np.random.default_rng(1)
    st = random_state(rng)
    ph = random_phases(rng, 4)
    assert moment(ph, st, MomentSpec(0, 0, 1, 0)) == pytest.approx(st.sigma21 * ph.s1)
    assert moment(ph, st, MomentSpec(0, 1, 0, 0)) == pytest.approx(
        np.conj(st.sigma21 * ph.s2)
    )


def test_aligned_cross_intensity():
    # all phases zero: <A1+ A2> = N sigma22 + N(N-1)|sigma21|^2
    st = steady_state(AtomParameters(rabi=rabi_for_ratio(3.5)))
    for n in (1, 2, 3, 5):
        ph = PhaseSums(phases=np.zeros((n, 2)))
        expected = n * st.sigma22 + n * (n - 1) * abs(st.sigma21) ** 2
        assert moment(ph, st, MomentSpec(1, 0, 0, 1)) == pytest.approx(expected)
    # frozen value for the ratio-3.5 workhorse at N = 3
    ph3 = PhaseSums(phases=np.zeros((3, 2)))
    got = moment(ph3, st, MomentSpec(1, 0, 0, 1))
    assert got.real == pytest.approx(1.683673469387755, abs=1e-12)
    assert got.imag == pytest.approx(0.0, abs=1e-14)


def test_double_excitation_closed_form():
    # <A1+^2 A1^2> at zero phases counts ordered pair selections: 4 sigma22^2 at N=2
    st = random_state(np.random.default_rng(7))
    ph = PhaseSums(phases=np.zeros((2, 2)))
    got = moment(ph, st, MomentSpec(2, 0, 2, 0))
    assert got == pytest.approx(4 * st.sigma22**2, rel=1e-12)


def test_hermiticity_under_swap():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        st = random_state(rng)
        ph = random_phases(rng, n)
        powers = [int(rng.integers(0, 3)) for _ in range(4)]
        if sum(powers) == 0:
            powers[0] = 1
        p, q, r, s = powers
        a = moment(ph, st, MomentSpec(p, q, r, s))
        b = moment(ph, st, MomentSpec(r, s, p, q))
        assert a == pytest.approx(np.conj(b), abs=1e-13 * max(1.0, abs(a)))


def test_over_order_moments_vanish_exactly():
    rng = np.random.default_rng(9)
    st = random_state(rng)
    for n in (1, 2, 3):
        ph = random_phases(rng, n)
        # each lowering operator nils a distinct atom; more than N of either
        # kind annihilates the product identically
        assert moment(ph, st, MomentSpec(0, 0, n + 1, 0)) == 0j
        assert moment(ph, st, MomentSpec(0, 0, n, 1)) == 0j
        assert moment(ph, st, MomentSpec(n, 1, n, 1)) == 0j
        assert moment(ph, st, MomentSpec(n, 0, n, 0)) != 0j


def test_covariance_matches_moment_engine():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(1, 7))
        st = random_state(rng)
        ph = random_phases(rng, n)
        tab = covariance_table(ph, st)
        pairs = {
            "c1": MomentSpec(0, 0, 1, 0),
            "c2": MomentSpec(0, 0, 0, 1),
            "m11": MomentSpec(1, 0, 1, 0),
            "m12": MomentSpec(1, 0, 0, 1),
            "m21": MomentSpec(0, 1, 1, 0),
            "m22": MomentSpec(0, 1, 0, 1),
            "anom1": MomentSpec(0, 0, 2, 0),
            "anom2": MomentSpec(0, 0, 0, 2),
        }
        for name, spec in pairs.items():
            want = moment(ph, st, spec)
            got = getattr(tab, name)
            assert got == pytest.approx(want, abs=1e-12 * max(1.0, abs(want))), name


def test_centered_entries():
    rng = np.random.default_rng(13)
    st = random_state(rng)
    n = 5
    ph = random_phases(rng, n)
    tab = covariance_table(ph, st)
    assert tab.centered_m11 == pytest.approx(n * st.beta, rel=1e-12)
    assert tab.centered_m22 == pytest.approx(n * st.beta, rel=1e-12)
    want1 = -st.sigma21**2 * ph.doubled_sum(1)
    assert tab.centered_anom1 == pytest.approx(want1, abs=1e-13)
    want2 = -st.sigma21**2 * ph.doubled_sum(2)
    assert tab.centered_anom2 == pytest.approx(want2, abs=1e-13)


def test_hermitian_table_structure():
    rng = np.random.default_rng(17)
    st = random_state(rng)
    ph = random_phases(rng, 3)
    tab = covariance_table(ph, st)
    assert tab.m21 == pytest.approx(np.conj(tab.m12), abs=1e-14)
    assert tab.m11.imag == pytest.approx(0.0, abs=1e-14)
    assert tab.m11.real > 0
