"""Batched minor evaluation, the hot loop of every sampling campaign.

Monte Carlo runs, random-position ensembles, and the scale optimizer all
reduce to: given many position sets and a fixed (state, detector) context,
evaluate the closed-form minor per sample. That loop is JIT-compiled with
numba when available; a pure-numpy implementation with the same contract is
selected when numba is missing or when the environment variable
``RESFLUO_NO_NUMBA`` is set to a non-empty value other than ``0``.

Both backends are deterministic run-to-run. They agree to round-off (about
1 ulp) but are not guaranteed bit-identical to each other; reproducibility
contracts hold per backend.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .atoms import AtomicSteadyState


def scene_coefficients(
    n_atoms: int,
    state: AtomicSteadyState,
    dipole: np.ndarray,
    laser: np.ndarray,
    detector1: np.ndarray,
    detector2: np.ndarray,
):
    """Precompute the kernel context for a fixed scene orientation.

    Returns ``(wd1, wd2, coef_const, coef_s12, coef_s1s2)`` such that for
    positions r_n (wavelength units)

        mu = coef_const - coef_s12 * |sum exp(i wd12.r)|^2
                        - coef_s1s2 * |sum exp(i wd1.r)|^2 |sum exp(i wd2.r)|^2

    where wd_j = 2 pi (laser - detector_j) and wd12 = wd1 - wd2.
    """
    d = np.asarray(dipole, dtype=float)
    k = np.asarray(laser, dtype=float)
    e1 = np.asarray(detector1, dtype=float)
    e2 = np.asarray(detector2, dtype=float)
    g1 = d - (d @ e1) * e1
    g2 = d - (d @ e2) * e2
    g11 = float(g1 @ g1)
    g22 = float(g2 @ g2)
    g12 = float(g1 @ g2)
    beta = state.beta
    mod4 = abs(state.sigma21) ** 4
    wd1 = 2.0 * np.pi * (k - e1)
    wd2 = 2.0 * np.pi * (k - e2)
    coef_const = g11 * g22 * n_atoms * n_atoms * beta * beta
    coef_s12 = g12 * g12 * beta * beta
    coef_s1s2 = (g11 * g22 - g12 * g12) * mod4
    return wd1, wd2, coef_const, coef_s12, coef_s1s2


def minor_batch_numpy(positions, wd1, wd2, coef_const, coef_s12, coef_s1s2):
    """Vectorized reference implementation; positions is (M, N, 3)."""
    pos = np.asarray(positions, dtype=float)
    phi1 = pos @ wd1
    phi2 = pos @ wd2
    z1 = np.exp(1j * phi1).sum(axis=1)
    z2 = np.exp(1j * phi2).sum(axis=1)
    z12 = np.exp(1j * (phi1 - phi2)).sum(axis=1)
    return (
        coef_const
        - coef_s12 * np.abs(z12) ** 2
        - coef_s1s2 * (np.abs(z1) ** 2 * np.abs(z2) ** 2)
    )


def _minor_batch_loops(positions, wd1, wd2, coef_const, coef_s12, coef_s1s2):
    m, n, _ = positions.shape
    out = np.empty(m)
    for i in range(m):
        re1 = 0.0
        im1 = 0.0
        re2 = 0.0
        im2 = 0.0
        re12 = 0.0
        im12 = 0.0
        for k in range(n):
            x = positions[i, k, 0]
            y = positions[i, k, 1]
            z = positions[i, k, 2]
            p1 = wd1[0] * x + wd1[1] * y + wd1[2] * z
            p2 = wd2[0] * x + wd2[1] * y + wd2[2] * z
            re1 += math.cos(p1)
            im1 += math.sin(p1)
            re2 += math.cos(p2)
            im2 += math.sin(p2)
            re12 += math.cos(p1 - p2)
            im12 += math.sin(p1 - p2)
        a1 = re1 * re1 + im1 * im1
        a2 = re2 * re2 + im2 * im2
        a12 = re12 * re12 + im12 * im12
        out[i] = coef_const - coef_s12 * a12 - coef_s1s2 * a1 * a2
    return out


def _want_numba() -> bool:
    flag = os.environ.get("RESFLUO_NO_NUMBA", "").strip()
    return flag in ("", "0")


minor_batch_numba = None
if _want_numba():
    try:
        from numba import njit

        minor_batch_numba = njit(cache=True, nogil=True)(_minor_batch_loops)
    except ImportError:
        minor_batch_numba = None

BACKEND = "numba" if minor_batch_numba is not None else "numpy"


def minor_batch(positions, wd1, wd2, coef_const, coef_s12, coef_s1s2):
    """Minor value per position sample using the selected backend.

    See :func:`scene_coefficients` for the parameter layout.
    """
    if minor_batch_numba is None:
        return minor_batch_numpy(positions, wd1, wd2, coef_const, coef_s12, coef_s1s2)
    return minor_batch_numba(
        np.ascontiguousarray(positions, dtype=float),
        np.ascontiguousarray(wd1, dtype=float),
        np.ascontiguousarray(wd2, dtype=float),
        float(coef_const),
        float(coef_s12),
        float(coef_s1s2),
    )
