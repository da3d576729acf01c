"""Two-time correlation functions of the collective spin by quantum regression.

A correlator ``<A(t1) B(t2)>`` with ``t2 >= t1`` is obtained by seeding a
matrix with the equal-time product at ``t1`` and propagating it in ``t2``
with the same generator as the one-point functions.  Two seeding rules are
supported:

``side="left"``
    operator at ``t1`` stands on the left, ``<tau_ll'(t1) tau_mm'(t2)>``;
    seed ``X[m, m'] = delta(l', m) s[l, m']``.
``side="right"``
    operator at ``t1`` stands on the right, ``<tau_mm'(t2) tau_ll'(t1)>``;
    seed ``X[m, m'] = delta(m', l) s[m, l']``.

The quadrature integrals need three connected correlators on the mode
support ``[0, t_p]^2``:

* ``C_pm(t1, t2) = <J+(t1), J-(t2)>`` (normally ordered for any ``t1, t2``);
* ``C_pp(t1, t2) = <J+(t_early), J+(t_late)>``;
* ``C_mm(t1, t2) = <J-(t_late), J-(t_early)> = conj(C_pp(t1, t2))``.

The orderings of ``C_pp`` and ``C_mm`` are the ones in which the coherent
input operators can be moved onto the initial state by causality, which is
what makes the output-field moments reduce to spin correlators.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .dicke import (
    CollectiveState,
    TimeSeries,
    _rk4_step,
    evolve,
    ladder_weights,
    pulse_grid,
    step_drive,
)
from .exceptions import StepTooLarge
from .model import PulseSpec, SystemConfig

# the bundled TBB is too old for numba and only produces a warning
if "NUMBA_THREADING_LAYER" not in os.environ:
    try:
        from numba.np.ufunc import omppool  # noqa: F401
        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        pass


@dataclass
class CorrelationSlab:
    """Seeded two-point matrices for every ``tau_{l,l-1}`` / ``tau_{l-1,l}`` pattern at ``t1``.

    ``patterns[p] = (l, l')`` labels ``seeds[p]``; the first ``N`` entries
    are the raising patterns, the last ``N`` the lowering ones.
    """

    t1: float
    side: str
    patterns: list
    seeds: np.ndarray


@dataclass
class TwoTimeGrid:
    """Connected spin correlators on a square grid over the mode support."""

    t: np.ndarray
    dt: float
    c_pm: np.ndarray
    c_mm: np.ndarray
    c_pp: np.ndarray

    @property
    def window(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])


def _patterns(n: int) -> list:
    return [(l, l - 1) for l in range(1, n + 1)] + [(l - 1, l) for l in range(1, n + 1)]


def _seed_one(s: np.ndarray, l: int, lp: int, side: str) -> np.ndarray:
    x = np.zeros_like(s)
    if side == "left":
        x[lp, :] = s[l, :]
    else:
        x[:, l] = s[:, lp]
    return x


def seed_slab(state: CollectiveState, side: str = "left") -> CorrelationSlab:
    """Equal-time seeds for all 2N ladder patterns from the one-point state at ``t1``."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = np.asarray(state.s, dtype=complex)
    patterns = _patterns(state.atom_count)
    seeds = np.stack([_seed_one(s, l, lp, side) for l, lp in patterns])
    return CorrelationSlab(state.t, side, patterns, seeds)


def contract(matrices: np.ndarray, which: str) -> np.ndarray:
    """Contract matrices (last two axes) with the ``J-`` or ``J+`` ladder weights."""
    n = matrices.shape[-1] - 1
    c = ladder_weights(n)[1:-1]
    if which == "minus":
        band = np.diagonal(matrices, offset=1, axis1=-2, axis2=-1)
    elif which == "plus":
        band = np.diagonal(matrices, offset=-1, axis1=-2, axis2=-1)
    else:
        raise ValueError("which must be 'minus' or 'plus'")
    return band @ c


def combine(slab: CorrelationSlab, operator: str) -> np.ndarray:
    """Seed of the collective operator ``J+`` or ``J-`` at ``t1`` (linear combination of patterns)."""
    n = len(slab.patterns) // 2
    c = ladder_weights(n)[1:-1]
    part = slab.seeds[:n] if operator == "plus" else slab.seeds[n:]
    return np.tensordot(c, part, axes=1)


@numba.njit(cache=True)
def _evolve_batch(x, k_start, nsteps, h, drive, c, gamma, detuning, out):
    b = x.shape[0]
    k1 = np.empty_like(x[0])
    k2 = np.empty_like(x[0])
    k3 = np.empty_like(x[0])
    k4 = np.empty_like(x[0])
    tmp = np.empty_like(x[0])
    n_drive = drive.shape[0]
    zero = 0.0 + 0.0j
    out[0] = x
    for i in range(nsteps):
        k = k_start + i
        for p in range(b):
            m = x[p]
            if k < n_drive:
                _rk4_step(m, h, drive[k, 0], drive[k, 1], drive[k, 2], c, gamma, detuning, k1, k2, k3, k4, tmp)
            else:
                _rk4_step(m, h, zero, zero, zero, c, gamma, detuning, k1, k2, k3, k4, tmp)
        out[i + 1] = x


def evolve_slab(slab: CorrelationSlab, pulse: PulseSpec, config: SystemConfig, n_steps: int,
                dt: Optional[float] = None) -> np.ndarray:
    """Propagate every seed of ``slab`` over ``n_steps`` grid steps in ``t2``.

    The grid is the one-point grid of :func:`superfluence.dicke.evolve`
    (same ``dt``, ``t_p`` on a node); ``slab.t1`` must be a node.  Returns
    an array of shape ``(n_steps + 1, 2N, N+1, N+1)``.
    """
    h, k_p = pulse_grid(pulse, config, dt)
    k_start = int(round(slab.t1 / h))
    if abs(k_start * h - slab.t1) > 1e-9 * max(1.0, slab.t1):
        raise ValueError("slab.t1 is not a grid point")
    n = len(slab.patterns) // 2
    x = np.ascontiguousarray(slab.seeds.copy())
    out = np.empty((n_steps + 1,) + x.shape, dtype=complex)
    _evolve_batch(x, k_start, n_steps, h, step_drive(pulse, config, h, k_p), ladder_weights(n),
                  float(config.gamma), float(config.detuning), out)
    if not np.all(np.isfinite(out)):
        raise StepTooLarge("two-point evolution diverged; reduce dt")
    return out


@numba.njit(cache=True, parallel=True)
def _assemble_rows(states, h, drive, c, gamma, detuning, raw_pm, raw_pp, bad):
    k_total = states.shape[0]
    n1 = states.shape[1]
    for i in numba.prange(k_total):
        x = np.zeros((n1, n1), dtype=np.complex128)
        # J+(t1) on the left: X[k, :] = c[k+1] s[k+1, :]
        for k in range(n1 - 1):
            for j in range(n1):
                x[k, j] = c[k + 1] * states[i, k + 1, j]
        k1 = np.empty_like(x)
        k2 = np.empty_like(x)
        k3 = np.empty_like(x)
        k4 = np.empty_like(x)
        tmp = np.empty_like(x)
        for j in range(i, k_total):
            if j > i:
                _rk4_step(x, h, drive[j - 1, 0], drive[j - 1, 1], drive[j - 1, 2], c, gamma, detuning,
                          k1, k2, k3, k4, tmp)
            pm = 0.0 + 0.0j
            pp = 0.0 + 0.0j
            for m in range(1, n1):
                pm += c[m] * x[m - 1, m]
                pp += c[m] * x[m, m - 1]
            raw_pm[i, j] = pm
            raw_pp[i, j] = pp
            if not (abs(pm) < 1e300):
                bad[i] = 1


def _thread_cap() -> Optional[int]:
    value = os.environ.get("SUPERFLUENCE_THREADS")
    if not value:
        return None
    return max(1, min(int(value), numba.config.NUMBA_NUM_THREADS))


def assemble_two_time(config: SystemConfig, pulse: PulseSpec, dt: Optional[float] = None,
                      series: Optional[TimeSeries] = None) -> TwoTimeGrid:
    """Connected correlators ``C_pm``, ``C_mm``, ``C_pp`` on ``[0, t_p]^2``.

    Rows ``t1`` are independent and run as a parallel map (thread count
    capped by ``SUPERFLUENCE_THREADS``).  Only ``t2 >= t1`` is evolved; the
    other triangle follows from ``C_pm(t2, t1) = conj(C_pm(t1, t2))`` and the
    symmetry of ``C_pp``.

    Parameters
    ----------
    series : TimeSeries, optional
        One-point run on the same grid with ``keep_states=True``; computed
        here when omitted.
    """
    h, k_p = pulse_grid(pulse, config, dt)
    if series is None or series.states is None:
        series, _ = evolve(config, pulse, dt=dt, keep_states=True)
    if series.tp_index != k_p or abs(series.dt - h) > 1e-15 * max(1.0, h):
        raise ValueError("one-point series is not on the requested grid")
    states = np.ascontiguousarray(series.states[: k_p + 1])
    n = config.atom_count
    raw_pm = np.zeros((k_p + 1, k_p + 1), dtype=complex)
    raw_pp = np.zeros((k_p + 1, k_p + 1), dtype=complex)
    bad = np.zeros(k_p + 1, dtype=np.int64)

    cap = _thread_cap()
    previous = numba.get_num_threads()
    if cap is not None:
        numba.set_num_threads(cap)
    try:
        _assemble_rows(states, h, step_drive(pulse, config, h, k_p), ladder_weights(n),
                       float(config.gamma), float(config.detuning), raw_pm, raw_pp, bad)
    finally:
        numba.set_num_threads(previous)
    if bad.any():
        raise StepTooLarge("two-point evolution diverged; reduce dt")

    jm = series.jm[: k_p + 1]
    jp = jm.conj()
    upper = np.triu(np.ones((k_p + 1, k_p + 1), dtype=bool))
    c_pm = raw_pm - np.outer(jp, jm)
    c_pp = raw_pp - np.outer(jp, jp)
    c_pm = np.where(upper, c_pm, c_pm.T.conj())
    c_pp = np.where(upper, c_pp, c_pp.T)
    t = np.arange(k_p + 1) * h
    return TwoTimeGrid(t=t, dt=h, c_pm=c_pm, c_mm=c_pp.conj(), c_pp=c_pp)
