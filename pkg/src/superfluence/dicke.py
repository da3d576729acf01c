"""One-point dynamics of the collective spin on the symmetric Dicke ladder.

The state is the matrix ``s[m, m'] = <|m><m'|>`` (rotating frame), with
``m`` the number of excited atoms.  It is the transpose of the atomic
density matrix and obeys a closed linear system ``ds/dt = D(t) s`` whose
coefficients have six nonzero families: damping/detuning on the diagonal,
collective feeding from ``(m+1, m'+1)``, and four drive terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numba
import numpy as np

from .exceptions import StepTooLarge
from .model import PulseSpec, SystemConfig, envelope

#: Post-step trace deviation that signals an under-resolved step.
TRACE_TOLERANCE = 1e-4
#: Post-pulse residual excitation (fraction of N) at which evolution stops.
RESIDUAL_EXCITATION = 1e-6
#: Longest free-decay tail integrated after the pulse, in units of 1/gamma.
MAX_TAIL = 50.0

_CHUNK = 1 << 16


def ladder_weights(n: int) -> np.ndarray:
    """``c[m] = sqrt(m (N - m + 1))`` for m = 0..N+1 (zero at both ends)."""
    m = np.arange(n + 2, dtype=float)
    c = np.sqrt(np.clip(m * (n - m + 1), 0.0, None))
    c[0] = 0.0
    c[n + 1] = 0.0
    return c


@numba.njit(cache=True)
def _deriv(s, e, c, gamma, detuning, out):
    n1 = s.shape[0]
    kappa = math.sqrt(gamma / 2.0)
    # drive phase convention of the input-output relation a_out = a_in - kappa J_-
    drive = -kappa * e
    drive_c = kappa * e.conjugate()
    for m in range(n1):
        for mp in range(n1):
            acc = (1j * detuning * (m - mp) - 0.5 * gamma * (c[m] ** 2 + c[mp] ** 2)) * s[m, mp]
            if m + 1 < n1 and mp + 1 < n1:
                acc += gamma * c[m + 1] * c[mp + 1] * s[m + 1, mp + 1]
            if m >= 1:
                acc += drive_c * c[m] * s[m - 1, mp]
            if mp + 1 < n1:
                acc -= drive_c * c[mp + 1] * s[m, mp + 1]
            if m + 1 < n1:
                acc += drive * c[m + 1] * s[m + 1, mp]
            if mp >= 1:
                acc -= drive * c[mp] * s[m, mp - 1]
            out[m, mp] = acc


@numba.njit(cache=True)
def _rk4_step(s, h, e0, eh, e1, c, gamma, detuning, k1, k2, k3, k4, tmp):
    _deriv(s, e0, c, gamma, detuning, k1)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            tmp[i, j] = s[i, j] + 0.5 * h * k1[i, j]
    _deriv(tmp, eh, c, gamma, detuning, k2)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            tmp[i, j] = s[i, j] + 0.5 * h * k2[i, j]
    _deriv(tmp, eh, c, gamma, detuning, k3)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            tmp[i, j] = s[i, j] + h * k3[i, j]
    _deriv(tmp, e1, c, gamma, detuning, k4)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            s[i, j] += h / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])


@numba.njit(cache=True)
def _observables(s, c):
    n1 = s.shape[0]
    n = n1 - 1
    jm = 0.0 + 0.0j
    jz = 0.0
    jpjm = 0.0
    for m in range(n1):
        pop = s[m, m].real
        jz += (m - 0.5 * n) * pop
        jpjm += c[m] ** 2 * pop
        if m >= 1:
            jm += c[m] * s[m - 1, m]
    return jm, jz, jpjm


@numba.njit(cache=True)
def _run_chunk(s, k_start, nsteps, h, drive, c, gamma, detuning, jm_out, jz_out, jpjm_out,
               states_out, n_keep, stop_from, residual_tol, trace_tol):
    """Advance ``s`` by up to ``nsteps`` RK4 steps starting at grid index ``k_start``.

    ``drive[k]`` holds (start, midpoint, end) drive values of step ``k``;
    steps beyond ``len(drive)`` are undriven.  Returns (steps_taken, status)
    with status 0 = chunk exhausted, 1 = residual excitation reached,
    2 = trace violation at the last step.
    """
    n1 = s.shape[0]
    n = n1 - 1
    k1 = np.empty_like(s)
    k2 = np.empty_like(s)
    k3 = np.empty_like(s)
    k4 = np.empty_like(s)
    tmp = np.empty_like(s)
    n_drive = drive.shape[0]
    zero = 0.0 + 0.0j
    for i in range(nsteps):
        k = k_start + i
        if k < n_drive:
            _rk4_step(s, h, drive[k, 0], drive[k, 1], drive[k, 2], c, gamma, detuning, k1, k2, k3, k4, tmp)
        else:
            _rk4_step(s, h, zero, zero, zero, c, gamma, detuning, k1, k2, k3, k4, tmp)
        trace = zero
        for m in range(n1):
            trace += s[m, m]
        if not (abs(trace - 1.0) <= trace_tol):
            return i + 1, 2
        jm, jz, jpjm = _observables(s, c)
        jm_out[i] = jm
        jz_out[i] = jz
        jpjm_out[i] = jpjm
        if k + 1 < n_keep:
            states_out[k + 1, :, :] = s
        if k + 1 >= stop_from and jz + 0.5 * n < residual_tol * n:
            return i + 1, 1
    return nsteps, 0


@dataclass
class CollectiveState:
    """Rotating-frame one-point functions ``s[m, m']`` at time ``t``."""

    t: float
    s: np.ndarray

    @property
    def atom_count(self) -> int:
        return self.s.shape[0] - 1

    @classmethod
    def excited(cls, n: int, t: float = 0.0) -> "CollectiveState":
        s = np.zeros((n + 1, n + 1), dtype=complex)
        s[n, n] = 1.0
        return cls(t, s)

    @classmethod
    def ground(cls, n: int, t: float = 0.0) -> "CollectiveState":
        s = np.zeros((n + 1, n + 1), dtype=complex)
        s[0, 0] = 1.0
        return cls(t, s)


@dataclass
class TimeSeries:
    """Uniform-grid record of the drive and collective-spin expectations.

    ``drive`` follows the half-open pulse convention (zero at ``t_p``);
    ``drive_tp_left`` is the left limit at ``t[tp_index]`` and is used when
    integrating across the trailing edge.  The output-field channels stay
    ``None`` until :func:`superfluence.metrics.output_moments` fills them.
    """

    config: SystemConfig
    pulse: PulseSpec
    t: np.ndarray
    dt: float
    tp_index: int
    drive: np.ndarray
    drive_tp_left: complex
    jm: np.ndarray
    jz: np.ndarray
    jpjm: np.ndarray
    states: Optional[np.ndarray] = field(default=None, repr=False)
    a_out: Optional[np.ndarray] = None
    n_a: Optional[np.ndarray] = None
    n_b: Optional[np.ndarray] = None

    def with_channels(self, **channels) -> "TimeSeries":
        return replace(self, **channels)


def apply_generator(state: CollectiveState, drive: complex, config: SystemConfig) -> np.ndarray:
    """Time derivative of ``state.s`` for drive amplitude ``drive``."""
    s = np.ascontiguousarray(state.s, dtype=complex)
    out = np.empty_like(s)
    c = ladder_weights(s.shape[0] - 1)
    _deriv(s, complex(drive), c, float(config.gamma), float(config.detuning), out)
    return out


def expect_Jm(state: CollectiveState) -> complex:
    c = ladder_weights(state.atom_count)
    return complex(np.sum(c[1:-1] * np.diagonal(state.s, offset=1)))


def expect_JpJm(state: CollectiveState) -> float:
    n = state.atom_count
    m = np.arange(n + 1)
    return float(np.sum(m * (n - m + 1) * np.diagonal(state.s).real))


def expect_Jz(state: CollectiveState) -> float:
    n = state.atom_count
    return float(np.sum((np.arange(n + 1) - 0.5 * n) * np.diagonal(state.s).real))


def default_dt(pulse: PulseSpec, config: SystemConfig) -> float:
    """Largest admissible step, min(t_p/2000, 0.002/gamma)."""
    return min(pulse.t_p / 2000.0, 0.002 / config.gamma)


def pulse_grid(pulse: PulseSpec, config: SystemConfig, dt: Optional[float] = None) -> tuple[float, int]:
    """Step size adjusted downwards so that ``t_p`` is a grid point, and its index."""
    dt_max = default_dt(pulse, config) if dt is None else float(dt)
    if not dt_max > 0:
        raise ValueError("dt must be positive")
    k_p = max(1, int(math.ceil(pulse.t_p / dt_max * (1.0 - 1e-12))))
    return pulse.t_p / k_p, k_p


def step_drive(pulse: PulseSpec, config: SystemConfig, h: float, k_p: int) -> np.ndarray:
    """(start, midpoint, end) drive values for each of the ``k_p`` pulse steps."""
    k = np.arange(k_p)
    drive = np.empty((k_p, 3), dtype=complex)
    drive[:, 0] = envelope(pulse, config, k * h, closed=True)
    drive[:, 1] = envelope(pulse, config, (k + 0.5) * h, closed=True)
    drive[:, 2] = envelope(pulse, config, (k + 1) * h, closed=True)
    return drive


def evolve(config: SystemConfig, pulse: PulseSpec, dt: Optional[float] = None, t_end: Optional[float] = None,
           keep_states: bool = False, stop_on_residual: bool = True) -> tuple[TimeSeries, CollectiveState]:
    """Integrate the one-point system from the fully excited state.

    Fixed-step classic RK4 on a uniform grid containing ``t_p``.  The run
    covers at least ``[0, t_end]`` (default ``t_p``) and is then extended
    until the residual excitation drops below ``1e-6 N`` or the tail reaches
    ``t_p + 50/gamma``.

    Parameters
    ----------
    dt : float, optional
        Upper bound on the step; defaults to ``min(t_p/2000, 0.002/gamma)``.
    keep_states : bool
        Also return the full ``s`` matrices on ``[0, t_p]`` (needed by the
        two-time engine).
    stop_on_residual : bool
        Disable to integrate exactly to ``max(t_end, t_p + 50/gamma)``.

    Raises
    ------
    StepTooLarge
        If the trace drifts from one by more than ``1e-4`` after a step.
    """
    n = config.atom_count
    h, k_p = pulse_grid(pulse, config, dt)
    t_end = pulse.t_p if t_end is None else float(t_end)
    if t_end < pulse.t_p:
        raise ValueError("t_end must not precede the end of the pulse")
    k_min = max(k_p, int(math.ceil(t_end / h - 1e-9)))
    k_max = max(k_min, k_p + int(math.ceil(MAX_TAIL / config.gamma / h)))
    stop_from = k_min if stop_on_residual else k_max + 1

    c = ladder_weights(n)
    drive = step_drive(pulse, config, h, k_p)
    state = CollectiveState.excited(n)
    s = state.s.copy()
    jm0, jz0, jpjm0 = _observables(s, c)
    jm_parts = [np.array([jm0])]
    jz_parts = [np.array([jz0])]
    jpjm_parts = [np.array([jpjm0])]
    n_keep = k_p + 1 if keep_states else 0
    states = np.zeros((max(n_keep, 1), n + 1, n + 1), dtype=complex)
    if keep_states:
        states[0] = s

    k = 0
    while k < k_max:
        size = min(_CHUNK, k_max - k)
        jm = np.empty(size, dtype=complex)
        jz = np.empty(size)
        jpjm = np.empty(size)
        done, status = _run_chunk(s, k, size, h, drive, c, float(config.gamma), float(config.detuning),
                                  jm, jz, jpjm, states, n_keep, stop_from, RESIDUAL_EXCITATION, TRACE_TOLERANCE)
        if status == 2:
            raise StepTooLarge(f"trace deviates from 1 by more than {TRACE_TOLERANCE} at t={(k + done) * h:.6g}; "
                               f"reduce dt (currently {h:.3g})")
        jm_parts.append(jm[:done])
        jz_parts.append(jz[:done])
        jpjm_parts.append(jpjm[:done])
        k += done
        if status == 1:
            break

    t = np.arange(k + 1) * h
    series = TimeSeries(
        config=config,
        pulse=pulse,
        t=t,
        dt=h,
        tp_index=k_p,
        drive=envelope(pulse, config, t),
        drive_tp_left=complex(envelope(pulse, config, pulse.t_p, closed=True)),
        jm=np.concatenate(jm_parts),
        jz=np.concatenate(jz_parts),
        jpjm=np.concatenate(jpjm_parts),
        states=states if keep_states else None,
    )
    return series, CollectiveState(float(t[-1]), s)
