"""Closed-form references used to check the numerical engines.

Nothing here shares code with the RK4 kernels.  Fock-space sums are
evaluated with log-space coefficients so that large photon numbers do not
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .exceptions import SingularAmplitude
from .model import PulseSpec, Shape, SystemConfig, mean_input_photons


def _require_rect_pi(pulse: PulseSpec) -> None:
    if pulse.shape is not Shape.RECTANGULAR or not math.isclose(pulse.area, math.pi, rel_tol=1e-12):
        raise ValueError("reference holds for a rectangular pi pulse only")


# ---------------------------------------------------------------- short pulse


@dataclass
class ShortPulseSolution:
    """Lossless Rabi flip of the collective spin under a short rectangular pi pulse.

    Limits are leading order in ``gamma / Omega``.
    """

    omega: float
    t: np.ndarray
    jm: np.ndarray
    jz: np.ndarray
    a_out: np.ndarray
    N_in: float
    N_a: float
    N_ac: float
    N_b: float


def short_pulse_reference(config: SystemConfig, pulse: PulseSpec, t=None) -> ShortPulseSolution:
    """Trajectories ``<J->``, ``<Jz>`` and ``<a_out>`` with the decay neglected during the pulse.

    Parameters
    ----------
    t : array_like, optional
        Sample times in ``[0, t_p]``; 201 uniform points by default.
    """
    _require_rect_pi(pulse)
    n = config.atom_count
    omega = pulse.area / pulse.t_p
    t = np.linspace(0.0, pulse.t_p, 201) if t is None else np.asarray(t, dtype=float)
    phase = np.exp(1j * pulse.phase(config))
    jm = -0.5 * n * np.sin(omega * t) * phase
    jz = 0.5 * n * np.cos(omega * t)
    a_out = (omega / math.sqrt(2.0 * config.gamma) + n * math.sqrt(config.gamma / 8.0) * np.sin(omega * t)) * phase
    n_in = mean_input_photons(pulse, config)
    return ShortPulseSolution(omega=omega, t=t, jm=jm, jz=jz, a_out=a_out,
                              N_in=n_in, N_a=n_in + n, N_ac=n_in + n, N_b=0.0)


# ----------------------------------------------------------------- long pulse


def long_pulse_reference(config: SystemConfig, pulse: PulseSpec) -> dict:
    """Emission probabilities of a weak, long rectangular pi pulse."""
    _require_rect_pi(pulse)
    x = math.pi**2 / (2.0 * config.atom_count * config.gamma * pulse.t_p)
    return {"P_a": 0.5 - x, "P_b": 0.5 + x, "P_ac": -x}


# ----------------------------------------------------------------------- PACS


def pacs_coherent_number(n_in: float, n: int) -> float:
    """``|<a>|^2`` of the normalized photon-added coherent state ``(a+)^N |sqrt(N_in)>``.

    Ratio of the normally ordered sums

    ``<a^(N+1) a+^N> = alpha sum_M A_{N+1,M} N_in^(N-M)`` and
    ``<a^N a+^N> = sum_M B_{N,M} N_in^(N-M)``

    with ``A_{K,M} = K!(K-1)!/(M!(K-M)!(K-M-1)!)`` and
    ``B_{N,M} = N!^2/(M!((N-M)!)^2)``, all in log-gamma form.
    """
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    if n_in < 0:
        raise ValueError("n_in must be non-negative")
    if n_in == 0:
        return 0.0
    n = int(n)
    m = np.arange(n + 1, dtype=float)
    k = n + 1
    log_a = gammaln(k + 1) + gammaln(k) - gammaln(m + 1) - gammaln(k - m + 1) - gammaln(k - m)
    log_b = 2.0 * gammaln(n + 1) - gammaln(m + 1) - 2.0 * gammaln(n - m + 1)
    log_x = (n - m) * math.log(n_in)
    ratio = logsumexp(log_a + log_x) - logsumexp(log_b + log_x)
    return float(n_in * math.exp(2.0 * ratio))


def _coherent_log_weights(n_bar: float, n_max: int) -> np.ndarray:
    """``log |C_n|`` of a coherent state with mean ``n_bar`` for ``n = 0..n_max``."""
    k = np.arange(n_max + 1, dtype=float)
    if n_bar == 0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return -0.5 * n_bar + 0.5 * k * math.log(n_bar) - 0.5 * gammaln(k + 1)


def _fock_cutoff(n_bar: float, extra: float = 0.0) -> int:
    return int(math.ceil(n_bar + 12.0 * math.sqrt(n_bar) + 30.0 + extra))


def pacs_coherent_number_fock(n_in: float, n: int, n_max: Optional[int] = None) -> float:
    """Brute-force ``|<a>|^2`` of ``(a+)^N |sqrt(N_in)>`` on a truncated Fock ladder."""
    if n_max is None:
        n_max = _fock_cutoff(n_in)
    k = np.arange(n_max + 1, dtype=float)
    # psi_{k+N} = C_k sqrt((k+N)!/k!)
    log_psi = _coherent_log_weights(n_in, n_max) + 0.5 * (gammaln(k + n + 1) - gammaln(k + 1))
    log_psi = log_psi - np.max(log_psi)
    psi = np.exp(log_psi)
    occ = k + n
    norm = np.sum(psi**2)
    # <a> = sum_j psi_j psi_{j+1} sqrt(j+1) over the shifted ladder
    amp = np.sum(psi[:-1] * psi[1:] * np.sqrt(occ[1:]))
    return float((amp / norm) ** 2)


# ------------------------------------------------------------ Jaynes-Cummings


@dataclass
class SingleModeState:
    """Field state of the single-atom, single-mode model conditioned on the atom having decayed.

    ``phi[k]`` is the exact amplitude on ``|k>``; ``branches[k]`` the
    two-coherent-state approximation.  ``decay_probability`` is the squared
    norm of ``phi`` and ``overlap`` the normalized fidelity between the two.
    """

    n_bar: float
    g: float
    t: float
    n_max: int
    C: np.ndarray
    phi: np.ndarray
    branches: np.ndarray
    decay_probability: float
    overlap: float


def _coherent_state(amplitude: complex, n_max: int) -> np.ndarray:
    n_bar = abs(amplitude) ** 2
    k = np.arange(n_max + 1)
    return np.exp(_coherent_log_weights(n_bar, n_max)) * np.exp(1j * np.angle(amplitude) * k)


def jc_conditional_state(n_bar: float, g: float, t: float, n_max: Optional[int] = None) -> SingleModeState:
    """Exact and two-branch field states after the atom has emitted, starting from ``|e>|sqrt(n_bar)>``.

    The default truncation is ``n_bar + 10 sqrt(n_bar) + 10``.
    """
    if n_bar < 1:
        raise ValueError("n_bar must be at least 1")
    if n_max is None:
        n_max = int(math.ceil(n_bar + 10.0 * math.sqrt(n_bar) + 10.0))
    c = np.exp(_coherent_log_weights(n_bar, n_max))
    k = np.arange(n_max + 1)
    phi = np.zeros(n_max + 2, dtype=complex)
    phi[1:] = -1j * c * np.sin(g * np.sqrt(k + 1.0) * t)

    fast = 0.5 * g * math.sqrt(n_bar) * t
    slow = 0.5 * g * t / math.sqrt(n_bar)
    amp = math.sqrt(n_bar + 1.0)
    branches = (-0.5 * np.exp(1j * fast) * _coherent_state(amp * np.exp(1j * slow), n_max + 1)
                + 0.5 * np.exp(-1j * fast) * _coherent_state(amp * np.exp(-1j * slow), n_max + 1))

    norm_phi = np.linalg.norm(phi)
    norm_br = np.linalg.norm(branches)
    overlap = 0.0 if norm_phi == 0 or norm_br == 0 else abs(np.vdot(branches, phi)) / (norm_phi * norm_br)
    return SingleModeState(n_bar=n_bar, g=g, t=t, n_max=n_max, C=c, phi=phi, branches=branches,
                           decay_probability=float(norm_phi**2), overlap=float(overlap))


def t_pi(n_bar: float, g: float) -> float:
    """Single-mode pi time ``pi / (2 g sqrt(n_bar))``."""
    return math.pi / (2.0 * g * math.sqrt(n_bar))


def photon_adder_check(n_bar: float, phi: float = 0.0, n_max: Optional[int] = None) -> dict:
    """Mean amplitude and photon number of ``V+ |sqrt(n_bar) e^{i phi}>`` by direct Fock sums.

    ``V+ = sum_n |n+1><n|`` shifts the ladder up by one.  Also returns the
    large-``n_bar`` expansion of the amplitude for comparison.
    """
    if n_bar < 1:
        raise ValueError("n_bar must be at least 1")
    if n_max is None:
        n_max = _fock_cutoff(n_bar)
    c = _coherent_state(math.sqrt(n_bar) * np.exp(1j * phi), n_max)
    psi = np.concatenate(([0.0], c))
    psi = psi / np.linalg.norm(psi)
    k = np.arange(len(psi))
    number = float(np.sum(k * np.abs(psi) ** 2))
    amplitude = complex(np.sum(psi[:-1].conj() * np.sqrt(k[1:]) * psi[1:]))
    expansion = (math.sqrt(n_bar) + 0.5 / math.sqrt(n_bar) - 0.125 * n_bar**-1.5) * np.exp(1j * phi)
    return {"amplitude": amplitude, "photon_number": number, "expansion": complex(expansion),
            "coherent": complex(math.sqrt(n_bar + 1.0) * np.exp(1j * phi))}


# --------------------------------------------------------------- semiclassical


@dataclass
class SemiclassicalTrajectory:
    """Mean-field atom/field trajectory in polar variables.

    ``a``, ``jm`` and ``jz`` come from an independent Cartesian integration of
    the same mean-field equations and are used to measure the constants of
    motion ``s`` and ``N_tot``.
    """

    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray
    m: float
    s: float
    n_tot: float
    g: float
    n_bar: float
    a: np.ndarray
    jm: np.ndarray
    jz: np.ndarray

    def constants(self) -> tuple[np.ndarray, np.ndarray]:
        """``s(t)`` and ``N_tot(t)`` recomputed from the Cartesian trajectory."""
        s = np.sqrt(np.abs(self.jm) ** 2 + self.jz**2)
        return s, np.abs(self.a) ** 2 + self.jz

    def drift(self) -> float:
        """Largest relative change of either constant of motion."""
        s, n_tot = self.constants()
        return float(max(np.max(np.abs(s - s[0])) / abs(s[0]), np.max(np.abs(n_tot - n_tot[0])) / abs(n_tot[0])))


def _rk4(f, y0, t):
    y = np.empty((len(t),) + np.shape(y0), dtype=np.result_type(y0, float))
    y[0] = y0
    for i in range(len(t) - 1):
        h = t[i + 1] - t[i]
        k1 = f(y[i])
        k2 = f(y[i] + 0.5 * h * k1)
        k3 = f(y[i] + 0.5 * h * k2)
        k4 = f(y[i] + h * k3)
        y[i + 1] = y[i] + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def semiclassical_evolve(m: float, s: Optional[float], n_bar: float, g: float, t) -> SemiclassicalTrajectory:
    """Integrate the mean-field phase equations from ``phi = zeta = eta = 0``, ``r = sqrt(n_bar)``.

    ``r`` is eliminated through ``r^2 = N_tot - s sin(eta)``.  ``s=None``
    uses ``s = m`` (an ``|m>_x`` initial atomic state).  ``t`` must start
    at 0 and be increasing; it is also the RK4 grid.

    Raises
    ------
    SingularAmplitude
        If ``r^2 <= 0`` is reached.
    """
    t = np.asarray(t, dtype=float)
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    s = float(m) if s is None else float(s)
    n_tot = float(n_bar)

    def radius(eta):
        r2 = n_tot - s * math.sin(eta)
        if r2 <= 0:
            raise SingularAmplitude("field amplitude vanished; trajectory left the polar chart")
        return math.sqrt(r2)

    def polar(y):
        phi, zeta, eta = y
        r = radius(eta)
        d = phi - zeta
        return np.array([
            -g * s / r * math.cos(eta) * math.cos(d),
            2.0 * g * r * math.tan(eta) * math.cos(d),
            2.0 * g * r * math.sin(d),
        ])

    def cartesian(y):
        a, jm, jz = y
        return np.array([-1j * g * jm, 2j * g * jz * a, -1j * g * (np.conj(jm) * a - np.conj(a) * jm)])

    y = _rk4(polar, np.zeros(3), t)
    r = np.array([radius(e) for e in y[:, 2]])
    cart = _rk4(cartesian, np.array([math.sqrt(n_bar), s, 0.0], dtype=complex), t)
    return SemiclassicalTrajectory(t=t, r=r, phi=y[:, 0], zeta=y[:, 1], eta=y[:, 2], m=float(m), s=s,
                                   n_tot=n_tot, g=g, n_bar=n_bar, a=cart[:, 0], jm=cart[:, 1],
                                   jz=cart[:, 2].real)


def linearized_reference(m: float, n_bar: float, g: float, t) -> tuple[np.ndarray, np.ndarray]:
    """Leading-order ``(phi, eta)`` for small ``eta`` and ``phi``."""
    t = np.asarray(t, dtype=float)
    phi = -g * m * t / math.sqrt(n_bar)
    eta = -(m / n_bar) * np.sin(g * math.sqrt(n_bar) * t) ** 2
    return phi, eta


# ---------------------------------------------------------------- phase spread


def phase_spread_estimate(n: int, n_in: float, gain: float) -> tuple[float, float]:
    """Single-mode estimate of the phase spread and of ``dY`` after amplification.

    Returns ``(dphi, dY)`` with ``dphi = sqrt(N) pi / (4 N_in)`` and
    ``dY = sqrt(1/4 + N pi^2 G / (16 N_in))``.
    """
    if n_in <= 0:
        raise ValueError("n_in must be positive")
    dphi = math.sqrt(n) * math.pi / (4.0 * n_in)
    dy = math.sqrt(0.25 + n * math.pi**2 * gain / (16.0 * n_in))
    return dphi, dy


# --------------------------------------------------------------- single atom


def single_atom_regression(t1, t2, gamma: float = 1.0):
    """``<sigma+(t1) sigma-(t2)>`` of one initially excited atom, free decay, ``t2 >= t1``."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(t1 < 0) or np.any(t2 < t1):
        raise ValueError("need 0 <= t1 <= t2")
    out = np.exp(-gamma * t1) * np.exp(-0.5 * gamma * (t2 - t1)) + 0j
    return out[()] if out.ndim == 0 else out
