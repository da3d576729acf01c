"""Output-field observables: photon numbers, emission probabilities, gain and quadrature noise.

Field moments follow from the input-output relations with a coherent
forward input ``E(t)`` and vacuum backward input::

    <a_out>       = E - k <J->
    <a_out+ a_out> = |E|^2 - k (E* <J-> + E <J+>) + k^2 <J+J->
    <b_out+ b_out> = k^2 <J+J->,          k = sqrt(gamma/2)

For the mode operator ``c_out = int f*(t) a_out(t) dt`` the drive
contributions cancel in every connected second moment, leaving
``<c+, c> = k^2 ∬ f(t1) f*(t2) C_pm``, ``<c, c> = k^2 ∬ f* f* C_mm`` and
``<c+, c+> = k^2 ∬ f f C_pp``.

Time integrals use the trapezoid rule on the RK4 grid.  The pulse edge at
``t_p`` is a grid node; across it the integrand jumps, so the pulse side of
the node uses the left limit of the envelope.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .dicke import TimeSeries, evolve
from .exceptions import ModeMismatch, PhaseLeak
from .model import PulseSpec, Shape, SystemConfig
from .regression import TwoTimeGrid, assemble_two_time

#: Relative imaginary part of the phase-rotated amplitudes above which PhaseLeak is raised.
PHASE_LEAK_TOLERANCE = 1e-3


@dataclass
class PhotonNumbers:
    N_in: float
    N_a: float
    N_ac: float
    N_b: float
    N_bc: float


@dataclass
class ModeFunction:
    """Normalized temporal mode sampled on the grid ``t`` spanning ``[0, t_p]``."""

    t: np.ndarray
    weights: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def norm(self) -> float:
        return float(np.trapezoid(np.abs(self.weights) ** 2, dx=self.dt))


@dataclass
class QuadratureReport:
    c_in: complex
    c_out: complex
    cdc: complex
    cc: complex
    cdcd: complex
    dX: float
    dY: float
    dX_in: float
    dY_in: float


@dataclass
class AmplifierReport:
    N_in: float
    N_a: float
    N_ac: float
    N_b: float
    N_bc: float
    P_a: float
    P_ac: float
    P_b: float
    P_bc: float
    conservation_residual: float
    G: Optional[float] = None
    dX: Optional[float] = None
    dY: Optional[float] = None
    R_SN: Optional[float] = None
    gain_defined: bool = False
    t_end: float = 0.0
    dt: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _edge_integral(series: TimeSeries, values: np.ndarray, left_value) -> float | complex:
    """Trapezoid integral over the whole record, with the pulse side of ``t_p`` at its left limit."""
    k = series.tp_index
    total = np.trapezoid(values, dx=series.dt)
    if k < len(values):
        total = total + 0.5 * series.dt * (left_value - values[k])
    return total


def _fields(drive, jm, jpjm, gamma):
    kappa = math.sqrt(gamma / 2.0)
    a_out = drive - kappa * jm
    n_a = np.abs(drive) ** 2 - 2.0 * kappa * np.real(np.conj(drive) * jm) + kappa**2 * jpjm
    n_b = kappa**2 * jpjm
    return a_out, n_a, n_b


def output_moments(series: TimeSeries) -> TimeSeries:
    """Return ``series`` with ``a_out``, ``n_a`` and ``n_b`` channels filled."""
    a_out, n_a, n_b = _fields(series.drive, series.jm, series.jpjm, series.config.gamma)
    return series.with_channels(a_out=a_out, n_a=np.real(n_a), n_b=n_b)


def _left_fields(series: TimeSeries):
    k = series.tp_index
    return _fields(series.drive_tp_left, series.jm[k], series.jpjm[k], series.config.gamma)


def photon_numbers(series: TimeSeries) -> PhotonNumbers:
    """Time-integrated photon numbers of the input and both output ports."""
    if series.a_out is None:
        series = output_moments(series)
    gamma = series.config.gamma
    a_left, n_a_left, n_b_left = _left_fields(series)
    n_in = _edge_integral(series, np.abs(series.drive) ** 2, abs(series.drive_tp_left) ** 2)
    return PhotonNumbers(
        N_in=float(n_in),
        N_a=float(_edge_integral(series, series.n_a, n_a_left)),
        N_ac=float(_edge_integral(series, np.abs(series.a_out) ** 2, abs(a_left) ** 2)),
        N_b=float(_edge_integral(series, series.n_b, n_b_left)),
        N_bc=float(0.5 * gamma * np.trapezoid(np.abs(series.jm) ** 2, dx=series.dt)),
    )


def emission_probabilities(numbers: PhotonNumbers, config: SystemConfig) -> dict:
    """Per-atom emission probabilities; forward ones may be negative."""
    n = config.atom_count
    return {
        "P_a": (numbers.N_a - numbers.N_in) / n,
        "P_ac": (numbers.N_ac - numbers.N_in) / n,
        "P_b": numbers.N_b / n,
        "P_bc": numbers.N_bc / n,
    }


def mode_function(pulse: PulseSpec, t: np.ndarray) -> ModeFunction:
    """Input/output mode function on grid ``t`` (which must end at ``t_p``).

    Rectangular pulses use the flat mode ``1/sqrt(t_p)``; sine pulses the
    normalized sine envelope ``sqrt(2/t_p) sin(pi t / t_p)``.
    """
    t = np.asarray(t, dtype=float)
    if pulse.shape is Shape.RECTANGULAR:
        weights = np.full(t.shape, 1.0 / math.sqrt(pulse.t_p))
    else:
        weights = math.sqrt(2.0 / pulse.t_p) * np.sin(np.pi * t / pulse.t_p)
    return ModeFunction(t=t, weights=weights.astype(complex))


def _trapezoid_weights(size: int, dt: float) -> np.ndarray:
    w = np.full(size, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def mode_amplitudes(series: TimeSeries, f: ModeFunction) -> tuple[complex, complex]:
    """Projections ``<c_in>`` and ``<c_out>`` of the input and forward output fields onto ``f``."""
    k = series.tp_index
    if len(f.t) != k + 1:
        raise ModeMismatch("mode function must be sampled on the pulse window of the series")
    fw = f.weights.conj() * _trapezoid_weights(k + 1, series.dt)
    drive = series.drive[: k + 1].copy()
    drive[k] = series.drive_tp_left
    a_out = drive - math.sqrt(0.5 * series.config.gamma) * series.jm[: k + 1]
    return complex(np.sum(fw * drive)), complex(np.sum(fw * a_out))


def project_mode(series: TimeSeries, grid2: TwoTimeGrid, f: ModeFunction, config: SystemConfig) -> QuadratureReport:
    """Mean amplitude and quadrature fluctuations of the mode-matched output.

    Raises
    ------
    ModeMismatch
        If ``f`` is not sampled on the two-time grid, or the grid does not
        reach the end of the one-point record's pulse window.
    """
    k = series.tp_index
    if (len(f.t) != len(grid2.t) or not np.allclose(f.t, grid2.t, rtol=0, atol=1e-12 * max(1.0, grid2.t[-1]))
            or len(grid2.t) != k + 1):
        raise ModeMismatch("mode function support is not covered by the two-time grid")
    theta = series.pulse.phase(config)
    kappa2 = 0.5 * config.gamma
    fw = f.weights * _trapezoid_weights(k + 1, series.dt)
    c_in, c_out = mode_amplitudes(series, f)

    cdc = complex(kappa2 * (fw @ grid2.c_pm @ fw.conj()))
    cc = complex(kappa2 * (fw.conj() @ grid2.c_mm @ fw.conj()))
    cdcd = complex(kappa2 * (fw @ grid2.c_pp @ fw))
    rot = np.exp(2j * theta)
    var_x = (1.0 + 2.0 * cdc + cc / rot + cdcd * rot) / 4.0
    var_y = (1.0 + 2.0 * cdc - cc / rot - cdcd * rot) / 4.0
    return QuadratureReport(
        c_in=c_in,
        c_out=c_out,
        cdc=cdc,
        cc=cc,
        cdcd=cdcd,
        dX=float(math.sqrt(max(var_x.real, 0.0))),
        dY=float(math.sqrt(max(var_y.real, 0.0))),
        dX_in=0.5,
        dY_in=0.5,
    )


def gain_and_snr(c_in: complex, c_out: complex, theta: float,
                 dX: Optional[float] = None) -> tuple[Optional[float], Optional[float]]:
    """Phase-preserving gain ``G`` and signal-to-noise change ``R_SN = G / (4 dX^2)``.

    ``G`` is ``None`` when there is no input signal; ``R_SN`` is ``None``
    also when ``dX`` is not known.

    Raises
    ------
    PhaseLeak
        If either amplitude, rotated by ``exp(-i theta)``, has a relative
        imaginary part above ``1e-3``.
    """
    rot = np.exp(-1j * theta)
    c_in = c_in * rot
    c_out = c_out * rot
    if abs(c_in) == 0.0:
        return None, None
    for name, value in (("c_in", c_in), ("c_out", c_out)):
        if abs(value) > 0 and abs(value.imag) > PHASE_LEAK_TOLERANCE * abs(value):
            raise PhaseLeak(f"{name} has phase {np.angle(value):.3e} relative to the input pulse")
    gain = float((c_out.real / c_in.real) ** 2)
    if dX is None:
        return gain, None
    return gain, float(gain / (4.0 * dX**2))


def simulate(config: SystemConfig, pulse: PulseSpec, dt: Optional[float] = None, quadratures: bool = False,
             t_end: Optional[float] = None) -> tuple[AmplifierReport, TimeSeries]:
    """Run the full pipeline for one parameter point."""
    series, _ = evolve(config, pulse, dt=dt, t_end=t_end, keep_states=quadratures)
    series = output_moments(series)
    numbers = photon_numbers(series)
    probs = emission_probabilities(numbers, config)
    n = config.atom_count
    report = AmplifierReport(
        **asdict(numbers),
        **probs,
        conservation_residual=numbers.N_a + numbers.N_b - numbers.N_in - n,
        t_end=float(series.t[-1]),
        dt=float(series.dt),
    )
    theta = pulse.phase(config)
    f = mode_function(pulse, series.t[: series.tp_index + 1])
    if quadratures:
        grid2 = assemble_two_time(config, pulse, dt=dt, series=series)
        quad = project_mode(series, grid2, f, config)
        report.dX, report.dY = quad.dX, quad.dY
        report.G, report.R_SN = gain_and_snr(quad.c_in, quad.c_out, theta, quad.dX)
    else:
        report.G, _ = gain_and_snr(*mode_amplitudes(series, f), theta)
    report.gain_defined = report.G is not None
    return report, series.with_channels(states=None)
