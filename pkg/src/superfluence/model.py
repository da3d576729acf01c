"""System and pulse configuration, drive envelopes and input photon numbers.

All quantities live in the frame rotating at the pulse carrier, so the
envelope returned here is the slowly varying amplitude of the coherent
input field at the atoms.  Times are in units of ``1/gamma`` when
``gamma == 1`` (the default).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate


class Shape(str, enum.Enum):
    RECTANGULAR = "rect"
    SINE = "sine"

    @classmethod
    def parse(cls, value: "Shape | str") -> "Shape":
        if isinstance(value, Shape):
            return value
        key = str(value).strip().lower()
        aliases = {"rect": cls.RECTANGULAR, "rectangular": cls.RECTANGULAR, "sine": cls.SINE, "sin": cls.SINE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown pulse shape {value!r}") from None


@dataclass(frozen=True)
class SystemConfig:
    """Atoms and waveguide.

    Parameters
    ----------
    atom_count : int
        Number of atoms ``N`` sitting at the same point of the waveguide.
    gamma : float
        Total radiative decay rate into the waveguide (both directions).
    theta : float
        Default carrier phase of the input pulse, used when the pulse does
        not carry its own.
    detuning : float
        Atomic transition minus carrier frequency.
    """

    atom_count: int
    gamma: float = 1.0
    theta: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if int(self.atom_count) != self.atom_count or self.atom_count < 1:
            raise ValueError(f"atom_count must be a positive integer, got {self.atom_count!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        object.__setattr__(self, "atom_count", int(self.atom_count))


@dataclass(frozen=True)
class PulseSpec:
    """Input pulse of duration ``t_p`` and area ``area`` (radians).

    The envelope is nonzero on the half-open window ``[0, t_p)``.
    ``theta=None`` defers the carrier phase to :class:`SystemConfig`.
    """

    shape: Shape
    t_p: float
    area: float = np.pi
    theta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape.parse(self.shape))
        if not (np.isfinite(self.t_p) and self.t_p > 0):
            raise ValueError(f"t_p must be positive, got {self.t_p!r}")
        if not (np.isfinite(self.area) and self.area >= 0):
            raise ValueError(f"area must be non-negative, got {self.area!r}")

    def phase(self, config: SystemConfig) -> float:
        return config.theta if self.theta is None else float(self.theta)


def peak_amplitude(pulse: PulseSpec, config: SystemConfig) -> float:
    """Real peak amplitude of the envelope (``Omega/sqrt(2 gamma)`` or ``E_S``)."""
    root = np.sqrt(2.0 * config.gamma)
    if pulse.shape is Shape.RECTANGULAR:
        return pulse.area / pulse.t_p / root
    return pulse.area * np.pi / (2.0 * pulse.t_p * root)


def envelope(pulse: PulseSpec, config: SystemConfig, t, closed: bool = False):
    """Complex drive amplitude at time(s) ``t``.

    With ``closed=True`` the pulse formula is also applied at ``t == t_p``,
    giving the left limit there; integrators use this on steps that end at
    the trailing edge of the pulse.
    """
    t = np.asarray(t, dtype=float)
    amp = peak_amplitude(pulse, config) * np.exp(1j * pulse.phase(config))
    inside = (t >= 0.0) & ((t <= pulse.t_p) if closed else (t < pulse.t_p))
    if pulse.shape is Shape.RECTANGULAR:
        profile = np.ones_like(t)
    else:
        profile = np.sin(np.pi * t / pulse.t_p)
    out = np.where(inside, amp * profile, 0.0 + 0.0j)
    return out[()] if out.ndim == 0 else out


def mean_input_photons(pulse: PulseSpec, config: SystemConfig) -> float:
    """Closed-form mean photon number of the input pulse, int |E(t)|^2 dt."""
    if pulse.shape is Shape.RECTANGULAR:
        return pulse.area**2 / (2.0 * config.gamma * pulse.t_p)
    return pulse.area**2 * np.pi**2 / (16.0 * config.gamma * pulse.t_p)


def pulse_area_check(pulse: PulseSpec, config: Optional[SystemConfig] = None) -> float:
    """Numerically integrated pulse area, sqrt(2 gamma) |int E(t) dt|."""
    if config is None:
        config = SystemConfig(atom_count=1)
    if pulse.area == 0:
        return 0.0

    def part(t, which):
        value = envelope(pulse, config, t, closed=True)
        return value.real if which == 0 else value.imag

    re, _ = integrate.quad(part, 0.0, pulse.t_p, args=(0,), epsabs=0.0, epsrel=1e-12, limit=200)
    im, _ = integrate.quad(part, 0.0, pulse.t_p, args=(1,), epsabs=0.0, epsrel=1e-12, limit=200)
    return float(np.sqrt(2.0 * config.gamma) * abs(complex(re, im)))


def pulse_for_input_photons(shape, area: float, n_in: float, gamma: float = 1.0, theta=None) -> PulseSpec:
    """Pulse of given area whose duration yields ``n_in`` input photons."""
    shape = Shape.parse(shape)
    if area <= 0 or n_in <= 0:
        raise ValueError("area and n_in must be positive to fix the pulse length")
    if shape is Shape.RECTANGULAR:
        t_p = area**2 / (2.0 * gamma * n_in)
    else:
        t_p = area**2 * np.pi**2 / (16.0 * gamma * n_in)
    return PulseSpec(shape, t_p, area, theta)
