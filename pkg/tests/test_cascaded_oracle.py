"""Brute-force check of the mode-projected output moments.

The forward output is fed into a virtual cavity whose time-dependent
coupling absorbs exactly the temporal mode ``f``; at ``t = t_p`` the cavity
holds the mode ``c_out``.  The joint atoms + cavity master equation is
integrated densely with an adaptive scipy solver, so nothing is shared with
the RK4 or regression kernels.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from superfluence import PulseSpec, Shape, SystemConfig, assemble_two_time, evolve, output_moments, project_mode
from superfluence.metrics import mode_function
from superfluence.model import envelope


def cascaded_cavity(config, pulse, dim, t0=1e-7):
    n = config.atom_count
    kappa = math.sqrt(config.gamma / 2)
    tp = pulse.t_p
    jm = np.zeros((n + 1, n + 1))
    for m in range(1, n + 1):
        jm[m - 1, m] = math.sqrt(m * (n - m + 1))
    b = np.diag(np.sqrt(np.arange(1, dim)), 1)
    big_jm = np.kron(jm, np.eye(dim))
    big_b = np.kron(np.eye(n + 1), b)
    eye = np.eye((n + 1) * dim)
    if pulse.shape is Shape.SINE:
        mode = lambda t: math.sqrt(2 / tp) * math.sin(math.pi * t / tp)
        absorbed = lambda t: t / tp - math.sin(2 * math.pi * t / tp) / (2 * math.pi)
    else:
        mode = lambda t: 1 / math.sqrt(tp)
        absorbed = lambda t: t / tp

    def rhs(t, y):
        rho = y.view(complex).reshape(eye.shape)
        e = complex(envelope(pulse, config, t, closed=True))
        g = -mode(t) / math.sqrt(absorbed(t))
        la = e * eye - kappa * big_jm
        lb = g * big_b
        h = 0.5j * kappa * (e * big_jm.T - np.conj(e) * big_jm) + 0.5j * (la.conj().T @ lb - lb.conj().T @ la)
        d = -1j * (h @ rho - rho @ h)
        for op in (la + lb, kappa * big_jm):
            opd = op.conj().T
            d += op @ rho @ opd - 0.5 * (opd @ op @ rho + rho @ opd @ op)
        return d.reshape(-1).view(float)

    rho0 = np.zeros(eye.shape, dtype=complex)
    rho0[n * dim, n * dim] = 1.0
    sol = solve_ivp(rhs, (t0, tp), rho0.reshape(-1).view(float), method="DOP853", rtol=1e-10, atol=1e-12)
    assert sol.status == 0
    rho = sol.y[:, -1].view(complex).reshape(eye.shape)
    mean = np.trace(rho @ big_b)
    top = np.kron(np.eye(n + 1), np.diag((np.arange(dim) >= dim - 3).astype(float)))
    return {
        "mean": mean,
        "cdc": np.trace(rho @ big_b.T @ big_b) - abs(mean) ** 2,
        "cc": np.trace(rho @ big_b @ big_b) - mean**2,
        "top": np.trace(rho @ top).real,
    }


@pytest.mark.slow
@pytest.mark.parametrize("n, shape, tp, dim", [(1, Shape.SINE, 0.5, 48), (2, Shape.RECTANGULAR, 0.5, 44)])
def test_mode_moments_match_cascaded_cavity(n, shape, tp, dim):
    config = SystemConfig(n)
    pulse = PulseSpec(shape, tp)
    ref = cascaded_cavity(config, pulse, dim)
    assert ref["top"] < 1e-9

    series, _ = evolve(config, pulse, keep_states=True)
    series = output_moments(series)
    grid = assemble_two_time(config, pulse, series=series)
    q = project_mode(series, grid, mode_function(pulse, grid.t), config)

    assert q.c_out == pytest.approx(ref["mean"], abs=1e-6)
    assert q.cdc.real == pytest.approx(ref["cdc"].real, abs=1e-6)
    assert q.cc == pytest.approx(ref["cc"], abs=1e-6)
    dx = math.sqrt((1 + 2 * ref["cdc"].real + 2 * ref["cc"].real) / 4)
    dy = math.sqrt((1 + 2 * ref["cdc"].real - 2 * ref["cc"].real) / 4)
    assert q.dX == pytest.approx(dx, abs=1e-6)
    assert q.dY == pytest.approx(dy, abs=1e-6)
