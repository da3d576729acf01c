import math

import numpy as np
import pytest

from conftest import random_state
from superfluence import (
    CollectiveState,
    PulseSpec,
    Shape,
    SystemConfig,
    assemble_two_time,
    evolve,
    evolve_slab,
    expect_JpJm,
    mode_function,
    output_moments,
    project_mode,
    seed_slab,
)
from superfluence.dicke import ladder_weights, pulse_grid
from superfluence.oracles import single_atom_regression
from superfluence.regression import combine, contract


def spin_ops(n):
    jm = np.zeros((n + 1, n + 1))
    for m in range(1, n + 1):
        jm[m - 1, m] = math.sqrt(m * (n - m + 1))
    return jm, jm.T


def test_ground_state_raising_seeds_vanish():
    slab = seed_slab(CollectiveState.ground(4))
    assert np.all(slab.seeds[:4] == 0)


def test_excited_state_top_pattern_seed():
    n = 5
    slab = seed_slab(CollectiveState.excited(n))
    p = slab.patterns.index((n, n - 1))
    expected = np.zeros((n + 1, n + 1))
    expected[n - 1, n] = 1.0
    np.testing.assert_array_equal(slab.seeds[p], expected)


@pytest.mark.parametrize("side", ["left", "right"])
def test_seed_rule(rng, side):
    n = 3
    s = random_state(rng, n)
    slab = seed_slab(CollectiveState(0.0, s), side)
    for (l, lp), x in zip(slab.patterns, slab.seeds):
        for m in range(n + 1):
            for mp in range(n + 1):
                if side == "left":
                    want = s[l, mp] if lp == m else 0
                else:
                    want = s[m, lp] if l == mp else 0
                assert x[m, mp] == want


@pytest.mark.parametrize("n", [1, 3, 6])
def test_equal_time_contraction(rng, n):
    rho = random_state(rng, n)
    s = rho.T.copy()
    jm, jp = spin_ops(n)
    slab = seed_slab(CollectiveState(0.0, s))
    pm = contract(combine(slab, "plus"), "minus")
    pp = contract(combine(slab, "plus"), "plus")
    mm = contract(combine(slab, "minus"), "minus")
    assert pm == pytest.approx(np.trace(rho @ jp @ jm), abs=1e-8)
    assert pm == pytest.approx(expect_JpJm(CollectiveState(0.0, s)), abs=1e-8)
    assert pp == pytest.approx(np.trace(rho @ jp @ jp), abs=1e-8)
    assert mm == pytest.approx(np.trace(rho @ jm @ jm), abs=1e-8)


def test_single_atom_regression_slab():
    config = SystemConfig(1)
    pulse = PulseSpec(Shape.RECTANGULAR, 3.0, area=0.0)
    h, _ = pulse_grid(pulse, config, 0.005)
    series, _ = evolve(config, pulse, dt=0.005, keep_states=True)
    k1 = 200
    slab = seed_slab(CollectiveState(series.t[k1], series.states[k1]))
    traj = evolve_slab(slab, pulse, config, 300, dt=0.005)
    corr = contract(traj[:, 0], "minus")  # J+ = tau_{1,0} for one atom
    t2 = series.t[k1] + h * np.arange(301)
    np.testing.assert_allclose(corr, single_atom_regression(series.t[k1], t2), atol=1e-6)


def test_single_atom_regression_grid():
    config = SystemConfig(1)
    grid = assemble_two_time(config, PulseSpec(Shape.RECTANGULAR, 2.0, area=0.0), dt=0.005)
    t1, t2 = np.meshgrid(grid.t, grid.t, indexing="ij")
    upper = t2 >= t1
    np.testing.assert_allclose(grid.c_pm[upper], single_atom_regression(t1[upper], t2[upper]), atol=1e-6)


@pytest.fixture(scope="module")
def sine3():
    config = SystemConfig(3)
    pulse = PulseSpec(Shape.SINE, 0.6, theta=0.4)
    dt = 0.6 / 120
    series, _ = evolve(config, pulse, dt=dt, keep_states=True)
    return config, pulse, dt, series, assemble_two_time(config, pulse, dt=dt, series=series)


def test_zero_lag_consistency(sine3):
    _, _, _, series, grid = sine3
    k = series.tp_index
    jm = series.jm[: k + 1]
    np.testing.assert_allclose(np.diagonal(grid.c_pm), series.jpjm[: k + 1] - np.abs(jm) ** 2, atol=1e-12)


def test_symmetries(sine3):
    grid = sine3[4]
    np.testing.assert_allclose(grid.c_pm, grid.c_pm.conj().T, atol=0)
    np.testing.assert_allclose(grid.c_pp, grid.c_pp.T, atol=0)
    np.testing.assert_allclose(grid.c_mm, grid.c_mm.T, atol=0)


def test_adjoint_symmetry_by_re_evolution(sine3, rng):
    """C_pm(t2, t1) for t2 > t1 from an independent run with J- seeded on the right at t1."""
    config, pulse, dt, series, grid = sine3
    k_p = series.tp_index
    jm = series.jm
    for _ in range(5):
        i = int(rng.integers(0, k_p))
        j = int(rng.integers(i + 1, k_p + 1))
        slab = seed_slab(CollectiveState(series.t[i], series.states[i]), side="right")
        traj = evolve_slab(slab, pulse, config, j - i, dt=dt)
        n = config.atom_count
        c = ladder_weights(n)[1:-1]
        x = np.tensordot(c, traj[-1, n:], axes=1)
        raw = contract(x, "plus")
        connected = raw - np.conj(jm[j]) * jm[i]
        assert connected == pytest.approx(grid.c_pm[j, i], abs=1e-8)
        assert connected == pytest.approx(np.conj(grid.c_pm[i, j]), abs=1e-8)


def test_pattern_route_matches_combined(sine3, rng):
    config, pulse, dt, series, grid = sine3
    k_p = series.tp_index
    n = config.atom_count
    for _ in range(3):
        i = int(rng.integers(0, k_p))
        slab = seed_slab(CollectiveState(series.t[i], series.states[i]))
        traj = evolve_slab(slab, pulse, config, k_p - i, dt=dt)
        c = ladder_weights(n)[1:-1]
        x = np.tensordot(c, traj[:, :n], axes=([0], [1]))
        jp = np.conj(series.jm[i])
        pm = contract(x, "minus") - jp * series.jm[i : k_p + 1]
        pp = contract(x, "plus") - jp * np.conj(series.jm[i : k_p + 1])
        np.testing.assert_allclose(pm, grid.c_pm[i, i:], atol=1e-10)
        np.testing.assert_allclose(pp, grid.c_pp[i, i:], atol=1e-10)


def test_vacuum_has_no_phase_correlations():
    grid = assemble_two_time(SystemConfig(10), PulseSpec(Shape.RECTANGULAR, 0.3, area=0.0), dt=0.003)
    assert np.all(grid.c_mm == 0)
    assert np.all(grid.c_pp == 0)
    assert np.all(np.isfinite(grid.c_pm))


def test_vacuum_selection_rule_dense_n2():
    """Independent dense propagation: from |2><2| with no drive, J- J- correlations stay zero."""
    n = 2
    jm, jp = spin_ops(n)
    gamma = 1.0
    l = math.sqrt(gamma) * jm
    ldl = l.T @ l

    def lind(x):
        return l @ x @ l.T - 0.5 * (ldl @ x + x @ ldl)

    rho = np.zeros((3, 3), dtype=complex)
    rho[2, 2] = 1
    h = 0.01
    for _ in range(30):
        rho = rho + h * lind(rho)
    x = jm @ rho  # seed for <J-(t1) J-(t2)>
    for _ in range(30):
        x = x + h * lind(x)
    assert np.trace(jm @ x) == 0


def test_grid_halving_changes_integrals_little():
    config = SystemConfig(3)
    pulse = PulseSpec(Shape.RECTANGULAR, 0.4)
    values = []
    for dt in (0.4 / 400, 0.4 / 800):
        series, _ = evolve(config, pulse, dt=dt, keep_states=True)
        series = output_moments(series)
        grid = assemble_two_time(config, pulse, dt=dt, series=series)
        q = project_mode(series, grid, mode_function(pulse, grid.t), config)
        values.append(np.array([q.cdc.real, q.cc.real, q.cc.imag, q.cdcd.real]))
    rel = np.abs(values[0] - values[1]) / np.max(np.abs(values[1]))
    assert np.all(rel < 1e-4)
