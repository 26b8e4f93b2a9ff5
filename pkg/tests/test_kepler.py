import math

import numpy as np
import pytest

import oracles
import specfrag.kepler as kepler_mod
from specfrag.errors import ConfigurationError, InputError, NumericalError
from specfrag.kepler import (
    KeplerConfig,
    ParabolicState,
    _rho2_entries,
    build_h,
    build_rho2,
    default_gamma_grid,
    enumerate_parabolic_basis,
    scaled_energy,
    shell_energy,
)
from specfrag.linalg import eigh


def small_cfg(max_n, **kw):
    kw.setdefault("target_shell", min(2, max_n))
    kw.setdefault("gamma_grid", (1e-3,))
    return KeplerConfig(max_n=max_n, **kw)


def test_default_basis_counts():
    states, part = enumerate_parabolic_basis(KeplerConfig())
    assert len(states) == 210
    assert len(part.groups) == 20
    assert len(part.group(10).indices) == 10


def test_single_shell():
    states, part = enumerate_parabolic_basis(small_cfg(1, target_shell=1))
    assert states == [ParabolicState(0, 0, 0)]
    assert part.groups[0].energy == -0.5


def test_enumeration_order_and_energies():
    states, part = enumerate_parabolic_basis(small_cfg(5))
    ns = [s.n for s in states]
    assert ns == sorted(ns)
    for g in part.groups:
        n1s = [states[i].n1 for i in g.indices]
        assert n1s == list(range(g.label))
        assert g.energy == pytest.approx(-0.5 / g.label ** 2)
    energies = [g.energy for g in part.groups]
    assert all(a < b < 0 for a, b in zip(energies, energies[1:]))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        KeplerConfig(max_n=0)
    with pytest.raises(ConfigurationError):
        KeplerConfig(target_shell=25)  # beyond max_n
    with pytest.raises(ConfigurationError):
        KeplerConfig(m=1)
    with pytest.raises(ConfigurationError):
        KeplerConfig(gamma_grid=(0.0,))
    with pytest.raises(ConfigurationError):
        KeplerConfig(gamma_grid=(-1e-3,))
    with pytest.raises(ConfigurationError):
        KeplerConfig(gamma_grid=(float("inf"),))


class TestRho2:
    def test_hydrogen_ground_expectation(self):
        rho2 = build_rho2(small_cfg(2))
        assert rho2.entries[0, 0] == pytest.approx(2.0, rel=1e-12)
        assert rho2.entries[0, 0] == pytest.approx(
            oracles.hydrogen_ground_rho2(), rel=1e-12
        )

    def test_exchange_symmetry(self):
        cfg = small_cfg(5)
        states, _ = enumerate_parabolic_basis(cfg)
        rho2 = build_rho2(cfg).entries
        swap = [states.index(ParabolicState(s.n2, s.n1, 0)) for s in states]
        np.testing.assert_array_equal(rho2, rho2[np.ix_(swap, swap)])

    def test_positive_semidefinite(self):
        rho2 = build_rho2(KeplerConfig()).entries
        eigs = np.linalg.eigvalsh(rho2)
        assert eigs.min() >= -1e-10 * np.abs(eigs).max()

    def test_node_doubling_agreement(self):
        cfg = KeplerConfig()
        nodes = max(cfg.max_n + 4, 12)
        a = _rho2_entries(cfg, nodes)
        b = _rho2_entries(cfg, 2 * nodes)
        scale = np.abs(a).max()
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6 * scale)
        assert (np.abs(a - b) / denom).max() <= 1e-8

    def test_spherical_basis_oracle(self):
        direct = build_rho2(small_cfg(4)).entries
        via, u = oracles.rho2_parabolic_via_spherical(4)
        assert np.abs(u @ u.T - np.eye(10)).max() <= 1e-10
        scale = np.abs(direct).max()
        denom = np.maximum(np.maximum(np.abs(via), np.abs(direct)), 1e-6 * scale)
        assert (np.abs(via - direct) / denom).max() <= 1e-8

    def test_self_check_failure_named(self, monkeypatch):
        monkeypatch.setattr(kepler_mod, "QUADRATURE_AGREEMENT_RTOL", 0.0)
        with pytest.raises(NumericalError, match="rho\\^2"):
            build_rho2(small_cfg(6))


class TestHamiltonian:
    def test_gamma_zero_is_coulomb_diagonal(self):
        cfg = small_cfg(4)
        states, _ = enumerate_parabolic_basis(cfg)
        h = build_h(cfg, 0.0)
        expected = np.diag([shell_energy(s.n) for s in states])
        np.testing.assert_array_equal(h.entries, expected)

    def test_gamma_difference_is_scaled_rho2(self):
        cfg = small_cfg(5)
        rho2 = build_rho2(cfg)
        h1 = build_h(cfg, 0.1, rho2=rho2).entries
        h0 = build_h(cfg, 0.0, rho2=rho2).entries
        np.testing.assert_allclose(
            h1 - h0,
            (0.1 ** 2 / 8.0) * rho2.entries,
            rtol=1e-12,
            atol=1e-15 * np.abs(rho2.entries).max(),
        )

    def test_rejects_negative_gamma(self):
        with pytest.raises(InputError):
            build_h(small_cfg(3), -0.1)

    def test_rejects_mismatched_rho2(self):
        rho2 = build_rho2(small_cfg(3))
        with pytest.raises(InputError):
            build_h(small_cfg(4), 1e-3, rho2=rho2)

    def test_first_order_shifts_richardson(self):
        """Exact eigenvalues at small gamma, Richardson-extrapolated in
        gamma^2, reproduce the secular eigenvalues of the shell block."""
        cfg = KeplerConfig(max_n=12, target_shell=10, gamma_grid=(1e-4,))
        states, part = enumerate_parabolic_basis(cfg)
        rho2 = build_rho2(cfg)
        ix = np.array(part.group(10).indices)
        block = rho2.entries[np.ix_(ix, ix)]
        slopes = np.sort(np.linalg.eigvalsh(block)) / 8.0  # dE/d(gamma^2)

        e10 = shell_energy(10)
        g = 1e-4

        def shell10_shifts(gamma):
            ev = eigh(build_h(cfg, gamma, rho2=rho2)).eigenvalues
            nearest = np.sort(np.abs(ev - e10).argsort()[: len(ix)])
            return np.sort(ev[nearest] - e10)

        f1 = shell10_shifts(g)
        f2 = shell10_shifts(g / 2.0)
        richardson = (16.0 * f2 - f1) / 3.0
        np.testing.assert_allclose(richardson, slopes * g * g, rtol=1e-3)


class TestScaledEnergy:
    def test_gamma_one_identity(self):
        assert scaled_energy(-0.5, 1.0) == -0.5

    def test_round_trip_at_critical_point(self):
        e = shell_energy(10)
        gamma = (abs(e) / 0.54) ** 1.5
        eps = scaled_energy(e, gamma)
        assert eps == pytest.approx(-0.54, rel=1e-12)
        assert eps * gamma ** (2.0 / 3.0) == pytest.approx(e, rel=1e-14)

    def test_rejects_non_positive_gamma(self):
        with pytest.raises(InputError):
            scaled_energy(-0.5, 0.0)
        with pytest.raises(InputError):
            scaled_energy(-0.5, -1.0)


def test_default_gamma_grid_spans_scaled_window():
    grid = default_gamma_grid()
    assert len(grid) == 61
    assert all(a < b for a, b in zip(grid, grid[1:]))
    e10 = shell_energy(10)
    assert scaled_energy(e10, grid[0]) == pytest.approx(-0.80, rel=1e-12)
    assert scaled_energy(e10, grid[-1]) == pytest.approx(-0.30, rel=1e-12)
    # the scan covers the transition window
    eps = [scaled_energy(e10, g) for g in grid]
    assert min(eps) <= -0.7 and max(eps) >= -0.4
