"""Diamagnetic Kepler problem in the m=0 parabolic bound-state basis.

Atomic units throughout (hbar = m_e = e = 1, Rydberg = 1/2), magnetic field
along z expressed by the dimensionless strength gamma, cyclotron frequency
omega = gamma/2. At m=0 the paramagnetic term vanishes and the perturbation
is the diamagnetic one, (gamma^2/8) * rho^2 with rho^2 = x^2 + y^2.

In parabolic coordinates (xi, eta, phi) the m=0 bound states of shell n are

    psi_{n1 n2}(xi, eta) = sqrt(2)/n^2 * exp(-(xi+eta)/(2n))
                           * L_{n1}(xi/n) * L_{n2}(eta/n) / sqrt(2 pi),

with rho^2 = xi*eta and volume element (xi+eta)/4 dxi deta dphi. The rho^2
element between shells n and n' then separates into two 1D integrals

    J_k(p, p') = a^-(k+1) * integral t^k e^-t L_p(t/(a n)) L_p'(t/(a n')) dt,
    a = (n + n')/(2 n n'),  k = 1, 2,

and  <n1 n2|rho^2|n1' n2'> = (C_n C_n'/4) * (J_2(n1,n1') J_1(n2,n2')
                              + J_1(n1,n1') J_2(n2,n2')),  C_n = sqrt(2)/n^2.

The integrands are polynomials times the generalized Laguerre weight, so
Gauss-Laguerre rules sized past the degree bound evaluate them exactly; the
build still re-evaluates everything at twice the node count and rejects the
matrix if any element moves.

The bound basis is incomplete (no continuum), so results depend on the
20-shell truncation convention; that convention is part of the model here,
not a numerical knob.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_laguerre, roots_genlaguerre

from .errors import ConfigurationError, InputError, NumericalError
from .linalg import ShellGroup, ShellPartition, SymmetricMatrix

QUADRATURE_AGREEMENT_RTOL = 1e-8
# Both rule sizes integrate the polynomial integrands exactly, so any
# disagreement is summation roundoff, observed at ~1e-14 of the matrix scale.
# Elements below FLOOR * scale carry no weight in the Hamiltonian; flooring
# the denominator there keeps the relative check from amplifying that noise
# (a wrong rule would miss by orders of magnitude, not parts in 1e10).
QUADRATURE_FLOOR_REL = 1e-6


def shell_energy(n: int) -> float:
    """Coulomb bound energy -1/(2 n^2) in atomic units."""
    return -0.5 / (n * n)


def default_gamma_grid(
    target_shell: int = 10,
    eps_lo: float = -0.80,
    eps_hi: float = -0.30,
    points: int = 61,
) -> tuple[float, ...]:
    """Geometric gamma grid whose zeroth-order scaled energies for the
    target shell span [eps_lo, eps_hi]."""
    if eps_lo >= eps_hi or eps_hi >= 0:
        raise ConfigurationError("need eps_lo < eps_hi < 0")
    e_n = abs(shell_energy(target_shell))
    g_lo = (e_n / abs(eps_lo)) ** 1.5
    g_hi = (e_n / abs(eps_hi)) ** 1.5
    return tuple(float(g) for g in np.geomspace(g_lo, g_hi, points))


@dataclass(frozen=True)
class ParabolicState:
    """Hydrogen bound state |n1, n2, m> in parabolic quantum numbers."""

    n1: int
    n2: int
    m: int = 0

    @property
    def n(self) -> int:
        return self.n1 + self.n2 + abs(self.m) + 1

    @property
    def energy(self) -> float:
        return shell_energy(self.n)


@dataclass(frozen=True)
class KeplerConfig:
    max_n: int = 20
    m: int = 0
    target_shell: int = 10
    gamma_grid: tuple[float, ...] = field(default_factory=default_gamma_grid)

    def __post_init__(self):
        if int(self.max_n) != self.max_n or self.max_n < 1:
            raise ConfigurationError(f"max_n must be a positive integer, got {self.max_n}")
        if self.m != 0:
            raise ConfigurationError("only the m=0 subspace is supported")
        if int(self.target_shell) != self.target_shell or not (
            1 <= self.target_shell <= self.max_n
        ):
            raise ConfigurationError(
                f"target_shell must lie in [1, max_n={self.max_n}], got {self.target_shell}"
            )
        grid = tuple(float(g) for g in self.gamma_grid)
        if any(not math.isfinite(g) or g <= 0 for g in grid):
            raise ConfigurationError("gamma grid values must be positive and finite")
        object.__setattr__(self, "gamma_grid", grid)


def enumerate_parabolic_basis(cfg: KeplerConfig) -> tuple[list[ParabolicState], ShellPartition]:
    """Canonical order: ascending principal n, then ascending n1. Shell n
    holds n states at m=0."""
    states: list[ParabolicState] = []
    groups: list[ShellGroup] = []
    for n in range(1, cfg.max_n + 1):
        start = len(states)
        for n1 in range(n):
            states.append(ParabolicState(n1, n - 1 - n1, 0))
        groups.append(
            ShellGroup(
                label=n,
                indices=tuple(range(start, len(states))),
                energy=shell_energy(n),
            )
        )
    return states, ShellPartition(tuple(groups))


def _laguerre_tables(max_order: int, scaled_nodes: np.ndarray) -> np.ndarray:
    orders = np.arange(max_order + 1)[:, None]
    return eval_laguerre(orders, scaled_nodes[None, :])


def _rho2_entries(cfg: KeplerConfig, nodes: int) -> np.ndarray:
    states, partition = enumerate_parabolic_basis(cfg)
    dim = len(states)
    pmax = cfg.max_n - 1
    rules = {k: roots_genlaguerre(nodes, k) for k in (1, 2)}
    rho2 = np.zeros((dim, dim))
    shells = {g.label: np.asarray(g.indices) for g in partition.groups}

    for n in range(1, cfg.max_n + 1):
        for npr in range(n, cfg.max_n + 1):
            a = (n + npr) / (2.0 * n * npr)
            j = {}
            for k in (1, 2):
                t, w = rules[k]
                left = _laguerre_tables(pmax, t / (a * n))
                right = _laguerre_tables(pmax, t / (a * npr))
                j[k] = a ** (-(k + 1)) * (left * w) @ right.T
                if n == npr:
                    # analytically symmetric, but the matmul's reduction
                    # order is position-dependent; symmetrize so the
                    # n1<->n2 exchange holds bitwise
                    j[k] = 0.5 * (j[k] + j[k].T)
            pref = (math.sqrt(2.0) / n ** 2) * (math.sqrt(2.0) / npr ** 2) / 4.0
            bra = shells[n]
            ket = shells[npr]
            for bi, i in enumerate(bra):
                p1 = bi  # n1 of the bra state, by enumeration order
                p2 = n - 1 - bi
                for kj, jdx in enumerate(ket):
                    q1 = kj
                    q2 = npr - 1 - kj
                    val = pref * (j[2][p1, q1] * j[1][p2, q2] + j[1][p1, q1] * j[2][p2, q2])
                    rho2[i, jdx] = val
                    rho2[jdx, i] = val
    return rho2


def build_rho2(cfg: KeplerConfig) -> SymmetricMatrix:
    """rho^2 operator matrix with a built-in quadrature self-check.

    The element integrands are polynomials against the Laguerre weight, so
    the base rule is already exact; a second evaluation at twice the node
    count must agree to QUADRATURE_AGREEMENT_RTOL relative, else the
    offending element is named in a NumericalError.
    """
    nodes = max(cfg.max_n + 4, 12)
    first = _rho2_entries(cfg, nodes)
    second = _rho2_entries(cfg, 2 * nodes)
    scale = np.abs(first).max()
    denom = np.maximum(np.maximum(np.abs(first), np.abs(second)), QUADRATURE_FLOOR_REL * scale)
    bad = np.abs(first - second) > QUADRATURE_AGREEMENT_RTOL * denom
    if np.any(bad):
        states, _ = enumerate_parabolic_basis(cfg)
        i, jdx = np.argwhere(bad)[0]
        raise NumericalError(
            f"quadrature self-check failed for <{states[i]}|rho^2|{states[jdx]}>: "
            f"{first[i, jdx]!r} vs {second[i, jdx]!r} at {nodes}/{2 * nodes} nodes"
        )
    return SymmetricMatrix(first)


def build_h(cfg: KeplerConfig, gamma: float, rho2: SymmetricMatrix | None = None) -> SymmetricMatrix:
    """H = diag(-1/(2n^2)) + (gamma^2/8) rho^2.

    gamma = 0 returns the bare Coulomb diagonal. Pass a prebuilt rho2 to
    amortize the quadrature across a gamma scan.
    """
    if not (math.isfinite(gamma) and gamma >= 0):
        raise InputError(f"gamma must be non-negative and finite, got {gamma}")
    states, _ = enumerate_parabolic_basis(cfg)
    h = np.diag([s.energy for s in states])
    if gamma > 0:
        if rho2 is None:
            rho2 = build_rho2(cfg)
        if rho2.dim != len(states):
            raise InputError(
                f"rho2 has dim {rho2.dim} but the basis holds {len(states)} states"
            )
        h = h + (gamma * gamma / 8.0) * rho2.entries
    return SymmetricMatrix(h)


def scaled_energy(e: float, gamma: float) -> float:
    """Standard dimensionless energy eps = E * gamma^(-2/3)."""
    if not (math.isfinite(gamma) and gamma > 0):
        raise InputError(f"gamma must be positive and finite, got {gamma}")
    return e * gamma ** (-2.0 / 3.0)
