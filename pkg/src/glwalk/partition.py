"""Partition of unity on P(V) built from tent functions of -log delta.

The mesh a_n = 1/log n becomes finer as the horizon grows; indices are
capped at M_n = floor(A log^2 n), with the tail always represented by the
upper-CDF term chi_bar.
"""

from dataclasses import dataclass

import numpy as np

from .projective import DualPoint, ProjectivePoint, log_delta


@dataclass(frozen=True)
class PartitionScheme:
    """Mesh parameters: a_n = 1/log n and the cap M_n = floor(A log^2 n)."""

    n: int
    A: float = 4.0

    def __post_init__(self):
        if self.n < 18:
            raise ValueError("partition requires n >= 18 (so that a_n e^{a_n} <= 1/2)")
        if self.A <= 0.0:
            raise ValueError("A must be positive")
        a = self.a_n
        assert a * np.exp(a) <= 0.5
        assert self.m_n >= 1

    @property
    def a_n(self) -> float:
        return 1.0 / np.log(self.n)

    @property
    def m_n(self) -> int:
        return int(np.floor(self.A * np.log(self.n) ** 2))


def uniform_cdf(t):
    """CDF of the uniform distribution on [0, 1]."""
    return np.clip(t, 0.0, 1.0)


def u_nk(scheme: PartitionScheme, k: int, t):
    """U((t - (k-1) a_n) / a_n); accepts scalars or arrays, +inf maps to 1."""
    a = scheme.a_n
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore"):
        scaled = (t - (k - 1) * a) / a
    return uniform_cdf(np.where(np.isposinf(t), np.inf, scaled))


def h_nk(scheme: PartitionScheme, k: int, t):
    """Tent bump U_{n,k} - U_{n,k+1}, supported on [a_n(k-1), a_n(k+1)]."""
    return u_nk(scheme, k, t) - u_nk(scheme, k + 1, t)


def neg_log_delta(x: ProjectivePoint, y: DualPoint) -> float:
    ld = log_delta(x, y)
    return np.inf if not np.isfinite(ld) else -ld


def chi(scheme: PartitionScheme, k: int, y: DualPoint, x: ProjectivePoint) -> float:
    """chi_{n,k}^y(x) = h_{n,k}(-log delta(x, y)); 0 for all finite k when delta = 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return float(h_nk(scheme, k, neg_log_delta(x, y)))


def chi_bar(scheme: PartitionScheme, k: int, y: DualPoint, x: ProjectivePoint) -> float:
    """chi_bar_{n,k}^y(x) = U_{n,k}(-log delta(x, y)); 1 when delta = 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return float(u_nk(scheme, k, neg_log_delta(x, y)))


def chi_values(scheme: PartitionScheme, k: int, t):
    """Vectorized chi over precomputed values t = -log delta."""
    return h_nk(scheme, k, t)


def chi_bar_values(scheme: PartitionScheme, k: int, t):
    return u_nk(scheme, k, t)


def partition_check(scheme: PartitionScheme, y: DualPoint, xs) -> float:
    """Max deviation of sum_{k<=M_n} chi + chi_bar_{M_n+1} from 1 over samples."""
    t = np.array([neg_log_delta(x, y) for x in xs])
    total = chi_bar_values(scheme, scheme.m_n + 1, t)
    for k in range(scheme.m_n + 1):
        total = total + chi_values(scheme, k, t)
    return float(np.max(np.abs(total - 1.0)))


def holder_estimate(f, gamma: float, n_pairs: int, rng, vectorized: bool = False) -> float:
    """Sampled lower bound on ||f||_gamma = ||f||_inf + [f]_gamma (d = 2).

    Pairs are drawn at log-uniform separations down to 1e-8 so that the
    Hoelder quotient is probed across scales.  With vectorized=True, f maps
    an array of angles to an array of values instead of taking points.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must be in (0, 1]")
    theta = rng.uniform(0.0, np.pi, size=n_pairs)
    eps = np.exp(rng.uniform(np.log(1e-8), np.log(np.pi / 2), size=n_pairs))
    if vectorized:
        f1 = np.asarray(f(theta), dtype=float)
        f2 = np.asarray(f(theta + eps), dtype=float)
        sup = float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))
        dist = np.abs(np.sin(eps))
        good = dist > 0.0
        quot = float(np.max(np.abs(f1 - f2)[good] / dist[good] ** gamma, initial=0.0))
        return sup + quot
    sup = 0.0
    quot = 0.0
    for th, e in zip(theta, eps):
        x1 = ProjectivePoint.from_angle(th)
        x2 = ProjectivePoint.from_angle(th + e)
        f1, f2 = f(x1), f(x2)
        sup = max(sup, abs(f1), abs(f2))
        dist = abs(np.sin(e))  # angular distance between the two lines
        if dist > 0.0:
            quot = max(quot, abs(f1 - f2) / dist**gamma)
    return sup + quot
