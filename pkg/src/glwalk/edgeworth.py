"""First-order Edgeworth evaluators and empirical-CDF comparison tools.

The coefficient expansion is

    mass * [Phi(t) + skew/(6 sigma^3 sqrt(n)) (1 - t^2) phi(t)]
        - (b + d)/(sigma sqrt(n)) phi(t)

and the cocycle variant drops the d term.  Values are reported as-is,
without clamping to [0, 1]: the statements are about the signed error and
clamping would mask defects.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .bias import GridFunction
from .partition import PartitionScheme, chi_bar_values, chi_values
from .projective import DualPoint, ProjectivePoint, ensemble_log_delta, ensemble_walk
from .spectral import SpectralData
from .tilt import log_weights

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def normal_cdf(t):
    """Standard normal CDF via the complementary error function."""
    return ndtr(t)


def normal_pdf(t):
    t = np.asarray(t, dtype=float)
    out = np.exp(-0.5 * t * t) / _SQRT_2PI
    return out if out.ndim else float(out)


@dataclass
class EdgeworthParams:
    """Inputs of the first-order expansion at horizon n."""

    drift: float  # Lambda'(s)
    scale: float  # sigma_s = sqrt(Lambda''(s))
    skew: float  # Lambda'''(s)
    bias_b: float  # b_{s,phi}(x)
    bias_d: float  # d_{s,phi}(y)
    n: int
    mass: float = 1.0  # pi_s(phi)

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("scale sigma_s must be strictly positive")
        if self.n < 1:
            raise ValueError("horizon n must be >= 1")


def edgeworth_coeff_cdf(params: EdgeworthParams, t):
    """Expansion of the coefficient CDF at normalized threshold t."""
    t = np.asarray(t, dtype=float)
    sq = np.sqrt(params.n)
    pdf = normal_pdf(t)
    val = params.mass * (
        ndtr(t) + params.skew / (6.0 * params.scale**3 * sq) * (1.0 - t * t) * pdf
    ) - (params.bias_b + params.bias_d) / (params.scale * sq) * pdf
    return val if val.ndim else float(val)


def edgeworth_cocycle_cdf(params: EdgeworthParams, t):
    """Expansion of the norm-cocycle CDF: same formula without the d term."""
    t = np.asarray(t, dtype=float)
    sq = np.sqrt(params.n)
    pdf = normal_pdf(t)
    val = params.mass * (
        ndtr(t) + params.skew / (6.0 * params.scale**3 * sq) * (1.0 - t * t) * pdf
    ) - params.bias_b / (params.scale * sq) * pdf
    return val if val.ndim else float(val)


@dataclass
class EcdfTable:
    """Sorted samples with step-function evaluation."""

    sorted_values: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EcdfTable":
        return cls(np.sort(np.asarray(samples, dtype=float)))

    @property
    def n(self) -> int:
        return self.sorted_values.shape[0]

    def ecdf(self, t):
        """Right-continuous empirical CDF at t."""
        idx = np.searchsorted(self.sorted_values, np.asarray(t, dtype=float), side="right")
        out = idx / self.n
        return out if out.ndim else float(out)


def ecdf_ks(samples, reference) -> float:
    """Exact sup |ECDF - reference| over both one-sided deviations at jumps."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.shape[0]
    ref = np.asarray(reference(xs), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(hi - ref), np.max(ref - lo)))


def grid_ks(table: EcdfTable, reference, t_grid) -> float:
    """Max |ECDF - reference| over a fixed evaluation grid.

    Used for the emitted CSV values so a downstream consumer of the same
    grid reproduces the number exactly.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    return float(np.max(np.abs(table.ecdf(t_grid) - np.asarray(reference(t_grid)))))


def default_t_grid() -> np.ndarray:
    """241 points on [-6, 6] with step 0.05."""
    return np.linspace(-6.0, 6.0, 241)


@dataclass
class SandwichRow:
    k: int
    lower: float
    value: float
    upper: float
    std_error: float
    ok: bool


@dataclass
class SandwichReport:
    n: int
    t: float
    rows: list
    tail_w: float
    tail_w_tol: float
    tail_ok: bool

    @property
    def ok(self) -> bool:
        return self.tail_ok and all(r.ok for r in self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]


def sandwich_diagnostic(
    model,
    spec: SpectralData,
    scheme: PartitionScheme,
    x: ProjectivePoint,
    y: DualPoint,
    phi: GridFunction,
    t: float,
    n_mc: int,
    rng,
    w_tol: float | None = None,
) -> SandwichReport:
    """Monte Carlo check of the proof's threshold sandwich, slice by slice.

    Estimates, under the tilted measure, the sliced coefficient CDF term
    F_{n,k}(t) together with its cocycle upper bound at threshold shift
    (k+1) a_n and lower bound at shift (k-1) a_n, plus the tail mass W_n.
    The bounds hold pathwise, so each row is asserted within 3 SE.
    """
    n = scheme.n
    a = scheme.a_n
    sig = spec.sigma_s
    drift = spec.lambda1
    s_vals, dirs = ensemble_walk(model, x, n, n_mc, rng)
    lw = log_weights(spec, s_vals, dirs, x, n)
    w = np.exp(lw - np.max(lw))
    w_sum = float(w.sum())
    ld = ensemble_log_delta(dirs, y)
    neg_ld = np.where(np.isfinite(ld), -ld, np.inf)
    coeff = s_vals + ld
    ang = np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi
    phi_vals = phi.at(ang)
    z_coeff = (coeff - n * drift) / (sig * np.sqrt(n))
    z_cocycle = (s_vals - n * drift) / (sig * np.sqrt(n))

    def wmean_and_se(vals):
        est = float(np.sum(w * vals) / w_sum)
        resid = w * (vals - est)
        se = float(np.std(resid, ddof=1) * n_mc / (w_sum * np.sqrt(n_mc)))
        return est, se

    rows = []
    for k in range(scheme.m_n + 1):
        if k < scheme.m_n:
            slice_phi = phi_vals * chi_values(scheme, k, neg_ld)
        else:
            slice_phi = phi_vals * chi_bar_values(scheme, k, neg_ld)
        f_val, f_se = wmean_and_se(slice_phi * (z_coeff <= t))
        up_val, up_se = wmean_and_se(
            slice_phi * (z_cocycle <= t + (k + 1) * a / (sig * np.sqrt(n)))
        )
        lo_val, lo_se = wmean_and_se(
            slice_phi * (z_cocycle <= t + (k - 1) * a / (sig * np.sqrt(n)))
        )
        se = max(f_se, up_se, lo_se)
        ok = (lo_val - 3 * se <= f_val) and (f_val <= up_val + 3 * se)
        rows.append(SandwichRow(k=k, lower=lo_val, value=f_val, upper=up_val,
                                std_error=se, ok=ok))
    tail_phi = phi_vals * chi_bar_values(scheme, scheme.m_n, neg_ld)
    tail_w, _ = wmean_and_se(tail_phi * (neg_ld >= (scheme.m_n + 1) * a))
    tol = (10.0 * phi.sup_norm / n**2) if w_tol is None else w_tol
    return SandwichReport(
        n=n, t=t, rows=rows, tail_w=tail_w, tail_w_tol=tol, tail_ok=tail_w <= tol
    )
