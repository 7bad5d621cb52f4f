"""Exponential change of measure via importance weights from untilted paths.

The tilted law Q_s^x is never sampled directly; expectations under it are
importance-weighted expectations of mu-paths with the spectral weight
w = e^{s S_n} r_s(x_n) / (kappa^n r_s(x_0)).  Weight arithmetic stays in
the log domain until aggregation.
"""

from dataclasses import dataclass

import numpy as np

from .projective import ProjectivePoint, WalkRecord, ensemble_walk
from .spectral import SpectralData


@dataclass
class TiltedPathWeight:
    n: int
    log_weight: float

    @property
    def weight(self) -> float:
        return float(np.exp(self.log_weight))


@dataclass
class TiltedEstimate:
    value: float
    std_error: float
    n_paths: int
    ess: float
    low_ess_warning: bool = False


def path_weight(spec: SpectralData, walk: WalkRecord, x0: ProjectivePoint) -> TiltedPathWeight:
    """Importance weight of one mu-path against Q_s^x0."""
    r_end = float(spec.r_at(walk.x.angle))
    r_start = float(spec.r_at(x0.angle))
    if r_end < 1e-300 or r_start < 1e-300:
        raise ValueError("interpolated eigenfunction vanished; spectral data corrupt")
    lw = (
        spec.s * walk.cocycle
        + np.log(r_end)
        - walk.n * np.log(spec.kappa)
        - np.log(r_start)
    )
    return TiltedPathWeight(n=walk.n, log_weight=float(lw))


def log_weights(spec: SpectralData, s_vals: np.ndarray, dirs: np.ndarray, x0: ProjectivePoint, n: int):
    """Vectorized log importance weights for an ensemble of paths."""
    ang = np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi
    r_end = spec.grid.interpolate(spec.r, ang)
    r_start = float(spec.r_at(x0.angle))
    return spec.s * s_vals + np.log(r_end) - n * np.log(spec.kappa) - np.log(r_start)


def expect_tilted(
    model,
    spec: SpectralData,
    x0: ProjectivePoint,
    h,
    n: int,
    n_mc: int,
    rng,
    self_normalize: bool | None = None,
) -> TiltedEstimate:
    """Importance-sampling estimate of E_{Q_s^x0}[h].

    h is a path functional h(S, dirs) -> array over the ensemble, where S
    holds the cocycle values and dirs the final unit directions.  With
    self_normalize (default on for n > 50) the estimate divides by the mean
    weight, trading an O(1/N) bias for robustness to the discretized
    eigen-data.
    """
    if n_mc < 100:
        raise ValueError("n_mc must be >= 100")
    if self_normalize is None:
        self_normalize = n > 50
    s_vals, dirs = ensemble_walk(model, x0, n, n_mc, rng)
    lw = log_weights(spec, s_vals, dirs, x0, n)
    shift = np.max(lw)
    w = np.exp(lw - shift)
    hv = np.asarray(h(s_vals, dirs), dtype=float)
    scale = np.exp(shift)
    ess = float(w.sum() ** 2 / np.sum(w**2))
    if self_normalize:
        wbar = w.mean()
        est = float(np.sum(w * hv) / np.sum(w))
        resid = w * (hv - est)
        se = float(np.std(resid, ddof=1) / (wbar * np.sqrt(n_mc)))
    else:
        vals = scale * w * hv
        est = float(vals.mean())
        se = float(vals.std(ddof=1) / np.sqrt(n_mc))
    return TiltedEstimate(
        value=est,
        std_error=se,
        n_paths=n_mc,
        ess=ess,
        low_ess_warning=ess < 0.01 * n_mc,
    )
