"""Matrix ensembles and numerical condition diagnostics.

Three built-in ensembles:

* finite-support: explicit invertible matrices with probabilities;
* scalar-rotation: g = c * O with c from a finite set and O a uniform
  rotation -- exactly solvable (kappa(s) = E[c^s]) but not proximal, used
  to validate the spectral machinery;
* rotation-diag-rotation: g = R(theta) diag(e^a, e^-a) R(theta') with both
  angles uniform on [0, pi) -- strongly irreducible and proximal, used for
  the Edgeworth experiments.
"""

from dataclasses import dataclass, field

import numpy as np

_DET_TOL = 1e-12
_PROB_TOL = 1e-15


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def matrix_n(g: np.ndarray) -> float:
    """N(g) = max(||g||, ||g^-1||) in operator norm."""
    sv = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    return float(max(sv[0], 1.0 / sv[-1]))


class FiniteSupportModel:
    """mu supported on finitely many invertible matrices."""

    kind = "finite-support"

    def __init__(self, matrices, probs, model_id="finite"):
        mats = [np.asarray(m, dtype=float) for m in matrices]
        d = mats[0].shape[0]
        for m in mats:
            if m.shape != (d, d):
                raise ValueError("support matrices must share a square shape")
            if abs(np.linalg.det(m)) <= _DET_TOL:
                raise ValueError("support matrix is numerically singular")
        p = np.asarray(probs, dtype=float)
        if p.shape != (len(mats),):
            raise ValueError("one probability per support matrix required")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > _PROB_TOL:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if d < 2:
            raise ValueError("dimension d must be >= 2")
        self.matrices = mats
        self.probs = p
        self.dim = d
        self.model_id = model_id
        self._stack = np.stack(mats)

    def sample(self, rng) -> np.ndarray:
        j = rng.choice(len(self.matrices), p=self.probs)
        return self.matrices[j]

    def sample_batch(self, rng, size: int) -> np.ndarray:
        idx = rng.choice(len(self.matrices), size=size, p=self.probs)
        return self._stack[idx]

    def transfer_terms(self, alphas: np.ndarray, n_quad: int = 512):
        """Terms (weight, sigma(alphas), image_angle(alphas) or None) of P_s rows.

        Exact for finite support: one term per support matrix.  Requires d = 2.
        """
        if self.dim != 2:
            raise ValueError("transfer_terms requires d = 2")
        v = np.stack([np.cos(alphas), np.sin(alphas)])  # (2, m)
        out = []
        for g, p in zip(self.matrices, self.probs):
            w = g @ v
            nrm = np.sqrt(w[0] ** 2 + w[1] ** 2)
            sigma = np.log(nrm)
            img = np.arctan2(w[1], w[0]) % np.pi
            out.append((float(p), sigma, img))
        return out


class ScalarRotationModel:
    """g = c * O with c drawn from a finite set and O a uniform rotation (d = 2)."""

    kind = "scalar-rotation"
    dim = 2

    def __init__(self, scales, probs, model_id="scalar-rotation"):
        c = np.asarray(scales, dtype=float)
        p = np.asarray(probs, dtype=float)
        if np.any(c <= 0.0):
            raise ValueError("scales must be positive")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > _PROB_TOL:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        self.scales = c
        self.probs = p
        self.model_id = model_id

    def sample(self, rng) -> np.ndarray:
        c = self.scales[rng.choice(len(self.scales), p=self.probs)]
        return c * rotation(rng.uniform(0.0, 2.0 * np.pi))

    def sample_batch(self, rng, size: int) -> np.ndarray:
        c = self.scales[rng.choice(len(self.scales), size=size, p=self.probs)]
        th = rng.uniform(0.0, 2.0 * np.pi, size=size)
        ct, st = np.cos(th), np.sin(th)
        out = np.empty((size, 2, 2))
        out[:, 0, 0] = c * ct
        out[:, 0, 1] = -c * st
        out[:, 1, 0] = c * st
        out[:, 1, 1] = c * ct
        return out

    def kappa_exact(self, s: float) -> float:
        """Closed form E[c^s]."""
        return float(np.sum(self.probs * self.scales**s))

    def transfer_terms(self, alphas: np.ndarray, n_quad: int = 512):
        # The uniform rotation makes the image direction uniform on P(V)
        # independently of the source, so each scale contributes a
        # constant-sigma term with a uniform image (None marker).
        ones = np.ones_like(alphas)
        return [
            (float(p), np.log(c) * ones, None)
            for c, p in zip(self.scales, self.probs)
        ]


class RotationDiagRotationModel:
    """g = R(theta) diag(e^a, e^-a) R(theta'), theta, theta' uniform on [0, pi)."""

    kind = "rotation-diag-rotation"
    dim = 2

    def __init__(self, log_scale: float = 1.0, model_id="rdr"):
        if log_scale <= 0.0:
            raise ValueError("log_scale must be positive")
        self.log_scale = float(log_scale)
        self.model_id = model_id
        self._diag = np.diag([np.exp(self.log_scale), np.exp(-self.log_scale)])

    def sample(self, rng) -> np.ndarray:
        th = rng.uniform(0.0, np.pi)
        thp = rng.uniform(0.0, np.pi)
        return rotation(th) @ self._diag @ rotation(thp)

    def sample_batch(self, rng, size: int) -> np.ndarray:
        th = rng.uniform(0.0, np.pi, size=size)
        thp = rng.uniform(0.0, np.pi, size=size)
        ea, eb = np.exp(self.log_scale), np.exp(-self.log_scale)
        ct, st = np.cos(th), np.sin(th)
        cp, sp = np.cos(thp), np.sin(thp)
        # R(th) @ diag(ea, eb) @ R(thp), written out entrywise
        out = np.empty((size, 2, 2))
        out[:, 0, 0] = ea * ct * cp - eb * st * sp
        out[:, 0, 1] = -ea * ct * sp - eb * st * cp
        out[:, 1, 0] = ea * st * cp + eb * ct * sp
        out[:, 1, 1] = -ea * st * sp + eb * ct * cp
        return out

    def one_step_sigma(self, beta: np.ndarray) -> np.ndarray:
        """sigma(g, x) as a function of beta = angle(x) + theta'."""
        a = self.log_scale
        return 0.5 * np.log(
            np.exp(2 * a) * np.cos(beta) ** 2 + np.exp(-2 * a) * np.sin(beta) ** 2
        )

    def transfer_terms(self, alphas: np.ndarray, n_quad: int = 512):
        # theta' is quadratured with n_quad midpoint nodes; the outer uniform
        # rotation theta makes the image uniform, which is integrated exactly.
        nodes = (np.arange(n_quad) + 0.5) * np.pi / n_quad
        w = 1.0 / n_quad
        return [
            (w, self.one_step_sigma(alphas + t), None) for t in nodes
        ]


@dataclass
class MomentEstimate:
    """Monte Carlo estimate of the moment integral E[N(g)^eps]."""

    mean: float
    std_error: float
    eps: float
    n_samples: int
    overflowed: bool = False


@dataclass
class ConditionReport:
    """Numerical diagnostics for the moment and irreducibility/proximality conditions."""

    moment: MomentEstimate
    proximality_slope: float
    proximality_detected: bool
    irreducibility_flag: bool
    n_steps: int
    n_reps: int
    seed: int | None = None


def estimate_moment(model, eps: float, n_samples: int, rng) -> MomentEstimate:
    """Monte Carlo mean of N(g)^eps with standard error.

    Overflow is reported in the estimate, not raised.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    vals = np.empty(n_samples)
    for i in range(n_samples):
        vals[i] = matrix_n(model.sample(rng)) ** eps
    overflow = bool(np.any(~np.isfinite(vals)))
    finite = vals[np.isfinite(vals)]
    mean = float(finite.mean()) if finite.size else float("inf")
    se = float(finite.std(ddof=1) / np.sqrt(finite.size)) if finite.size > 1 else 0.0
    return MomentEstimate(mean, se, eps, n_samples, overflowed=overflow)


def singular_gap_trajectory(model, n_steps: int, rng) -> np.ndarray:
    """log(s1/s2)(G_n) along one trajectory, QR-stabilized (d = 2 frame)."""
    d = model.dim
    q = np.eye(d)
    log_diag = np.zeros(d)
    gaps = np.empty(n_steps)
    for t in range(n_steps):
        q = model.sample(rng) @ q
        q, r = np.linalg.qr(q)
        log_diag += np.log(np.abs(np.diag(r)))
        gaps[t] = log_diag[0] - log_diag[1]
    return gaps


def proximality_check(
    model, n_steps: int, n_reps: int, rng, slope_tol: float = 1e-3
) -> ConditionReport:
    """Fit the growth rate of log(s1/s2)(G_n); positive slope indicates proximality."""
    if n_steps < 100:
        raise ValueError("n_steps must be >= 100")
    t = np.arange(1, n_steps + 1, dtype=float)
    slopes = []
    for _ in range(n_reps):
        gaps = singular_gap_trajectory(model, n_steps, rng)
        slopes.append(float(np.dot(t, gaps) / np.dot(t, t)))
    slope = float(np.mean(slopes))
    moment = estimate_moment(model, 1.0, 200, rng)
    irr = _irreducibility_heuristic(model, rng)
    return ConditionReport(
        moment=moment,
        proximality_slope=slope,
        proximality_detected=slope > slope_tol,
        irreducibility_flag=irr,
        n_steps=n_steps,
        n_reps=n_reps,
    )


def _irreducibility_heuristic(model, rng, n_products: int = 10_000) -> bool:
    """True when orbit directions do not collapse onto a small set of lines.

    Heuristic only: samples directions of G_n e1 and counts angular clusters.
    """
    if model.dim != 2:
        return True  # no heuristic beyond d = 2
    from .projective import ProjectivePoint, ensemble_walk

    x0 = ProjectivePoint(np.array([1.0, 0.0]))
    _, dirs = ensemble_walk(model, x0, 12, n_products, rng)
    ang = np.sort(np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi)
    # count clusters separated by more than 1e-6 radians
    clusters = 1 + int(np.count_nonzero(np.diff(ang) > 1e-6))
    return clusters > 2 * model.dim
