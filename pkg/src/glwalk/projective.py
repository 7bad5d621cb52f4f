"""Projective geometry, cocycles, and stabilized random walks.

Directions are stored as unit representatives with a canonical sign so
that equality is testable.  The walk renormalizes the direction every
step and accumulates the per-step log norm with compensated summation,
which keeps the cocycle finite for arbitrarily long products.
"""

from dataclasses import dataclass

import numpy as np

LOG_DELTA_FLOOR = -np.inf  # sentinel for delta == 0


class SingularActionError(ValueError):
    """Raised when g v is numerically zero (matrix effectively singular)."""


def _canonicalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("cannot canonicalize a zero or non-finite vector")
    v = v / nrm
    for vi in v:
        if vi != 0.0:
            if vi < 0.0:
                v = -v
            break
    return v


@dataclass(frozen=True)
class ProjectivePoint:
    """A direction x = Rv in P(V), stored as a canonical unit vector."""

    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _canonicalize(self.v))

    @classmethod
    def from_angle(cls, theta: float) -> "ProjectivePoint":
        return cls(np.array([np.cos(theta), np.sin(theta)]))

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    @property
    def angle(self) -> float:
        """Angle in [0, pi) parametrizing the line (d = 2 only)."""
        if self.dim != 2:
            raise ValueError("angle parametrization requires d = 2")
        return float(np.arctan2(self.v[1], self.v[0]) % np.pi)

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(self.v.tobytes())


@dataclass(frozen=True)
class DualPoint:
    """A dual direction y = Rf in P(V*), stored as a canonical unit functional."""

    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", _canonicalize(self.f))

    @classmethod
    def from_angle(cls, theta: float) -> "DualPoint":
        return cls(np.array([np.cos(theta), np.sin(theta)]))

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    @property
    def angle(self) -> float:
        if self.dim != 2:
            raise ValueError("angle parametrization requires d = 2")
        return float(np.arctan2(self.f[1], self.f[0]) % np.pi)

    def __eq__(self, other):
        return isinstance(other, DualPoint) and np.array_equal(self.f, other.f)

    def __hash__(self):
        return hash(self.f.tobytes())


def act(g: np.ndarray, x: ProjectivePoint) -> ProjectivePoint:
    """Projective action g . x = R(gv)."""
    w = np.asarray(g, dtype=float) @ x.v
    nrm = np.linalg.norm(w)
    if nrm < 1e-300 or not np.isfinite(nrm):
        raise SingularActionError("matrix effectively singular: ||g v|| ~ 0")
    return ProjectivePoint(w)


def cocycle(g: np.ndarray, x: ProjectivePoint) -> float:
    """Norm cocycle log(||g v|| / ||v||) for a unit representative v."""
    w = np.asarray(g, dtype=float) @ x.v
    nrm = np.linalg.norm(w)
    if nrm < 1e-300 or not np.isfinite(nrm):
        raise SingularActionError("matrix effectively singular: ||g v|| ~ 0")
    return float(np.log(nrm))


def delta(x: ProjectivePoint, y: DualPoint) -> float:
    """Normalized pairing |<f, v>| in [0, 1]."""
    return float(min(1.0, abs(float(y.f @ x.v))))


def log_delta(x: ProjectivePoint, y: DualPoint) -> float:
    """log delta(x, y); -inf sentinel when the pairing vanishes."""
    d = delta(x, y)
    if d == 0.0:
        return LOG_DELTA_FLOOR
    return float(np.log(d))


def angular_distance(x: ProjectivePoint, xp: ProjectivePoint) -> float:
    """Angular metric d(x, x') = ||v ^ v'|| for unit representatives."""
    if x.dim == 2:
        return float(abs(x.v[0] * xp.v[1] - x.v[1] * xp.v[0]))
    dot = float(np.clip(x.v @ xp.v, -1.0, 1.0))
    return float(np.sqrt(max(0.0, 1.0 - dot * dot)))


@dataclass
class WalkRecord:
    """Final state of a stabilized trajectory."""

    x: ProjectivePoint
    cocycle: float  # S_n = sigma(G_n, x0)
    n: int
    coeff_log: float | None = None  # log |<f, G_n v0>| when a dual point is tracked
    degenerate: bool = False  # delta(x_n, y) == 0 at the final step
    seed: int | None = None


def walk(model, x0: ProjectivePoint, y: DualPoint | None, n: int, rng) -> WalkRecord:
    """Run n steps of the stabilized walk u <- g u / ||g u||.

    The per-step log norms are accumulated with Kahan summation; if y is
    given the log coefficient S_n + log delta(x_n, y) is recorded.
    """
    if n < 1:
        raise ValueError("walk length n must be >= 1")
    u = x0.v.copy()
    s = 0.0
    comp = 0.0
    for _ in range(n):
        g = model.sample(rng)
        w = g @ u
        nrm = np.linalg.norm(w)
        if nrm < 1e-300 or not np.isfinite(nrm):
            raise SingularActionError("matrix effectively singular during walk")
        u = w / nrm
        term = float(np.log(nrm)) - comp
        tot = s + term
        comp = (tot - s) - term
        s = tot
    xn = ProjectivePoint(u)
    rec = WalkRecord(x=xn, cocycle=s, n=n)
    if y is not None:
        ld = log_delta(xn, y)
        rec.degenerate = not np.isfinite(ld)
        rec.coeff_log = s + ld
    return rec


def walk_trajectory(model, x0: ProjectivePoint, y: DualPoint | None, n: int, rng):
    """Yield (step, S_step, x_step, log_delta_step) for step = 1..n."""
    u = x0.v.copy()
    s = 0.0
    comp = 0.0
    for step in range(1, n + 1):
        g = model.sample(rng)
        w = g @ u
        nrm = np.linalg.norm(w)
        if nrm < 1e-300 or not np.isfinite(nrm):
            raise SingularActionError("matrix effectively singular during walk")
        u = w / nrm
        term = float(np.log(nrm)) - comp
        tot = s + term
        comp = (tot - s) - term
        s = tot
        xk = ProjectivePoint(u)
        ld = log_delta(xk, y) if y is not None else float("nan")
        yield step, s, xk, ld


def coeff_log_direct(matrices, v: np.ndarray, f: np.ndarray) -> float:
    """log |<f, G_n v>| by explicit multiplication; oracle for short products."""
    prod = np.asarray(v, dtype=float).copy()
    for g in matrices:
        prod = np.asarray(g, dtype=float) @ prod
        if not np.all(np.isfinite(prod)):
            raise OverflowError(
                "full product overflowed; use the stabilized walk instead"
            )
    val = abs(float(np.asarray(f, dtype=float) @ prod))
    if val == 0.0:
        return LOG_DELTA_FLOOR
    return float(np.log(val))


def ensemble_walk(model, x0: ProjectivePoint, n: int, size: int, rng):
    """Vectorized walk of `size` independent paths of length n.

    Returns (S, dirs): S is the (size,) array of cocycle values and dirs the
    (size, d) array of final unit directions.  Compensated summation keeps
    the accumulated log norms exact to rounding for long horizons.
    """
    d = x0.dim
    dirs = np.tile(x0.v, (size, 1))
    s = np.zeros(size)
    comp = np.zeros(size)
    for _ in range(n):
        gs = model.sample_batch(rng, size)
        dirs = np.einsum("nij,nj->ni", gs, dirs)
        nrm = np.linalg.norm(dirs, axis=1)
        dirs /= nrm[:, None]
        term = np.log(nrm) - comp
        tot = s + term
        comp = (tot - s) - term
        s = tot
    return s, dirs


def ensemble_log_delta(dirs: np.ndarray, y: DualPoint) -> np.ndarray:
    """log delta against y for an array of unit directions; -inf where 0."""
    d = np.abs(dirs @ y.f)
    np.minimum(d, 1.0, out=d)
    with np.errstate(divide="ignore"):
        return np.log(d)
