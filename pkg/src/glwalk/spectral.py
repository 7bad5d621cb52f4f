"""Discretized transfer operator on P(V) for d = 2 and its spectral data.

P(V) is the circle of circumference pi, discretized on a midpoint grid.
The operator P_s is built row-wise from the model's one-step terms; its
dominant eigen-triple (kappa(s), r_s, nu_s) is extracted by joint
left/right power iteration, which converges geometrically by the
spectral gap.  Lambda(s) = log kappa(s) and its derivatives come from
central finite differences, optionally Richardson-refined.
"""

from dataclasses import dataclass, field

import numpy as np

S_MAX_DEFAULT = 0.25
EIG_TOL_DEFAULT = 1e-12
N_QUAD_DEFAULT = 512


class SpectralDomainError(ValueError):
    """Raised when the spectral discretization is asked for unsupported input."""


class PowerIterationError(RuntimeError):
    """Raised when the power iteration fails to reach the residual target."""


@dataclass(frozen=True)
class ProjectiveGrid:
    """Midpoint grid on [0, pi): theta_i = (i + 1/2) pi / m.

    The half-cell offset guarantees no node hits 0 or pi/2 exactly, so no
    grid direction is orthogonal to a coordinate dual point.
    """

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("grid needs at least 2 cells")

    @property
    def cell(self) -> float:
        return np.pi / self.m

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.cell

    def interpolate(self, values: np.ndarray, theta) -> np.ndarray:
        """Linear periodic interpolation of a grid function at angles theta."""
        pos = (np.asarray(theta) % np.pi) / self.cell - 0.5
        j0 = np.floor(pos).astype(int)
        frac = pos - j0
        return (1.0 - frac) * values[j0 % self.m] + frac * values[(j0 + 1) % self.m]


@dataclass
class OperatorMatrix:
    """Dense discretization of P_s (and its sigma-weighted variant) on a grid."""

    k: np.ndarray  # (m, m): (P_s phi)(x_i) ~ sum_j k[i, j] phi(x_j)
    k_sigma: np.ndarray  # same kernel with an extra sigma(g, x) weight
    s: float
    grid: ProjectiveGrid
    model_id: str


@dataclass
class SpectralData:
    """Dominant eigen-triple of P_s with stationary measure and derivatives."""

    s: float
    kappa: float
    r: np.ndarray  # right eigenfunction, > 0, nu-weighted mean 1
    nu: np.ndarray  # left eigenvector as probability weights
    pi: np.ndarray  # stationary measure of Q_s, Eq-style nu(r phi)/nu(r)
    grid: ProjectiveGrid
    residual: float
    iterations: int
    model_id: str
    lambda1: float | None = None
    lambda2: float | None = None
    lambda3: float | None = None

    @property
    def lam(self) -> float:
        return float(np.log(self.kappa))

    @property
    def sigma_s(self) -> float:
        if self.lambda2 is None:
            raise ValueError("derivatives not computed for this SpectralData")
        return float(np.sqrt(self.lambda2))

    def r_at(self, theta) -> np.ndarray:
        return self.grid.interpolate(self.r, theta)


def build_operator(
    model,
    s: float,
    grid: ProjectiveGrid,
    s_max: float = S_MAX_DEFAULT,
    n_quad: int = N_QUAD_DEFAULT,
) -> OperatorMatrix:
    """Assemble the m x m kernel of P_s by linear deposition of one-step images."""
    if getattr(model, "dim", None) != 2:
        raise SpectralDomainError(
            "spectral discretization requires d = 2; use Monte Carlo estimators"
        )
    if abs(s) > s_max:
        raise SpectralDomainError(f"|s| = {abs(s)} exceeds s_max = {s_max}")
    m = grid.m
    alphas = grid.midpoints
    k = np.zeros((m, m))
    k_sig = np.zeros((m, m))
    rows = np.arange(m)
    unif_w = np.zeros(m)
    unif_ws = np.zeros(m)
    for weight, sigma, img in model.transfer_terms(alphas, n_quad=n_quad):
        w = weight * np.exp(s * sigma)
        ws = w * sigma
        if img is None:
            # image uniform on P(V): exact uniform spread over the cells
            unif_w += w
            unif_ws += ws
        else:
            pos = img / grid.cell - 0.5
            j0 = np.floor(pos).astype(int)
            frac = pos - j0
            np.add.at(k, (rows, j0 % m), w * (1.0 - frac))
            np.add.at(k, (rows, (j0 + 1) % m), w * frac)
            np.add.at(k_sig, (rows, j0 % m), ws * (1.0 - frac))
            np.add.at(k_sig, (rows, (j0 + 1) % m), ws * frac)
    if np.any(unif_w) or np.any(unif_ws):
        k += np.outer(unif_w, np.full(m, 1.0 / m))
        k_sig += np.outer(unif_ws, np.full(m, 1.0 / m))
    return OperatorMatrix(k=k, k_sigma=k_sig, s=s, grid=grid, model_id=model.model_id)


def dominant_eigen(
    op: OperatorMatrix,
    tol: float = EIG_TOL_DEFAULT,
    max_iter: int = 100_000,
) -> SpectralData:
    """Joint left/right power iteration from the constant vector.

    kappa is the Rayleigh-style ratio nu^T K r / nu^T r; r is scaled so the
    nu-weighted mean of r is 1 and nu is returned as probability weights.
    """
    k = op.k
    m = k.shape[0]
    r = np.ones(m)
    nu = np.ones(m) / m
    kappa = 1.0
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        kr = k @ r
        nuk = nu @ k
        kappa = float((nu @ kr) / (nu @ r))
        r_new = kr / np.max(np.abs(kr))
        nu_new = nuk / nuk.sum()
        res_r = float(np.max(np.abs(kr - kappa * r)) / np.max(np.abs(r)))
        res_l = float(np.max(np.abs(nuk - kappa * nu)) / np.max(np.abs(nu)))
        res = max(res_r, res_l)
        r, nu = r_new, nu_new
        if res <= tol:
            break
    else:
        raise PowerIterationError(
            f"power iteration did not converge in {max_iter} steps "
            f"(final residual {res:.3e})"
        )
    nu = nu / nu.sum()
    r = r / float(nu @ r)  # nu-weighted mean of r equals 1
    pi = nu * r
    pi = pi / pi.sum()
    return SpectralData(
        s=op.s,
        kappa=kappa,
        r=r,
        nu=nu,
        pi=pi,
        grid=op.grid,
        residual=res,
        iterations=it,
        model_id=op.model_id,
    )


def stationary_measure(spec: SpectralData) -> np.ndarray:
    """pi_s[i] = nu_s[i] r_s[i] / sum_j nu_s[j] r_s[j]."""
    pi = spec.nu * spec.r
    return pi / pi.sum()


def _lambda_at(model, s, grid, eig_tol, s_max, n_quad):
    op = build_operator(model, s, grid, s_max=s_max, n_quad=n_quad)
    return np.log(dominant_eigen(op, tol=eig_tol).kappa)


def lambda_derivatives(
    model,
    s: float,
    grid: ProjectiveGrid,
    h: float = 0.02,
    eig_tol: float = EIG_TOL_DEFAULT,
    s_max: float = S_MAX_DEFAULT,
    n_quad: int = N_QUAD_DEFAULT,
    richardson: bool = False,
):
    """(Lambda', Lambda'', Lambda''') at s by central differences on a 7-point stencil.

    With richardson=True the h and h/2 stencils are combined, upgrading the
    O(h^2) truncation error to O(h^4).
    """
    if abs(s) + 3 * h > s_max:
        raise SpectralDomainError(
            f"stencil [{s - 3 * h}, {s + 3 * h}] leaves (-{s_max}, {s_max})"
        )

    def stencil(hh):
        lam = {
            j: _lambda_at(model, s + j * hh, grid, eig_tol, s_max, n_quad)
            for j in (-2, -1, 0, 1, 2)
        }
        d1 = (lam[1] - lam[-1]) / (2 * hh)
        d2 = (lam[1] - 2 * lam[0] + lam[-1]) / hh**2
        d3 = (lam[2] - 2 * lam[1] + 2 * lam[-1] - lam[-2]) / (2 * hh**3)
        return np.array([d1, d2, d3])

    d = stencil(h)
    if richardson:
        d_half = stencil(h / 2)
        d = (4.0 * d_half - d) / 3.0
    return float(d[0]), float(d[1]), float(d[2])


def spectral_data(
    model,
    s: float,
    grid: ProjectiveGrid,
    h: float = 0.02,
    eig_tol: float = EIG_TOL_DEFAULT,
    s_max: float = S_MAX_DEFAULT,
    n_quad: int = N_QUAD_DEFAULT,
    richardson: bool = False,
    derivatives: bool = True,
) -> SpectralData:
    """Full spectral data at s: eigen-triple, pi_s and Lambda derivatives."""
    op = build_operator(model, s, grid, s_max=s_max, n_quad=n_quad)
    spec = dominant_eigen(op, tol=eig_tol)
    if derivatives:
        l1, l2, l3 = lambda_derivatives(
            model, s, grid, h=h, eig_tol=eig_tol, s_max=s_max,
            n_quad=n_quad, richardson=richardson,
        )
        spec.lambda1, spec.lambda2, spec.lambda3 = l1, l2, l3
    return spec


def mc_invariant_measure(
    model, n_burn: int, n_samples: int, rng, grid: ProjectiveGrid, n_chains: int = 4096
) -> np.ndarray:
    """Empirical cell histogram of the direction chain after burn-in.

    Runs an ensemble of chains from e1 and pools post-burn-in states;
    returns probability weights over the grid cells.
    """
    if n_burn < 1_000:
        raise ValueError("n_burn must be >= 1000")
    from .projective import ProjectivePoint

    n_chains = min(n_chains, n_samples)
    x0 = ProjectivePoint(np.array([1.0, 0.0]))
    dirs = np.tile(x0.v, (n_chains, 1))
    for _ in range(n_burn):
        gs = model.sample_batch(rng, n_chains)
        dirs = np.einsum("nij,nj->ni", gs, dirs)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    counts = np.zeros(grid.m)
    collected = 0
    while collected < n_samples:
        gs = model.sample_batch(rng, n_chains)
        dirs = np.einsum("nij,nj->ni", gs, dirs)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        ang = np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi
        take = min(n_chains, n_samples - collected)
        idx = np.minimum((ang[:take] / grid.cell).astype(int), grid.m - 1)
        counts += np.bincount(idx, minlength=grid.m)
        collected += take
    return counts / counts.sum()


def decay_rate(op: OperatorMatrix, phi: np.ndarray, nu: np.ndarray, n_steps: int = 60):
    """Fitted per-step contraction of ||P^n phi||_inf for nu-centered phi."""
    psi = phi - float(nu @ phi)
    floor = 1e-14 * float(np.max(np.abs(psi)))  # roundoff floor of the iteration
    norms = []
    for _ in range(n_steps):
        psi = op.k @ psi
        nrm = float(np.max(np.abs(psi)))
        if nrm <= floor:
            break
        norms.append(nrm)
    norms = np.asarray(norms)
    if len(norms) < 2:
        # contraction below the floor within one step: effectively rank one
        return 0.0
    # geometric-mean ratio over the recorded tail
    tail = norms[len(norms) // 2 :]
    if len(tail) < 2:
        return float(norms[-1] / norms[-2])
    return float((tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1)))
