"""Experiment drivers behind the CLI subcommands.

Each run_* function consumes an ExperimentConfig, writes one CSV into the
output directory, and returns its path.  Monte Carlo work is split into
fixed-size chunks, each seeded by its chunk index, so results are
identical for any thread count and reruns are byte-for-byte reproducible.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..bias import GridFunction, b_bias, b_bias_grid, d_bias
from ..edgeworth import (
    EcdfTable,
    EdgeworthParams,
    edgeworth_coeff_cdf,
    grid_ks,
    normal_cdf,
    sandwich_diagnostic,
)
from ..models import estimate_moment, proximality_check
from ..partition import PartitionScheme
from ..projective import (
    DualPoint,
    ProjectivePoint,
    ensemble_log_delta,
    ensemble_walk,
    walk_trajectory,
)
from ..spectral import ProjectiveGrid, build_operator, dominant_eigen, spectral_data
from ..streams import substream
from .config import ExperimentConfig
from .csvio import emit_csv

CHUNK = 65_536


def _grid(cfg: ExperimentConfig) -> ProjectiveGrid:
    return ProjectiveGrid(cfg.m)


def _spectral(cfg: ExperimentConfig, s: float, derivatives: bool = True):
    return spectral_data(
        cfg.model,
        s,
        _grid(cfg),
        h=cfg.h,
        eig_tol=cfg.eig_tol,
        s_max=cfg.s_max,
        n_quad=cfg.n_quad,
        richardson=cfg.richardson,
        derivatives=derivatives,
    )


def _points(cfg: ExperimentConfig):
    return (
        ProjectivePoint.from_angle(cfg.x0_theta),
        DualPoint.from_angle(cfg.y_theta),
    )


def _out(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def coeff_samples(model, x0, y, n, n_mc, seed, threads=1, chunk=CHUNK):
    """log coefficient samples S_n + log delta(x_n, y) over n_mc paths.

    Chunked so each chunk has its own named substream: the pooled sample is
    independent of both `threads` and `chunk` boundaries relative to a
    fixed chunk size.
    """
    n_chunks = -(-n_mc // chunk)

    def one(ci):
        size = min(chunk, n_mc - ci * chunk)
        rng = substream(seed, "coeff", n, ci)
        s_vals, dirs = ensemble_walk(model, x0, n, size, rng)
        return s_vals + ensemble_log_delta(dirs, y)

    if threads <= 1 or n_chunks == 1:
        parts = [one(ci) for ci in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(n_chunks)))
    return np.concatenate(parts)


def run_check(cfg: ExperimentConfig) -> str:
    rng = substream(cfg.seed, "check")
    moment = estimate_moment(cfg.model, cfg.moment_eps, cfg.moment_samples, rng)
    report = proximality_check(cfg.model, cfg.prox_steps, cfg.prox_reps, rng)
    path = _out(cfg, "check.csv")
    emit_csv(
        path,
        [
            "model_id", "eps", "moment_mean", "moment_se", "overflowed",
            "proximality_slope", "proximality_detected", "irreducibility_flag",
            "n_steps", "n_reps", "seed",
        ],
        [[
            cfg.model.model_id, moment.eps, moment.mean, moment.std_error,
            moment.overflowed, report.proximality_slope,
            report.proximality_detected, report.irreducibility_flag,
            report.n_steps, report.n_reps, cfg.seed,
        ]],
    )
    return path


def run_spectral(cfg: ExperimentConfig) -> str:
    def rows():
        for s in cfg.s_list:
            spec = _spectral(cfg, s)
            yield [
                spec.model_id, s, cfg.m, spec.kappa, spec.lam,
                spec.lambda1, spec.lambda2, spec.lambda3,
                spec.residual, spec.iterations,
            ]

    path = _out(cfg, "spectral.csv")
    emit_csv(
        path,
        [
            "model_id", "s", "m", "kappa", "Lambda", "Lambda1", "Lambda2",
            "Lambda3", "residual", "iters",
        ],
        rows(),
    )
    return path


def run_bias(cfg: ExperimentConfig) -> str:
    s = cfg.bias_s
    grid = _grid(cfg)
    op = build_operator(cfg.model, s, grid, s_max=cfg.s_max, n_quad=cfg.n_quad)
    spec = dominant_eigen(op, tol=cfg.eig_tol)
    x, y = _points(cfg)
    phi = GridFunction.constant(grid, 1.0)
    b_grid, iters = b_bias_grid(op, spec, phi)
    b_val = float(b_grid.at(x.angle))
    d_val = d_bias(spec, y, phi)
    path = _out(cfg, "bias.csv")
    emit_csv(
        path,
        ["model_id", "s", "x_theta", "y_theta", "phi_id", "b_value", "d_value", "iters"],
        [[cfg.model.model_id, s, cfg.x0_theta, cfg.y_theta, "const1",
          b_val, d_val, iters]],
    )
    return path


def run_walk(cfg: ExperimentConfig) -> str:
    x0, y = _points(cfg)
    rng = substream(cfg.seed, "walk")
    path = _out(cfg, "walk.csv")

    def rows():
        for step, s_val, xk, ld in walk_trajectory(cfg.model, x0, y, cfg.walk_n, rng):
            yield [step, s_val, xk.angle, ld]

    emit_csv(path, ["step", "S_n", "theta_x", "log_delta"], rows())
    return path


def _edgeworth_inputs(cfg: ExperimentConfig):
    s = cfg.bias_s
    grid = _grid(cfg)
    spec = _spectral(cfg, s)
    op = build_operator(cfg.model, s, grid, s_max=cfg.s_max, n_quad=cfg.n_quad)
    x, y = _points(cfg)
    phi = GridFunction.constant(grid, 1.0)
    b_val = b_bias(op, spec, x, phi)
    d_val = d_bias(spec, y, phi)
    return spec, x, y, b_val, d_val


def run_edgeworth(cfg: ExperimentConfig) -> str:
    """Empirical, normal, and expanded CDF values on the shared t-grid."""
    spec, x, y, b_val, d_val = _edgeworth_inputs(cfg)
    t_grid = cfg.t_grid()
    path = _out(cfg, "ecdf.csv")

    def rows():
        for n in cfg.n_list:
            samples = coeff_samples(
                cfg.model, x, y, n, cfg.n_mc, cfg.seed, threads=cfg.threads
            )
            z = (samples - n * spec.lambda1) / (spec.sigma_s * np.sqrt(n))
            table = EcdfTable.from_samples(z)
            params = EdgeworthParams(
                drift=spec.lambda1, scale=spec.sigma_s, skew=spec.lambda3,
                bias_b=b_val, bias_d=d_val, n=n,
            )
            emp = table.ecdf(t_grid)
            ref = normal_cdf(t_grid)
            edge = edgeworth_coeff_cdf(params, t_grid)
            for i, t in enumerate(t_grid):
                yield [cfg.model.model_id, spec.s, n, t, emp[i], ref[i], edge[i]]

    emit_csv(
        path,
        ["model_id", "s", "n", "t", "ecdf", "phi_ref", "edgeworth_ref"],
        rows(),
    )
    return path


def run_berry_esseen(cfg: ExperimentConfig) -> str:
    """Kolmogorov-Smirnov distances of the normalized coefficient ECDF.

    ks values are computed on the shared t-grid so a consumer of ecdf.csv
    reproduces them exactly from the emitted columns.
    """
    spec, x, y, b_val, d_val = _edgeworth_inputs(cfg)
    t_grid = cfg.t_grid()
    path = _out(cfg, "berry_esseen.csv")

    def rows():
        for n in cfg.n_list:
            samples = coeff_samples(
                cfg.model, x, y, n, cfg.n_mc, cfg.seed, threads=cfg.threads
            )
            z = (samples - n * spec.lambda1) / (spec.sigma_s * np.sqrt(n))
            table = EcdfTable.from_samples(z)
            params = EdgeworthParams(
                drift=spec.lambda1, scale=spec.sigma_s, skew=spec.lambda3,
                bias_b=b_val, bias_d=d_val, n=n,
            )
            ks_phi = grid_ks(table, normal_cdf, t_grid)
            ks_edge = grid_ks(
                table, lambda t: edgeworth_coeff_cdf(params, t), t_grid
            )
            yield [
                cfg.model.model_id, spec.s, n, cfg.n_mc,
                ks_phi, ks_edge, np.sqrt(n) * ks_phi, cfg.seed,
            ]

    emit_csv(
        path,
        [
            "model_id", "s", "n", "N_mc", "ks_phi", "ks_edgeworth",
            "ks_phi_sqrtn", "seed",
        ],
        rows(),
    )
    return path


def run_sandwich(cfg: ExperimentConfig) -> str:
    """Per-slice sandwich diagnostic rows; the tail mass row carries k = -1."""
    s = cfg.bias_s
    spec = _spectral(cfg, s)
    x, y = _points(cfg)
    phi = GridFunction.constant(spec.grid, 1.0)
    scheme = PartitionScheme(cfg.sandwich_n, A=cfg.partition_a)
    rng = substream(cfg.seed, "sandwich")
    report = sandwich_diagnostic(
        cfg.model, spec, scheme, x, y, phi, cfg.sandwich_t, cfg.n_mc, rng
    )
    path = _out(cfg, "sandwich.csv")

    def rows():
        for r in report.rows:
            yield [
                cfg.model.model_id, s, report.n, report.t,
                r.k, r.lower, r.value, r.upper, r.std_error, r.ok,
            ]
        yield [
            cfg.model.model_id, s, report.n, report.t,
            -1, 0.0, report.tail_w, report.tail_w_tol, 0.0, report.tail_ok,
        ]

    emit_csv(
        path,
        [
            "model_id", "s", "n", "t", "k", "lower", "value", "upper",
            "std_error", "ok",
        ],
        rows(),
    )
    return path


RUNNERS = {
    "check": run_check,
    "spectral": run_spectral,
    "bias": run_bias,
    "walk": run_walk,
    "edgeworth": run_edgeworth,
    "berry-esseen": run_berry_esseen,
    "sandwich": run_sandwich,
}
