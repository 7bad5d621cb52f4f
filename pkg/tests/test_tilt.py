"""Importance weighting against the tilted path measure."""

import numpy as np
import pytest

from glwalk.bias import GridFunction, b_bias
from glwalk.projective import ProjectivePoint, walk
from glwalk.spectral import build_operator, spectral_data
from glwalk.streams import substream
from glwalk.tilt import expect_tilted, path_weight

X0 = ProjectivePoint(np.array([1.0, 0.0]))


def test_weight_is_one_at_s0(fs_model, fs_spec0):
    rec = walk(fs_model, X0, None, 30, substream(51, "w0"))
    w = path_weight(fs_spec0, rec, X0)
    assert w.weight == pytest.approx(1.0, abs=1e-10)
    assert w.log_weight == pytest.approx(0.0, abs=1e-10)


def test_single_step_mean_weight_is_one(fs_model, grid256):
    # E_mu[q_1^s] = 1 is the eigen-equation restated
    spec = spectral_data(fs_model, 0.1, grid256, derivatives=False)
    rng = substream(52, "w1")
    ws = np.array(
        [path_weight(spec, walk(fs_model, X0, None, 1, rng), X0).weight
         for _ in range(4000)]
    )
    se = ws.std(ddof=1) / np.sqrt(len(ws))
    assert abs(ws.mean() - 1.0) <= 3.0 * se


def test_mean_weight_one_scalar_rotation(sr_model, grid256):
    spec = spectral_data(sr_model, 0.1, grid256, derivatives=False)
    est = expect_tilted(
        sr_model, spec, X0, lambda s, dirs: np.ones_like(s), 20, 100_000,
        substream(53, "mass"), self_normalize=False,
    )
    assert abs(est.value - 1.0) <= 3.0 * est.std_error


def test_total_mass_unnormalized(fs_model, grid256):
    spec = spectral_data(fs_model, 0.1, grid256, derivatives=False)
    est = expect_tilted(
        fs_model, spec, X0, lambda s, dirs: np.ones_like(s), 10, 20_000,
        substream(54, "mass"), self_normalize=False,
    )
    assert abs(est.value - 1.0) <= 3.0 * est.std_error


def test_tilted_slln_reaches_drift(rdr_model, grid256):
    spec = spectral_data(rdr_model, 0.1, grid256, derivatives=True, richardson=True)
    est = expect_tilted(
        rdr_model, spec, X0, lambda s, dirs: s / 1000.0, 1000, 20_000,
        substream(55, "slln"),
    )
    assert abs(est.value - spec.lambda1) <= 3.0 * est.std_error


def test_s0_matches_plain_monte_carlo(rdr_model, rdr_spec0):
    h = lambda s, dirs: np.cos(2.0 * np.arctan2(dirs[:, 1], dirs[:, 0]))
    est = expect_tilted(rdr_model, rdr_spec0, X0, h, 40, 20_000, substream(56, "mc"))
    from glwalk.projective import ensemble_walk

    s_vals, dirs = ensemble_walk(rdr_model, X0, 40, 20_000, substream(57, "mc2"))
    plain = h(s_vals, dirs)
    plain_se = plain.std(ddof=1) / np.sqrt(len(plain))
    assert abs(est.value - plain.mean()) <= 2.0 * plain_se + 3.0 * est.std_error


def test_log_delta_tail_decays_exponentially(rdr_model, rdr_spec0):
    # deep overlap with a fixed dual direction is exponentially rare
    from glwalk.projective import DualPoint, ensemble_log_delta, ensemble_walk

    y = DualPoint.from_angle(0.8)
    _, dirs = ensemble_walk(rdr_model, X0, 30, 200_000, substream(58, "tail"))
    ld = ensemble_log_delta(dirs, y)
    probs = np.array([np.mean(ld <= -u) for u in (2.0, 4.0, 6.0, 8.0)])
    assert np.all(probs > 0.0)
    ratios = probs[1:] / probs[:-1]
    assert np.all(ratios < 0.5)


def test_b_estimators_agree(fs_model, fs_op0, fs_spec0):
    # MC cross-check of the deterministic b recursion
    rng = substream(59, "bmc")
    grid = fs_op0.grid
    phi = GridFunction.from_callable(grid, lambda th: np.cos(2.0 * th))
    b_rec = b_bias(fs_op0, fs_spec0, X0, phi)
    n = 200
    drift = fs_spec0.lambda1

    def h(s, dirs):
        ang = np.arctan2(dirs[:, 1], dirs[:, 0]) % np.pi
        return (s - n * drift) * phi.at(ang)

    est = expect_tilted(fs_model, fs_spec0, X0, h, n, 100_000, rng)
    assert abs(est.value - b_rec) <= 4.0 * est.std_error


def test_weight_variance_grows_with_tilt(rdr_model, grid256):
    # diagnostic trend, not a hard bound: heavier tilts concentrate weight
    esses = []
    for s in (0.05, 0.1, 0.2):
        spec = spectral_data(rdr_model, s, grid256, derivatives=False)
        est = expect_tilted(
            rdr_model, spec, X0, lambda sv, dirs: np.ones_like(sv), 200, 20_000,
            substream(60, "ess", int(s * 100)),
        )
        esses.append(est.ess)
        assert est.ess <= 20_000 + 1e-9
        assert est.low_ess_warning == (est.ess < 0.01 * 20_000)
    assert esses[0] > esses[1] > esses[2]


def test_expect_tilted_requires_enough_paths(fs_model, fs_spec0):
    with pytest.raises(ValueError):
        expect_tilted(
            fs_model, fs_spec0, X0, lambda s, dirs: np.ones_like(s), 5, 50,
            substream(61, "few"),
        )
