"""Experiment configuration: a sectioned key = value file.

All numeric knobs of the pipeline live here; the CLI adds only the
subcommand, config path and the --seed/--threads/--out overrides.
"""

import configparser
import os
from dataclasses import dataclass, field

import numpy as np

from ..models import FiniteSupportModel, RotationDiagRotationModel, ScalarRotationModel

THREADS_ENV = "GLWALK_THREADS"


class ConfigError(ValueError):
    pass


def _floats(text):
    return [float(tok) for tok in text.replace(",", " ").split()]


def _ints(text):
    return [int(tok) for tok in text.replace(",", " ").split()]


@dataclass
class ExperimentConfig:
    model: object
    s_list: list = field(default_factory=lambda: [0.0])
    bias_s: float = 0.0
    m: int = 1024
    h: float = 0.02
    richardson: bool = True
    eig_tol: float = 1e-12
    s_max: float = 0.25
    n_quad: int = 512
    walk_n: int = 1000
    x0_theta: float = 0.0
    y_theta: float = 0.0
    n_list: list = field(default_factory=lambda: [64, 256, 1024])
    n_mc: int = 100_000
    t_min: float = -6.0
    t_max: float = 6.0
    t_points: int = 241
    partition_a: float = 4.0
    gamma: float = 0.25
    sandwich_t: float = 0.0
    sandwich_n: int = 256
    moment_eps: float = 1.0
    moment_samples: int = 1000
    prox_steps: int = 500
    prox_reps: int = 8
    seed: int = 0
    threads: int = 1
    out_dir: str = "out"

    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_points)

    def validate(self):
        if self.m < 2:
            raise ConfigError("spectral.m must be >= 2")
        for s in self.s_list + [self.bias_s]:
            if abs(s) + 3 * self.h > self.s_max:
                raise ConfigError(
                    f"spectral.s_list entry {s} with h = {self.h} leaves "
                    f"(-{self.s_max}, {self.s_max})"
                )
        if self.n_mc < 100:
            raise ConfigError("edgeworth.n_mc must be >= 100")
        if self.sandwich_n < 18:
            raise ConfigError("sandwich.n must be >= 18 (partition mesh constraint)")
        if any(n < 1 for n in self.n_list):
            raise ConfigError("edgeworth.n_list entries must be >= 1")
        if self.threads < 1:
            raise ConfigError("run.threads must be >= 1")
        if self.walk_n < 1:
            raise ConfigError("walk.n must be >= 1")
        return self


def _build_model(sec) -> object:
    kind = sec.get("kind", None)
    if kind is None:
        raise ConfigError("model.kind is required")
    model_id = sec.get("model_id", kind)
    try:
        if kind == "finite-support":
            raw = sec.get("matrices", None)
            if raw is None:
                raise ConfigError("model.matrices is required for finite-support")
            mats = []
            for blob in raw.split(";"):
                vals = _floats(blob)
                d = int(round(len(vals) ** 0.5))
                if d * d != len(vals):
                    raise ConfigError("model.matrices entries must be square row-major")
                mats.append(np.asarray(vals).reshape(d, d))
            probs = _floats(sec.get("probs", ""))
            return FiniteSupportModel(mats, probs, model_id)
        if kind == "scalar-rotation":
            scales = _floats(sec.get("scales", "2.0 0.5"))
            probs = _floats(sec.get("probs", " ".join(["%g" % (1 / len(scales))] * len(scales))))
            return ScalarRotationModel(scales, probs, model_id)
        if kind == "rotation-diag-rotation":
            return RotationDiagRotationModel(sec.getfloat("log_scale", 1.0), model_id)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"model section invalid: {exc}") from exc
    raise ConfigError(f"model.kind {kind!r} is not one of finite-support, "
                      "scalar-rotation, rotation-diag-rotation")


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    if "model" not in parser:
        raise ConfigError("config must contain a [model] section")

    def get(section, key, cast, default):
        if section in parser and key in parser[section]:
            try:
                return cast(parser[section][key])
            except ConfigError:
                raise
            except Exception as exc:
                raise ConfigError(f"{section}.{key} invalid: {exc}") from exc
        return default

    bool_cast = lambda v: v.strip().lower() in ("1", "true", "yes", "on")
    cfg = ExperimentConfig(
        model=_build_model(parser["model"]),
        s_list=get("spectral", "s_list", _floats, [0.0]),
        bias_s=get("bias", "s", float, 0.0),
        m=get("spectral", "m", int, 1024),
        h=get("spectral", "h", float, 0.02),
        richardson=get("spectral", "richardson", bool_cast, True),
        eig_tol=get("spectral", "eig_tol", float, 1e-12),
        s_max=get("spectral", "s_max", float, 0.25),
        n_quad=get("spectral", "n_quad", int, 512),
        walk_n=get("walk", "n", int, 1000),
        x0_theta=get("walk", "x0_theta", float, 0.0),
        y_theta=get("walk", "y_theta", float, 0.0),
        n_list=get("edgeworth", "n_list", _ints, [64, 256, 1024]),
        n_mc=get("edgeworth", "n_mc", int, 100_000),
        t_min=get("edgeworth", "t_min", float, -6.0),
        t_max=get("edgeworth", "t_max", float, 6.0),
        t_points=get("edgeworth", "t_points", int, 241),
        partition_a=get("partition", "A", float, 4.0),
        gamma=get("partition", "gamma", float, 0.25),
        sandwich_t=get("sandwich", "t", float, 0.0),
        sandwich_n=get("sandwich", "n", int, 256),
        moment_eps=get("check", "eps", float, 1.0),
        moment_samples=get("check", "n_samples", int, 1000),
        prox_steps=get("check", "n_steps", int, 500),
        prox_reps=get("check", "n_reps", int, 8),
        seed=get("run", "seed", int, 0),
        threads=get("run", "threads", int, _default_threads()),
        out_dir=get("run", "out", str, "out"),
    )
    return cfg.validate()


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
