"""Render figures from experiment CSVs.

The renderer never recomputes statistics; it draws exactly the columns the
experiment pipeline emitted, so every plotted series is reproducible from
the file bytes alone.
"""

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("ks-decay", "cdf-overlay", "spectral-curve")

REQUIRED_COLUMNS = {
    "ks-decay": ["n", "ks_phi", "ks_edgeworth"],
    "cdf-overlay": ["n", "t", "ecdf", "phi_ref", "edgeworth_ref"],
    "spectral-curve": ["s", "kappa", "Lambda"],
}


class VizError(ValueError):
    pass


@dataclass
class PlotJob:
    kind: str
    csv_paths: list
    out_path: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VizError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")
        if not self.csv_paths:
            raise VizError("at least one input CSV is required")


@dataclass
class RenderResult:
    out_path: str
    series: dict  # name -> (x array, y array); the exact plotted data


def _load(paths, required):
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise VizError(f"{path}: missing columns: {', '.join(missing)}")
            rows.extend(reader)
    if not rows:
        raise VizError("no data rows")
    return rows


def _render_ks_decay(job):
    rows = _load(job.csv_paths, REQUIRED_COLUMNS["ks-decay"])
    n = np.array([float(r["n"]) for r in rows])
    ks_phi = np.array([float(r["ks_phi"]) for r in rows])
    ks_edge = np.array([float(r["ks_edgeworth"]) for r in rows])
    order = np.argsort(n)
    n, ks_phi, ks_edge = n[order], ks_phi[order], ks_edge[order]
    guide = ks_phi[0] * np.sqrt(n[0] / n)  # reference slope -1/2 anchor

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(n, ks_phi, "o-", label="KS vs normal")
    ax.loglog(n, ks_edge, "s-", label="KS vs expansion")
    ax.loglog(n, guide, "k--", alpha=0.6, label="slope -1/2 guide")
    ax.set_xlabel("n")
    ax.set_ylabel("KS distance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(job.out_path)
    plt.close(fig)
    return RenderResult(
        job.out_path,
        {"ks_phi": (n, ks_phi), "ks_edgeworth": (n, ks_edge), "guide": (n, guide)},
    )


def _render_cdf_overlay(job):
    rows = _load(job.csv_paths, REQUIRED_COLUMNS["cdf-overlay"])
    ns = sorted({int(float(r["n"])) for r in rows})
    n_sel = int(job.options.get("n", ns[-1]))
    if n_sel not in ns:
        raise VizError(f"horizon n = {n_sel} not present; available: {ns}")
    sel = [r for r in rows if int(float(r["n"])) == n_sel]
    t = np.array([float(r["t"]) for r in sel])
    order = np.argsort(t)
    t = t[order]
    ecdf = np.array([float(r["ecdf"]) for r in sel])[order]
    phi_ref = np.array([float(r["phi_ref"]) for r in sel])[order]
    edge_ref = np.array([float(r["edgeworth_ref"]) for r in sel])[order]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(t, ecdf, label=f"empirical CDF (n = {n_sel})", drawstyle="steps-post")
    ax.plot(t, phi_ref, label="normal CDF")
    ax.plot(t, edge_ref, label="first-order expansion")
    ax.set_xlabel("t")
    ax.set_ylabel("CDF")
    ax.legend()
    fig.tight_layout()
    fig.savefig(job.out_path)
    plt.close(fig)
    return RenderResult(
        job.out_path,
        {
            "ecdf": (t, ecdf),
            "phi_ref": (t, phi_ref),
            "edgeworth_ref": (t, edge_ref),
        },
    )


def _render_spectral_curve(job):
    rows = _load(job.csv_paths, REQUIRED_COLUMNS["spectral-curve"])
    s = np.array([float(r["s"]) for r in rows])
    kappa = np.array([float(r["kappa"]) for r in rows])
    lam = np.array([float(r["Lambda"]) for r in rows])
    order = np.argsort(s)
    s, kappa, lam = s[order], kappa[order], lam[order]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(s, kappa, "o-", label="kappa(s)")
    ax.plot(s, lam, "s-", label="Lambda(s)")
    ax.set_xlabel("s")
    ax.legend()
    fig.tight_layout()
    fig.savefig(job.out_path)
    plt.close(fig)
    return RenderResult(job.out_path, {"kappa": (s, kappa), "Lambda": (s, lam)})


_RENDERERS = {
    "ks-decay": _render_ks_decay,
    "cdf-overlay": _render_cdf_overlay,
    "spectral-curve": _render_spectral_curve,
}


def render(job: PlotJob) -> RenderResult:
    """Render a figure file; returns the plotted series for verification."""
    return _RENDERERS[job.kind](job)
