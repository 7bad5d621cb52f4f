"""Shared fixtures: canonical models, grids, and cached spectral data."""

import numpy as np
import pytest

from glwalk.models import (
    FiniteSupportModel,
    RotationDiagRotationModel,
    ScalarRotationModel,
)
from glwalk.spectral import ProjectiveGrid, build_operator, dominant_eigen, spectral_data


@pytest.fixture(scope="session")
def sr_model():
    """Exactly solvable scale-rotation mix: kappa(s) = (2^s + 2^-s)/2."""
    return ScalarRotationModel([2.0, 0.5], [0.5, 0.5], "sr-2")


@pytest.fixture(scope="session")
def rdr_model():
    return RotationDiagRotationModel(1.0, "rdr-1")


@pytest.fixture(scope="session")
def fs_model():
    """A contracting two-matrix mix used for generic-kernel paths."""
    return FiniteSupportModel(
        [np.array([[1.9, 0.4], [0.2, 0.8]]), np.array([[0.9, -0.6], [0.5, 1.1]])],
        [0.5, 0.5],
        "fs-mix",
    )


@pytest.fixture(scope="session")
def grid256():
    return ProjectiveGrid(256)


@pytest.fixture(scope="session")
def grid1024():
    return ProjectiveGrid(1024)


@pytest.fixture(scope="session")
def sr_spec0(sr_model, grid256):
    return spectral_data(sr_model, 0.0, grid256, richardson=True)


@pytest.fixture(scope="session")
def fs_op0(fs_model, grid256):
    return build_operator(fs_model, 0.0, grid256)


@pytest.fixture(scope="session")
def fs_spec0(fs_model, grid256, fs_op0):
    spec = dominant_eigen(fs_op0)
    full = spectral_data(fs_model, 0.0, grid256, richardson=True)
    spec.lambda1, spec.lambda2, spec.lambda3 = full.lambda1, full.lambda2, full.lambda3
    return spec


@pytest.fixture(scope="session")
def rdr_spec0(rdr_model, grid256):
    return spectral_data(rdr_model, 0.0, grid256, richardson=True)
