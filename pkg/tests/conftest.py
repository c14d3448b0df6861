from __future__ import annotations

import pathlib
import sys

import numpy as np
import pytest

ROOT_DIR = pathlib.Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from vesselseg.config import SegmenterConfig
from vesselseg.models import BinaryMask, Image, PhantomSpec, TubeSpec
from vesselseg.services.phantom import phantom_spec, render


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240801)


@pytest.fixture()
def config() -> SegmenterConfig:
    return SegmenterConfig()


@pytest.fixture()
def horizontal_tube_spec() -> PhantomSpec:
    """64x64, one bright noiseless tube along row 32."""
    return PhantomSpec(
        width=64,
        height=64,
        tubes=[TubeSpec(points=[(4.0, 32.0), (59.0, 32.0)], radius=3.0, peak=0.9)],
        noise_sigma=0.0,
    )


@pytest.fixture()
def horizontal_tube(horizontal_tube_spec: PhantomSpec) -> tuple[Image, BinaryMask]:
    return render(horizontal_tube_spec)


@pytest.fixture()
def faint_branch_phantom() -> tuple[Image, BinaryMask]:
    return render(phantom_spec("faint-branch", 64, 64, noise_sigma=0.05, rng_seed=3))
