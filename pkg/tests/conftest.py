"""Shared fixtures: seeded generators and random matrix factories.

Every random test draws from ``numpy.random.default_rng`` with a fixed seed
so failures reproduce exactly. Matrices used with real powers come from
``near_identity``: exponentials of small matrices, whose eigenvalue
arguments stay well inside the principal branch so products of principal
powers equal principal powers of products.
"""

from __future__ import annotations

import importlib.util
import logging
import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg

REPO_ROOT = Path(__file__).resolve().parent.parent
SCRIPTS_DIR = REPO_ROOT / "scripts"


def load_script(name: str):
    """Import ``scripts/<name>.py`` as a module (scripts are not a package)."""
    spec = importlib.util.spec_from_file_location(name, SCRIPTS_DIR / f"{name}.py")
    assert spec is not None and spec.loader is not None
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="session")
def alpha_cli():
    return load_script("alpha_cli")


@pytest.fixture(scope="session")
def run_examples():
    return load_script("run_examples")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def random_real(rng) -> Callable[[int], np.ndarray]:
    def make(n: int) -> np.ndarray:
        return rng.standard_normal((n, n))

    return make


@pytest.fixture
def random_complex(rng) -> Callable[[int], np.ndarray]:
    def make(n: int) -> np.ndarray:
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    return make


@pytest.fixture
def near_identity(rng) -> Callable[..., np.ndarray]:
    """``expm(scale * G)`` for Gaussian ``G``; real, non-singular, spectrum near 1."""

    def make(n: int, scale: float = 0.3) -> np.ndarray:
        return scipy.linalg.expm(scale * rng.standard_normal((n, n)))

    return make


@pytest.fixture
def reset_root_logger():
    """Strip handlers off the root logger so init_logger reinstalls cleanly."""
    import lib.observability as observability

    def reset() -> None:
        root = logging.getLogger()
        for handler in list(root.handlers):
            if getattr(handler, "_alpha_compound_handler", False):
                root.removeHandler(handler)
        root.setLevel(logging.WARNING)
        observability._INITIALIZED = False

    reset()
    yield reset
    reset()
