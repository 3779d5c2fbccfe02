import sys
import time
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from driftlab import (  # noqa: E402
    Domain,
    Grid,
    SolverConfig,
    WeightFunction,
    assemble_schrodinger,
    assemble_weighted,
    refine_and_extrapolate,
    smallest_k,
    smallest_k_generalized,
)

CONFIG_PATH = Path(__file__).resolve().parents[1] / "configs" / "catalog.json"

PI = np.pi


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def interval_ext():
    dom = Domain.interval(0.0, PI)
    f = WeightFunction.constant(0.0, 1)
    spec, elapsed = timed(refine_and_extrapolate, dom, f,
                          Grid.for_domain(dom, 249), 3, SolverConfig(k=22))
    return spec, elapsed


@pytest.fixture(scope="session")
def box_ext():
    dom = Domain.box([0.0, 0.0], [PI, PI])
    f = WeightFunction.constant(0.0, 2)
    spec, elapsed = timed(refine_and_extrapolate, dom, f,
                          Grid.for_domain(dom, 63), 2, SolverConfig(k=22))
    return spec, elapsed


@pytest.fixture(scope="session")
def ou_ext():
    dom = Domain.interval(-8.0, 8.0)
    f = WeightFunction.quadratic(0.5, 1)
    spec, elapsed = timed(refine_and_extrapolate, dom, f,
                          Grid.for_domain(dom, 500), 3, SolverConfig(k=6),
                          route="weighted")
    return spec, elapsed


@pytest.fixture(scope="session")
def gauss_box_ext():
    dom = Domain.box([-6.0, -6.0], [6.0, 6.0])
    f = WeightFunction.quadratic(0.25, 2)
    spec, elapsed = timed(refine_and_extrapolate, dom, f,
                          Grid.for_domain(dom, 95), 2, SolverConfig(k=22))
    return spec, elapsed


@pytest.fixture(scope="session")
def cross_route_pair():
    dom = Domain.box([-2.0, -2.0], [2.0, 2.0])
    f = WeightFunction.quadratic(0.25, 2)
    grid = Grid.for_domain(dom, 128)
    cfg = SolverConfig(k=10)
    s_schrod = smallest_k(assemble_schrodinger(dom, f, grid), cfg)
    s_weighted = smallest_k_generalized(assemble_weighted(dom, f, grid), cfg)
    return s_schrod, s_weighted


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    """Two full verify runs over the shipped catalog, sharing a warm cache."""
    from driftlab import harness

    root = tmp_path_factory.mktemp("verify")
    cache = root / "cache"
    runs = []
    for name in ("run1", "run2"):
        out = root / name
        code = harness.verify(CONFIG_PATH, out, seed=0, cache_dir=cache)
        runs.append((out, code))
    return runs
