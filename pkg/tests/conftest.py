"""Shared fixtures: spacetimes and the random Schwarzschild segment battery."""

import numpy as np
import pytest

from eprgeo import Event, integrate_geodesic, make_spacetime
from eprgeo.frames import frame_field


@pytest.fixture(scope="session")
def minkowski():
    return make_spacetime("minkowski")


@pytest.fixture(scope="session")
def schwarzschild():
    return make_spacetime("schwarzschild", {"M": 1.0})


@pytest.fixture(scope="session")
def static_tangent():
    """Callable building a unit timelike tangent from static-frame velocity w."""

    def build(st, coords, w):
        w = np.asarray(w, dtype=float)
        n0 = frame_field(st, np.asarray(coords, dtype=float), "static")
        return n0 @ np.concatenate(([np.sqrt(1.0 + w @ w)], w))

    return build


@pytest.fixture(scope="session")
def battery(schwarzschild, static_tangent):
    """100 random timelike segments outside the photon sphere, fixed seed.

    Reused by the transport property tests and by the acceptance criteria
    that quantify worst-case behaviour over a random battery.
    """
    rng = np.random.default_rng(42)
    st = schwarzschild
    segs = []
    for _ in range(100):
        r = rng.uniform(6.0, 20.0)
        th = rng.uniform(0.6, np.pi - 0.6)
        ph = rng.uniform(-np.pi, np.pi)
        coords = np.array([0.0, r, th, ph])
        w = rng.normal(scale=0.4, size=3)
        u = static_tangent(st, coords, w)
        tau = rng.uniform(0.8, 2.5)
        segs.append(integrate_geodesic(st, Event(coords), u, tau))
    return segs
