"""Metric models: analytic Christoffels against a finite-difference oracle,
signature, chart domains, and the factory's validation."""

import numpy as np
import pytest

from eprgeo import (
    ConfigurationError,
    DomainError,
    Event,
    Minkowski,
    make_spacetime,
)
from eprgeo.spacetime import (
    christoffel_at,
    inner,
    metric_at,
    require_event,
    validate_event,
)
from eprgeo.spacetime import Tangent


def fd_christoffel(st, x, h=1e-6):
    """Independent second-kind Christoffels from central differences."""
    x = np.asarray(x, dtype=float)
    dg = np.zeros((4, 4, 4))
    for lam in range(4):
        xp = x.copy()
        xm = x.copy()
        xp[lam] += h
        xm[lam] -= h
        dg[lam] = (st.metric(xp) - st.metric(xm)) / (2.0 * h)
    ginv = np.linalg.inv(st.metric(x))
    gamma = np.zeros((4, 4, 4))
    for i in range(4):
        for m in range(4):
            for n in range(4):
                s = 0.0
                for l in range(4):
                    s += ginv[i, l] * (dg[m, l, n] + dg[n, l, m] - dg[l, m, n])
                gamma[i, m, n] = 0.5 * s
    return gamma


SAMPLE_POINTS = {
    "schwarzschild": [
        np.array([0.0, 6.0, 1.2, 0.3]),
        np.array([2.0, 11.5, 2.0, -1.0]),
        np.array([-1.0, 30.0, 0.7, 2.5]),
    ],
    "weak_field": [
        np.array([0.0, 1.5, -0.4, 2.0]),
        np.array([3.0, -4.0, 1.0, 0.5]),
        np.array([0.0, 0.1, 0.0, -0.2]),
    ],
}


@pytest.mark.parametrize("kind", ["schwarzschild", "weak_field"])
def test_christoffel_matches_finite_differences(kind):
    params = {"M": 1.0} if kind == "schwarzschild" else {"epsilon": 0.05}
    st = make_spacetime(kind, params)
    for x in SAMPLE_POINTS[kind]:
        exact = st.christoffel(x)
        approx = fd_christoffel(st, x)
        assert np.max(np.abs(exact - approx)) < 1e-5


def test_christoffel_symmetric_lower_indices(schwarzschild):
    x = np.array([0.0, 9.0, 1.1, 0.4])
    gamma = schwarzschild.christoffel(x)
    assert np.allclose(gamma, np.swapaxes(gamma, 1, 2))


def test_metric_signature(schwarzschild):
    for r in (2.5, 6.0, 50.0):
        g = schwarzschild.metric(np.array([0.0, r, 1.0, 0.0]))
        eig = np.sort(np.linalg.eigvalsh(g))
        assert eig[0] < 0
        assert np.all(eig[1:] > 0)


def test_metric_batched_shapes(schwarzschild):
    xs = np.tile(np.array([0.0, 8.0, 1.3, 0.2]), (5, 1))
    assert schwarzschild.metric(xs).shape == (5, 4, 4)
    assert schwarzschild.christoffel(xs).shape == (5, 4, 4, 4)


def test_zero_mass_schwarzschild_is_flat():
    st = make_spacetime("schwarzschild", {"M": 0.0})
    x = np.array([0.0, 7.0, 1.0, 2.0])
    g = st.metric(x)
    # spherical-coordinate flat metric
    expected = np.diag([-1.0, 1.0, x[1] ** 2, (x[1] * np.sin(x[2])) ** 2])
    assert np.max(np.abs(g - expected)) < 1e-12


def test_minkowski_trivial():
    st = Minkowski({})
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(st.metric(x), np.diag([-1.0, 1.0, 1.0, 1.0]))
    assert np.allclose(st.christoffel(x), 0.0)
    assert st.periodic_axes == {}


def test_schwarzschild_periodic_azimuth(schwarzschild):
    assert schwarzschild.periodic_axes == {3: 2.0 * np.pi}


def test_weak_field_metric_linear_in_epsilon():
    x = np.array([0.0, 2.0, 1.0, -1.0])
    g1 = make_spacetime("weak_field", {"epsilon": 0.04}).metric(x)
    g2 = make_spacetime("weak_field", {"epsilon": 0.02}).metric(x)
    eta = np.diag([-1.0, 1.0, 1.0, 1.0])
    assert np.allclose(g1 - eta, 2.0 * (g2 - eta), atol=1e-14)


def test_chart_domain(schwarzschild):
    assert validate_event(schwarzschild, Event(np.array([0.0, 6.0, 1.0, 0.0])))
    # at or below the guarded horizon radius
    assert not validate_event(schwarzschild, Event(np.array([0.0, 2.0, 1.0, 0.0])))
    assert not validate_event(schwarzschild, Event(np.array([0.0, 1.0, 1.0, 0.0])))
    # polar axis excluded for the spherical chart
    assert not validate_event(schwarzschild, Event(np.array([0.0, 6.0, 0.0, 0.0])))
    with pytest.raises(DomainError):
        require_event(schwarzschild, Event(np.array([0.0, 2.0, 1.0, 0.0])))


def test_event_helpers(schwarzschild):
    e = Event(np.array([0.0, 10.0, np.pi / 2, 0.0]))
    g = metric_at(schwarzschild, e)
    assert g.shape == (4, 4)
    gam = christoffel_at(schwarzschild, e)
    assert gam.shape == (4, 4, 4)
    u = Tangent(np.array([1.0, 0.0, 0.0, 0.0]), e)
    assert inner(schwarzschild, e, u, u) == pytest.approx(g[0, 0])


def test_factory_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        make_spacetime("kerr")
    with pytest.raises(ConfigurationError):
        make_spacetime("schwarzschild", {})
    with pytest.raises(ConfigurationError):
        make_spacetime("schwarzschild", {"M": -1.0})
    with pytest.raises(ConfigurationError):
        make_spacetime("schwarzschild", {"M": 1.0, "spin": 0.5})
    with pytest.raises(ConfigurationError):
        make_spacetime("weak_field", {"epsilon": 0.2})
    with pytest.raises(ConfigurationError):
        make_spacetime("weak_field", {"epsilon": 0.01, "softening": 0.0})


def test_weak_field_softening_default():
    st = make_spacetime("weak_field", {"epsilon": 0.05})
    # potential stays finite at the coordinate origin
    g = st.metric(np.array([0.0, 0.0, 0.0, 0.0]))
    assert np.all(np.isfinite(g))
    assert g[0, 0] == pytest.approx(-(1.0 - 2.0 * 0.05), rel=1e-12)
