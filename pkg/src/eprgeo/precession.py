"""Circular orbits and the geodetic precession they produce.

For a circular Schwarzschild orbit of areal radius r, a gyroscope carried
around one revolution lags the static frame by 2 pi (1 - sqrt(1 - 3M/r)).
This closed form is the independent yardstick for both transport routes: the
4x4 propagator (angle in the comoving rest frame) and the spin-1/2 transport
(angle from the conjugation-invariant trace).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .frames import inverse_frame
from .geodesic import GeodesicSegment, integrate_geodesic, samples_for
from .lorentz import (
    lorentz_polar,
    pure_boost,
    pure_boost_inverse,
    rotation_axis_angle,
    su2_rotation_angle,
)
from .spacetime import Event, Spacetime
from .transport import frame_propagator, gauge_tetrad, spinor_propagator


def circular_orbit_tangent(st: Spacetime, r: float) -> tuple[Event, np.ndarray]:
    """Equatorial circular-orbit start event and unit 4-velocity at radius r."""
    m = getattr(st, "mass", None)
    if m is None:
        raise ConfigurationError("circular orbits need a schwarzschild spacetime")
    if r <= 3.0 * m:
        raise ConfigurationError(f"no timelike circular orbit at r={r} <= 3M")
    e0 = Event(np.array([0.0, r, np.pi / 2.0, 0.0]))
    omega = np.sqrt(m / r**3)
    ut = 1.0 / np.sqrt(1.0 - 3.0 * m / r)
    u0 = np.array([ut, 0.0, 0.0, omega * ut])
    return e0, u0


def orbit_period(st: Spacetime, r: float) -> float:
    """Proper time for one revolution of the circular orbit at radius r."""
    m = st.mass
    return 2.0 * np.pi * np.sqrt(r**3 / m) * np.sqrt(1.0 - 3.0 * m / r)


def geodetic_angle_exact(st: Spacetime, r: float) -> float:
    """Closed-form per-orbit geodetic angle 2 pi (1 - sqrt(1 - 3M/r))."""
    m = st.mass
    return 2.0 * np.pi * (1.0 - np.sqrt(1.0 - 3.0 * m / r))


def integrate_orbit(
    st: Spacetime, r: float, n_orbits: float = 1.0, tol: float = 1.0e-10
) -> GeodesicSegment:
    """Integrate the circular orbit for the given number of revolutions."""
    e0, u0 = circular_orbit_tangent(st, r)
    tau = n_orbits * orbit_period(st, r)
    return integrate_geodesic(st, e0, u0, tau, tol=tol, n_samples=samples_for(tau))


def rest_frame_holonomy_angle(seg: GeodesicSegment, gauge: str = "static") -> tuple[float, np.ndarray]:
    """(angle, axis) of the transport holonomy seen by the comoving observer.

    The frame-component propagator is conjugated by the pure boost of the
    orbital velocity, leaving a rotation whose angle is the precession per
    segment.  Start and end must share their static-frame velocity (true for
    whole circular orbits).
    """
    st = seg.spacetime
    lam = frame_propagator(seg, gauge)
    n0 = gauge_tetrad(st, seg.start, gauge)
    g0 = st.metric(seg.start.coords)
    uh = inverse_frame(n0.matrix, g0) @ seg.tangents[0]
    conj = pure_boost_inverse(uh) @ lam @ pure_boost(uh)
    _, rot = lorentz_polar(conj)
    axis, angle = rotation_axis_angle(rot[1:, 1:])
    return angle, axis


def spinor_holonomy_angle(seg: GeodesicSegment, gauge: str = "static") -> float:
    """Precession angle from the spin-1/2 route via |tr U| = 2 |cos(theta/2)|.

    The trace is similarity-invariant, so no rest-frame conjugation is
    needed; angles in [0, pi] only, which covers the geodetic range.
    """
    return su2_rotation_angle(spinor_propagator(seg, gauge))
