"""Parallel transport along sampled curves, vector and spin-1/2 versions.

Vector transport works in world indices: the endpoint-to-endpoint propagator
P solves dP/dtau = -Gamma_mu(x) u^mu P, integrated with one classical RK4
step per sample interval.  The coefficient at the interval midpoint comes
from cubic Hermite interpolation of the stored samples (positions from
(x, u), velocities from (u, a)), so no extra geodesic solves are needed.

Spin-1/2 transport multiplies per-interval exponentials of the frame-index
connection, exp(-M_l(midpoint) dx^l) lifted to SL(2,C) with the pinned
generator convention of the lorentz module.  Each factor has determinant one
and the factor for the reversed interval is its exact adjugate inverse,
which is why a retraced path gives the identity to machine precision rather
than to integration accuracy.  The SU(2) sign of the result is whatever the
continuous composition along the path produces; no branch is re-chosen
afterwards.

Endpoint propagators are cached on the segment, keyed by gauge where that
matters; reversed segments carry their own cache.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import UsageError
from .frames import frame_field, inverse_frame, orthonormality_defect, spin_connection
from .geodesic import GeodesicSegment, reverse
from .lorentz import (
    expm2,
    lift_so13,
    lorentz_polar,
    ordered_product,
    pure_boost,
    pure_boost_inverse,
)
from .spacetime import Event, Spacetime, Tangent, metric_at, require_event, same_event

ORTHO_TOL = 1.0e-8

_EYE4 = np.eye(4)


@dataclass(frozen=True)
class Tetrad:
    """An orthonormal frame at an event; columns of ``matrix`` are the legs.

    Leg 0 is timelike.  Orthonormality (N^T g N = eta within ORTHO_TOL) is
    the caller's responsibility and is rechecked where it matters.
    """

    event: Event
    matrix: np.ndarray

    @property
    def vectors(self) -> tuple[Tangent, Tangent, Tangent, Tangent]:
        return tuple(Tangent(self.matrix[:, a].copy(), self.event) for a in range(4))

    def defect(self, st: Spacetime) -> float:
        """Orthonormality defect max |N^T g N - eta| at this tetrad's event."""
        return orthonormality_defect(st.metric(self.event.coords), self.matrix)


@dataclass(frozen=True)
class SpinTransport:
    """A 2x2 transport matrix between spin frames at two events."""

    matrix: np.ndarray
    source: Tetrad
    target: Tetrad


@dataclass(frozen=True)
class LorentzMap:
    """A 4x4 map between frame components at the source and target tetrads."""

    matrix: np.ndarray
    source: Tetrad
    target: Tetrad


class Correspondence(NamedTuple):
    tetrad: Tetrad
    map: LorentzMap
    spin: SpinTransport


def gauge_tetrad(st: Spacetime, event: Event, gauge: str = "static") -> Tetrad:
    """The gauge frame field evaluated at one event, packaged as a Tetrad."""
    require_event(st, event)
    return Tetrad(event, frame_field(st, event.coords, gauge))


# ---------------------------------------------------------------------------
# segment-level propagators (internal, cached)


def _interval_data(seg: GeodesicSegment) -> tuple[np.ndarray, np.ndarray, float]:
    """Hermite midpoint positions/velocities for each sample interval."""
    if "midpoints" in seg.cache:
        return seg.cache["midpoints"]
    x, u = seg.events, seg.tangents
    h = float(seg.tau[1] - seg.tau[0])
    gam = seg.spacetime.christoffel(x)
    acc = -np.einsum("klmn,km,kn->kl", gam, u, u)
    x_mid = 0.5 * (x[:-1] + x[1:]) + (h / 8.0) * (u[:-1] - u[1:])
    u_mid = 0.5 * (u[:-1] + u[1:]) + (h / 8.0) * (acc[:-1] - acc[1:])
    seg.cache["midpoints"] = (x_mid, u_mid, h)
    return x_mid, u_mid, h


def _coefficient(st: Spacetime, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """W = -Gamma_mu u^mu as a matrix acting on world components.  Batched."""
    gam = st.christoffel(x)
    return -np.einsum("...lms,...m->...ls", gam, u)


def world_propagator(seg: GeodesicSegment) -> np.ndarray:
    """Endpoint parallel propagator in world indices, P[end <- start]."""
    if "world_propagator" in seg.cache:
        return seg.cache["world_propagator"]
    if seg.zero_length:
        p = _EYE4.copy()
    else:
        st = seg.spacetime
        x_mid, u_mid, h = _interval_data(seg)
        w_nodes = _coefficient(st, seg.events, seg.tangents)
        w0, w1 = w_nodes[:-1], w_nodes[1:]
        wm = _coefficient(st, x_mid, u_mid)
        k1 = w0
        k2 = wm + (0.5 * h) * (wm @ k1)
        k3 = wm + (0.5 * h) * (wm @ k2)
        k4 = w1 + h * (w1 @ k3)
        steps = _EYE4 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p = ordered_product(steps)
    seg.cache["world_propagator"] = p
    return p


def frame_propagator(seg: GeodesicSegment, gauge: str = "static") -> np.ndarray:
    """The same transport expressed between the gauge frames at the endpoints."""
    key = ("frame_propagator", gauge)
    if key in seg.cache:
        return seg.cache[key]
    st = seg.spacetime
    n1 = frame_field(st, seg.events[-1], gauge)
    g1 = st.metric(seg.events[-1])
    n0 = frame_field(st, seg.events[0], gauge)
    p = inverse_frame(n1, g1) @ world_propagator(seg) @ n0
    seg.cache[key] = p
    return p


def spinor_propagator(seg: GeodesicSegment, gauge: str = "static") -> np.ndarray:
    """SL(2,C) transport matrix along the segment, U[end <- start]."""
    key = ("spinor_propagator", gauge)
    if key in seg.cache:
        return seg.cache[key]
    if seg.zero_length:
        u = np.eye(2, dtype=complex)
    else:
        st = seg.spacetime
        x_mid, _, _ = _interval_data(seg)
        dx = seg.events[1:] - seg.events[:-1]
        m_conn = spin_connection(st, x_mid, gauge)
        m = -np.einsum("klab,kl->kab", m_conn, dx)
        u = ordered_product(expm2(lift_so13(m)))
    seg.cache[key] = u
    return u


def reversed_segment(seg: GeodesicSegment) -> GeodesicSegment:
    """reverse(seg), computed once and cached on the segment."""
    if "reversed" not in seg.cache:
        seg.cache["reversed"] = reverse(seg)
    return seg.cache["reversed"]


def polygon_spinor_transport(st: Spacetime, xs: np.ndarray, gauge: str = "static") -> np.ndarray:
    """Spinor transport along polygonal paths given by their knots.

    xs has shape (..., n, 4); the result (..., 2, 2) is the ordered product
    of per-chord midpoint exponentials.  This is the discrete path law used
    for perturbed-path bundles, where the polygon itself is the path.
    """
    xs = np.asarray(xs, dtype=float)
    dx = xs[..., 1:, :] - xs[..., :-1, :]
    mid = 0.5 * (xs[..., 1:, :] + xs[..., :-1, :])
    m_conn = spin_connection(st, mid, gauge)
    m = -np.einsum("...lab,...l->...ab", m_conn, dx)
    return ordered_product(expm2(lift_so13(m)))


# ---------------------------------------------------------------------------
# contract-level operations


def _check_attached(seg: GeodesicSegment, v: Tangent | Tetrad, what: str) -> None:
    if not same_event(v.event, seg.start, tol=1.0e-12):
        raise UsageError(f"{what} is not attached to the segment's first event")


def transport_vector(seg: GeodesicSegment, v0: Tangent) -> Tangent:
    """Parallel transport of a tangent vector along the segment."""
    _check_attached(seg, v0, "vector")
    return Tangent(world_propagator(seg) @ v0.components, seg.end)


def transport_tetrad(seg: GeodesicSegment, n0: Tetrad) -> Tetrad:
    """Parallel transport of all four tetrad legs along the segment."""
    _check_attached(seg, n0, "tetrad")
    defect = n0.defect(seg.spacetime)
    if defect > 100.0 * ORTHO_TOL:
        raise UsageError(f"input tetrad is not orthonormal (defect {defect:.3e})")
    return Tetrad(seg.end, world_propagator(seg) @ n0.matrix)


def spin_connection_at(st: Spacetime, e: Event, gauge: str = "static") -> np.ndarray:
    """The four 2x2 connection matrices M_mu at an event, spin-1/2 lifted."""
    require_event(st, e)
    return lift_so13(spin_connection(st, e.coords, gauge))


def transport_spinor(seg: GeodesicSegment, gauge: str = "static") -> SpinTransport:
    """Path-ordered spin-1/2 transport along the segment.

    A zero-length segment transports trivially; any other segment needs at
    least two samples.
    """
    if not seg.zero_length and seg.n_samples < 2:
        raise UsageError("segment has too few samples for spinor transport")
    st = seg.spacetime
    return SpinTransport(
        spinor_propagator(seg, gauge),
        gauge_tetrad(st, seg.start, gauge),
        gauge_tetrad(st, seg.end, gauge),
    )


def frame_correspondence(
    seg1: GeodesicSegment,
    seg2: GeodesicSegment,
    n1: Tetrad,
    gauge: str = "static",
) -> Correspondence:
    """Carry a tetrad at A1 backwards along seg1=OA1 and forwards along seg2=OA2.

    Returns the transported tetrad n2 at A2, the induced map between gauge
    frame components at A1 and A2, and the composed spin transport over the
    same path.
    """
    if not same_event(seg1.start, seg2.start, tol=1.0e-9):
        raise UsageError("segments do not share their initial event")
    _check_attached(reversed_segment(seg1), n1, "tetrad")

    st = seg1.spacetime
    back = reversed_segment(seg1)
    p = world_propagator(seg2) @ world_propagator(back)
    n2 = Tetrad(seg2.end, p @ n1.matrix)

    t1 = gauge_tetrad(st, seg1.end, gauge)
    t2 = gauge_tetrad(st, seg2.end, gauge)
    g2 = metric_at(st, seg2.end)
    lam = inverse_frame(t2.matrix, g2) @ p @ t1.matrix
    lmap = LorentzMap(lam, t1, t2)

    u = spinor_propagator(seg2, gauge) @ spinor_propagator(back, gauge)
    spin = SpinTransport(u, t1, t2)
    return Correspondence(n2, lmap, spin)


def wigner_rotation(st: Spacetime, lmap: LorentzMap, u1: Tangent, u2: Tangent) -> np.ndarray:
    """Rest-frame rotation carried by a Lorentz map between moving observers.

    The map is conjugated by the pure boosts taking the frame time legs to
    the rest velocities u1 (source side) and u2 (target side); the rotation
    factor of the polar decomposition of the result is returned.
    """
    if not same_event(u1.event, lmap.source.event, tol=1.0e-12):
        raise UsageError("u1 is not attached to the map's source event")
    if not same_event(u2.event, lmap.target.event, tol=1.0e-12):
        raise UsageError("u2 is not attached to the map's target event")
    g1 = metric_at(st, lmap.source.event)
    g2 = metric_at(st, lmap.target.event)
    uh1 = inverse_frame(lmap.source.matrix, g1) @ u1.components
    uh2 = inverse_frame(lmap.target.matrix, g2) @ u2.components
    conj = pure_boost_inverse(uh2) @ lmap.matrix @ pure_boost(uh1)
    _, rot = lorentz_polar(conj)
    return rot[1:, 1:]
