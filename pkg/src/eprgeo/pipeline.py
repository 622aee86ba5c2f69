"""From a pair of geodesic legs to the correlated two-qubit state.

The chain per particle: start in the particle's rest frame at the decay
event (reached from the shared reference tetrad by a pure boost), express
everything in the computational gauge frame, transport along the leg, then
undo the arrival boost relative to the detector tetrad.  Parallel transport
preserves the 4-velocity, so the composite map fixes the rest space and its
polar unitary part is an honest SU(2) rotation: the rest-frame spin rotation
of that particle.  Both the spin-1/2 route and the 4x4 vector route are
implemented; they must agree through the double cover and are tested against
each other, never merged.

Physical anchors (the reference tetrad at the decay and the detector
tetrads) are fixed in the static gauge regardless of the computational
gauge, which is what makes correlations gauge-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UsageError
from .frames import inverse_frame
from .geodesic import GeodesicSegment
from .lorentz import (
    lorentz_polar,
    pure_boost,
    pure_boost_inverse,
    pure_boost_sl2,
    pure_boost_sl2_inverse,
    rotation_matrix_from_su2,
    sl2_from_lorentz,
    sl2_inverse,
    su2_polar,
)
from .spacetime import Event, Spacetime, metric_at, same_event
from .spin import TwoQubitState, matched_direction, pair_state
from .transport import (
    Tetrad,
    frame_propagator,
    gauge_tetrad,
    spinor_propagator,
    world_propagator,
)


def boosted_tetrad(st: Spacetime, event: Event, velocity: np.ndarray | None = None) -> Tetrad:
    """Static tetrad at the event, pure-boosted so leg 0 is the given velocity.

    velocity is in world components; None means the static observer itself.
    This is the reference ("decay") frame construction.
    """
    base = gauge_tetrad(st, event, "static")
    if velocity is None:
        return base
    g = metric_at(st, event)
    uh = inverse_frame(base.matrix, g) @ np.asarray(velocity, dtype=float)
    return Tetrad(event, base.matrix @ pure_boost(uh))


def _frame_velocity(st: Spacetime, frame: Tetrad, tangent: np.ndarray) -> np.ndarray:
    g = st.metric(frame.event.coords)
    return inverse_frame(frame.matrix, g) @ tangent


def rest_conjugation_factors(
    st: Spacetime,
    start_frame: Tetrad,
    end_frame: Tetrad,
    u_start: np.ndarray,
    u_end: np.ndarray,
    gauge: str = "static",
) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 factors closing a gauge-frame transport into a rest-frame map.

    For a transport U in gauge-frame components, post @ U @ pre maps
    canonical rest-frame spin components at start_frame (rest velocity
    u_start, world components) to those at end_frame.  When U carries the
    start tangent to the end tangent the composite is unitary up to
    discretization noise.
    """
    uh0 = _frame_velocity(st, start_frame, u_start)
    uh1 = _frame_velocity(st, end_frame, u_end)
    ng0 = gauge_tetrad(st, start_frame.event, gauge).matrix
    ng1 = gauge_tetrad(st, end_frame.event, gauge).matrix
    g0 = st.metric(start_frame.event.coords)
    g1 = st.metric(end_frame.event.coords)
    s_in = sl2_from_lorentz(inverse_frame(ng0, g0) @ start_frame.matrix)
    s_out = sl2_inverse(sl2_from_lorentz(inverse_frame(ng1, g1) @ end_frame.matrix))
    pre = s_in @ pure_boost_sl2(uh0)
    post = pure_boost_sl2_inverse(uh1) @ s_out
    return pre, post


def rest_frame_map(
    seg: GeodesicSegment,
    gauge: str = "static",
    start_frame: Optional[Tetrad] = None,
    end_frame: Optional[Tetrad] = None,
) -> np.ndarray:
    """SU(2) rest-frame spin rotation along one leg (spin-1/2 route).

    Maps canonical spin components at the start (relative to start_frame)
    to canonical spin components at the end (relative to end_frame).  The
    frames default to the static tetrads at the endpoints.
    """
    st = seg.spacetime
    if start_frame is None:
        start_frame = gauge_tetrad(st, seg.start, "static")
    if end_frame is None:
        end_frame = gauge_tetrad(st, seg.end, "static")
    pre, post = rest_conjugation_factors(
        st, start_frame, end_frame, seg.tangents[0], seg.tangents[-1], gauge
    )
    chain = post @ spinor_propagator(seg, gauge) @ pre
    w, _ = su2_polar(chain)
    return w


def rest_frame_rotation(
    seg: GeodesicSegment,
    start_frame: Optional[Tetrad] = None,
    end_frame: Optional[Tetrad] = None,
) -> np.ndarray:
    """3x3 rest-frame rotation along one leg (vector route, no spinors)."""
    st = seg.spacetime
    if start_frame is None:
        start_frame = gauge_tetrad(st, seg.start, "static")
    if end_frame is None:
        end_frame = gauge_tetrad(st, seg.end, "static")

    uh0 = _frame_velocity(st, start_frame, seg.tangents[0])
    uh1 = _frame_velocity(st, end_frame, seg.tangents[-1])

    g1 = st.metric(seg.end.coords)
    lam = inverse_frame(end_frame.matrix, g1) @ world_propagator(seg) @ start_frame.matrix
    conj = pure_boost_inverse(uh1) @ lam @ pure_boost(uh0)
    _, rot = lorentz_polar(conj)
    return rot[1:, 1:]


@dataclass
class PairResult:
    """Everything the measurement layer needs about one decay configuration."""

    segment1: GeodesicSegment
    segment2: GeodesicSegment
    reference: Tetrad
    detector1: Tetrad
    detector2: Tetrad
    spin1: np.ndarray
    spin2: np.ndarray
    rotation1: np.ndarray
    rotation2: np.ndarray
    state: TwoQubitState

    @property
    def relative_rotation(self) -> np.ndarray:
        """R2 R1^T: maps particle-1 axes to the anticorrelated particle-2 axes."""
        return self.rotation2 @ self.rotation1.T


def pair_transport(
    seg1: GeodesicSegment,
    seg2: GeodesicSegment,
    *,
    gauge: str = "static",
    decay_velocity: np.ndarray | None = None,
) -> PairResult:
    """Run the full correlation pipeline for two legs sharing a decay event.

    decay_velocity (world components at O) sets the rest frame in which the
    singlet is prepared; None means the static observer at O.
    """
    if not same_event(seg1.start, seg2.start, tol=1.0e-9):
        raise UsageError("legs do not share their decay event")
    st = seg1.spacetime
    if seg2.spacetime is not st:
        raise UsageError("legs live in different spacetimes")

    reference = boosted_tetrad(st, seg1.start, decay_velocity)
    det1 = gauge_tetrad(st, seg1.end, "static")
    det2 = gauge_tetrad(st, seg2.end, "static")

    w1 = rest_frame_map(seg1, gauge, reference, det1)
    w2 = rest_frame_map(seg2, gauge, reference, det2)
    r1 = rest_frame_rotation(seg1, reference, det1)
    r2 = rest_frame_rotation(seg2, reference, det2)

    psi = pair_state(w1, w2)
    state = TwoQubitState("pure", psi, (det1, det2))
    return PairResult(seg1, seg2, reference, det1, det2, w1, w2, r1, r2, state)


def matched_axis(result: PairResult, a: np.ndarray) -> np.ndarray:
    """Detector-2 axis anticorrelated with detector-1 axis a (state route)."""
    return matched_direction(result.state, np.asarray(a, dtype=float))


def matched_axis_vector_route(result: PairResult, a: np.ndarray) -> np.ndarray:
    """The same matched axis from the 4x4 transports only (oracle route)."""
    return result.relative_rotation @ np.asarray(a, dtype=float)


def spin_relative_rotation(result: PairResult) -> np.ndarray:
    """R(W2 W1^-1) from the spin route, for route-against-route checks."""
    return rotation_matrix_from_su2(result.spin2 @ result.spin1.conj().T)


def double_cover_defect(seg: GeodesicSegment, gauge: str = "static") -> float:
    """max |vector_action(U) - frame propagator| along one segment.

    The spin-1/2 transport pushed through the vector action must reproduce
    the 4x4 frame-component transport; this is the routes' shared oracle.
    """
    from .lorentz import vector_action

    u = spinor_propagator(seg, gauge)
    lam = frame_propagator(seg, gauge)
    return float(np.max(np.abs(vector_action(u) - lam)))


def integrate_pair(
    st: Spacetime,
    decay: Event,
    u1: np.ndarray,
    u2: np.ndarray,
    tau1: float,
    tau2: float,
    **kwargs,
) -> PairResult:
    """Convenience: integrate both legs from the decay event and pair them."""
    from .geodesic import integrate_geodesic

    seg1 = integrate_geodesic(st, decay, u1, tau1)
    seg2 = integrate_geodesic(st, decay, u2, tau2)
    return pair_transport(seg1, seg2, **kwargs)
