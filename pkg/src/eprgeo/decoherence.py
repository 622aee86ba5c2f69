"""Finite path bundles around the geodesics and the correlation they leave.

Each particle's propagation is approximated by a bundle of polygonal paths
near its geodesic leg: transverse Brownian bridges in the static-frame
spatial legs, pinned to the exact endpoints, with a sin(pi tau/L) width
envelope so the per-knot standard deviation is sigma * sin(pi tau/L).

Per path, the spin effect is the rest-frame rotation of its polygon
transport; the amplitude weight is the relative discretized action phase
exp(-(i/4)(S_path - S_base)).  The two-sided average over all n^2 path
pairs factorizes into one averaged 2x2 operator per particle (coherent
mode) or one averaged conjugation per particle (incoherent mode), so the
all-pairs result is computed exactly in O(n).

The reference state for fidelity is the sigma=0 transport over the same
decimated knots, which makes the sigma -> 0 limit exact by construction
rather than holding only up to discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError, UsageError
from .frames import frame_field, inverse_frame
from .geodesic import GeodesicSegment
from .lorentz import su2_polar
from .pipeline import boosted_tetrad, rest_conjugation_factors
from .spacetime import Spacetime, same_event
from .spin import SINGLET, TwoQubitState, correlation, fidelity, pair_state
from .transport import Tetrad, gauge_tetrad, polygon_spinor_transport

MAX_BUNDLE_KNOTS = 160
RESAMPLE_ATTEMPTS = 100

# paths per transport chunk; keeps the batched christoffel arrays modest
_CHUNK = 256

_ID2 = np.eye(2, dtype=complex)


@dataclass
class PathBundle:
    """Perturbed discrete paths around one geodesic leg, endpoints pinned."""

    base: GeodesicSegment
    taus: np.ndarray
    paths: np.ndarray
    sigma: float
    seed: int
    mode: str = "coherent"
    meta: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def base_knots(self) -> np.ndarray:
        return self.meta["base_knots"]


def _decimate(n: int, cap: int = MAX_BUNDLE_KNOTS) -> np.ndarray:
    if n <= cap:
        return np.arange(n)
    return np.unique(np.round(np.linspace(0, n - 1, cap)).astype(int))


def sample_bundle(
    seg: GeodesicSegment,
    sigma: float,
    n_paths: int,
    seed: int,
    mode: str = "coherent",
) -> PathBundle:
    """Draw a bundle of Brownian-bridge perturbed paths around a geodesic.

    Deterministic given the seed.  Paths that wander out of the chart are
    redrawn individually; a path still failing after RESAMPLE_ATTEMPTS draws
    raises DomainError.
    """
    if sigma < 0.0:
        raise UsageError("bundle width sigma must be nonnegative")
    if n_paths < 1:
        raise UsageError("n_paths must be at least 1")
    if mode not in ("coherent", "incoherent"):
        raise UsageError(f"unknown averaging mode {mode!r}")
    if seg.zero_length:
        raise UsageError("cannot build a path bundle on a zero-length segment")

    st = seg.spacetime
    idx = _decimate(seg.n_samples)
    taus = seg.tau[idx] - seg.tau[0]
    knots = seg.events[idx]
    length = taus[-1]
    meta = {"base_knots": knots.copy(), "knot_indices": idx}

    if sigma == 0.0:
        paths = np.broadcast_to(knots, (n_paths,) + knots.shape).copy()
        return PathBundle(seg, taus, paths, sigma, seed, mode, meta)

    legs = frame_field(st, knots)[..., 1:]  # static spatial legs, (K+1, 4, 3)
    interior = slice(1, -1)
    t_int = taus[interior]
    envelope = np.sin(np.pi * t_int / length)
    bridge_var = t_int * (length - t_int) / length
    dtau = np.diff(taus)

    rng = np.random.default_rng(seed)

    def draw(count: int) -> np.ndarray:
        """count perturbed paths, shape (count, K+1, 4)."""
        dw = rng.standard_normal((count, len(dtau), 3)) * np.sqrt(dtau)[:, None]
        w = np.cumsum(dw, axis=1)
        bridge = w[:, :-1, :] - (t_int / length)[None, :, None] * w[:, -1:, :]
        unit = bridge / np.sqrt(bridge_var)[None, :, None]
        delta = sigma * envelope[None, :, None] * unit
        out = np.broadcast_to(knots, (count,) + knots.shape).copy()
        out[:, interior, :] += np.einsum("kaj,nkj->nka", legs[interior], delta)
        return out

    paths = draw(n_paths)
    ok = np.all(st.in_chart(paths), axis=1)
    attempts = 1
    while not np.all(ok):
        if attempts >= RESAMPLE_ATTEMPTS:
            raise DomainError(
                f"{int(np.sum(~ok))} bundle paths still leave the chart "
                f"after {RESAMPLE_ATTEMPTS} attempts; reduce sigma"
            )
        bad = np.flatnonzero(~ok)
        paths[bad] = draw(len(bad))
        ok[bad] = np.all(st.in_chart(paths[bad]), axis=1)
        attempts += 1
    meta["resample_rounds"] = attempts
    return PathBundle(seg, taus, paths, sigma, seed, mode, meta)


def path_action(st: Spacetime, xs: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Discretized kinetic action sum_k <dx, dx>/dtau along polygon paths."""
    xs = np.asarray(xs, dtype=float)
    dx = xs[..., 1:, :] - xs[..., :-1, :]
    mid = 0.5 * (xs[..., 1:, :] + xs[..., :-1, :])
    g = st.metric(mid)
    num = np.einsum("...ka,...kab,...kb->...k", dx, g, dx)
    return np.sum(num / np.diff(taus), axis=-1)


def path_action_phase(
    st: Spacetime, xs: np.ndarray, taus: np.ndarray, reference: float | np.ndarray = 0.0
) -> np.ndarray:
    """Unit amplitude phase exp(-(i/4)(S - S_reference)) of polygon paths."""
    s = path_action(st, xs, taus)
    return np.exp(-0.25j * (s - reference))


def _bundle_ingredients(
    bundle: PathBundle, gauge: str, reference: Tetrad
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(per-path SU(2) maps, per-path complex weights, sigma=0 map)."""
    st = bundle.base.spacetime
    det = gauge_tetrad(st, bundle.base.end, "static")
    pre, post = rest_conjugation_factors(
        st, reference, det, bundle.base.tangents[0], bundle.base.tangents[-1], gauge
    )

    n = bundle.n_paths
    maps = np.empty((n, 2, 2), dtype=complex)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        u = polygon_spinor_transport(st, bundle.paths[lo:hi], gauge)
        maps[lo:hi] = su2_polar(post @ u @ pre)[0]

    base_u = polygon_spinor_transport(st, bundle.base_knots, gauge)
    base_map = su2_polar(post @ base_u @ pre)[0]

    if bundle.mode == "coherent":
        s_base = path_action(st, bundle.base_knots, bundle.taus)
        weights = path_action_phase(st, bundle.paths, bundle.taus, s_base) / n
    else:
        weights = np.full(n, 1.0 / n, dtype=complex)
    return maps, weights, base_map


def _kron_left(w: np.ndarray) -> np.ndarray:
    """kron(W, I2) for a batch of 2x2 matrices."""
    return np.einsum("...ij,kl->...ikjl", w, _ID2).reshape(w.shape[:-2] + (4, 4))


def _kron_right(w: np.ndarray) -> np.ndarray:
    """kron(I2, W) for a batch of 2x2 matrices."""
    return np.einsum("ij,...kl->...ikjl", _ID2, w).reshape(w.shape[:-2] + (4, 4))


@dataclass
class ChannelAverage:
    """The spin density matrix left after averaging over both path bundles."""

    rho: np.ndarray
    mode: str
    weights: tuple[np.ndarray, np.ndarray]
    reference_state: np.ndarray
    detector1: Tetrad
    detector2: Tetrad
    transports: Optional[tuple[np.ndarray, np.ndarray]] = None

    @property
    def state(self) -> TwoQubitState:
        return TwoQubitState("mixed", self.rho, (self.detector1, self.detector2))

    @property
    def fidelity(self) -> float:
        return fidelity(self.reference_state, self.rho)


def _combine(
    maps1: np.ndarray,
    w1: np.ndarray,
    maps2: np.ndarray,
    w2: np.ndarray,
    mode: str,
) -> np.ndarray:
    """Exact all-pairs average, factorized per particle.  Unit trace."""
    if mode == "coherent":
        a1 = np.einsum("p,pij->ij", w1, maps1)
        a2 = np.einsum("p,pij->ij", w2, maps2)
        v = np.kron(a1, a2) @ SINGLET
        nrm = float(np.linalg.norm(v))
        if nrm < 1.0e-12:
            raise ConfigurationError("coherent bundle average destroyed the state entirely")
        v = v / nrm
        return np.outer(v, v.conj())
    p0 = np.outer(SINGLET, SINGLET.conj())
    x = _kron_right(maps2)
    t = np.einsum("p,pij,jk,plk->il", np.abs(w2), x, p0, x.conj())
    y = _kron_left(maps1)
    rho = np.einsum("p,pij,jk,plk->il", np.abs(w1), y, t, y.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def averaged_state(
    b1: PathBundle,
    b2: PathBundle,
    gauge: str = "static",
    *,
    decay_velocity: np.ndarray | None = None,
    keep_transports: bool = False,
) -> ChannelAverage:
    """Average the transported singlet over both bundles' path pairs.

    Coherent mode superposes amplitudes with their action phases (the
    average stays pure); incoherent mode mixes the conjugated density
    matrices uniformly.  Either way the result is a valid density matrix
    with frame tags at the two base endpoints.
    """
    base1, base2 = b1.base, b2.base
    if base1.spacetime is not base2.spacetime:
        raise UsageError("bundles live in different spacetimes")
    if not same_event(base1.start, base2.start, tol=1.0e-9):
        raise UsageError("bundles do not share their decay event")
    if b1.mode != b2.mode:
        raise UsageError("bundles have different averaging modes")

    st = base1.spacetime
    reference = boosted_tetrad(st, base1.start, decay_velocity)
    maps1, w1, base_map1 = _bundle_ingredients(b1, gauge, reference)
    maps2, w2, base_map2 = _bundle_ingredients(b2, gauge, reference)

    rho = _combine(maps1, w1, maps2, w2, b1.mode)
    return ChannelAverage(
        rho,
        b1.mode,
        (w1, w2),
        pair_state(base_map1, base_map2),
        gauge_tetrad(st, base1.end, "static"),
        gauge_tetrad(st, base2.end, "static"),
        (maps1, maps2) if keep_transports else None,
    )


def degraded_correlation(avg: ChannelAverage, a, b) -> float:
    """E(a, b) = tr(rho (a.sigma x b.sigma)) for the averaged state."""
    return correlation(avg.state, a, b)


def fidelity_with_error(
    b1: PathBundle,
    b2: PathBundle,
    gauge: str = "static",
    *,
    decay_velocity: np.ndarray | None = None,
    n_blocks: int = 10,
) -> tuple[float, float]:
    """Singlet fidelity of the bundle average and its Monte-Carlo error.

    The error bar is the standard error over n_blocks disjoint path blocks,
    each averaged independently with the same rule.
    """
    st = b1.base.spacetime
    reference = boosted_tetrad(st, b1.base.start, decay_velocity)
    maps1, w1, base_map1 = _bundle_ingredients(b1, gauge, reference)
    maps2, w2, base_map2 = _bundle_ingredients(b2, gauge, reference)
    psi0 = pair_state(base_map1, base_map2)

    rho = _combine(maps1, w1, maps2, w2, b1.mode)
    f_all = fidelity(psi0, rho)

    n = min(b1.n_paths, b2.n_paths)
    n_blocks = min(n_blocks, n)
    bounds = np.linspace(0, n, n_blocks + 1).astype(int)
    fs = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi == lo:
            continue
        # renormalize the block weights so each block is a complete average
        scale = n / (hi - lo) if b1.mode == "coherent" else 1.0
        rk = _combine(
            maps1[lo:hi],
            w1[lo:hi] * scale,
            maps2[lo:hi],
            w2[lo:hi] * scale,
            b1.mode,
        )
        fs.append(fidelity(psi0, rk))
    fs = np.asarray(fs)
    se = float(np.std(fs, ddof=1) / np.sqrt(len(fs))) if len(fs) > 1 else 0.0
    return f_all, se
