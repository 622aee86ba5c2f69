"""Orthonormal frame fields and the frame-index connection.

A frame at an event is a matrix N whose columns are the frame legs in
coordinate components, with N^T g N = eta and the timelike leg in column
zero.  The "static" gauge is the signature Gram-Schmidt frame built from the
coordinate basis in order (t, then the spatial axes), which makes N
upper-triangular with positive diagonal and hence unique.  The
"boosted-static" gauge multiplies it on the right by a constant boost; it
exists only so gauge independence can be tested, not because it is useful.

Derivatives of N are computed in closed form, no differencing anywhere.
Metric compatibility gives d_l g = Gamma_l^T g + g Gamma_l exactly, and
differentiating N^T g N = eta shows C_l = N^{-1} d_l N is the unique
upper-triangular solution of eta C + (eta C)^T = -N^T (d_l g) N.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, UsageError
from .lorentz import ETA
from .spacetime import Spacetime

GAUGES = ("static", "boosted-static")

# rapidity of the constant frame boost used by the boosted-static gauge
BOOST_RAPIDITY = 0.3

_ETA_DIAG = np.array([-1.0, 1.0, 1.0, 1.0])


def gauge_boost() -> np.ndarray:
    """The constant Lorentz boost distinguishing the boosted-static gauge.

    Rapidity BOOST_RAPIDITY along frame axis 3.
    """
    ch, sh = np.cosh(BOOST_RAPIDITY), np.sinh(BOOST_RAPIDITY)
    L = np.eye(4)
    L[0, 0] = L[3, 3] = ch
    L[0, 3] = L[3, 0] = sh
    return L


def _check_gauge(gauge: str) -> None:
    if gauge not in GAUGES:
        raise UsageError(f"unknown gauge {gauge!r}; expected one of {GAUGES}")


def gram_schmidt_frame(g: np.ndarray) -> np.ndarray:
    """Signature Gram-Schmidt frame of the coordinate basis.  Batched.

    Returns N with N^T g N = eta, column 0 timelike.  Raises DomainError if
    the basis cannot be orthonormalized with that signature (wrong metric
    signature at the point, e.g. inside a horizon).
    """
    g = np.asarray(g, dtype=float)
    batch = g.shape[:-2]
    n = np.zeros(batch + (4, 4))
    for a in range(4):
        v = np.zeros(batch + (4,))
        v[..., a] = 1.0
        for b in range(a):
            leg = n[..., :, b]
            coeff = _ETA_DIAG[b] * np.einsum("...m,...mn,...n->...", leg, g, v)
            v = v - coeff[..., None] * leg
        nrm2 = _ETA_DIAG[a] * np.einsum("...m,...mn,...n->...", v, g, v)
        if np.any(nrm2 <= 0.0) or not np.all(np.isfinite(nrm2)):
            raise DomainError("metric signature is not (-,+,+,+) at a requested event")
        n[..., :, a] = v / np.sqrt(nrm2)[..., None]
    return n


def frame_field(st: Spacetime, coords: np.ndarray, gauge: str = "static") -> np.ndarray:
    """Frame matrix N at coords (batched), in the requested gauge."""
    _check_gauge(gauge)
    n = gram_schmidt_frame(st.metric(coords))
    if gauge == "boosted-static":
        n = n @ gauge_boost()
    return n


def inverse_frame(n: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Exact inverse of any frame with N^T g N = eta:  N^{-1} = eta N^T g."""
    return ETA @ np.swapaxes(n, -1, -2) @ g


def metric_derivative(st: Spacetime, coords: np.ndarray) -> np.ndarray:
    """d_l g_{mn} from metric compatibility, dg[..., l, m, n].  Batched."""
    g = st.metric(coords)
    gam = st.christoffel(coords)
    return np.einsum("...slm,...sn->...lmn", gam, g) + np.einsum(
        "...ms,...sln->...lmn", g, gam
    )


def frame_with_derivative(st: Spacetime, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Static-gauge frame and its coordinate derivatives, dn[..., l, m, a]."""
    g = st.metric(coords)
    n = gram_schmidt_frame(g)
    dg = metric_derivative(st, coords)
    s = np.einsum("...ma,...lmn,...nb->...lab", n, dg, n)
    a = -np.triu(s, 1) - 0.5 * _diag_embed(np.einsum("...ii->...i", s))
    c = _ETA_DIAG[:, None] * a
    dn = np.einsum("...ma,...lab->...lmb", n, c)
    return n, dn


def _diag_embed(d: np.ndarray) -> np.ndarray:
    out = np.zeros(d.shape + (d.shape[-1],))
    idx = np.arange(d.shape[-1])
    out[..., idx, idx] = d
    return out


def spin_connection(st: Spacetime, coords: np.ndarray, gauge: str = "static") -> np.ndarray:
    """Frame-index connection M[..., l, a, b] with eta M_l antisymmetric.

    M_l = N^{-1}(d_l N + Gamma_l N); the boosted-static gauge conjugates the
    static result by the constant gauge boost.  A final antisymmetric
    projection of eta M removes floating-point residue so the so(1,3)
    structure holds exactly.
    """
    _check_gauge(gauge)
    g = st.metric(coords)
    gam = st.christoffel(coords)
    n, dn = frame_with_derivative(st, coords)
    ninv = inverse_frame(n, g)
    m = np.einsum("...am,...lmb->...lab", ninv, dn) + np.einsum(
        "...am,...mln,...nb->...lab", ninv, gam, n
    )
    if gauge == "boosted-static":
        L = gauge_boost()
        Linv = L.copy()
        Linv[0, 3] = Linv[3, 0] = -L[0, 3]
        m = Linv @ m @ L
    em = _ETA_DIAG[:, None] * m
    em = 0.5 * (em - np.swapaxes(em, -1, -2))
    return _ETA_DIAG[:, None] * em


def orthonormality_defect(g: np.ndarray, n: np.ndarray) -> float:
    """max |N^T g N - eta| over the batch; the frame-quality figure."""
    r = np.einsum("...ma,...mn,...nb->...ab", n, g, n) - ETA
    return float(np.max(np.abs(r)))
