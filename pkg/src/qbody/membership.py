"""Membership tests for the cube N, the classical polytope CL, and Q.

Five independent characterizations of ``Q`` are exposed through a single
entry point, :func:`member`:

* ``SEMIALG``    in-cube and (``g(c) ≥ 0`` or ``h(c) ≥ 0``),
* ``PUSHOUT``    the inverse coordinatewise sine map lands in CL,
* ``COMPLETION`` the 4x4 unit-diagonal matrix completion is feasible,
* ``TIMO``       single inequality ``g ≥ -2·sqrt(Π(1-c_ij²))`` in the cube,
* ``LANDAU``     ``sqrt((1-c11²)(1-c12²)) + sqrt((1-c21²)(1-c22²)) ≥
  |c11·c12 - c21·c22|`` in the cube.

All report a signed margin: the minimum slack over the oracle's active
constraints, positive inside.  Margins are constraint slacks in each
oracle's own units, not Euclidean distances, so different oracles may
report different magnitudes for the same point.  Within ``eps_boundary``
of the boundary the inside/outside bit is not meaningful and downstream
classification treats such points as boundary.

The square-root based oracles require the cube hypothesis; negative
radicands (only possible outside the cube) are clamped to zero and the
cube slack then drives the verdict.

``*_batch`` variants evaluate margins for ``(n, 4)`` arrays of points with
identical semantics; they exist because the Monte-Carlo measures and the
large consistency sweeps need throughput the scalar path cannot offer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOLERANCE,
    Correlation,
    InputOutsideCube,
    Tolerance,
    chsh_values,
)

__all__ = [
    "Oracle",
    "PushDirection",
    "MembershipVerdict",
    "pushout",
    "member_classical",
    "member",
    "margin_batch",
    "classical_margin_batch",
]


class Oracle(enum.Enum):
    SEMIALG = "semialg"
    PUSHOUT = "pushout"
    COMPLETION = "completion"
    TIMO = "timo"
    LANDAU = "landau"


class PushDirection(enum.Enum):
    FORWARD = "forward"     # t -> sin(pi t / 2)
    INVERSE = "inverse"     # t -> (2/pi) asin(t)


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test.

    ``margin`` is signed: positive inside, and its magnitude is the binding
    constraint's slack.  ``oracle`` is None for the classical-polytope test.
    """

    inside: bool
    margin: float
    oracle: Oracle | None


# ---------------------------------------------------------------------------
# Pushout
# ---------------------------------------------------------------------------

def pushout(c: Correlation, direction: PushDirection,
            tol: Tolerance = DEFAULT_TOLERANCE) -> Correlation:
    """Apply the sine pushout (or its inverse) coordinatewise.

    Entries must lie in the cube within ``tol.eps_boundary``; they are
    clamped to ``[-1, 1]`` before the transform, so a forward/inverse round
    trip is the identity to machine precision on cube points.
    """
    vals = c.as_tuple()
    for v in vals:
        if abs(v) > 1.0 + tol.eps_boundary:
            raise InputOutsideCube(f"coordinate {v!r} outside [-1, 1]")
    clamped = [min(1.0, max(-1.0, v)) for v in vals]
    if direction is PushDirection.FORWARD:
        out = [math.sin(0.5 * math.pi * v) for v in clamped]
    elif direction is PushDirection.INVERSE:
        out = [(2.0 / math.pi) * math.asin(v) for v in clamped]
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown direction {direction!r}")
    return Correlation(*out)


# ---------------------------------------------------------------------------
# Classical polytope
# ---------------------------------------------------------------------------

def member_classical(c: Correlation) -> MembershipVerdict:
    """Test membership in the classical cross polytope CL.

    The 16 face constraints are the 8 cube bounds and the 8 odd-signed
    combinations; the margin is the minimum slack over all of them.
    """
    cube_slack = 1.0 - max(abs(v) for v in c.as_tuple())
    chsh_slack = 1.0 - max(chsh_values(c))
    margin = min(cube_slack, chsh_slack)
    return MembershipVerdict(inside=margin >= 0.0, margin=margin, oracle=None)


# ---------------------------------------------------------------------------
# Q oracles (scalar)
# ---------------------------------------------------------------------------

def _semialg_margin(c: Correlation) -> float:
    from .core import _g_scalar, _h_product_scalar
    t = c.as_tuple()
    cube_slack = 1.0 - max(abs(v) for v in t)
    poly_slack = max(_g_scalar(*t), _h_product_scalar(*t))
    return min(cube_slack, poly_slack)


def _pushout_margin(c: Correlation) -> float:
    # inverse transform on clamped coordinates; outside the cube the cube
    # slack is negative and both terms contribute to the (negative) margin
    vals = c.as_tuple()
    cube_slack = 1.0 - max(abs(v) for v in vals)
    inv = Correlation(*((2.0 / math.pi) * math.asin(min(1.0, max(-1.0, v)))
                        for v in vals))
    return min(cube_slack, member_classical(inv).margin)


def _completion_margin(c: Correlation) -> float:
    # Positive-semidefinite completability reduces to the intersection of
    # the nonnegativity intervals of two downward parabolas in the free
    # entry u, plus the four 2x2 diagonal minors (the cube, quadratically).
    c11, c12, c21, c22 = c.as_tuple()
    quad_slack = min(1.0 - c11 * c11, 1.0 - c12 * c12,
                     1.0 - c21 * c21, 1.0 - c22 * c22)
    b1 = (1.0 - c11 * c11) * (1.0 - c21 * c21)
    b2 = (1.0 - c12 * c12) * (1.0 - c22 * c22)
    s1 = math.sqrt(max(b1, 0.0))
    s2 = math.sqrt(max(b2, 0.0))
    a1 = c11 * c21
    a2 = c12 * c22
    width = min(a1 + s1, a2 + s2) - max(a1 - s1, a2 - s2)
    return min(quad_slack, width)


def _timo_margin(c: Correlation) -> float:
    from .core import _g_scalar
    t = c.as_tuple()
    cube_slack = 1.0 - max(abs(v) for v in t)
    prod = 1.0
    for v in t:
        prod *= 1.0 - v * v
    root = math.sqrt(max(prod, 0.0))
    return min(cube_slack, _g_scalar(*t) + 2.0 * root)


def _landau_margin(c: Correlation) -> float:
    c11, c12, c21, c22 = c.as_tuple()
    cube_slack = 1.0 - max(abs(c11), abs(c12), abs(c21), abs(c22))
    r1 = max((1.0 - c11 * c11) * (1.0 - c12 * c12), 0.0)
    r2 = max((1.0 - c21 * c21) * (1.0 - c22 * c22), 0.0)
    slack = math.sqrt(r1) + math.sqrt(r2) - abs(c11 * c12 - c21 * c22)
    return min(cube_slack, slack)


def member(c: Correlation, oracle: Oracle = Oracle.SEMIALG,
           tol: Tolerance = DEFAULT_TOLERANCE) -> MembershipVerdict:
    """Decide ``c ∈ Q`` by the named characterization.

    All oracles agree exactly as sets; floating-point verdicts may differ
    within ``tol.eps_boundary`` of the boundary.

    For ``COMPLETION`` the verdict is delegated to the matrix-completion
    solver in :mod:`qbody.boundary` and must match the local interval
    margin's sign away from the boundary band.
    """
    if oracle is Oracle.SEMIALG:
        margin = _semialg_margin(c)
    elif oracle is Oracle.PUSHOUT:
        margin = _pushout_margin(c)
    elif oracle is Oracle.COMPLETION:
        margin = _completion_margin(c)
        from . import boundary
        feasible = boundary.solve_completion(c, tol).feasible
        if feasible != (margin >= 0.0) and abs(margin) > tol.eps_boundary:
            from .core import ConsistencyError
            raise ConsistencyError(
                f"completion solver verdict {feasible} contradicts interval "
                f"margin {margin!r}")
        return MembershipVerdict(inside=feasible, margin=margin, oracle=oracle)
    elif oracle is Oracle.TIMO:
        margin = _timo_margin(c)
    elif oracle is Oracle.LANDAU:
        margin = _landau_margin(c)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown oracle {oracle!r}")
    return MembershipVerdict(inside=margin >= 0.0, margin=margin, oracle=oracle)


# ---------------------------------------------------------------------------
# Batch margins
# ---------------------------------------------------------------------------

def _as_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError("expected an (n, 4) array of points")
    return pts


def _g_batch(p: np.ndarray) -> np.ndarray:
    return 2.0 - (p * p).sum(axis=1) + 2.0 * p.prod(axis=1)


def _h_batch(p: np.ndarray) -> np.ndarray:
    a, b, c, d = p[:, 0], p[:, 1], p[:, 2], p[:, 3]
    sextic = 4.0 * (a * d - b * c) * (a * c - b * d) * (a * b - c * d)
    quartic = (a + b - c - d) * (a - b + c - d) * (a - b - c + d) * (a + b + c + d)
    return sextic - quartic


def classical_margin_batch(points: np.ndarray) -> np.ndarray:
    """Vectorized CL margin (cube slack and odd-signed combination slack)."""
    from .core import TWO_H
    p = _as_points(points)
    cube = 1.0 - np.abs(p).max(axis=1)
    flipped = p.copy()
    flipped[:, 3] = -flipped[:, 3]
    odd = 0.5 * np.abs(flipped @ TWO_H.T).max(axis=1)
    return np.minimum(cube, 1.0 - odd)


def margin_batch(points: np.ndarray, oracle: Oracle,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Vectorized signed margins; semantics identical to :func:`member`.

    The scalar and batch paths are cross-checked in the test suite.
    """
    p = _as_points(points)
    cube = 1.0 - np.abs(p).max(axis=1)

    if oracle is Oracle.SEMIALG:
        return np.minimum(cube, np.maximum(_g_batch(p), _h_batch(p)))

    if oracle is Oracle.PUSHOUT:
        clamped = np.clip(p, -1.0, 1.0)
        inv = (2.0 / math.pi) * np.arcsin(clamped)
        return np.minimum(cube, classical_margin_batch(inv))

    if oracle is Oracle.COMPLETION:
        sq = p * p
        quad = (1.0 - sq).min(axis=1)
        b1 = (1.0 - sq[:, 0]) * (1.0 - sq[:, 2])
        b2 = (1.0 - sq[:, 1]) * (1.0 - sq[:, 3])
        s1 = np.sqrt(np.maximum(b1, 0.0))
        s2 = np.sqrt(np.maximum(b2, 0.0))
        a1 = p[:, 0] * p[:, 2]
        a2 = p[:, 1] * p[:, 3]
        width = np.minimum(a1 + s1, a2 + s2) - np.maximum(a1 - s1, a2 - s2)
        return np.minimum(quad, width)

    if oracle is Oracle.TIMO:
        prod = (1.0 - p * p).prod(axis=1)
        return np.minimum(cube, _g_batch(p) + 2.0 * np.sqrt(np.maximum(prod, 0.0)))

    if oracle is Oracle.LANDAU:
        sq = p * p
        r1 = np.maximum((1.0 - sq[:, 0]) * (1.0 - sq[:, 1]), 0.0)
        r2 = np.maximum((1.0 - sq[:, 2]) * (1.0 - sq[:, 3]), 0.0)
        slack = np.sqrt(r1) + np.sqrt(r2) - np.abs(
            p[:, 0] * p[:, 1] - p[:, 2] * p[:, 3])
        return np.minimum(cube, slack)

    raise ValueError(f"unknown oracle {oracle!r}")  # pragma: no cover
