"""Boundary strata, matrix completion, and the angle parametrization.

The unit-diagonal symmetric completion of a correlation point ``c`` is

        [ 1    u    c11  c12 ]
    C = [ u    1    c21  c22 ]
        [ c11  c21  1    v   ]
        [ c12  c22  v    1   ]

``c ∈ Q`` iff some real ``(u, v)`` makes ``C`` positive semidefinite.
Eliminating ``v`` leaves two concave parabolas in ``u``,

    m123(u) = b1 - (u - a1)²,   a1 = c11·c21,  b1 = (1-c11²)(1-c21²)
    m124(u) = b2 - (u - a2)²,   a2 = c12·c22,  b2 = (1-c12²)(1-c22²)

whose nonnegativity intervals must intersect; the intersection is nonempty
iff ``g(c) ≥ 0`` or ``h(c) ≥ 0``, which ties the solver to the
semialgebraic description.  Each interval is automatically contained in
``[-1, 1]``.  Once ``u`` is fixed, the determinant of ``C`` is maximized at

    v* = (c11·c12 + c21·c22 - (c11·c22 + c12·c21)·u) / (1 - u²)

and ``max_v det C = m123·m124 / (1 - u²)``.  The completion is unique
exactly on the boundary of ``Q``; there the rank of ``C`` identifies the
stratum:

    stratum   Q1  Q2  Q3  Q4  Q5        (Q6 = interior)
    rank C     1   2   2   2   3        (Q6 admits rank 4)

Extreme strata are parametrized by angle tuples ``(alpha, beta, gamma,
delta)`` with sum ≡ 0 (mod 2π) via ``c = (cos alpha, ..., cos delta)``.
With ``Delta = sin(alpha)·sin(beta)·sin(gamma)·sin(delta)``:

* ``Delta < 0``   exposed extreme points (Q4), where ``g(c) = 2·Delta``,
* ``Delta = 0``   lower strata by the count of angles that are multiples
  of π (four: Q1 vertices, two: Q2 edges, one: Q3 non-exposed extreme
  points),
* ``Delta > 0``   interior points.

A Q4 point is exposed by the unique functional

    f = (1/K) · (1/sin alpha, ..., 1/sin delta),
    K = cot alpha + cot beta + cot gamma + cot delta,

which satisfies ``f·c = 1`` and ``f·c' < 1`` elsewhere on ``Q``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOLERANCE,
    AmbiguousClassification,
    AngleSumViolation,
    ConsistencyError,
    Correlation,
    DegenerateAngles,
    Functional,
    NotExtreme,
    NotPSD,
    Tolerance,
    _g_scalar,
)
from .membership import Oracle, member

__all__ = [
    "AngleTuple",
    "Completion",
    "CompletionResult",
    "Stratum",
    "GramSystem",
    "RANK_BY_STRATUM",
    "ExtremePoint",
    "solve_completion",
    "classify",
    "extreme_from_angles",
    "angles_from_point",
    "exposing_functional",
    "gram_vectors",
]

TWO_PI = 2.0 * math.pi

# An interval narrower than this counts as a single point when deciding
# completion uniqueness (exact boundary points give widths at roundoff
# scale; interior points at macroscopic depth give widths of that order).
_UNIQUE_WIDTH = 1e-8


def _wrap_angle(x: float, eps: float) -> float:
    """Reduce to the representative in (-pi, pi], identifying -pi with pi.

    Values already in range pass through unchanged so that canonical forms
    are exact fixed points.
    """
    if -math.pi < x <= math.pi:
        y = x
    else:
        y = math.fmod(x + math.pi, TWO_PI)
        if y <= 0.0:
            y += TWO_PI
        y -= math.pi
    if y < -math.pi + eps:
        y += TWO_PI
    return y


def _sum_residual(total: float) -> float:
    """Distance from the nearest multiple of 2π."""
    return abs(math.remainder(total, TWO_PI))


@dataclass(frozen=True)
class AngleTuple:
    """Angles ``(alpha, beta, gamma, delta)`` with sum ≡ 0 mod 2π.

    Construction validates the sum constraint at the default angle
    tolerance.  :meth:`canonical` returns the representative with every
    angle in ``(-pi, pi]`` and the overall-negation ambiguity of the
    cosine parametrization resolved (``alpha ∈ [0, pi]``).
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        res = _sum_residual(self.alpha + self.beta + self.gamma + self.delta)
        if res > DEFAULT_TOLERANCE.eps_angle:
            raise AngleSumViolation(
                f"angle sum residual {res:.3e} exceeds tolerance")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def __iter__(self):
        return iter(self.as_tuple())

    def sines(self) -> tuple[float, float, float, float]:
        return tuple(math.sin(t) for t in self.as_tuple())

    def delta_product(self) -> float:
        """The sign marker ``Delta``, the product of the four sines."""
        s = self.sines()
        return s[0] * s[1] * s[2] * s[3]

    def cosines(self) -> Correlation:
        return Correlation(*(math.cos(t) for t in self.as_tuple()))

    def canonical(self, eps: float | None = None) -> "AngleTuple":
        eps = DEFAULT_TOLERANCE.eps_angle if eps is None else eps
        vals = [_wrap_angle(t, eps) for t in self.as_tuple()]
        flip = False
        if vals[0] < -eps:
            flip = True
        elif abs(math.sin(vals[0])) <= eps:
            # alpha is 0 or pi; let the first rotating angle decide the sign
            for t in vals[1:]:
                if abs(math.sin(t)) > eps:
                    flip = t < 0.0
                    break
        if flip:
            vals = [_wrap_angle(-t, eps) for t in vals]
        return AngleTuple(*vals)


class Stratum(enum.Enum):
    Q1 = "Q1"          # 8 classical exposed vertices
    Q2 = "Q2"          # 24 exposed open edges
    Q3 = "Q3"          # 32 surfaces of non-exposed extreme points
    Q4 = "Q4"          # 8 threefolds of exposed extreme points
    Q5 = "Q5"          # 8 open facet elliptopes
    Q6 = "Q6"          # interior
    EXTERIOR = "EXTERIOR"


RANK_BY_STRATUM = {
    Stratum.Q1: 1,
    Stratum.Q2: 2,
    Stratum.Q3: 2,
    Stratum.Q4: 2,
    Stratum.Q5: 3,
}


@dataclass(frozen=True)
class Completion:
    """A candidate completion ``(u, v)`` of the 4x4 certificate matrix."""

    c: Correlation
    u: float
    v: float

    def matrix(self) -> np.ndarray:
        c11, c12, c21, c22 = self.c.as_tuple()
        return np.array([
            [1.0, self.u, c11, c12],
            [self.u, 1.0, c21, c22],
            [c11, c21, 1.0, self.v],
            [c12, c22, self.v, 1.0],
        ])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix())[0])

    def is_psd(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        norm = max(1.0, float(np.abs(self.matrix()).max()))
        return self.min_eigenvalue() >= -tol.eps_psd * norm


@dataclass(frozen=True)
class CompletionResult:
    feasible: bool
    witness: Completion
    unique: bool
    rank: int
    u_interval: tuple[float, float]
    v_interval: tuple[float, float]


def _parabola_interval(a1: float, b1: float, a2: float, b2: float
                       ) -> tuple[float, float]:
    s1 = math.sqrt(max(b1, 0.0))
    s2 = math.sqrt(max(b2, 0.0))
    return max(a1 - s1, a2 - s2), min(a1 + s1, a2 + s2)


def solve_completion(c: Correlation,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> CompletionResult:
    """Solve the unit-diagonal completion problem for ``c``.

    Feasibility follows the two-parabola criterion; ``feasible=False`` is a
    result, not an error.  The reported witness takes ``u`` at the midpoint
    of the feasible interval and ``v`` from the closed-form determinant
    maximizer (falling back to the ``v``-interval midpoint when ``|u| = 1``
    makes the formula singular).  ``unique`` records whether both intervals
    degenerate to points, which happens exactly on the boundary of ``Q``.
    ``rank`` is the numerical rank of the witness at the relative
    eigenvalue threshold ``tol.eps_psd``.
    """
    c11, c12, c21, c22 = c.as_tuple()
    eps = tol.eps_boundary

    b_u1 = (1.0 - c11 * c11) * (1.0 - c21 * c21)
    b_u2 = (1.0 - c12 * c12) * (1.0 - c22 * c22)
    a_u1, a_u2 = c11 * c21, c12 * c22
    lu, ru = _parabola_interval(a_u1, b_u1, a_u2, b_u2)

    b_v1 = (1.0 - c11 * c11) * (1.0 - c12 * c12)
    b_v2 = (1.0 - c21 * c21) * (1.0 - c22 * c22)
    a_v1, a_v2 = c11 * c12, c21 * c22
    lv, rv = _parabola_interval(a_v1, b_v1, a_v2, b_v2)

    # 2x2 principal minors 1 - c_ij^2 are the in-cube part of feasibility
    quad_slack = min(1.0 - c11 * c11, 1.0 - c12 * c12,
                     1.0 - c21 * c21, 1.0 - c22 * c22)
    feasible = (quad_slack >= -eps and b_u1 >= -eps and b_u2 >= -eps
                and ru - lu >= -eps)

    u = min(1.0, max(-1.0, 0.5 * (lu + ru)))
    if 1.0 - u * u > 1e-12:
        v = (c11 * c12 + c21 * c22 - (c11 * c22 + c12 * c21) * u) \
            / (1.0 - u * u)
        v = min(max(v, min(lv, rv)), max(lv, rv))
    else:
        v = min(1.0, max(-1.0, 0.5 * (lv + rv)))
    witness = Completion(c=c, u=u, v=v)

    unique = feasible and (ru - lu) <= _UNIQUE_WIDTH \
        and (rv - lv) <= _UNIQUE_WIDTH

    eigs = np.linalg.eigvalsh(witness.matrix())
    norm = max(1.0, float(np.abs(witness.matrix()).max()))
    rank = int((eigs > tol.eps_psd * norm).sum())

    return CompletionResult(feasible=feasible, witness=witness, unique=unique,
                            rank=rank, u_interval=(lu, ru),
                            v_interval=(lv, rv))


# ---------------------------------------------------------------------------
# Stratum classification
# ---------------------------------------------------------------------------

def _facet_cubic(values: tuple[float, float, float, float],
                 sat_index: int) -> float:
    """Residual elliptope cubic on the cube facet saturated at sat_index.

    For a facet ``c_ij = s`` the remaining coordinates ``(x, y, z)`` must
    satisfy ``1 - x² - y² - z² + 2·s·x·y·z ≥ 0``; the orientation sign is
    the sign of the saturated coordinate.
    """
    s = 1.0 if values[sat_index] >= 0.0 else -1.0
    others = [values[j] for j in range(4) if j != sat_index]
    x, y, z = others
    return 1.0 - (x * x + y * y + z * z) + 2.0 * s * x * y * z


def classify(c: Correlation, tol: Tolerance = DEFAULT_TOLERANCE,
             check_rank: bool = True) -> Stratum:
    """Assign ``c`` to a stratum Q1..Q6 or EXTERIOR.

    Boundary strata are only assigned inside the ``eps_boundary`` margin
    band (or when a cube face is active).  Cube-face count takes precedence
    over the sextic: four saturated coordinates give Q1, two give Q2, one
    gives Q3 (facet cubic ≈ 0) or Q5 (facet cubic > 0), none gives Q4.
    When ``check_rank`` is set, boundary verdicts are cross-checked against
    the completion rank table and a mismatch raises
    :class:`AmbiguousClassification`.
    """
    eps = tol.eps_boundary
    verdict = member(c, Oracle.SEMIALG, tol)
    if verdict.margin < -eps:
        return Stratum.EXTERIOR
    if verdict.margin > eps:
        return Stratum.Q6

    values = c.as_tuple()
    saturated = [i for i, v in enumerate(values) if abs(v) >= 1.0 - eps]
    k = len(saturated)

    if k == 4:
        stratum = Stratum.Q1
    elif k == 3:
        raise AmbiguousClassification(
            "three saturated coordinates cannot occur on Q")
    elif k == 2:
        stratum = Stratum.Q2
    elif k == 1:
        cubic = _facet_cubic(values, saturated[0])
        if abs(cubic) <= eps:
            stratum = Stratum.Q3
        elif cubic > eps:
            stratum = Stratum.Q5
        else:
            raise AmbiguousClassification(
                "facet point outside its elliptope but inside the margin band")
    else:
        g = _g_scalar(*values)
        if g < 0.0:
            stratum = Stratum.Q4
        else:
            raise AmbiguousClassification(
                "boundary band point with no active face and g >= 0")

    if check_rank:
        comp = solve_completion(c, tol)
        expected = RANK_BY_STRATUM[stratum]
        if not comp.feasible or comp.rank != expected or not comp.unique:
            raise AmbiguousClassification(
                f"stratum {stratum.value} expects a unique rank-{expected} "
                f"completion, got feasible={comp.feasible} rank={comp.rank} "
                f"unique={comp.unique}")
    return stratum


# ---------------------------------------------------------------------------
# Angle parametrization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremePoint:
    c: Correlation
    stratum: Stratum


def extreme_from_angles(t: AngleTuple,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> ExtremePoint:
    """Map an angle tuple to its correlation point and stratum.

    The stratum follows the sign of the sine product: negative gives an
    exposed extreme point (Q4), positive an interior point (Q6), and zero
    the lower strata by the number of angles that are multiples of π.
    """
    res = _sum_residual(sum(t.as_tuple()))
    if res > tol.eps_angle:
        raise AngleSumViolation(f"angle sum residual {res:.3e}")
    point = t.cosines()
    sines = t.sines()
    delta = sines[0] * sines[1] * sines[2] * sines[3]
    if delta < -tol.eps_angle:
        stratum = Stratum.Q4
    elif delta > tol.eps_angle:
        stratum = Stratum.Q6
    else:
        multiples = sum(1 for s in sines if abs(s) <= tol.eps_angle)
        if multiples >= 3:
            # the sum constraint forces the fourth to be a multiple as well
            stratum = Stratum.Q1
        elif multiples == 2:
            stratum = Stratum.Q2
        elif multiples == 1:
            stratum = Stratum.Q3
        else:
            stratum = Stratum.Q4 if delta < 0.0 else Stratum.Q6
    return ExtremePoint(c=point, stratum=stratum)


def angles_from_point(c: Correlation,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> AngleTuple:
    """Recover the canonical angle tuple of an extreme-stratum point.

    Searches the 16 sign patterns of coordinatewise arccos for one meeting
    the sum constraint.  Raises :class:`NotExtreme` when none does (facet
    interiors, interior points, and exterior points admit no cosine
    parametrization).  Accuracy degrades like ``1/|sin|`` next to the
    strata where a coordinate saturates.
    """
    values = c.as_tuple()
    if max(abs(v) for v in values) > 1.0 + tol.eps_boundary:
        raise NotExtreme("point outside the cube")
    base = [math.acos(min(1.0, max(-1.0, v))) for v in values]

    best: tuple[float, tuple[int, ...]] | None = None
    for mask in range(16):
        signs = tuple(-1 if (mask >> j) & 1 else 1 for j in range(4))
        total = sum(s * b for s, b in zip(signs, base))
        res = _sum_residual(total)
        if best is None or res < best[0]:
            best = (res, signs)
    res, signs = best
    if res > tol.eps_angle:
        raise NotExtreme(
            f"no arccos sign pattern meets the sum constraint "
            f"(best residual {res:.3e})")
    raw = [s * b for s, b in zip(signs, base)]
    # absorb the residual so the constructed tuple passes validation exactly
    total = sum(raw)
    shift = TWO_PI * round(total / TWO_PI)
    raw[3] -= total - shift
    return AngleTuple(*raw).canonical(tol.eps_angle)


def exposing_functional(t: AngleTuple,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> Functional:
    """The unique functional with ``f·c = 1`` exactly at the Q4 point of ``t``.

    Requires a strictly exposed point: every sine bounded away from zero
    and the cotangent sum ``K`` nonzero, otherwise
    :class:`DegenerateAngles`.
    """
    sines = t.sines()
    if min(abs(s) for s in sines) < tol.eps_angle:
        raise DegenerateAngles("a sine vanishes; the functional is unbounded")
    delta = sines[0] * sines[1] * sines[2] * sines[3]
    if delta >= -tol.eps_angle:
        raise DegenerateAngles(
            f"sine product {delta:.3e} is not strictly negative")
    K = sum(math.cos(a) / math.sin(a) for a in t.as_tuple())
    if abs(K) < tol.eps_angle:
        raise DegenerateAngles("cotangent sum vanishes")
    f = Functional(*(1.0 / (K * s) for s in sines))
    incidence = f.dot(t.cosines())
    if abs(incidence - 1.0) > 1e-10:
        raise ConsistencyError(
            f"exposing functional incidence f.c = {incidence!r}")
    return f


# ---------------------------------------------------------------------------
# Gram realization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramSystem:
    """Unit vectors ``a1, a2, b1, b2`` in r-space with ``c_ij = a_i·b_j``."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    def __post_init__(self) -> None:
        shapes = {v.shape for v in self.vectors()}
        if len(shapes) != 1 or self.a1.ndim != 1 or self.a1.shape[0] < 1:
            raise ValueError(f"vectors must share one r-space, got {shapes}")
        for v in self.vectors():
            if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
                raise ValueError("Gram vectors must be unit length")

    @property
    def r(self) -> int:
        return int(self.a1.shape[0])

    def vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.a1, self.a2, self.b1, self.b2)

    def correlation(self) -> Correlation:
        return Correlation(
            float(self.a1 @ self.b1), float(self.a1 @ self.b2),
            float(self.a2 @ self.b1), float(self.a2 @ self.b2))


def gram_vectors(comp: Completion,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> GramSystem:
    """Factor a PSD completion into unit vectors via eigendecomposition.

    Rows of the square-root factor, restricted to the eigenvalues above
    the rank threshold, give ``(a1, a2, b1, b2)``.  Eigenvector signs are
    normalized (largest-magnitude component positive) so the output is
    reproducible, and rows are rescaled to exact unit length (truncating
    sub-threshold eigenvalues shortens them by up to the threshold mass).
    Raises :class:`NotPSD` when the completion fails the eigenvalue test,
    :class:`ConsistencyError` if the factorization does not reproduce the
    matrix to 1e-9.
    """
    matrix = comp.matrix()
    norm = max(1.0, float(np.abs(matrix).max()))
    eigvals, eigvecs = np.linalg.eigh(matrix)
    if eigvals[0] < -tol.eps_psd * norm:
        raise NotPSD(f"minimum eigenvalue {eigvals[0]:.3e}")

    keep = eigvals > tol.eps_psd * norm
    order = np.argsort(eigvals[keep])[::-1]
    vals = eigvals[keep][order]
    vecs = eigvecs[:, keep][:, order]
    for j in range(vecs.shape[1]):
        pivot = np.argmax(np.abs(vecs[:, j]))
        if vecs[pivot, j] < 0:
            vecs[:, j] = -vecs[:, j]
    factor = vecs * np.sqrt(vals)
    factor /= np.linalg.norm(factor, axis=1, keepdims=True)

    recon = factor @ factor.T
    if np.abs(recon - matrix).max() > 1e-9:
        raise ConsistencyError("Gram factorization residual exceeds 1e-9")

    rows = [factor[i, :].copy() for i in range(4)]
    return GramSystem(a1=rows[0], a2=rows[1], b1=rows[2], b2=rows[3])
