"""Foundational types and algebra for the two-setting correlation body.

Conventions used throughout the package:

* A correlation point is the 4-tuple ``c = (c11, c12, c21, c22)`` where the
  first index is Alice's measurement setting and the second is Bob's.  All
  matrix layouts index rows by Alice and columns by Bob in that order.
* ``N`` denotes the no-signalling cube ``[-1, 1]^4``, ``CL`` the classical
  cross polytope spanned by the eight even sign vertices of ``N``, and ``Q``
  the convex body of quantum-realizable correlations, ``CL ⊂ Q ⊂ N``.
* A functional ``f = (f11, f12, f21, f22)`` encodes the linear inequality
  ``f·c ≤ 1``; the polar body ``Q°`` collects all functionals valid on ``Q``.

Two quartic/sextic polynomials describe ``Q`` inside the cube:

    g(c) = 2 - (c11² + c12² + c21² + c22²) + 2·c11·c12·c21·c22
    h(c) = 4·(1-c11²)(1-c12²)(1-c21²)(1-c22²) - g(c)²
         = 4·(c11·c22 - c12·c21)(c11·c21 - c12·c22)(c11·c12 - c21·c22)
           - (c11+c12-c21-c22)(c11-c12+c21-c22)(c11-c12-c21+c22)(c11+c12+c21+c22)

``c ∈ Q`` iff ``c ∈ N`` and (``g(c) ≥ 0`` or ``h(c) ≥ 0``).  The degree-6
product form is better conditioned near the cube boundary and is the value
reported by :func:`primal_polys`; the squared form is kept as a consistency
assertion.

On the dual side the building blocks are

    k(f) = (f11·f22 - f12·f21)(f11·f12 - f21·f22)(f11·f21 - f12·f22)
    p(f) = f11·f12·f21·f22
    q(f) = product of the four even-signed sums of f  (= p(2Hf))

with the polar analogues ``h°(f) = h(2Hf)/256 = k(f) - p(f)`` and
``g°(f) = g(2Hf)/2 = 1 - 2·|f|² + q(f)``.

``H`` is the symmetric orthogonal involution (a scaled 4x4 Hadamard matrix,
the tensor square of the 2x2 one) realising self-duality: ``Q° = ½·H·Q``.
The common symmetry group of ``Q`` and ``CL`` consists of the 192 signed
permutation matrices with an even number of minus signs; they are kept as
exact integer matrices so that group arithmetic is exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "QBodyError",
    "ConsistencyError",
    "InputOutsideCube",
    "AngleSumViolation",
    "NotExtreme",
    "DegenerateAngles",
    "AmbiguousClassification",
    "OutsideTetrahedron",
    "ZeroFunctional",
    "NotPSD",
    "InvalidModel",
    "DimensionTooLarge",
    "BadWeights",
    "InvalidSlice",
    "Correlation",
    "Functional",
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "PrimalPolys",
    "DualPolys",
    "TransformDirection",
    "HADAMARD",
    "TWO_H",
    "primal_polys",
    "dual_polys",
    "chsh_values",
    "chsh_max",
    "dual_transform",
    "symmetry_group",
    "orbit",
    "EVEN_VERTICES",
    "CHSH_SIGN_PATTERNS",
]


# ---------------------------------------------------------------------------
# Exception hierarchy
# ---------------------------------------------------------------------------

class QBodyError(Exception):
    """Base class for all domain errors raised by this package."""


class ConsistencyError(QBodyError):
    """Two independent evaluation routes disagreed beyond tolerance.

    This signals a numerical breakdown (or a bug), not bad user input.
    """


class InputOutsideCube(QBodyError):
    """A coordinate exceeds the no-signalling cube beyond tolerance."""


class AngleSumViolation(QBodyError):
    """Angle tuple does not satisfy the sum-to-zero (mod 2π) constraint."""


class NotExtreme(QBodyError):
    """No angle representation exists; the point is not on an extreme stratum."""


class DegenerateAngles(QBodyError):
    """Angle tuple sits on the degenerate locus of the requested operation."""


class AmbiguousClassification(QBodyError):
    """The point is within tolerance of two strata with conflicting verdicts."""


class OutsideTetrahedron(QBodyError):
    """Angle tuple is outside the prototype parameter tetrahedron."""


class ZeroFunctional(QBodyError):
    """The zero functional has no case classification."""


class NotPSD(QBodyError):
    """A matrix required to be positive semidefinite is not."""


class InvalidModel(QBodyError):
    """A quantum model violates its defining hypotheses beyond tolerance."""


class DimensionTooLarge(QBodyError):
    """Vector system dimension exceeds what the construction supports."""


class BadWeights(QBodyError):
    """Mixture weights are not positive or do not sum to one."""


class InvalidSlice(QBodyError):
    """Slice specification is structurally invalid."""


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------

def _check_finite(name: str, values: Iterable[float]) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} entries must be finite, got {v!r}")


@dataclass(frozen=True)
class Correlation:
    """A candidate correlation point ``(c11, c12, c21, c22)``.

    Entries are expectation values of products of ±1 outcomes, so members of
    the cube have every entry in ``[-1, 1]``; arbitrary finite values are
    allowed here so that exterior points can be classified.
    """

    c11: float
    c12: float
    c21: float
    c22: float

    def __post_init__(self) -> None:
        _check_finite("Correlation", self.as_tuple())

    @classmethod
    def from_sequence(cls, seq: Sequence[float]) -> "Correlation":
        if len(seq) != 4:
            raise ValueError(f"expected 4 entries, got {len(seq)}")
        return cls(float(seq[0]), float(seq[1]), float(seq[2]), float(seq[3]))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c11, self.c12, self.c21, self.c22)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class Functional:
    """Coefficients of a linear correlation inequality ``f·c ≤ 1``."""

    f11: float
    f12: float
    f21: float
    f22: float

    def __post_init__(self) -> None:
        _check_finite("Functional", self.as_tuple())

    @classmethod
    def from_sequence(cls, seq: Sequence[float]) -> "Functional":
        if len(seq) != 4:
            raise ValueError(f"expected 4 entries, got {len(seq)}")
        return cls(float(seq[0]), float(seq[1]), float(seq[2]), float(seq[3]))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.f11, self.f12, self.f21, self.f22)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def __iter__(self):
        return iter(self.as_tuple())

    def dot(self, c: "Correlation") -> float:
        return (self.f11 * c.c11 + self.f12 * c.c12
                + self.f21 * c.c21 + self.f22 * c.c22)


@dataclass(frozen=True)
class Tolerance:
    """Numeric tolerances shared by the geometric predicates.

    ``eps_boundary`` is the half-width of the boundary-ambiguity band in
    constraint-slack units, ``eps_angle`` the tolerance on angle identities,
    and ``eps_psd`` the relative eigenvalue threshold for semidefiniteness
    and numerical rank.
    """

    eps_boundary: float = 1e-9
    eps_angle: float = 1e-9
    eps_psd: float = 1e-10

    def __post_init__(self) -> None:
        if not (self.eps_boundary > 0 and self.eps_angle > 0 and self.eps_psd > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.eps_psd > self.eps_boundary:
            raise ValueError("eps_psd must not exceed eps_boundary")


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class PrimalPolys:
    """Values of the two defining polynomials at a correlation point."""

    g: float
    h: float


@dataclass(frozen=True)
class DualPolys:
    """Values of the dual-side polynomials at a functional."""

    k: float
    p: float
    q: float
    g_dual: float
    h_dual: float


class TransformDirection(enum.Enum):
    """Direction of the self-duality transform."""

    TO_DUAL = "to_dual"        # x -> ½·H·x
    FROM_DUAL = "from_dual"    # x -> 2·H·x


# 2H is the integer ±1 matrix; H = TWO_H / 2 satisfies H² = identity.
TWO_H = np.array(
    [[1, 1, 1, 1],
     [1, -1, 1, -1],
     [1, 1, -1, -1],
     [1, -1, -1, 1]], dtype=np.int64)

HADAMARD = TWO_H.astype(float) / 2.0

# The 8 even vertices of the cube (columns of 2H and their negatives).
EVEN_VERTICES = tuple(
    tuple(int(x) for x in sgn * TWO_H[:, k])
    for k in range(4) for sgn in (1, -1)
)

# Sign patterns with an odd number of minus signs, ordered by the 4-bit
# integer (b11 b12 b21 b22) where bit 1 means a minus sign.  Pattern 0001,
# the first entry, is the standard ½(c11+c12+c21-c22) combination.
CHSH_SIGN_PATTERNS = tuple(
    tuple(-1 if (m >> (3 - j)) & 1 else 1 for j in range(4))
    for m in (1, 2, 4, 7, 8, 11, 13, 14)
)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def _g_scalar(c11: float, c12: float, c21: float, c22: float) -> float:
    return 2.0 - (c11 * c11 + c12 * c12 + c21 * c21 + c22 * c22) \
        + 2.0 * c11 * c12 * c21 * c22


def _h_product_scalar(c11: float, c12: float, c21: float, c22: float) -> float:
    sextic = 4.0 * ((c11 * c22 - c12 * c21)
                    * (c11 * c21 - c12 * c22)
                    * (c11 * c12 - c21 * c22))
    quartic = ((c11 + c12 - c21 - c22)
               * (c11 - c12 + c21 - c22)
               * (c11 - c12 - c21 + c22)
               * (c11 + c12 + c21 + c22))
    return sextic - quartic


def _h_squared_scalar(c11: float, c12: float, c21: float, c22: float) -> float:
    g = _g_scalar(c11, c12, c21, c22)
    return 4.0 * ((1.0 - c11 * c11) * (1.0 - c12 * c12)
                  * (1.0 - c21 * c21) * (1.0 - c22 * c22)) - g * g


def _assert_close(a: float, b: float, rel: float, what: str) -> None:
    if abs(a - b) > rel * max(1.0, abs(a), abs(b)):
        raise ConsistencyError(f"{what}: {a!r} vs {b!r}")


def primal_polys(c: Correlation, rel_tol: float = 1e-9) -> PrimalPolys:
    """Evaluate ``g`` and ``h`` at ``c``.

    ``h`` is reported from the degree-6 product form; the squared form is
    evaluated as well and the two must agree within ``rel_tol`` relative to
    ``max(1, |h|)``, otherwise :class:`ConsistencyError` is raised.
    """
    c11, c12, c21, c22 = c.as_tuple()
    g = _g_scalar(c11, c12, c21, c22)
    h = _h_product_scalar(c11, c12, c21, c22)
    h_alt = _h_squared_scalar(c11, c12, c21, c22)
    _assert_close(h, h_alt, rel_tol, "two evaluation forms of h disagree")
    return PrimalPolys(g=g, h=h)


def _k_scalar(f11: float, f12: float, f21: float, f22: float) -> float:
    return ((f11 * f22 - f12 * f21)
            * (f11 * f12 - f21 * f22)
            * (f11 * f21 - f12 * f22))


def _q_scalar(f11: float, f12: float, f21: float, f22: float) -> float:
    return ((f11 + f12 + f21 + f22)
            * (f11 - f12 + f21 - f22)
            * (f11 + f12 - f21 - f22)
            * (f11 - f12 - f21 + f22))


def dual_polys(f: Functional, rel_tol: float = 1e-9) -> DualPolys:
    """Evaluate the dual-side polynomials at ``f``.

    ``h_dual = k - p`` and ``g_dual = 1 - 2|f|² + q`` are cross-checked
    against the transform route, ``h(2Hf)/256`` and ``g(2Hf)/2``.
    """
    f11, f12, f21, f22 = f.as_tuple()
    k = _k_scalar(f11, f12, f21, f22)
    p = f11 * f12 * f21 * f22
    q = _q_scalar(f11, f12, f21, f22)
    norm2 = f11 * f11 + f12 * f12 + f21 * f21 + f22 * f22
    h_dual = k - p
    g_dual = 1.0 - 2.0 * norm2 + q

    y = TWO_H @ f.as_array()
    _assert_close(h_dual, _h_product_scalar(*y) / 256.0, rel_tol,
                  "h_dual vs h(2Hf)/256")
    _assert_close(g_dual, _g_scalar(*y) / 2.0, rel_tol, "g_dual vs g(2Hf)/2")
    return DualPolys(k=k, p=p, q=q, g_dual=g_dual, h_dual=h_dual)


# ---------------------------------------------------------------------------
# CHSH combinations
# ---------------------------------------------------------------------------

def chsh_values(c: Correlation) -> tuple[float, ...]:
    """The eight combinations ``½·Σ s_ij·c_ij`` over odd sign patterns.

    Returned in the fixed order of :data:`CHSH_SIGN_PATTERNS`.  Classical
    points have every value ≤ 1; cube points violate at most one.
    """
    t = c.as_tuple()
    return tuple(
        0.5 * (s[0] * t[0] + s[1] * t[1] + s[2] * t[2] + s[3] * t[3])
        for s in CHSH_SIGN_PATTERNS
    )


def chsh_max(c: Correlation) -> float:
    return max(chsh_values(c))


# ---------------------------------------------------------------------------
# Duality transform
# ---------------------------------------------------------------------------

def dual_transform(x: Sequence[float],
                   direction: TransformDirection) -> tuple[float, ...]:
    """Apply the self-duality reflection to a 4-vector.

    ``TO_DUAL`` maps ``x`` to ``½Hx`` (a point of ``Q`` to a functional in
    ``Q°``), ``FROM_DUAL`` maps to ``2Hx``; the two are mutually inverse
    because ``H`` is an involution.
    """
    v = np.asarray(tuple(x), dtype=float)
    if v.shape != (4,):
        raise ValueError("dual_transform expects a 4-vector")
    if direction is TransformDirection.TO_DUAL:
        out = 0.5 * (HADAMARD @ v)
    elif direction is TransformDirection.FROM_DUAL:
        out = TWO_H @ v
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown direction {direction!r}")
    return tuple(float(t) for t in out)


# ---------------------------------------------------------------------------
# Symmetry group
# ---------------------------------------------------------------------------

_GROUP_CACHE: list[np.ndarray] | None = None


def symmetry_group() -> list[np.ndarray]:
    """All 192 signed 4x4 permutation matrices with an even sign count.

    These are exactly the linear maps permuting the even vertices of the
    cube among themselves, hence the common symmetries of ``CL`` and ``Q``.
    Matrices are integer valued so products and inverses are exact.  The
    returned list is a fresh shallow copy; the matrices themselves are
    shared and must not be mutated.
    """
    global _GROUP_CACHE
    if _GROUP_CACHE is None:
        from itertools import permutations, product
        elements = []
        for perm in permutations(range(4)):
            for signs in product((1, -1), repeat=4):
                if signs[0] * signs[1] * signs[2] * signs[3] != 1:
                    continue
                mat = np.zeros((4, 4), dtype=np.int64)
                for i in range(4):
                    mat[i, perm[i]] = signs[i]
                elements.append(mat)
        assert len(elements) == 192
        _GROUP_CACHE = elements
    return list(_GROUP_CACHE)


def orbit(c: Correlation, tol: Tolerance = DEFAULT_TOLERANCE) -> list[Correlation]:
    """The set ``{S·c}`` over the symmetry group, deduplicated.

    Points closer than ``tol.eps_angle`` in max norm are identified.  The
    result is ordered lexicographically for reproducibility.
    """
    v = c.as_array()
    images = sorted(tuple(float(t) for t in (S @ v)) for S in symmetry_group())
    kept: list[tuple[float, ...]] = []
    for img in images:
        if kept and max(abs(a - b) for a, b in zip(img, kept[-1])) < tol.eps_angle:
            continue
        # lexicographic sort does not guarantee near-duplicates are adjacent
        # in degenerate cases, so scan all kept representatives
        if any(max(abs(a - b) for a, b in zip(img, other)) < tol.eps_angle
               for other in kept):
            continue
        kept.append(img)
    return [Correlation.from_sequence(t) for t in kept]
