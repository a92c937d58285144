"""Support/gauge functions, the polar body, and incidence residuals.

The polar body is a reflected copy of the primal one: ``Q° = ½·H·Q`` for
the Hadamard involution ``H`` from :mod:`qbody.core`.  Consequences used
here:

* the support function of ``Q`` is the gauge of ``Q°`` and vice versa,
  so ``gauge(c) = ½·support(H·c)``;
* ``f ∈ Q°``  iff  ``2Hf ∈ Q``  iff  ``support(f) ≤ 1``.

For a nonzero functional the support value takes one of two closed forms.
With ``k, p`` from :func:`qbody.core.dual_polys`, the maximizer is a
nonclassical exposed point exactly when ``p(f) < 0`` and
``m(f) = min|f_ij| · Σ 1/|f_ij| > 2``; then ``support(f) = sqrt(k/p)``.
Otherwise the maximum is classical and ``support(f) = ‖2Hf‖∞``, the
maximum over the eight even cube vertices.  (Hand-expanded four-term
absolute-value displays of that vertex maximum are easy to get wrong by
repeating one of the sign patterns; this implementation always takes the
max-norm form.)  Two further equivalent tests for the nonclassical case
are evaluated and cross-checked: the reciprocal-sum product
``m~(f) = q(1/f) < 0`` (with ``p(f) < 0``), and the elementary symmetric
cubic ``e3(f') < 0`` after an even sign change making ``(1,1,1,1)`` the
classical maximizer.

The dual matrix completion certificate for ``f ∈ Q°`` is

        [ p1    0    -f11  -f12 ]
    F = [ 0     p2   -f21  -f22 ]      p_i > 0,  Σ p_i = 2,
        [ -f11  -f21  p3    0   ]      p1 + p2 = p3 + p4 = 1,
        [ -f12  -f22  0     p4  ]

searched for positive semidefiniteness over the balanced parameters
``(p1, p3) ∈ (0,1)²`` (the minimum eigenvalue is concave in them).  For
incident primal/dual certificates, ``tr(C·F) = 2 - 2·f·c``.

The incidence set {(c, f) : c on the boundary, f exposing, f·c = 1}
restricted to exposed-extreme pairs is cut out by 17 polynomial
generators; :func:`ncycle_residuals` evaluates them (padded with three
duality-transformed copies to a fixed 20-slot layout, see
:data:`NCYCLE_RESIDUAL_NAMES`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOLERANCE,
    ConsistencyError,
    Correlation,
    Functional,
    OutsideTetrahedron,
    Tolerance,
    TransformDirection,
    TWO_H,
    ZeroFunctional,
    dual_polys,
    dual_transform,
    _h_product_scalar,
    _k_scalar,
)
from .membership import MembershipVerdict, Oracle, member
from .boundary import AngleTuple, exposing_functional

__all__ = [
    "CaseVerdict",
    "DualCompletion",
    "DualCompletionResult",
    "quantum_case",
    "support",
    "gauge",
    "dual_member",
    "dual_completion",
    "phi_map",
    "ncycle_residuals",
    "NCYCLE_RESIDUAL_NAMES",
]


@dataclass(frozen=True)
class CaseVerdict:
    """Which branch of the support function applies to a functional.

    ``m_value`` is defined only when ``p(f) < 0`` (all entries nonzero),
    ``phi_quantum`` only on the nonclassical branch.
    """

    quantum_case: bool
    m_value: float | None
    phi_classical: float
    phi_quantum: float | None


def _phi_classical(f: Functional) -> float:
    return float(np.abs(TWO_H @ f.as_array()).max())


def quantum_case(f: Functional,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> CaseVerdict:
    """Decide whether ``f`` is maximized at a nonclassical exposed point.

    Three equivalent criteria are evaluated; they must agree whenever all
    three margins exceed 1e-9, else :class:`ConsistencyError`.  The margin
    band exists because the criteria use different arithmetic and may
    disagree on the razor's edge.
    """
    entries = f.as_tuple()
    if max(abs(v) for v in entries) == 0.0:
        raise ZeroFunctional("the zero functional has no case split")

    polys = dual_polys(f)
    p = polys.p

    # criterion A: p < 0 and m > 2 (m needs all entries nonzero, which
    # p < 0 guarantees)
    if p < 0.0:
        m_value = min(abs(v) for v in entries) \
            * sum(1.0 / abs(v) for v in entries)
        margin_a = min(-p, m_value - 2.0)
    else:
        m_value = None
        margin_a = -p
    verdict_a = margin_a > 0.0

    # criterion B: p < 0 and the even-signed product of reciprocals < 0
    if p < 0.0:
        r = [1.0 / v for v in entries]
        m_tilde = ((r[0] + r[1] + r[2] + r[3])
                   * (r[0] + r[1] - r[2] - r[3])
                   * (r[0] - r[1] + r[2] - r[3])
                   * (r[0] - r[1] - r[2] + r[3]))
        margin_b = min(-p, -m_tilde)
    else:
        margin_b = -p
    verdict_b = margin_b > 0.0

    # criterion C: after the even sign change putting the classical
    # maximizer at (1,1,1,1), the elementary symmetric cubic is negative
    y = TWO_H @ f.as_array()
    kstar = int(np.argmax(np.abs(y)))
    vertex = TWO_H[:, kstar] * (1 if y[kstar] >= 0 else -1)
    fp = [float(s) * v for s, v in zip(vertex, entries)]
    cubic = (fp[0] * fp[1] * fp[2] + fp[0] * fp[1] * fp[3]
             + fp[0] * fp[2] * fp[3] + fp[1] * fp[2] * fp[3])
    margin_c = -cubic
    verdict_c = margin_c > 0.0

    verdicts = (verdict_a, verdict_b, verdict_c)
    if len(set(verdicts)) > 1:
        if min(abs(margin_a), abs(margin_b), abs(margin_c)) > 1e-9:
            raise ConsistencyError(
                f"case criteria disagree: {verdicts} with margins "
                f"({margin_a:.3e}, {margin_b:.3e}, {margin_c:.3e})")

    phi_c = _phi_classical(f)
    if verdict_a:
        phi_q = math.sqrt(polys.k / p)
    else:
        phi_q = None
    return CaseVerdict(quantum_case=verdict_a, m_value=m_value,
                       phi_classical=phi_c, phi_quantum=phi_q)


def support(f: Functional, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Maximum of ``f·c`` over ``Q`` (positively homogeneous, support(0)=0)."""
    if max(abs(v) for v in f.as_tuple()) == 0.0:
        return 0.0
    verdict = quantum_case(f, tol)
    if verdict.quantum_case:
        return float(verdict.phi_quantum)
    return verdict.phi_classical


def gauge(c: Correlation, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Gauge (Minkowski functional) of ``Q`` at ``c``.

    Self-duality turns the gauge of ``Q`` into the support of ``Q°``,
    giving ``gauge(c) = support(½·H·c)``; points of ``Q`` are exactly
    those with gauge at most 1.
    """
    f = Functional(*dual_transform(c.as_tuple(), TransformDirection.TO_DUAL))
    return support(f, tol)


def dual_member(f: Functional, oracle: Oracle = Oracle.SEMIALG,
                tol: Tolerance = DEFAULT_TOLERANCE) -> MembershipVerdict:
    """Decide ``f ∈ Q°`` by mapping to the primal body.

    The primal verdict on ``2Hf`` and the support test ``support(f) ≤ 1``
    must agree outside a 1e-8 band around the boundary.
    """
    c = Correlation(*dual_transform(f.as_tuple(), TransformDirection.FROM_DUAL))
    verdict = member(c, oracle, tol)
    s = support(f, tol)
    if (s <= 1.0) != verdict.inside:
        if abs(s - 1.0) > 1e-8 and abs(verdict.margin) > 1e-8:
            raise ConsistencyError(
                f"support route ({s!r}) and primal route "
                f"(margin {verdict.margin!r}) disagree")
    return verdict


# ---------------------------------------------------------------------------
# Dual matrix completion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualCompletion:
    """Diagonal certificate for ``f ∈ Q°`` with balanced row sums."""

    f: Functional
    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self) -> None:
        total = self.p1 + self.p2 + self.p3 + self.p4
        if abs(total - 2.0) > 1e-10:
            raise ValueError(f"diagonal sum {total!r} != 2")

    def matrix(self) -> np.ndarray:
        f11, f12, f21, f22 = self.f.as_tuple()
        return np.array([
            [self.p1, 0.0, -f11, -f12],
            [0.0, self.p2, -f21, -f22],
            [-f11, -f21, self.p3, 0.0],
            [-f12, -f22, 0.0, self.p4],
        ])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix())[0])

    def is_psd(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        norm = max(1.0, float(np.abs(self.matrix()).max()))
        return self.min_eigenvalue() >= -tol.eps_psd * norm


@dataclass(frozen=True)
class DualCompletionResult:
    feasible: bool
    witness: DualCompletion


_GRID = 64
_REFINEMENTS = 40


def _dual_min_eig_grid(f_arr: np.ndarray, p1: np.ndarray,
                       p3: np.ndarray) -> np.ndarray:
    """Batched minimum eigenvalue of F over arrays of (p1, p3)."""
    n = p1.shape[0]
    mats = np.zeros((n, 4, 4))
    mats[:, 0, 0] = p1
    mats[:, 1, 1] = 1.0 - p1
    mats[:, 2, 2] = p3
    mats[:, 3, 3] = 1.0 - p3
    mats[:, 0, 2] = mats[:, 2, 0] = -f_arr[0]
    mats[:, 0, 3] = mats[:, 3, 0] = -f_arr[1]
    mats[:, 1, 2] = mats[:, 2, 1] = -f_arr[2]
    mats[:, 1, 3] = mats[:, 3, 1] = -f_arr[3]
    return np.linalg.eigvalsh(mats)[:, 0]


def dual_completion(f: Functional,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> DualCompletionResult:
    """Search for a PSD dual certificate with ``p1+p2 = p3+p4 = 1``.

    The minimum eigenvalue is concave in ``(p1, p3)``, so a coarse 64x64
    grid followed by 40 local halving refinements finds its maximizer; the
    certificate is feasible iff that maximum clears the PSD threshold.
    """
    f_arr = f.as_array()

    grid = (np.arange(_GRID) + 0.5) / _GRID
    p1g, p3g = np.meshgrid(grid, grid, indexing="ij")
    flat1, flat3 = p1g.ravel(), p3g.ravel()
    vals = _dual_min_eig_grid(f_arr, flat1, flat3)
    best = int(np.argmax(vals))
    p1_best, p3_best, val_best = flat1[best], flat3[best], vals[best]

    step = 1.0 / _GRID
    offsets = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)])
    for _ in range(_REFINEMENTS):
        cand1 = np.clip(p1_best + offsets[:, 0] * step, 1e-12, 1.0 - 1e-12)
        cand3 = np.clip(p3_best + offsets[:, 1] * step, 1e-12, 1.0 - 1e-12)
        vals = _dual_min_eig_grid(f_arr, cand1, cand3)
        idx = int(np.argmax(vals))
        if vals[idx] > val_best:
            p1_best, p3_best, val_best = cand1[idx], cand3[idx], vals[idx]
        step *= 0.5

    witness = DualCompletion(f=f, p1=float(p1_best), p2=float(1.0 - p1_best),
                             p3=float(p3_best), p4=float(1.0 - p3_best))
    norm = max(1.0, float(np.abs(witness.matrix()).max()))
    feasible = bool(val_best >= -tol.eps_psd * norm)
    return DualCompletionResult(feasible=feasible, witness=witness)


# ---------------------------------------------------------------------------
# The involutive self-map of the parameter tetrahedron
# ---------------------------------------------------------------------------

def phi_map(t: AngleTuple, tol: Tolerance = DEFAULT_TOLERANCE) -> AngleTuple:
    """Map exposed-point angles to the angles of the dual exposed point.

    Defined on the prototype tetrahedron T: alpha, beta, gamma in (0, π)
    with alpha+beta+gamma in (0, π).  The image is the angle tuple of
    ``2H·f`` where ``f`` is the exposing functional; arccos branches are
    chosen to stay inside T, which makes the map an involution.
    """
    alpha, beta, gamma, delta = t.as_tuple()
    eps = tol.eps_angle
    inside = (0.0 < alpha < math.pi and 0.0 < beta < math.pi
              and 0.0 < gamma < math.pi
              and 0.0 < alpha + beta + gamma < math.pi)
    if not inside or abs(delta + (alpha + beta + gamma)) > eps:
        raise OutsideTetrahedron(
            "angles must satisfy alpha, beta, gamma, alpha+beta+gamma in (0, pi) "
            "with delta = -(alpha+beta+gamma)")

    f = exposing_functional(t, tol)
    image = dual_transform(f.as_tuple(), TransformDirection.FROM_DUAL)
    if max(abs(v) for v in image) > 1.0 + 1e-9:
        raise ConsistencyError(f"dual image {image!r} left the cube")
    clamped = [min(1.0, max(-1.0, v)) for v in image]
    a2 = math.acos(clamped[0])
    b2 = math.acos(clamped[1])
    g2 = math.acos(clamped[2])
    total = a2 + b2 + g2
    if abs(total - math.acos(clamped[3])) > 1e-8 or not total < math.pi:
        raise ConsistencyError("arccos branches do not close up inside T")
    return AngleTuple(a2, b2, g2, -total)


# ---------------------------------------------------------------------------
# Normal-cycle residuals
# ---------------------------------------------------------------------------

NCYCLE_RESIDUAL_NAMES: tuple[str, ...] = (
    "incidence",        # c·f - 1
    "h_primal",         # h(c)
    "h_polar",          # k(f) - p(f)
    "gen_01", "gen_02", "gen_03", "gen_04", "gen_05", "gen_06", "gen_07",
    "gen_08", "gen_09", "gen_10", "gen_11", "gen_12", "gen_13", "gen_14",
    "dual_gen_01",      # gen_01 at the reflected pair (2Hf, ½Hc)
    "dual_gen_02",      # gen_02 at the reflected pair
    "dual_gen_09",      # gen_09 at the reflected pair
)


def _ideal_generators(c: tuple[float, ...], f: tuple[float, ...]
                      ) -> list[float]:
    c11, c12, c21, c22 = c
    f11, f12, f21, f22 = f
    return [
        c11**2 * f11**2 - c22**2 * f22**2 - f11**2 + f22**2,

        c21 * f11 * f12 * f21 + c22 * f11 * f12 * f22
        + c11 * f11 * f21 * f22 + c12 * f12 * f21 * f22,

        c11**2 * f11 * f12 - c21**2 * f21 * f22 - c12 * c21 * f12 * f22
        + c11 * c22 * f12 * f22 - f11 * f12 + f21 * f22,

        c11**2 * f11 * f21 - c12**2 * f12 * f22 - c12 * c21 * f21 * f22
        + c11 * c22 * f21 * f22 - f11 * f21 + f12 * f22,

        c12**2 * f11 * f12 - c21**2 * f21 * f22 - c11 * c21 * f11 * f22
        + c12 * c22 * f11 * f22 - f11 * f12 + f21 * f22,

        c12**2 * f12 * f21 - c11**2 * f11 * f22 - c11 * c21 * f21 * f22
        + c12 * c22 * f21 * f22 - f12 * f21 + f11 * f22,

        c21**2 * f11 * f21 - c12**2 * f12 * f22 - c11 * c12 * f11 * f22
        + c21 * c22 * f11 * f22 - f11 * f21 + f12 * f22,

        c21**2 * f12 * f21 - c11**2 * f11 * f22 - c11 * c12 * f12 * f22
        + c21 * c22 * f12 * f22 - f12 * f21 + f11 * f22,

        (c11 * c12**2 + c11 * c21**2 + c11 * c22**2
         - 2.0 * c12 * c21 * c22) * f11
        + c12**3 * f12 + c21**3 * f21 + c22**3 * f22 - 1.0,

        c11 * c12 * f12 * f21 - c21 * c22 * f12 * f21 + c12 * c21 * f21 * f22
        - c11 * c22 * f21 * f22 + c12**2 * f12 * f22 - c22**2 * f12 * f22,

        c12 * c21 * f11 * f21 - c11 * c22 * f11 * f21 + c11 * c21 * f11 * f22
        - c12 * c22 * f11 * f22 + c21**2 * f21 * f22 - c22**2 * f21 * f22,

        c12 * c21 * f11 * f12 - c11 * c22 * f11 * f12 + c11 * c12 * f11 * f22
        - c21 * c22 * f11 * f22 + c12**2 * f12 * f22 - c22**2 * f12 * f22,

        (c12**3 - c11**2 * c12 - c12 * c21**2 - c12 * c22**2
         + 2.0 * c11 * c21 * c22) * f12
        - (c22**3 - c11**2 * c22 - c12**2 * c22 - c21**2 * c22
           + 2.0 * c11 * c12 * c21) * f22,

        (c21**3 - c11**2 * c21 - c12**2 * c21 - c21 * c22**2
         + 2.0 * c11 * c12 * c22) * f21
        - (c22**3 - c11**2 * c22 - c12**2 * c22 - c21**2 * c22
           + 2.0 * c11 * c12 * c21) * f22,
    ]


def ncycle_residuals(c: Correlation, f: Functional) -> tuple[float, ...]:
    """Evaluate the 20 incidence-variety residuals at ``(c, f)``.

    All vanish simultaneously exactly on the closure of the stratum of
    incident exposed-extreme pairs.  Slots follow
    :data:`NCYCLE_RESIDUAL_NAMES`: the incidence form, the two boundary
    sextics, the 14 remaining prime-ideal generators, and three of those
    generators re-evaluated at the duality-reflected pair (which lies on
    the same stratum, so they vanish there too).
    """
    ct = c.as_tuple()
    ft = f.as_tuple()
    ell = sum(a * b for a, b in zip(ct, ft)) - 1.0
    h_c = _h_product_scalar(*ct)
    h_f = _k_scalar(*ft) - ft[0] * ft[1] * ft[2] * ft[3]
    gens = _ideal_generators(ct, ft)

    c_refl = dual_transform(ft, TransformDirection.FROM_DUAL)
    f_refl = dual_transform(ct, TransformDirection.TO_DUAL)
    gens_refl = _ideal_generators(c_refl, f_refl)

    return (ell, h_c, h_f, *gens,
            gens_refl[0], gens_refl[1], gens_refl[8])
