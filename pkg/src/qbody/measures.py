"""Monte-Carlo volumes, stratum samplers, and grid slices.

Randomness contract: all sampling is driven by a PCG64 generator.  The
requested sample count is processed in fixed blocks of 65536 draws, and
block ``b`` uses the stream ``SeedSequence(seed, spawn_key=(b,))``.
Results are therefore a deterministic function of ``(seed, samples)``
alone; the ``workers`` field only partitions blocks across executors and
never changes the output.  Rejection samplers consume whole blocks until
enough points are accepted and then truncate, which keeps them inside the
same contract.

Volume facts this module reproduces as Monte-Carlo fractions of the
ambient cube:

* quantum body: 3·π²/32 ≈ 0.9252754126 of the 4-cube,
* classical polytope: 2/3 of the 4-cube,
* three-dimensional elliptope {1 - x² - y² - z² + 2xyz ≥ 0}: π²/16
  of the 3-cube.

The exact quantum fraction is cross-validated by quasi-Monte-Carlo
integration of the sine pushout's Jacobian, Π (π/2)·cos(π·x_ij/2), over
the classical polytope.

Stratum samplers draw uniformly in parameter space (angles for the
exposed-extreme stratum, facet coordinates for the elliptope stratum),
not in surface measure, and keep a small collar away from neighbouring
strata so every emitted point classifies unambiguously.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, TextIO

import numpy as np

from .core import Correlation, InvalidSlice, Tolerance, DEFAULT_TOLERANCE
from .membership import Oracle, classical_margin_batch, margin_batch, member_classical
from .boundary import classify

__all__ = [
    "Body",
    "SampleTarget",
    "SamplerConfig",
    "VolumeEstimate",
    "SliceSpec",
    "SliceTable",
    "mc_volume",
    "exact_volume_ratio",
    "sample",
    "slice_grid",
    "EXACT_Q_FRACTION",
    "EXACT_CL_FRACTION",
    "EXACT_ELLIPTOPE_FRACTION",
]

_BLOCK = 1 << 16

AXES = ("c11", "c12", "c21", "c22")

EXACT_Q_FRACTION = 3.0 * math.pi ** 2 / 32.0
EXACT_CL_FRACTION = 2.0 / 3.0
EXACT_ELLIPTOPE_FRACTION = math.pi ** 2 / 16.0


class Body(enum.Enum):
    Q = "q"
    CL = "cl"
    ELLIPTOPE3 = "elliptope"


class SampleTarget(enum.Enum):
    Q_INTERIOR = "q-interior"
    Q4_STRATUM = "q4"
    Q5_STRATUM = "q5"
    CUBE = "cube"
    CL = "cl"


@dataclass(frozen=True)
class SamplerConfig:
    """Deterministic sampling parameters; see the module docstring."""

    seed: int
    samples: int
    workers: int = 1

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class VolumeEstimate:
    fraction: float
    stderr: float


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _elliptope_mask(pts: np.ndarray) -> np.ndarray:
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    return 1.0 - x * x - y * y - z * z + 2.0 * x * y * z >= 0.0


def mc_volume(body: Body, cfg: SamplerConfig) -> VolumeEstimate:
    """Fraction of uniform ambient-cube samples that land in the body."""
    dim = 3 if body is Body.ELLIPTOPE3 else 4
    hits = 0
    remaining = cfg.samples
    block = 0
    while remaining > 0:
        n = min(_BLOCK, remaining)
        pts = _block_rng(cfg.seed, block).uniform(-1.0, 1.0, size=(n, dim))
        if body is Body.Q:
            hits += int((margin_batch(pts, Oracle.SEMIALG) >= 0.0).sum())
        elif body is Body.CL:
            hits += int((classical_margin_batch(pts) >= 0.0).sum())
        else:
            hits += int(_elliptope_mask(pts).sum())
        remaining -= n
        block += 1
    fraction = hits / cfg.samples
    stderr = math.sqrt(fraction * (1.0 - fraction) / cfg.samples)
    return VolumeEstimate(fraction=fraction, stderr=stderr)


def exact_volume_ratio(qmc_exponent: int = 19) -> float:
    """The closed-form quantum fraction of the cube, 3·π²/32.

    Cross-validated against quasi-Monte-Carlo integration of the pushout
    Jacobian over the classical polytope (Sobol points, 2**qmc_exponent
    samples); a deviation beyond 1e-3 raises, since it would mean the
    closed form and the geometry disagree.
    """
    from scipy.stats import qmc
    from .core import ConsistencyError

    sampler = qmc.Sobol(d=4, scramble=False)
    pts = 2.0 * sampler.random_base2(m=qmc_exponent) - 1.0
    inside = classical_margin_batch(pts) >= 0.0
    jacobian = np.prod(0.5 * math.pi * np.cos(0.5 * math.pi * pts), axis=1)
    estimate = float(np.mean(inside * jacobian))
    if abs(estimate - EXACT_Q_FRACTION) > 1e-3:
        raise ConsistencyError(
            f"pushout-Jacobian integral {estimate!r} deviates from the "
            f"closed form {EXACT_Q_FRACTION!r}")
    return EXACT_Q_FRACTION


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

# Collar widths keeping stratum samples clear of neighbouring strata.
_ANGLE_COLLAR = 1e-2
_FACET_COLLAR = 1e-6


def _sample_blocks(cfg: SamplerConfig, accept) -> np.ndarray:
    """Accumulate accepted points block by block, then truncate."""
    out: list[np.ndarray] = []
    count = 0
    block = 0
    while count < cfg.samples:
        pts = accept(_block_rng(cfg.seed, block))
        if pts.shape[0]:
            out.append(pts)
            count += pts.shape[0]
        block += 1
        if block > 100000:  # pragma: no cover - guards a broken predicate
            raise RuntimeError("rejection sampler failed to accept points")
    return np.concatenate(out, axis=0)[:cfg.samples]


def _accept_cube(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(_BLOCK, 4))


def _accept_cl(rng: np.random.Generator) -> np.ndarray:
    pts = rng.uniform(-1.0, 1.0, size=(_BLOCK, 4))
    return pts[classical_margin_batch(pts) >= 0.0]


def _accept_q_interior(rng: np.random.Generator) -> np.ndarray:
    pts = rng.uniform(-1.0, 1.0, size=(_BLOCK, 4))
    return pts[margin_batch(pts, Oracle.SEMIALG) > 0.0]


def _accept_q4(rng: np.random.Generator) -> np.ndarray:
    from .core import symmetry_group
    angles = rng.uniform(0.0, math.pi, size=(_BLOCK, 3))
    total = angles.sum(axis=1)
    lo, hi = _ANGLE_COLLAR, math.pi - _ANGLE_COLLAR
    keep = ((angles > lo).all(axis=1) & (angles < hi).all(axis=1)
            & (total > lo) & (total < hi))
    angles = angles[keep]
    total = total[keep]
    pts = np.empty((angles.shape[0], 4))
    pts[:, :3] = np.cos(angles)
    pts[:, 3] = np.cos(total)  # cos(delta) with delta = -(alpha+beta+gamma)
    group = symmetry_group()
    idx = rng.integers(0, len(group), size=pts.shape[0])
    return np.stack([group[i] @ q for i, q in zip(idx, pts)], axis=0) \
        if pts.shape[0] else pts


def _accept_q5(rng: np.random.Generator) -> np.ndarray:
    coords = rng.uniform(-1.0, 1.0, size=(_BLOCK, 3))
    facets = rng.integers(0, 8, size=_BLOCK)
    axis = facets // 2
    sign = np.where(facets % 2 == 0, 1.0, -1.0)
    x, y, z = coords[:, 0], coords[:, 1], coords[:, 2]
    cubic = 1.0 - x * x - y * y - z * z + 2.0 * sign * x * y * z
    keep = (cubic > _FACET_COLLAR) & (np.abs(coords).max(axis=1)
                                      < 1.0 - _FACET_COLLAR)
    coords, axis, sign = coords[keep], axis[keep], sign[keep]
    pts = np.empty((coords.shape[0], 4))
    for i in range(coords.shape[0]):
        row = np.insert(coords[i], axis[i], sign[i])
        pts[i] = row
    return pts


def sample(target: SampleTarget, cfg: SamplerConfig,
           tol: Tolerance = DEFAULT_TOLERANCE) -> list[Correlation]:
    """Draw ``cfg.samples`` points from the requested set.

    ``CUBE`` is uniform; ``CL`` and ``Q_INTERIOR`` are rejections from the
    cube; ``Q4_STRATUM`` draws uniform angles in the prototype tetrahedron
    (with a collar) mapped through cosines and then moved to a random
    symmetry patch; ``Q5_STRATUM`` rejects on a random facet's elliptope
    interior.
    """
    accept = {
        SampleTarget.CUBE: _accept_cube,
        SampleTarget.CL: _accept_cl,
        SampleTarget.Q_INTERIOR: _accept_q_interior,
        SampleTarget.Q4_STRATUM: _accept_q4,
        SampleTarget.Q5_STRATUM: _accept_q5,
    }[target]
    pts = _sample_blocks(cfg, accept)
    return [Correlation.from_sequence(row) for row in pts]


# ---------------------------------------------------------------------------
# Grid slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceSpec:
    """A 1-3 dimensional axis-aligned or hyperplane slice of the cube.

    Exactly one of ``fixed`` (coordinate name to value) or ``normal`` (a
    4-vector, with ``offset``) must be given.  For a hyperplane the free
    axes are the three coordinates other than the largest normal
    component, which is solved for.  ``resolution`` is one integer per
    free axis (a single integer applies to all); ``box`` optionally
    overrides the default [-1, 1] range per free axis.
    """

    fixed: Mapping[str, float] | None = None
    normal: Sequence[float] | None = None
    offset: float = 0.0
    resolution: int | Sequence[int] = 50
    box: Sequence[tuple[float, float]] | None = None

    def free_axes(self) -> list[str]:
        if (self.fixed is None) == (self.normal is None):
            raise InvalidSlice("specify exactly one of fixed or normal")
        if self.fixed is not None:
            bad = set(self.fixed) - set(AXES)
            if bad:
                raise InvalidSlice(f"unknown coordinates {sorted(bad)}")
            free = [a for a in AXES if a not in self.fixed]
            if not 1 <= len(free) <= 3:
                raise InvalidSlice("between 1 and 3 axes must remain free")
            return free
        normal = [float(v) for v in self.normal]
        if len(normal) != 4 or max(abs(v) for v in normal) == 0.0:
            raise InvalidSlice("hyperplane normal must be a nonzero 4-vector")
        dependent = max(range(4), key=lambda i: abs(normal[i]))
        return [AXES[i] for i in range(4) if i != dependent]

    def resolutions(self) -> list[int]:
        free = self.free_axes()
        if isinstance(self.resolution, int):
            res = [self.resolution] * len(free)
        else:
            res = [int(r) for r in self.resolution]
            if len(res) != len(free):
                raise InvalidSlice(
                    f"{len(res)} resolutions for {len(free)} free axes")
        if min(res) < 2:
            raise InvalidSlice("resolution must be at least 2 per axis")
        return res

    def boxes(self) -> list[tuple[float, float]]:
        free = self.free_axes()
        if self.box is None:
            return [(-1.0, 1.0)] * len(free)
        boxes = [(float(lo), float(hi)) for lo, hi in self.box]
        if len(boxes) != len(free):
            raise InvalidSlice(f"{len(boxes)} boxes for {len(free)} free axes")
        if any(lo >= hi for lo, hi in boxes):
            raise InvalidSlice("box bounds must satisfy lo < hi")
        return boxes


@dataclass(frozen=True)
class SliceTable:
    """Grid evaluation result; one row per node, CSV-exportable."""

    columns: tuple[str, ...]
    rows: list[tuple]

    def write_csv(self, stream: TextIO) -> None:
        """UTF-8 CSV with LF line endings and 17-significant-digit floats."""
        stream.write(",".join(self.columns) + "\n")
        for row in self.rows:
            parts = []
            for value in row:
                if isinstance(value, float):
                    parts.append(f"{value:.17g}")
                else:
                    parts.append(str(value))
            stream.write(",".join(parts) + "\n")


def _point_from_node(spec: SliceSpec, free: list[str],
                     node: tuple[float, ...]) -> Correlation:
    values = dict(zip(free, node))
    if spec.fixed is not None:
        values.update(spec.fixed)
        return Correlation(*(float(values[a]) for a in AXES))
    normal = [float(v) for v in spec.normal]
    dependent = max(range(4), key=lambda i: abs(normal[i]))
    acc = spec.offset
    for i, axis in enumerate(AXES):
        if i != dependent:
            acc -= normal[i] * values[axis]
    values[AXES[dependent]] = acc / normal[dependent]
    return Correlation(*(float(values[a]) for a in AXES))


def slice_grid(spec: SliceSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> SliceTable:
    """Label every grid node with stratum, classical bit, g, and h.

    Row count is the product of the per-axis resolutions; node order is
    row-major in the free axes.  The stratum is the classification of the
    full 4-dimensional point (EXTERIOR when the node leaves the body or
    the cube); completion-rank cross-checks are skipped here for
    throughput, being covered by the classification tests.
    """
    from itertools import product as iter_product
    from .core import primal_polys

    free = spec.free_axes()
    res = spec.resolutions()
    boxes = spec.boxes()
    grids = [np.linspace(lo, hi, n) for (lo, hi), n in zip(boxes, res)]

    rows = []
    for node in iter_product(*grids):
        c = _point_from_node(spec, free, node)
        stratum = classify(c, tol, check_rank=False)
        classical = int(member_classical(c).inside)
        polys = primal_polys(c)
        rows.append(tuple(float(v) for v in node)
                    + (stratum.value, classical, polys.g, polys.h))
    columns = tuple(free) + ("stratum", "classical", "g", "h")
    return SliceTable(columns=columns, rows=rows)
