"""Whitney-type decompositions of the half-space and the unit ball.

Half-space cubes are dyadic: a cube at level ``j`` has side ``2^j``,
lateral corners on the lattice ``2^j Z^n``, and height extent exactly
``[2^j, 2^{j+1})``, so its side equals its vertical extent and the
distance of any interior point to the boundary, divided by the side,
lies in ``[1, 2]``.  All box membership tests are exact: scaling by a
power of two and flooring are exact in binary floating point, so cover
and disjointness hold without tolerances.

Ball cells are dyadic annuli crossed with a spherical cap net built by
farthest-point sampling at angular scale ``2^{-j}`` (deterministic
candidate pool, seed 0), with directions assigned to their nearest net
center.  Cells are therefore pairwise disjoint and the family records
its measured diameter-to-boundary-distance band.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationError
from .quadrature import composite_gauss

__all__ = [
    "WhitneyCube",
    "cube_at",
    "point_to_cube",
    "whitney_halfspace",
    "cube_rows",
    "CUBE_CSV_HEADER",
    "discrete_vs_integral",
    "BallCell",
    "BallFamily",
    "whitney_ball",
    "point_to_cell",
]


# ---------------------------------------------------------------------------
# Half-space cubes


@dataclass(frozen=True)
class WhitneyCube:
    """Closed-below dyadic cube ``prod [k_i 2^j, (k_i+1) 2^j) x [2^j, 2^{j+1})``."""

    level: int
    lattice_index: tuple
    lower_corner: tuple
    side: float

    def __post_init__(self):
        if self.side != math.ldexp(1.0, self.level):
            raise DomainError("side must equal 2^level")
        for k, c in zip(self.lattice_index, self.lower_corner[:-1]):
            if c != k * self.side:
                raise DomainError("corner inconsistent with lattice index")
        if self.lower_corner[-1] != self.side:
            raise DomainError("height extent must start at 2^level")

    @property
    def n(self):
        return len(self.lattice_index)

    @property
    def heights(self):
        return self.side, 2.0 * self.side

    @property
    def center(self):
        y = tuple(c + 0.5 * self.side for c in self.lower_corner[:-1])
        return y, 1.5 * self.side

    @property
    def volume(self):
        return self.side ** (self.n + 1)

    def contains(self, y, s):
        """Exact half-open membership."""
        if not (self.side <= s < 2.0 * self.side):
            return False
        for yi, c in zip(np.atleast_1d(y), self.lower_corner[:-1]):
            if not (c <= yi < c + self.side):
                return False
        return True


def cube_at(level, lattice_index):
    side = math.ldexp(1.0, level)
    idx = tuple(int(k) for k in lattice_index)
    corner = tuple(k * side for k in idx) + (side,)
    return WhitneyCube(int(level), idx, corner, side)


def _height_level(s):
    """Level ``j`` with ``s`` in ``[2^j, 2^{j+1})``, exactly."""
    if not (s > 0) or not math.isfinite(s):
        raise DomainError("height must be positive and finite")
    _, e = math.frexp(s)  # s = m 2^e, m in [0.5, 1)
    return e - 1


def point_to_cube(y, s):
    """The unique cube containing ``(y, s)``; ties go to the lower cube."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    j = _height_level(float(s))
    side = math.ldexp(1.0, j)
    idx = tuple(int(math.floor(yi / side)) for yi in y)
    return cube_at(j, idx)


def whitney_halfspace(lateral, heights, level_range=None):
    """All Whitney cubes meeting ``prod [a_i, b_i) x [s_lo, s_hi)``.

    Enumeration is level-major (coarse to fine... levels descending
    from the top of the height range), lattice-lexicographic within a
    level.  An empty region yields an empty list.
    """
    s_lo, s_hi = float(heights[0]), float(heights[1])
    if not (0.0 < s_lo <= s_hi):
        raise DomainError("need 0 < s_lo <= s_hi")
    bounds = [(float(a), float(b)) for a, b in lateral]
    if any(a > b for a, b in bounds):
        raise DomainError("lateral bounds must satisfy a <= b")
    if s_lo == s_hi or any(a == b for a, b in bounds):
        return []

    j_lo = _height_level(s_lo)
    m, e = math.frexp(s_hi)
    j_hi = e - 2 if m == 0.5 else e - 1
    if level_range is not None:
        j_min, j_max = int(level_range[0]), int(level_range[1])
        if s_lo < math.ldexp(1.0, j_min) or s_hi > math.ldexp(1.0, j_max + 1):
            raise DomainError("height bounds exceed the level range")
        j_lo, j_hi = j_min, j_max

    cubes = []
    for j in range(j_hi, j_lo - 1, -1):
        side = math.ldexp(1.0, j)
        ranges = []
        for a, b in bounds:
            k_min = math.floor(a / side)
            t = b / side
            k_max = int(t) - 1 if t == math.floor(t) else math.floor(t)
            if k_max < k_min:
                ranges = None
                break
            ranges.append(range(int(k_min), int(k_max) + 1))
        if ranges is None:
            continue
        for idx in itertools.product(*ranges):
            cubes.append(cube_at(j, idx))
    return cubes


CUBE_CSV_HEADER = "level,lattice_index,lower_corner,side"


def cube_rows(cubes):
    """CSV rows (strings) for a cube list, matching CUBE_CSV_HEADER."""
    rows = []
    for c in cubes:
        idx = ";".join(str(k) for k in c.lattice_index)
        corner = ";".join(repr(v) for v in c.lower_corner)
        rows.append(f"{c.level},{idx},{corner},{c.side!r}")
    return rows


def discrete_vs_integral(f_abs_p, weight_exponent, cubes, order=4):
    """Midpoint cube sum against the quadrature integral over the union.

    ``sum`` is ``Sigma_cubes f(center) weight(center) volume`` with
    weight ``s^weight_exponent``; ``integral`` is a per-cube tensor
    Gauss rule of the same integrand, hence exactly over the union of
    the cubes.  Comparability of the two (a ratio in a fixed band) is
    the discretization principle the cube family exists for.
    """
    if not cubes:
        raise DomainError("need at least one cube")
    n = cubes[0].n
    centers_y = np.array([c.center[0] for c in cubes])
    centers_s = np.array([c.center[1] for c in cubes])
    vols = np.array([c.volume for c in cubes])
    vals = np.asarray(f_abs_p(centers_y, centers_s), dtype=float)
    if np.any(vals < 0) or np.any(~np.isfinite(vals)):
        raise EvaluationError("field must be nonnegative and finite")
    total = float(np.sum(vals * centers_s**weight_exponent * vols))

    integral = 0.0
    for c in cubes:
        axes = []
        for a in c.lower_corner[:-1]:
            nodes, w = composite_gauss(np.array([a, a + c.side]), order)
            axes.append((nodes, w))
        s_nodes, s_w = composite_gauss(
            np.array([c.side, 2.0 * c.side]), order)
        grids = np.meshgrid(*[nd for nd, _ in axes], s_nodes, indexing="ij")
        Y = np.column_stack([g.ravel() for g in grids[:-1]])
        S = grids[-1].ravel()
        W = axes[0][1]
        for _, w in axes[1:]:
            W = np.multiply.outer(W, w)
        W = np.multiply.outer(W, s_w).ravel()
        g = np.asarray(f_abs_p(Y, S), dtype=float)
        if np.any(g < 0) or np.any(~np.isfinite(g)):
            raise EvaluationError("field must be nonnegative and finite")
        integral += float(W @ (g * S**weight_exponent))
    if integral <= 0:
        raise DomainError("integral of the field over the cubes vanishes")
    return total, integral, total / integral


# ---------------------------------------------------------------------------
# Ball cells


@dataclass(frozen=True)
class BallCell:
    """Dyadic annulus sector: shell ``1 - 2^-j <= r < 1 - 2^-(j+1)``
    intersected with the Voronoi region of ``cap_center`` in its level's
    net.  ``cap_radius`` is the net's achieved covering radius."""

    annulus_level: int
    cap_center: np.ndarray
    cap_radius: float


@dataclass(frozen=True)
class BallFamily:
    """All cells up to ``level_max`` plus measured family constants.

    ``c1 <= diameter / boundary-distance <= c2`` over sampled cells;
    ``overlap_bound`` is exact (Voronoi assignment within a level,
    disjoint shells across levels).
    """

    n: int
    level_max: int
    cells: tuple
    level_counts: tuple
    c1: float
    c2: float
    overlap_bound: int

    def centers_at(self, level):
        return np.array([c.cap_center for c in self.cells
                         if c.annulus_level == level])


def _sphere_pool(n, size, rng):
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _fps_net(pool, cos_theta):
    """Greedy farthest-point net until the pool is covered in angle."""
    start = int(np.argmax(pool[:, 0]))
    centers = [start]
    maxdot = pool @ pool[start]
    while maxdot.min() < cos_theta:
        nxt = int(np.argmin(maxdot))
        centers.append(nxt)
        np.maximum(maxdot, pool @ pool[nxt], out=maxdot)
    return np.asarray(centers, dtype=int), maxdot


def whitney_ball(n, level_max, pool_factor=24, seed=0):
    """Build the annulus-times-cap-net family for levels ``1..level_max``."""
    if n < 2:
        raise DomainError("ball cells need n >= 2")
    if level_max < 1:
        raise DomainError("level_max must be at least 1")
    rng = np.random.default_rng(seed)
    cells = []
    counts = []
    c1 = math.inf
    c2 = 0.0
    for j in range(1, level_max + 1):
        theta = 2.0**-j
        est = max(8, int(math.ceil((3.0 / theta) ** (n - 1))))
        pool = _sphere_pool(n, min(pool_factor * est, 400_000), rng)
        idx, maxdot = _fps_net(pool, math.cos(theta))
        centers = pool[idx]
        cover = float(np.arccos(np.clip(maxdot.min(), -1.0, 1.0)))

        # measured diameter band: assign the pool, take each cell's
        # angular spread at the outer radius plus the radial thickness
        assign = np.argmax(pool @ centers.T, axis=1)
        r_lo, r_hi = 1.0 - theta, 1.0 - 0.5 * theta
        for i in range(centers.shape[0]):
            mine = pool[assign == i]  # never empty: a center is its own nearest
            alpha = float(np.arccos(np.clip((mine @ centers[i]).min(),
                                            -1.0, 1.0)))
            diam = math.hypot(0.5 * theta, 2.0 * r_hi * math.sin(alpha))
            c1 = min(c1, diam / theta)          # farthest wall: dist = 2^-j
            c2 = max(c2, diam / (0.5 * theta))  # nearest wall: 2^-(j+1)
            cells.append(BallCell(j, centers[i].copy(), cover))
        counts.append(int(centers.shape[0]))
    return BallFamily(int(n), int(level_max), tuple(cells), tuple(counts),
                      float(c1), float(c2), 1)


def _shell_level(r):
    """Level ``j`` with ``1 - 2^-j <= r < 1 - 2^-(j+1)``, exactly."""
    one_minus = 1.0 - r
    if not (0.0 < one_minus <= 1.0):
        raise DomainError("need 0 <= r < 1")
    m, e = math.frexp(one_minus)
    return 1 - e if m == 0.5 else -e


def point_to_cell(family, x):
    """The unique cell containing ``x``, or None outside the family."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r < 0.5:
        return None
    j = _shell_level(r)
    if j > family.level_max:
        return None
    centers = family.centers_at(j)
    level_cells = [c for c in family.cells if c.annulus_level == j]
    i = int(np.argmax(centers @ (x / r)))
    return level_cells[i]
