"""Direction networks on colored graphs and their realizations.

A direction network prescribes a unit direction per edge; a realization is a
point per vertex plus a 2x2 lattice matrix L such that every edge displacement
eta_ij = p_j + L*color_ij - p_i is parallel to its prescribed direction.  The
constraints <eta_ij, perp(d_ij)> = 0 form a linear system whose matrix is the
M222 pattern with (a, b) = perp(d); its kernel is the realization space.

Edges with eta = 0 are collapsed.  For a colored-Laman graph and generic
directions the kernel is 3-dimensional (translations plus one scaling class)
and contains, up to translation and scale, a unique realization with no
collapsed edge; this module samples directions, verifies the genericity rank
conditions, and extracts that realization in a normalized form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .colored_graph import ColoredGraph, ColorVector, GainScan, image_rank
from .errors import (
    DomainError,
    GenericitySamplingError,
    InternalConsistencyError,
    StructuralError,
)
from .linear_rep import NaturalMatrix, Realization, kernel_float
from .sparsity import is_colored_laman

COLLAPSE_TOL = 1e-6  # relative; deliberately looser than the solve tolerance
SOLVE_TOL = 1e-9
DEFAULT_RETRY_CAP = 16


@dataclass(frozen=True)
class DirectionAssignment:
    """Unit direction per edge id; directions are projectively meaningful."""

    d: dict[int, tuple[float, float]]

    def __post_init__(self):
        normed = {}
        for eid, (dx, dy) in self.d.items():
            norm = math.hypot(dx, dy)
            if norm == 0.0:
                raise DomainError(f"edge {eid}: zero direction vector")
            normed[eid] = (dx / norm, dy / norm)
        object.__setattr__(self, "d", normed)

    def direction(self, eid: int) -> tuple[float, float]:
        return self.d[eid]

    def perp(self, eid: int) -> tuple[float, float]:
        dx, dy = self.d[eid]
        return (-dy, dx)

    @classmethod
    def sample(cls, graph: ColoredGraph, rng: random.Random) -> "DirectionAssignment":
        """Independent uniform angles, one per edge, in graph edge order."""
        return cls(
            {
                e.id: (math.cos(t), math.sin(t))
                for e in graph.edges
                for t in (rng.uniform(0.0, 2.0 * math.pi),)
            }
        )


def build_P_system(graph: ColoredGraph, directions: DirectionAssignment) -> NaturalMatrix:
    """Constraint matrix of the realization system, one row per edge.

    Exactly the M222 filling pattern evaluated at (a, b) = perp(d); the
    unknown vector is the flattened realization (points, then L columns).
    """
    n = graph.n
    rows = []
    for e in graph.edges:
        if e.id not in directions.d:
            raise StructuralError(f"direction missing for edge {e.id}")
        a, b = directions.perp(e.id)
        row = [0.0] * (2 * n + 4)
        row[2 * e.tail] -= a
        row[2 * e.tail + 1] -= b
        row[2 * e.head] += a
        row[2 * e.head + 1] += b
        row[2 * n] += e.color.g1 * a
        row[2 * n + 1] += e.color.g1 * b
        row[2 * n + 2] += e.color.g2 * a
        row[2 * n + 3] += e.color.g2 * b
        rows.append(tuple(row))
    return NaturalMatrix("M222", "float", n, tuple(rows), graph.edge_ids())


def realization_kernel(
    graph: ColoredGraph,
    directions: DirectionAssignment,
    tolerance: float = SOLVE_TOL,
) -> tuple[int, list[Realization]]:
    """Dimension and orthonormal basis of the realization space."""
    rank, basis = kernel_float(build_P_system(graph, directions), tolerance)
    dim = 2 * graph.n + 4 - rank
    assert basis.shape[1] == dim
    return dim, [Realization.from_flat(basis[:, j], graph.n) for j in range(dim)]


@dataclass(frozen=True)
class EdgeStatus:
    edge_id: int
    eta: tuple[float, float]
    alpha: float
    collapsed: bool


def edge_status(
    graph: ColoredGraph,
    directions: DirectionAssignment,
    realization: Realization,
    tolerance: float = COLLAPSE_TOL,
) -> list[EdgeStatus]:
    """Per-edge displacement, stretch along the direction, and collapse flag.

    An edge is collapsed when its displacement is below tolerance relative to
    the realization's size.  The size reference is the point spread plus
    lattice norm, floored at a small fraction of the flat vector's norm so
    that numerically-pure translations (whose spread is roundoff) are still
    read as fully collapsed.
    """
    flat_norm = float(np.linalg.norm(realization.to_flat()))
    threshold = tolerance * max(realization.scale(), 1e-8 * flat_norm)
    out = []
    for e in graph.edges:
        eta = realization.eta(e.tail, e.head, tuple(e.color))
        norm = float(np.linalg.norm(eta))
        collapsed = norm <= threshold
        alpha = 0.0
        if not collapsed:
            dx, dy = directions.direction(e.id)
            alpha = float(eta[0] * dx + eta[1] * dy)
        out.append(EdgeStatus(e.id, (float(eta[0]), float(eta[1])), alpha, collapsed))
    return out


# ---------------------------------------------------------------------------
# Collapsed realizations.
# ---------------------------------------------------------------------------


def _lattice_kernel_basis(images: Sequence[ColorVector]) -> list[np.ndarray]:
    """Basis of the 2x2 matrices annihilating every cycle image.

    Rows of such a matrix are orthogonal to the image span, so the space has
    dimension 4 - 2k: four free entries for k = 0, two multiples of the
    perpendicular direction per row for k = 1, only the zero matrix for k = 2.
    """
    k = image_rank(images)
    if k == 0:
        return [
            np.array([[1.0, 0.0], [0.0, 0.0]]),
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            np.array([[0.0, 0.0], [1.0, 0.0]]),
            np.array([[0.0, 0.0], [0.0, 1.0]]),
        ]
    if k == 1:
        g = next((v for v in images if v.g1 or v.g2))
        perp = np.array([-g.g2, g.g1], dtype=float)
        return [np.vstack([perp, [0.0, 0.0]]), np.vstack([[0.0, 0.0], perp])]
    return []


def _canonical_collapsed_lattice(images: Sequence[ColorVector]) -> np.ndarray:
    k = image_rank(images)
    if k == 0:
        return np.eye(2)
    if k == 2:
        return np.zeros((2, 2))
    g = next((v for v in images if v.g1 or v.g2))
    return np.vstack([[-float(g.g2), float(g.g1)], [0.0, 0.0]])


def _collapsed_points(
    graph: ColoredGraph,
    scan: GainScan,
    lattice: np.ndarray,
    anchors: Mapping[int, Sequence[float]],
) -> np.ndarray:
    cmap = scan.component_map()
    p = np.zeros((graph.n, 2))
    for v in range(graph.n):
        sigma = scan.potential(v)
        anchor = np.asarray(anchors.get(cmap[v], (0.0, 0.0)), dtype=float)
        p[v] = anchor - lattice @ np.array([float(sigma.g1), float(sigma.g2)])
    return p


def _full_scan(graph: ColoredGraph) -> GainScan:
    scan = GainScan()
    for e in graph.edges:
        scan.add(e.id, e.tail, e.head, e.color)
    for v in range(graph.n):
        scan.ensure_vertex(v)
    return scan


def collapsed_realization(
    graph: ColoredGraph,
    anchors: Sequence[Sequence[float]] | None = None,
    lattice: np.ndarray | None = None,
) -> Realization:
    """A realization in which every edge displacement vanishes.

    Chooses a lattice matrix annihilating all cycle images (identity when the
    image rank is 0, a canonical rank-one matrix when it is 1, zero when 2),
    then places each vertex at its component anchor minus L times its forest
    potential.  Verified collapsed before returning.
    """
    scan = _full_scan(graph)
    cmap = scan.component_map()
    ncomp = len(set(cmap.values())) if cmap else 0
    if lattice is None:
        lattice = _canonical_collapsed_lattice(scan.images)
    lattice = np.asarray(lattice, dtype=float).reshape(2, 2)
    anchor_map: dict[int, Sequence[float]] = {}
    if anchors is not None:
        if len(anchors) != ncomp:
            raise StructuralError(f"need one anchor per component ({ncomp})")
        anchor_map = dict(enumerate(anchors))
    real = Realization(_collapsed_points(graph, scan, lattice, anchor_map), lattice)
    tol = 1e-9 * max(real.scale(), 1.0)
    for e in graph.edges:
        if np.linalg.norm(real.eta(e.tail, e.head, tuple(e.color))) > tol:
            raise InternalConsistencyError(
                f"collapsed construction left edge {e.id} with nonzero displacement"
            )
    return real


def collapsed_space_basis(graph: ColoredGraph) -> list[Realization]:
    """Spanning set of the collapsed realizations: 4 - 2k + 2c dimensions.

    One generator per lattice-kernel basis matrix (anchors at the origin) and
    two translation generators per connected component.
    """
    scan = _full_scan(graph)
    cmap = scan.component_map()
    ncomp = len(set(cmap.values())) if cmap else 0
    out = []
    for w in _lattice_kernel_basis(scan.images):
        out.append(Realization(_collapsed_points(graph, scan, w, {}), w))
    for comp in range(ncomp):
        for unit in ((1.0, 0.0), (0.0, 1.0)):
            p = np.zeros((graph.n, 2))
            for v in range(graph.n):
                if cmap[v] == comp:
                    p[v] = unit
            out.append(Realization(p, np.zeros((2, 2))))
    return out


# ---------------------------------------------------------------------------
# Faithful realizations of colored-Laman graphs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaithfulRealization:
    realization: Realization
    directions: DirectionAssignment
    statuses: tuple[EdgeStatus, ...]
    seed: int
    attempts: int


def _extended_system(
    graph: ColoredGraph, directions: DirectionAssignment, eid: int, extra: tuple[float, float]
) -> np.ndarray:
    doubled = graph.with_doubled(eid)
    copy_id = max(e.id for e in doubled.edges)
    dmap = dict(directions.d)
    dmap[copy_id] = extra
    return build_P_system(doubled, DirectionAssignment(dmap)).to_numpy()


def _rank(a: np.ndarray, tolerance: float) -> int:
    return kernel_float(a, tolerance)[0]


def faithful_realization(
    graph: ColoredGraph,
    seed: int = 0,
    retry_cap: int = DEFAULT_RETRY_CAP,
    tolerance: float = SOLVE_TOL,
    collapse_tolerance: float = COLLAPSE_TOL,
) -> FaithfulRealization:
    """Unique-up-to-normalization faithful realization of a colored-Laman graph.

    Directions are sampled from seeded uniform angles and accepted only if the
    sampled system has rank 2n + 1 and every doubled system, with a fresh
    direction on the copy, has rank 2n + 2 (the two genericity conditions).
    The kernel is then 3-dimensional; fixing p_1 at the origin, unit norm and
    a positive leading coordinate selects one element, which is verified to
    have no collapsed edge.
    """
    if not is_colored_laman(graph):
        raise DomainError("faithful_realization needs a colored-Laman graph")
    n = graph.n
    rng = random.Random(seed)
    for attempt in range(1, retry_cap + 1):
        directions = DirectionAssignment.sample(graph, rng)
        system = build_P_system(graph, directions).to_numpy()
        if _rank(system, tolerance) != 2 * n + 1:
            continue
        ok = True
        for e in graph.edges:
            t = rng.uniform(0.0, 2.0 * math.pi)
            ext = _extended_system(graph, directions, e.id, (math.cos(t), math.sin(t)))
            if _rank(ext, tolerance) != 2 * n + 2:
                ok = False
                break
        if not ok:
            continue

        _, kernel = kernel_float(system, tolerance)
        if kernel.shape[1] != 3:
            continue
        # intersect the kernel with {p_1 = 0}: a 1-dimensional line
        _, combo = kernel_float(kernel[0:2, :], 1e-12)
        if combo.shape[1] != 1:
            continue
        vec = kernel @ combo[:, 0]
        vec /= np.linalg.norm(vec)
        lead = np.flatnonzero(np.abs(vec) > 1e-9)
        if lead.size and vec[lead[0]] < 0:
            vec = -vec
        real = Realization.from_flat(vec, n)
        residual = float(np.max(np.abs(system @ vec))) if graph.m else 0.0
        if residual > tolerance * max(1.0, float(np.abs(system).max())):
            continue
        statuses = edge_status(graph, directions, real, collapse_tolerance)
        if any(s.collapsed for s in statuses):
            continue  # theorem says this cannot happen generically; resample
        return FaithfulRealization(real, directions, tuple(statuses), seed, attempt)
    raise GenericitySamplingError(
        "no generic direction sample produced a faithful realization",
        seed,
        retry_cap,
    )
