"""Generic rigidity decisions for periodic frameworks via their quotients.

The rigidity matrix of a realized colored framework has one row per edge in
the M222 filling pattern with the edge displacement eta substituted for the
generic pair; its kernel is the space of infinitesimal motions, which always
contains the 3-dimensional span of the two translations and one rotation.
A quotient graph is generically minimally rigid exactly when it has m = 2n+1
edges and the generic rank is 2n + 1, and that in turn happens exactly when
the graph is colored-Laman.  This module decides rigidity along both the
combinatorial and the randomized-rank route and insists that they agree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .colored_graph import ColoredGraph, EdgeSubset, scan_subset
from .direction_network import FaithfulRealization, faithful_realization
from .errors import DomainError, InternalConsistencyError
from .linear_rep import (
    FLOAT_TOL,
    PRIME,
    NaturalMatrix,
    RankReport,
    Realization,
    build_natural_matrix,
    kernel_float,
    modp_rank,
)
from .sparsity import (
    CircuitReport,
    find_laman_circuit,
    is_colored_laman,
    is_colored_laman_sparse,
    max_laman_sparse_subset,
)

COORD_RANGE = 1 << 20  # integer sampling window for exact-mode realizations

STATUS_MINIMAL = "generically_minimally_rigid"
STATUS_OVER = "generically_rigid_overconstrained"
STATUS_FLEXIBLE = "generically_flexible"


def rigidity_matrix(graph: ColoredGraph, realization: Realization) -> NaturalMatrix:
    """m x (2n+4) rigidity matrix at a concrete realization.

    Row for edge ij: -eta at the tail columns, +eta at the head columns
    (cancelling for loops), and g1*eta, g2*eta in the two lattice blocks;
    this is the M222 filling pattern with eta substituted for (a, b).
    """
    return build_natural_matrix(graph, "M232", realization=realization)


def _modp_rigidity_rows(
    graph: ColoredGraph, p_int: list[tuple[int, int]], lat: tuple[tuple[int, int], tuple[int, int]]
) -> list[list[int]]:
    n = graph.n
    rows = []
    for e in graph.edges:
        g1, g2 = e.color.g1, e.color.g2
        ex = p_int[e.head][0] + lat[0][0] * g1 + lat[0][1] * g2 - p_int[e.tail][0]
        ey = p_int[e.head][1] + lat[1][0] * g1 + lat[1][1] * g2 - p_int[e.tail][1]
        row = [0] * (2 * n + 4)
        row[2 * e.tail] -= ex
        row[2 * e.tail + 1] -= ey
        row[2 * e.head] += ex
        row[2 * e.head + 1] += ey
        row[2 * n] += g1 * ex
        row[2 * n + 1] += g1 * ey
        row[2 * n + 2] += g2 * ex
        row[2 * n + 3] += g2 * ey
        rows.append([x % PRIME for x in row])
    return rows


def generic_rigidity_rank(
    graph: ColoredGraph, trials: int = 3, seed: int = 0, mode: str = "fp"
) -> RankReport:
    """Rank of the rigidity matrix maximized over random realizations.

    Exact mode samples integer points and lattice entries and eliminates over
    F_p; float mode samples in [-1, 1] and thresholds singular values.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        if mode == "fp":
            p_int = [
                (rng.randint(-COORD_RANGE, COORD_RANGE), rng.randint(-COORD_RANGE, COORD_RANGE))
                for _ in range(graph.n)
            ]
            lat = (
                (rng.randint(-COORD_RANGE, COORD_RANGE), rng.randint(-COORD_RANGE, COORD_RANGE)),
                (rng.randint(-COORD_RANGE, COORD_RANGE), rng.randint(-COORD_RANGE, COORD_RANGE)),
            )
            best = max(best, modp_rank(_modp_rigidity_rows(graph, p_int, lat)))
        elif mode == "float":
            real = Realization(
                np.array([[rng.uniform(-1, 1), rng.uniform(-1, 1)] for _ in range(graph.n)]),
                np.array([[rng.uniform(-1, 1) for _ in range(2)] for _ in range(2)]),
            )
            rank, _ = kernel_float(rigidity_matrix(graph, real), FLOAT_TOL)
            best = max(best, rank)
        else:
            raise DomainError(f"unknown mode {mode!r}")
    return RankReport("M232", best, mode, trials, seed)


def rationalized_rigidity_rank(
    graph: ColoredGraph, realization: Realization, scale: int = COORD_RANGE
) -> int:
    """Exact F_p rank at the nearest integer realization to a float one."""
    span = max(realization.scale(), 1e-12)
    factor = scale / span
    p_int = [
        (round(float(x) * factor), round(float(y) * factor)) for x, y in realization.p
    ]
    lat = tuple(
        (round(float(realization.L[i][0]) * factor), round(float(realization.L[i][1]) * factor))
        for i in range(2)
    )
    return modp_rank(_modp_rigidity_rows(graph, p_int, lat))


@dataclass(frozen=True)
class RigidityVerdict:
    status: str
    rank: int
    dof: int
    n: int
    m: int
    witness: FaithfulRealization | None
    circuit: CircuitReport | None


def decide_rigidity(
    graph: ColoredGraph, seed: int = 0, attach_witness: bool = True
) -> RigidityVerdict:
    """Full rigidity decision with combinatorial/numeric cross-check.

    The maximal colored-Laman-sparse subset size must equal the generic
    rigidity rank (the matrix represents the same matroid); disagreement
    raises.  Rigid verdicts require that size to be 2n + 1, i.e. a spanning
    colored-Laman subgraph; minimally rigid additionally means m = 2n + 1.
    A faithful-realization witness is attached to minimally rigid verdicts
    and a sparsity-violating circuit to every non-sparse input.
    """
    n, m = graph.n, graph.m
    basis = max_laman_sparse_subset(graph)
    report = generic_rigidity_rank(graph, trials=3, seed=seed)
    if report.rank != len(basis):
        raise InternalConsistencyError(
            f"combinatorial rank {len(basis)} != generic matrix rank {report.rank}"
        )
    rigid = len(basis) == 2 * n + 1
    if rigid:
        status = STATUS_MINIMAL if m == 2 * n + 1 else STATUS_OVER
    else:
        status = STATUS_FLEXIBLE
    dof = (2 * n + 4) - report.rank - 3
    witness = None
    if attach_witness and status == STATUS_MINIMAL:
        witness, _ = rigid_realization_certificate(graph, seed=seed)
    circuit = None
    if not is_colored_laman_sparse(graph):
        circuit = find_laman_circuit(graph)
    return RigidityVerdict(status, report.rank, dof, n, m, witness, circuit)


def rigid_realization_certificate(
    graph: ColoredGraph, seed: int = 0
) -> tuple[FaithfulRealization, RankReport]:
    """Faithful realization whose rigidity matrix certifies minimal rigidity.

    Verifies rank 2n + 1 in floating point and, after rationalizing the
    realization, over F_p; also checks that deleting any single row drops the
    rank to 2n, which is what makes the rigidity minimal.
    """
    if not is_colored_laman(graph):
        raise DomainError("certificate needs a colored-Laman graph")
    n = graph.n
    fr = faithful_realization(graph, seed=seed)
    mat = rigidity_matrix(graph, fr.realization)
    rank, _ = kernel_float(mat, FLOAT_TOL)
    if rank != 2 * n + 1:
        raise InternalConsistencyError(
            f"rigidity matrix rank {rank} at a faithful realization, expected {2 * n + 1}"
        )
    exact = rationalized_rigidity_rank(graph, fr.realization)
    if exact != 2 * n + 1:
        raise InternalConsistencyError("rationalized realization lost rank")
    dense = mat.to_numpy()
    for i in range(dense.shape[0]):
        sub = np.delete(dense, i, axis=0)
        r, _ = kernel_float(sub, FLOAT_TOL)
        if r != 2 * n:
            raise InternalConsistencyError(
                f"row {i} deletion gave rank {r}, expected {2 * n}"
            )
    return fr, RankReport("M232", rank, "float", 1, seed)


# ---------------------------------------------------------------------------
# Rigidity on the line: Z-colored graphs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneDVerdict:
    status: str
    rank: int
    n: int
    m: int

    @property
    def rigid(self) -> bool:
        return self.status != STATUS_FLEXIBLE


def _oned_rows(graph: ColoredGraph, xs: list[int], lat: int) -> list[list[int]]:
    n = graph.n
    rows = []
    for e in graph.edges:
        eta = xs[e.head] + e.color.g1 * lat - xs[e.tail]
        row = [0] * (n + 1)
        row[e.tail] -= eta
        row[e.head] += eta
        row[n] += e.color.g1 * eta
        rows.append([x % PRIME for x in row])
    return rows


def is_1d_rigid(graph: ColoredGraph, trials: int = 3, seed: int = 0) -> OneDVerdict:
    """Generic rigidity of a Z-colored quotient (second color must be zero).

    Combinatorial route: a spanning connected subgraph with a cycle of
    nonzero image, i.e. a spanning (1,1,1)-subgraph.  Numeric route: the
    m x (n+1) matrix with entries from eta = x_j + g*L - x_i at random
    integer (x, L) has rank n.  Both must agree; minimal rigidity also
    needs m = n.
    """
    if any(e.color.g2 for e in graph.edges):
        raise DomainError("1d decision needs colors with zero second component")
    scan = scan_subset(EdgeSubset.full(graph))
    spans = len(scan.parent) == graph.n and graph.n > 0
    connected = spans and scan.component_count() == 1
    has_cycle = any(v.g1 for v in scan.images)
    combinatorial = connected and has_cycle

    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        xs = [rng.randint(-COORD_RANGE, COORD_RANGE) for _ in range(graph.n)]
        lat = rng.randint(-COORD_RANGE, COORD_RANGE)
        best = max(best, modp_rank(_oned_rows(graph, xs, lat)))
    numeric = best == graph.n
    if combinatorial != numeric:
        raise InternalConsistencyError(
            f"1d routes disagree: combinatorial={combinatorial} numeric={numeric}"
        )
    if not combinatorial:
        return OneDVerdict(STATUS_FLEXIBLE, best, graph.n, graph.m)
    status = STATUS_MINIMAL if graph.m == graph.n else STATUS_OVER
    return OneDVerdict(status, best, graph.n, graph.m)
