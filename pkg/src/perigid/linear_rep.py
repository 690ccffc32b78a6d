"""Natural representation matrices and randomized rank decisions.

Two matrix families realize the sparsity matroids linearly:

* M112: one row per edge, one column per vertex plus two lattice columns.
  Row for edge ij: -a at i, +a at j, (g1*a, g2*a) in the lattice block.
  Its generic rank equals the count function f on every edge set.
* M222: two columns per vertex plus four lattice columns, the same pattern
  with an independent pair (a, b) per edge.  Generic rank m on exactly the
  2f-sparse edge sets.

The rigidity matrix (kind M232) shares the M222 filling pattern with
(a, b) replaced by the edge displacement of a concrete realization; it is
assembled in :mod:`perigid.rigidity` and :mod:`perigid.direction_network`.

Generic rank is decided by sampling: entries are drawn uniformly from the
prime field F_p with p = 2^61 - 1 and eliminated exactly, so a full-rank
sample certifies the generic rank while a deficient one is wrong with
probability at most m/p per trial.  Floating-point ranks (needed for actual
realizations) threshold singular values relative to the largest one; the
exact mode is the arbiter whenever the two disagree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .colored_graph import ColoredGraph, EdgeSubset, fundamental_cycles, rho_of_walk
from .errors import DomainError, StructuralError
from .sparsity import is_11k

PRIME = (1 << 61) - 1
DEFAULT_TRIALS = 3
FLOAT_TOL = 1e-9

KINDS = ("M112", "M222", "M232")


@dataclass(frozen=True)
class Realization:
    """Points p_i in the plane plus a 2x2 lattice matrix L.

    Flattened layout (length 2n + 4): x_1, y_1, ..., x_n, y_n followed by
    the first lattice column then the second.
    """

    p: np.ndarray  # (n, 2)
    L: np.ndarray  # (2, 2)

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(-1, 2))
        object.__setattr__(self, "L", np.asarray(self.L, dtype=float).reshape(2, 2))

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.p.reshape(-1), self.L.T.reshape(-1)])

    @classmethod
    def from_flat(cls, vec: Sequence[float], n: int) -> "Realization":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (2 * n + 4,):
            raise StructuralError(f"flat realization must have length {2 * n + 4}")
        return cls(vec[: 2 * n].reshape(n, 2), vec[2 * n :].reshape(2, 2).T)

    def eta(self, tail: int, head: int, color: Sequence[int]) -> np.ndarray:
        """Displacement p_head + L*color - p_tail."""
        g = np.asarray(color, dtype=float)
        return self.p[head] + self.L @ g - self.p[tail]

    def scale(self) -> float:
        """Size reference for relative thresholds: point spread and lattice norm."""
        spread = 0.0
        if self.n:
            spread = float(np.max(np.linalg.norm(self.p - self.p[0], axis=1)))
        return max(spread, float(np.linalg.norm(self.L)))


@dataclass(frozen=True)
class GenericAssignment:
    """Independent scalar(s) per edge id, in F_p or as floats."""

    a: dict[int, int | float]
    b: dict[int, int | float] | None
    mode: str  # "fp" | "float"
    seed: int | None = None

    def require_b(self):
        if self.b is None:
            raise StructuralError("this matrix kind needs (a, b) pairs per edge")


def sample_assignment(
    graph: ColoredGraph,
    *,
    pairs: bool,
    mode: str = "fp",
    rng: random.Random | None = None,
    seed: int | None = None,
) -> GenericAssignment:
    """Draw one (or a pair of) nonzero generic value(s) per edge."""
    if rng is None:
        rng = random.Random(seed)

    def draw():
        if mode == "fp":
            return rng.randrange(1, PRIME)
        return rng.choice((-1, 1)) * rng.uniform(0.25, 1.25)

    a = {e.id: draw() for e in graph.edges}
    b = {e.id: draw() for e in graph.edges} if pairs else None
    return GenericAssignment(a, b, mode, seed)


@dataclass(frozen=True)
class NaturalMatrix:
    """Dense row-per-edge matrix in one of the three filling patterns."""

    kind: str
    mode: str
    n: int
    rows: tuple[tuple, ...]
    row_ids: tuple[int, ...]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return self.n + 2 if self.kind == "M112" else 2 * self.n + 4

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(self.nrows, self.ncols)

    def submatrix(self, row_ids=None, cols=None) -> "NaturalMatrix":
        keep = set(self.row_ids if row_ids is None else row_ids)
        rows, ids = [], []
        for rid, row in zip(self.row_ids, self.rows):
            if rid in keep:
                ids.append(rid)
                rows.append(row if cols is None else tuple(row[c] for c in cols))
        return NaturalMatrix(self.kind, self.mode, self.n, tuple(rows), tuple(ids))


def _m112_row(n, e, a, mode):
    row = [0] * (n + 2)
    row[e.tail] -= a
    row[e.head] += a
    row[n] += e.color.g1 * a
    row[n + 1] += e.color.g2 * a
    if mode == "fp":
        row = [x % PRIME for x in row]
    return tuple(row)


def _m222_row(n, e, a, b, mode):
    row = [0] * (2 * n + 4)
    row[2 * e.tail] -= a
    row[2 * e.tail + 1] -= b
    row[2 * e.head] += a
    row[2 * e.head + 1] += b
    row[2 * n] += e.color.g1 * a
    row[2 * n + 1] += e.color.g1 * b
    row[2 * n + 2] += e.color.g2 * a
    row[2 * n + 3] += e.color.g2 * b
    if mode == "fp":
        row = [x % PRIME for x in row]
    return tuple(row)


def build_natural_matrix(
    graph: ColoredGraph,
    kind: str,
    assignment: GenericAssignment | None = None,
    realization: Realization | None = None,
) -> NaturalMatrix:
    """Assemble the matrix of the requested kind.

    M112/M222 need a generic assignment; M232 substitutes the displacements
    of a realization for the (a, b) pairs.  Loop rows cancel in the vertex
    block and keep only lattice entries.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown matrix kind {kind!r}")
    n = graph.n
    if kind == "M232":
        if realization is None:
            raise StructuralError("M232 needs a realization")
        rows = []
        for e in graph.edges:
            ax, bx = realization.eta(e.tail, e.head, tuple(e.color))
            rows.append(_m222_row(n, e, float(ax), float(bx), "float"))
        return NaturalMatrix("M232", "float", n, tuple(rows), graph.edge_ids())

    if assignment is None:
        raise StructuralError(f"{kind} needs a generic assignment")
    missing = [e.id for e in graph.edges if e.id not in assignment.a]
    if missing:
        raise StructuralError(f"assignment misses edges {missing}")
    if kind == "M112":
        rows = tuple(
            _m112_row(n, e, assignment.a[e.id], assignment.mode) for e in graph.edges
        )
        return NaturalMatrix("M112", assignment.mode, n, rows, graph.edge_ids())
    assignment.require_b()
    rows = tuple(
        _m222_row(n, e, assignment.a[e.id], assignment.b[e.id], assignment.mode)
        for e in graph.edges
    )
    return NaturalMatrix("M222", assignment.mode, n, rows, graph.edge_ids())


# ---------------------------------------------------------------------------
# Exact linear algebra over F_p.
# ---------------------------------------------------------------------------


def modp_rank(rows: Sequence[Sequence[int]], p: int = PRIME) -> int:
    """Row rank by Gaussian elimination over F_p."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] % p), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        prow = mat[rank]
        for i in range(rank + 1, len(mat)):
            f = mat[i][col] * inv % p
            if f:
                row = mat[i]
                for j in range(col, ncols):
                    row[j] = (row[j] - f * prow[j]) % p
        rank += 1
        if rank == len(mat):
            break
    return rank


def modp_det(rows: Sequence[Sequence[int]], p: int = PRIME) -> int:
    """Determinant of a square matrix over F_p."""
    mat = [[x % p for x in r] for r in rows]
    size = len(mat)
    if any(len(r) != size for r in mat):
        raise StructuralError("determinant needs a square matrix")
    det = 1
    for col in range(size):
        piv = next((i for i in range(col, size) if mat[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det % p
        det = det * mat[col][col] % p
        inv = pow(mat[col][col], p - 2, p)
        for i in range(col + 1, size):
            f = mat[i][col] * inv % p
            if f:
                for j in range(col, size):
                    mat[i][j] = (mat[i][j] - f * mat[col][j]) % p
    return det


@dataclass(frozen=True)
class RankReport:
    kind: str
    rank: int
    mode: str
    trials: int
    seed: int


def rank_mod_p(
    graph: ColoredGraph,
    kind: str = "M222",
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> RankReport:
    """Generic rank of M112/M222 via random F_p samples; max over trials.

    A trial underestimates the generic rank with probability at most m/p,
    so the reported maximum is exact except with negligible probability;
    deterministic for a fixed seed.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if kind not in ("M112", "M222"):
        raise DomainError("rank_mod_p samples M112 or M222")
    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        asn = sample_assignment(graph, pairs=(kind == "M222"), mode="fp", rng=rng)
        mat = build_natural_matrix(graph, kind, asn)
        best = max(best, modp_rank(mat.rows))
    return RankReport(kind, best, "fp", trials, seed)


# ---------------------------------------------------------------------------
# Floating-point rank / kernel.
# ---------------------------------------------------------------------------


def kernel_float(
    matrix: NaturalMatrix | np.ndarray, tolerance: float = FLOAT_TOL
) -> tuple[int, np.ndarray]:
    """Numerical rank and orthonormal kernel basis (columns) of a real matrix.

    Orthogonal elimination via SVD; singular values below
    tolerance * (largest singular value) count as zero.
    """
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    a = matrix.to_numpy() if isinstance(matrix, NaturalMatrix) else np.asarray(matrix, float)
    if a.ndim != 2:
        raise StructuralError("kernel_float needs a 2d matrix")
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return 0, np.eye(cols)
    _, svals, vt = np.linalg.svd(a)
    cutoff = tolerance * (svals[0] if len(svals) else 0.0)
    rank = int(np.sum(svals > cutoff))
    return rank, vt[rank:].T


# ---------------------------------------------------------------------------
# Determinant formulas for the M112 minors.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinorCheck:
    label: str
    determinant: int | float
    formula: int | float
    ok: bool


@dataclass(frozen=True)
class DetFormulaReport:
    instance: bool  # graph is a (1,1,k)-graph of the size-matching k
    k: int
    checks: tuple[MinorCheck, ...]

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _det(rows, mode):
    if mode == "fp":
        return modp_det(rows)
    return float(np.linalg.det(np.array(rows, dtype=float)))


def _matches(det, formula, mode, scale):
    if mode == "fp":
        return det == formula % PRIME or det == -formula % PRIME
    return min(abs(det - formula), abs(det + formula)) <= 1e-10 * max(scale, 1e-30)


def verify_determinant_formulas(
    graph: ColoredGraph, kind: str = "M112", assignment: GenericAssignment | None = None
) -> DetFormulaReport:
    """Compare designated square M112 minors against their closed forms.

    With m = n - 1 + k and k the cycle-image rank, the minor dropping one
    vertex column and 2 - k lattice columns has determinant
    +-(image factor) * product(a_e): the factor is 1 for trees, a component
    t_q of the single cycle image for k = 1 (q the kept lattice column), and
    the 2x2 determinant of the two cycle images for k = 2.  Graphs that are
    not (1,1,k) give identically zero determinants.
    """
    if kind != "M112":
        raise DomainError("determinant formulas are stated for M112")
    subset = EdgeSubset.full(graph)
    ok, k = is_11k(subset)
    n, m = graph.n, graph.m
    if m != n - 1 + k:
        raise DomainError(f"need m = n - 1 + k, got n={n} m={m} k={k}")
    if assignment is None:
        assignment = sample_assignment(graph, pairs=False, mode="fp", seed=0)
    mat = build_natural_matrix(graph, "M112", assignment)
    mode = assignment.mode

    prod_a = 1
    for e in graph.edges:
        prod_a = prod_a * assignment.a[e.id] % PRIME if mode == "fp" else prod_a * assignment.a[e.id]
    scale = abs(prod_a) if mode == "float" else 0

    images = [rho_of_walk(w) for _, w in fundamental_cycles(subset)]
    cols_all = list(range(n + 2))
    drop_vertex = 0  # any vertex column works; fixed for determinism

    checks = []
    if k == 0:
        cols = [c for c in cols_all if c not in (drop_vertex, n, n + 1)]
        det = _det([tuple(r[c] for c in cols) for r in mat.rows], mode)
        formula = prod_a if ok else 0
        checks.append(MinorCheck("drop L1 L2", det, formula, _matches(det, formula, mode, scale)))
    elif k == 1:
        t = images[0] if ok else None
        for q, dropped in ((1, n + 1), (2, n)):
            cols = [c for c in cols_all if c not in (drop_vertex, dropped)]
            det = _det([tuple(r[c] for c in cols) for r in mat.rows], mode)
            tq = (t.g1 if q == 1 else t.g2) if ok else 0
            formula = tq * prod_a
            qscale = scale * max(1, abs(tq)) if mode == "float" else 0
            checks.append(
                MinorCheck(f"keep L{q}", det, formula, _matches(det, formula, mode, qscale))
            )
    else:
        cols = [c for c in cols_all if c != drop_vertex]
        det = _det([tuple(r[c] for c in cols) for r in mat.rows], mode)
        if ok:
            t1, t2 = images
            cross = t1.g1 * t2.g2 - t1.g2 * t2.g1
        else:
            cross = 0
        formula = cross * prod_a
        fscale = scale * max(1, abs(cross)) if mode == "float" else 0
        checks.append(
            MinorCheck("full L block", det, formula, _matches(det, formula, mode, fscale))
        )
    return DetFormulaReport(ok, k, tuple(checks))


def dump_matrix(matrix: NaturalMatrix) -> str:
    """Plain text dump: header line then one space-separated row per line."""
    out = [f"mat {matrix.nrows} {matrix.ncols} {matrix.mode}"]
    for row in matrix.rows:
        out.append(" ".join(repr(x) if matrix.mode == "float" else str(x) for x in row))
    return "\n".join(out) + "\n"
