"""Graded-sparsity counts and matroids for colored graphs.

The count function f(E') = n' + rk' - c' (vertices spanned, cycle-image rank,
components of the edge-induced subgraph) is the rank function of a matroid on
the edges of a colored graph.  Everything in this module is built from it:

* independence under f (the "(1,1,k)" family: spanning trees plus k extra
  edges realizing k independent cycle images),
* independence under 2f via matroid union (the "(2,2,k)" family, equivalently
  edge-disjoint unions of two spanning (1,1,k)-graphs),
* independence under 2f - 1 on nonempty subsets (the "colored-Laman" family
  characterizing generic minimal rigidity), decided through edge doubling:
  a set is colored-Laman-sparse iff doubling any one of its edges leaves it
  (2,2,2)-sparse,
* circuits (minimal violations), Ross graphs (the fixed-lattice counts), and
  a certified exhaustive checker used to cross-validate all of the above.

Empty subsets have n' = m' = c' = rk' = 0 by convention; the Laman-style
count 2f - 1 is only ever tested on nonempty subsets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .colored_graph import (
    ClosedWalk,
    ColoredGraph,
    ColorVector,
    EdgeSubset,
    GainScan,
    fundamental_cycles,
    image_rank,
    rho_of_walk,
    scan_subset,
)
from .errors import BudgetError, DomainError, InternalConsistencyError

BRUTE_FORCE_LIMIT = 22  # 2^m subsets is the enumeration budget


@dataclass(frozen=True)
class CountReport:
    """Subset counts and the bounds every sparsity family is defined by."""

    n: int
    m: int
    c: int
    rk: int

    @property
    def f(self) -> int:
        return self.n + self.rk - self.c

    @property
    def bound222(self) -> int:
        return 2 * self.f

    @property
    def bound232(self) -> int:
        return 2 * self.f - 1


def _edge_tuples(graph: ColoredGraph, ids: Iterable[int]):
    for eid in sorted(ids):
        e = graph.edge(eid)
        yield e.id, e.tail, e.head, e.color


def count_report(subset: EdgeSubset) -> CountReport:
    scan = GainScan()
    m = 0
    for eid, t, h, c in _edge_tuples(subset.graph, subset.ids):
        scan.add(eid, t, h, c)
        m += 1
    return CountReport(
        n=len(scan.parent), m=m, c=scan.component_count(), rk=image_rank(scan.images)
    )


def f_value(subset: EdgeSubset) -> int:
    """Matroid rank bound n' + rk' - c' of an edge subset."""
    return count_report(subset).f


def is_f_independent(subset: EdgeSubset) -> bool:
    """Exact independence test: f has unit increments, so f(E') = |E'| decides."""
    return f_value(subset) == len(subset)


def is_11k(subset: EdgeSubset) -> tuple[bool, int]:
    """Is the subset a spanning tree plus k extra edges with k independent images?

    Returns (verdict, k).  The subset must span every vertex of the host graph
    and be connected; a one-vertex graph admits the empty spanning tree.
    """
    graph = subset.graph
    if not subset.ids:
        return (graph.n == 1, 0)
    rep = count_report(subset)
    if rep.n != graph.n or rep.c != 1:
        return (False, rep.rk)
    return (rep.m == rep.n - 1 + rep.rk, rep.rk)


@dataclass(frozen=True)
class Shape11kReport:
    """Topological shape of a rank-2 (1,1,2)-graph after leaf stripping.

    shape 1: two cycles sharing a single vertex (subdivided two-loop vertex);
    shape 2: two cycles joined by a path (loop at each end of an edge);
    shape 3: three internally disjoint paths between two vertices.
    """

    shape: int
    core_edges: frozenset[int]
    cycle1: ClosedWalk
    cycle2: ClosedWalk


def classify_11k_shape(subset: EdgeSubset) -> Shape11kReport:
    ok, k = is_11k(subset)
    if not ok or k != 2:
        raise DomainError("classify_11k_shape needs a (1,1,2)-graph")
    graph = subset.graph

    # iterated leaf removal down to the 2-core
    ids = set(subset.ids)
    deg: dict[int, int] = {}
    for eid in ids:
        e = graph.edge(eid)
        deg[e.tail] = deg.get(e.tail, 0) + 1
        deg[e.head] = deg.get(e.head, 0) + 1
    changed = True
    while changed:
        changed = False
        for eid in sorted(ids):
            e = graph.edge(eid)
            if e.tail != e.head and (deg[e.tail] == 1 or deg[e.head] == 1):
                ids.discard(eid)
                deg[e.tail] -= 1
                deg[e.head] -= 1
                changed = True

    cdeg: dict[int, int] = {}
    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in sorted(ids):
        e = graph.edge(eid)
        cdeg[e.tail] = cdeg.get(e.tail, 0) + 1
        cdeg[e.head] = cdeg.get(e.head, 0) + 1
        if e.tail == e.head:
            cdeg[e.tail] += 1  # loops count twice
        adj.setdefault(e.tail, []).append((e.head, eid))
        if e.tail != e.head:
            adj.setdefault(e.head, []).append((e.tail, eid))
    branch = sorted(v for v, d in cdeg.items() if d >= 3)

    if len(branch) == 1:
        shape = 1
    elif len(branch) == 2:
        # walk the degree-2 chains leaving one branch vertex; a chain coming
        # back to its start means a private cycle (dumbbell), otherwise all
        # three chains join the two branch vertices (theta).
        b = branch[0]
        self_returns = 0
        crossings = 0
        used: set[int] = set()
        for w, eid in sorted(adj[b]):
            if eid in used:
                continue
            used.add(eid)
            prev, cur = b, w
            while cur not in branch:
                nxt = [(x, f) for x, f in adj[cur] if f not in used]
                (cur_next, feid) = sorted(nxt)[0]
                used.add(feid)
                prev, cur = cur, cur_next
            if cur == b:
                self_returns += 1
            else:
                crossings += 1
        shape = 2 if self_returns else 3
        if shape == 3 and crossings != 3:
            raise InternalConsistencyError("theta core without three chains")
    else:
        raise InternalConsistencyError("2-core of a (1,1,2)-graph lost its shape")

    cycles = fundamental_cycles(subset)
    extras = [(eid, walk) for eid, walk in cycles]
    if len(extras) != 2:
        raise InternalConsistencyError("(1,1,2)-graph without two extra edges")
    (e1, c1), (e2, c2) = extras
    r1, r2 = rho_of_walk(c1), rho_of_walk(c2)
    if r1.g1 * r2.g2 - r1.g2 * r2.g1 == 0:
        raise InternalConsistencyError("fundamental images of a rank-2 graph collinear")
    return Shape11kReport(shape, frozenset(ids), c1, c2)


# ---------------------------------------------------------------------------
# Matroid union: independence under 2f via two-part augmenting paths.
# ---------------------------------------------------------------------------


class PartitionState:
    """Working partition of an independent set of the doubled matroid.

    Elements live in two parts, each independent under f.  Insertion follows
    the classic augmenting-path scheme: try both parts directly, otherwise
    search breadth-first through single-element exchanges until some part can
    absorb a displaced element.  Edge data may include virtual edges (used
    for doubling tests) registered via :meth:`register_edge`.
    """

    __slots__ = ("edata", "parts", "part_of")

    def __init__(self, graph: ColoredGraph | None = None):
        self.edata: dict[int, tuple[int, int, tuple[int, int]]] = {}
        if graph is not None:
            for e in graph.edges:
                self.edata[e.id] = (e.tail, e.head, (e.color.g1, e.color.g2))
        self.parts: tuple[set[int], set[int]] = (set(), set())
        self.part_of: dict[int, int] = {}

    def register_edge(self, eid: int, tail: int, head: int, color: tuple[int, int]):
        self.edata[eid] = (tail, head, color)

    def clone(self) -> "PartitionState":
        other = PartitionState()
        other.edata = self.edata
        other.parts = (set(self.parts[0]), set(self.parts[1]))
        other.part_of = dict(self.part_of)
        return other

    def _indep(self, ids: Iterable[int]) -> bool:
        scan = GainScan()
        m = 0
        for eid in ids:
            t, h, c = self.edata[eid]
            scan.add(eid, t, h, ColorVector(*c))
            m += 1
        f = len(scan.parent) + image_rank(scan.images) - scan.component_count()
        return f == m

    def try_insert(self, eid: int) -> bool:
        for r in (0, 1):
            if self._indep(self.parts[r] | {eid}):
                self.parts[r].add(eid)
                self.part_of[eid] = r
                return True
        # breadth-first search for an augmenting exchange chain
        parent: dict[int, tuple[int, int]] = {}
        visited = {eid}
        queue = deque([(eid, 0), (eid, 1)])
        while queue:
            x, r = queue.popleft()
            part = self.parts[r]
            with_x = part | {x}
            if self._indep(with_x):
                self._apply(x, r, parent)
                return True
            for y in sorted(part):
                if y in visited:
                    continue
                if self._indep(with_x - {y}):
                    visited.add(y)
                    parent[y] = (x, r)
                    queue.append((y, 1 - r))
        return False

    def _apply(self, x: int, r: int, parent: dict[int, tuple[int, int]]):
        while True:
            if x in self.part_of:
                self.parts[self.part_of[x]].discard(x)
            self.parts[r].add(x)
            self.part_of[x] = r
            if x not in parent:
                break
            x, r = parent[x]
        if not (self._indep(self.parts[0]) and self._indep(self.parts[1])):
            raise InternalConsistencyError("matroid-union augmentation broke a part")


def union_independent(
    subset: EdgeSubset,
) -> tuple[bool, tuple[frozenset[int], frozenset[int]] | None]:
    """Independence in the doubled matroid, with a partition witness.

    Inserts the edges in ascending id order; a set is independent exactly
    when every insertion lands, and the final parts are each f-independent.
    """
    state = PartitionState(subset.graph)
    for eid in subset.sorted_ids():
        if not state.try_insert(eid):
            return False, None
    return True, (frozenset(state.parts[0]), frozenset(state.parts[1]))


def is_222_sparse(graph: ColoredGraph) -> bool:
    """Does every nonempty subset satisfy m' <= 2 f(E')?"""
    return union_independent(EdgeSubset.full(graph))[0]


def is_222_graph(graph: ColoredGraph) -> bool:
    """(2,2,k)-graph: (2,2,.)-sparse with the full count m = 2n - 2 + 2k."""
    k = image_rank(scan_subset(EdgeSubset.full(graph)).images)
    if graph.m != 2 * graph.n - 2 + 2 * k:
        return False
    return is_222_sparse(graph)


@dataclass(frozen=True)
class Decomposition:
    part1: EdgeSubset
    part2: EdgeSubset


def decompose_two_11k(graph: ColoredGraph) -> Decomposition:
    """Split a (2,2,k)-graph into two edge-disjoint spanning (1,1,k)-graphs."""
    if not is_222_graph(graph):
        raise DomainError("decompose_two_11k needs a (2,2,k)-graph")
    k = image_rank(scan_subset(EdgeSubset.full(graph)).images)
    ok, parts = union_independent(EdgeSubset.full(graph))
    if not ok or parts is None:
        raise InternalConsistencyError("a (2,2,k)-graph must be union-independent")
    subsets = (EdgeSubset.of(graph, parts[0]), EdgeSubset.of(graph, parts[1]))
    for part in subsets:
        good, kk = is_11k(part)
        if not good or kk != k:
            raise InternalConsistencyError(
                "matroid-union parts failed the (1,1,k) certificate"
            )
    return Decomposition(*subsets)


# ---------------------------------------------------------------------------
# Colored-Laman sparsity via edge doubling.
# ---------------------------------------------------------------------------

_VIRTUAL = -1  # id reserved for the doubled copy in oracle queries


def _laman_sparse_state(graph: ColoredGraph, ids: Sequence[int]) -> PartitionState | None:
    """Partition state for the subset, or None if not even 2f-independent."""
    state = PartitionState(graph)
    for eid in ids:
        if not state.try_insert(eid):
            return None
    return state


def _doubling_ok(state: PartitionState, graph: ColoredGraph, ids: Iterable[int]) -> bool:
    for eid in ids:
        e = graph.edge(eid)
        probe = state.clone()
        probe.register_edge(_VIRTUAL, e.tail, e.head, (e.color.g1, e.color.g2))
        if not probe.try_insert(_VIRTUAL):
            return False
    return True


def laman_sparse_subset(graph: ColoredGraph, ids: Iterable[int]) -> bool:
    """Is the edge subset colored-Laman-sparse (m' <= 2f - 1 on nonempty sets)?

    Decided exactly through doubling: the subset is (2,3,2)-sparse iff for
    every edge e in it, the subset plus a parallel copy of e is 2f-sparse.
    """
    ordered = sorted(ids)
    state = _laman_sparse_state(graph, ordered)
    if state is None:
        return False
    return _doubling_ok(state, graph, ordered)


def is_colored_laman_sparse(graph: ColoredGraph) -> bool:
    return laman_sparse_subset(graph, graph.edge_ids())


def is_colored_laman(graph: ColoredGraph) -> bool:
    """Colored-Laman graph: m = 2n + 1 and colored-Laman-sparse."""
    if graph.m != 2 * graph.n + 1:
        return False
    return is_colored_laman_sparse(graph)


def max_laman_sparse_subset(graph: ColoredGraph) -> frozenset[int]:
    """Greedy basis of the colored-Laman matroid, edges tried in id order.

    All maximal sparse subsets share this size (matroid property); only the
    witness depends on the order.
    """
    chosen: list[int] = []
    state = PartitionState(graph)
    for eid in sorted(graph.edge_ids()):
        probe = state.clone()
        if not probe.try_insert(eid):
            continue
        if _doubling_ok(probe, graph, chosen + [eid]):
            chosen.append(eid)
            state = probe
    return frozenset(chosen)


@dataclass(frozen=True)
class CircuitReport:
    circuit: EdgeSubset
    counts: CountReport


def _is_zero_loop(graph: ColoredGraph, eid: int) -> bool:
    e = graph.edge(eid)
    return e.tail == e.head and e.color.g1 == 0 and e.color.g2 == 0


def find_laman_circuit(graph: ColoredGraph) -> CircuitReport:
    """Extract the minimal violation of colored-Laman sparsity.

    Grows a maximal sparse subset B greedily, picks the smallest edge left
    out, and keeps exactly the edges whose removal from B + e restores
    sparsity: that set is the unique circuit inside B + e and satisfies
    m' = 2f.  The one degenerate exception is a loop colored (0, 0): it is
    dependent on its own (m' = 1 against the bound 2f - 1 = -1) and forms a
    singleton circuit with m' = 2f + 1; the collapse theory still applies to
    it since its constraint row is identically zero.
    """
    if is_colored_laman_sparse(graph):
        raise DomainError("graph is colored-Laman-sparse; no circuit to find")
    basis = max_laman_sparse_subset(graph)
    extra = min(set(graph.edge_ids()) - basis)
    if _is_zero_loop(graph, extra):
        subset = EdgeSubset.of(graph, [extra])
        return CircuitReport(subset, count_report(subset))
    pool = sorted(basis | {extra})
    circuit = frozenset(
        e for e in pool if laman_sparse_subset(graph, [x for x in pool if x != e])
    )
    if extra not in circuit or not circuit:
        raise InternalConsistencyError("circuit extraction lost the witness edge")
    subset = EdgeSubset.of(graph, circuit)
    rep = count_report(subset)
    if rep.m != rep.bound222:
        raise InternalConsistencyError("extracted circuit misses m' = 2f")
    for e in sorted(circuit):
        if not laman_sparse_subset(graph, circuit - {e}):
            raise InternalConsistencyError("circuit is not edge-minimal")
    return CircuitReport(subset, rep)


# ---------------------------------------------------------------------------
# Ross graphs.
# ---------------------------------------------------------------------------

ROSS_LOOPS = ((1, 0), (0, 1), (1, 1))


def _ross_by_counts(graph: ColoredGraph) -> bool:
    if graph.m != 2 * graph.n - 2:
        return False
    report = brute_force_sparsity(graph, "ross")
    return report.sparse


def _ross_by_augmentation(graph: ColoredGraph) -> bool:
    if graph.n == 0 or graph.m != 2 * graph.n - 2:
        return False
    return is_colored_laman(graph.with_extra_loops(0, ROSS_LOOPS))


def is_ross(graph: ColoredGraph) -> bool:
    """Fixed-lattice rigidity counts, decided two ways and cross-checked.

    Route (a) checks m = 2n - 2 with m' <= 2n' - 2 everywhere and
    m' <= 2n' - 3 on rank-zero subsets; route (b) adds loops (1,0), (0,1),
    (1,1) at vertex 0 and asks for a colored-Laman graph.  Route (a) is an
    exhaustive check, so it only runs inside the enumeration budget.
    """
    by_loops = _ross_by_augmentation(graph)
    if graph.m <= BRUTE_FORCE_LIMIT:
        by_counts = _ross_by_counts(graph)
        if by_counts != by_loops:
            raise InternalConsistencyError(
                f"Ross routes disagree: counts={by_counts} loops={by_loops}"
            )
    return by_loops


# ---------------------------------------------------------------------------
# Exhaustive oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BruteForceReport:
    family: str
    sparse: bool
    violation: frozenset[int] | None
    counts: CountReport | None


def _violates(family: str, n: int, m: int, c: int, rk: int) -> bool:
    if family == "laman":
        return m > 2 * (n + rk - c) - 1
    if family == "222":
        return m > 2 * (n + rk - c)
    if family == "ross":
        return m > 2 * n - 2 or (rk == 0 and m > 2 * n - 3)
    raise DomainError(f"unknown sparsity family {family!r}")


def brute_force_sparsity(graph: ColoredGraph, family: str) -> BruteForceReport:
    """Check the family's count on every nonempty edge subset by enumeration.

    Runs a depth-first include/exclude search with an undoable gain
    union-find, stopping at the first violating subset.  Certified but
    exponential; refuses graphs beyond the 2^22-subset budget.
    """
    if family not in ("laman", "222", "ross"):
        raise DomainError(f"unknown sparsity family {family!r}")
    m = graph.m
    if m > BRUTE_FORCE_LIMIT:
        raise BudgetError(f"brute force limited to m <= {BRUTE_FORCE_LIMIT}, got {m}")

    edges = [(e.tail, e.head, e.color.g1, e.color.g2) for e in graph.edges]
    ids = [e.id for e in graph.edges]

    parent = list(range(graph.n))
    size = [1] * graph.n
    potx = [0] * graph.n
    poty = [0] * graph.n
    touched = [0] * graph.n  # how many chosen edges touch this vertex
    basis: list[tuple[int, int]] = []

    state = {"n": 0, "c": 0, "m": 0}
    chosen: list[int] = []
    found: list[frozenset[int]] = []

    def find(v: int) -> tuple[int, int, int]:
        px = py = 0
        while parent[v] != v:
            px += potx[v]
            py += poty[v]
            v = parent[v]
        return v, px, py

    def add_edge(idx: int) -> list:
        """Apply edge idx; returns an undo record."""
        t, h, g1, g2 = edges[idx]
        undo: list = []
        for v in (t, h) if t != h else (t,):
            touched[v] += 1
            if touched[v] == 1:
                state["n"] += 1
                state["c"] += 1
                undo.append(("vertex", v))
        state["m"] += 1
        rt, ptx, pty = find(t)
        rh, phx, phy = find(h)
        if rt == rh:
            ix, iy = g1 + ptx - phx, g2 + pty - phy
            if ix or iy:
                r = image_rank(basis)
                if r == 0 or (r == 1 and basis[0][0] * iy - basis[0][1] * ix != 0):
                    basis.append((ix, iy))
                    undo.append(("basis",))
        else:
            if size[rt] < size[rh]:
                rt, rh = rh, rt
                ptx, pty, phx, phy = phx, phy, ptx, pty
                t, h, g1, g2 = h, t, -g1, -g2
            # attach rh under rt with sigma(h) = sigma(t) + (g1, g2)
            parent[rh] = rt
            potx[rh] = g1 + ptx - phx
            poty[rh] = g2 + pty - phy
            size[rt] += size[rh]
            state["c"] -= 1
            undo.append(("union", rh, rt))
        return undo

    def undo_edge(idx: int, undo: list):
        t, h, _, _ = edges[idx]
        state["m"] -= 1
        for rec in reversed(undo):
            if rec[0] == "vertex":
                state["n"] -= 1
                state["c"] -= 1
            elif rec[0] == "basis":
                basis.pop()
            else:
                _, rh, rt = rec
                parent[rh] = rh
                potx[rh] = poty[rh] = 0
                size[rt] -= size[rh]
                state["c"] += 1
        for v in (t, h) if t != h else (t,):
            touched[v] -= 1

    def search(idx: int) -> bool:
        if idx == m:
            return False
        if search(idx + 1):  # exclude first: finds low-id violations early
            return True
        undo = add_edge(idx)
        chosen.append(idx)
        hit = _violates(family, state["n"], state["m"], state["c"], len(basis))
        if hit:
            found.append(frozenset(ids[i] for i in chosen))
        else:
            hit = search(idx + 1)
        chosen.pop()
        undo_edge(idx, undo)
        return hit

    if m and search(0):
        violation = found[0]
        rep = count_report(EdgeSubset.of(graph, violation))
        return BruteForceReport(family, False, violation, rep)
    return BruteForceReport(family, True, None, None)
