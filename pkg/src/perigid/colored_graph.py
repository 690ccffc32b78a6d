"""Z^2-colored multigraphs and their cycle-space invariants.

A colored graph is a finite directed multigraph with an element of Z^2 (the
"color") on every edge.  It is the finite quotient description of an infinite
plane-periodic graph: vertices stand for translation orbits, and the color of
an edge records which translate of the head representative the edge reaches.
Everything downstream (sparsity counts, matroids, direction networks,
rigidity) operates on these quotient objects.

The key invariant is the map sending a closed walk to the signed sum of its
edge colors.  Its image generates a subgroup of Z^2 whose rank (0, 1 or 2)
drives all the counting formulas in :mod:`perigid.sparsity`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import gcd
from typing import Iterable, NamedTuple, Sequence

from .errors import MultiplicityWarning, StructuralError

MAX_PARALLEL = 6  # copies of an edge any sparse graph can use
MAX_LOOPS = 4  # self-loops per vertex, same reasoning


class ColorVector(NamedTuple):
    """Element of Z^2: an edge color, a cycle image, or a vertex potential."""

    g1: int
    g2: int

    def __neg__(self) -> "ColorVector":
        return ColorVector(-self.g1, -self.g2)

    def plus(self, other: Sequence[int]) -> "ColorVector":
        return ColorVector(self.g1 + other[0], self.g2 + other[1])

    def minus(self, other: Sequence[int]) -> "ColorVector":
        return ColorVector(self.g1 - other[0], self.g2 - other[1])


ZERO = ColorVector(0, 0)


def _color(value: Sequence[int]) -> ColorVector:
    g1, g2 = value
    return ColorVector(int(g1), int(g2))


@dataclass(frozen=True)
class ColoredEdge:
    """Directed edge with a stable id; parallel copies carry distinct ids."""

    id: int
    tail: int
    head: int
    color: ColorVector

    def reversed(self) -> "ColoredEdge":
        return ColoredEdge(self.id, self.head, self.tail, -self.color)


@dataclass(frozen=True)
class ColoredGraph:
    """Finite directed multigraph with Z^2 colors; immutable after build."""

    n: int
    edges: tuple[ColoredEdge, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for e in self.edges:
            if not (0 <= e.tail < self.n and 0 <= e.head < self.n):
                raise StructuralError(
                    f"edge {e.id}: endpoint out of range [0, {self.n})"
                )
            if e.id in seen:
                raise StructuralError(f"duplicate edge id {e.id}")
            seen.add(e.id)
        self._warn_multiplicity()
        object.__setattr__(self, "_by_id", {e.id: e for e in self.edges})

    def _warn_multiplicity(self):
        pairs: dict[tuple[int, int], int] = {}
        loops: dict[int, int] = {}
        for e in self.edges:
            if e.tail == e.head:
                loops[e.tail] = loops.get(e.tail, 0) + 1
            else:
                key = (min(e.tail, e.head), max(e.tail, e.head))
                pairs[key] = pairs.get(key, 0) + 1
        bad_pairs = [k for k, v in pairs.items() if v > MAX_PARALLEL]
        bad_loops = [v for v, c in loops.items() if c > MAX_LOOPS]
        if bad_pairs or bad_loops:
            warnings.warn(
                "multiplicity exceeds the 6-parallel/4-loop ground set; "
                "excess copies are always dependent "
                f"(pairs={bad_pairs}, loop vertices={bad_loops})",
                MultiplicityWarning,
                stacklevel=3,
            )

    @classmethod
    def build(
        cls, n: int, edges: Iterable[tuple[int, int, Sequence[int]]]
    ) -> "ColoredGraph":
        """Construct from (tail, head, (g1, g2)) triples; ids run 0..m-1."""
        built = tuple(
            ColoredEdge(i, int(t), int(h), _color(c))
            for i, (t, h, c) in enumerate(edges)
        )
        return cls(n, built)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge(self, eid: int) -> ColoredEdge:
        return self._by_id[eid]

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    # -- transformations (used by the invariance suite and by doubling) -----

    def with_reversed(self, ids: Iterable[int]) -> "ColoredGraph":
        """Reverse the orientation of selected edges while negating colors."""
        flip = set(ids)
        return ColoredGraph(
            self.n,
            tuple(e.reversed() if e.id in flip else e for e in self.edges),
        )

    def with_potential(self, mu: Sequence[Sequence[int]]) -> "ColoredGraph":
        """Recolor by a vertex potential: color += mu[head] - mu[tail]."""
        if len(mu) != self.n:
            raise StructuralError("potential must assign one Z^2 value per vertex")
        pots = [_color(v) for v in mu]
        return ColoredGraph(
            self.n,
            tuple(
                ColoredEdge(
                    e.id, e.tail, e.head, e.color.plus(pots[e.head]).minus(pots[e.tail])
                )
                for e in self.edges
            ),
        )

    def with_relabeled(self, perm: Sequence[int]) -> "ColoredGraph":
        """Relabel vertices: vertex v becomes perm[v]."""
        if sorted(perm) != list(range(self.n)):
            raise StructuralError("perm must be a permutation of the vertices")
        return ColoredGraph(
            self.n,
            tuple(
                ColoredEdge(e.id, perm[e.tail], perm[e.head], e.color)
                for e in self.edges
            ),
        )

    def with_doubled(self, eid: int, copy_id: int | None = None) -> "ColoredGraph":
        """Append a parallel copy of edge `eid` with the same color."""
        e = self.edge(eid)
        if copy_id is None:
            copy_id = max((x.id for x in self.edges), default=-1) + 1
        return ColoredGraph(
            self.n, self.edges + (ColoredEdge(copy_id, e.tail, e.head, e.color),)
        )

    def with_extra_loops(
        self, vertex: int, colors: Iterable[Sequence[int]]
    ) -> "ColoredGraph":
        base = max((x.id for x in self.edges), default=-1) + 1
        extra = tuple(
            ColoredEdge(base + i, vertex, vertex, _color(c))
            for i, c in enumerate(colors)
        )
        return ColoredGraph(self.n, self.edges + extra)

    def induced(self, ids: Iterable[int]) -> tuple["ColoredGraph", dict[int, int]]:
        """Edge-induced subgraph, vertices reindexed; edge ids preserved.

        Returns the subgraph and the old->new vertex map.
        """
        chosen = [self.edge(i) for i in sorted(ids)]
        verts = sorted({v for e in chosen for v in (e.tail, e.head)})
        vmap = {v: i for i, v in enumerate(verts)}
        sub = ColoredGraph(
            len(verts),
            tuple(
                ColoredEdge(e.id, vmap[e.tail], vmap[e.head], e.color) for e in chosen
            ),
        )
        return sub, vmap


@dataclass(frozen=True)
class EdgeSubset:
    """A set of edge ids of a host graph; subgraphs here are edge-induced."""

    graph: ColoredGraph
    ids: frozenset[int]

    def __post_init__(self):
        known = set(self.graph.edge_ids())
        if not set(self.ids) <= known:
            raise StructuralError("subset references unknown edge ids")
        object.__setattr__(self, "ids", frozenset(self.ids))

    @classmethod
    def full(cls, graph: ColoredGraph) -> "EdgeSubset":
        return cls(graph, frozenset(graph.edge_ids()))

    @classmethod
    def of(cls, graph: ColoredGraph, ids: Iterable[int]) -> "EdgeSubset":
        return cls(graph, frozenset(ids))

    def sorted_ids(self) -> list[int]:
        return sorted(self.ids)

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class ClosedWalk:
    """Closed walk given as (edge id, forward?) steps; consecutive steps chain."""

    graph: ColoredGraph
    steps: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        if not self.steps:
            raise StructuralError("closed walk needs at least one step")
        cur = self.start_vertex()
        for eid, forward in self.steps:
            e = self.graph.edge(eid)
            a, b = (e.tail, e.head) if forward else (e.head, e.tail)
            if a != cur:
                raise StructuralError(
                    f"walk breaks at edge {eid}: expected to leave {cur}, edge leaves {a}"
                )
            cur = b
        if cur != self.start_vertex():
            raise StructuralError("walk does not return to its start vertex")

    def start_vertex(self) -> int:
        eid, forward = self.steps[0]
        e = self.graph.edge(eid)
        return e.tail if forward else e.head


def rho_of_walk(walk: ClosedWalk) -> ColorVector:
    """Signed color sum over a closed walk: forward edges +, backward edges -.

    Reversing the traversal negates the result; the image in Z^2 is what the
    rank computations below consume.
    """
    g1 = g2 = 0
    for eid, forward in walk.steps:
        c = walk.graph.edge(eid).color
        if forward:
            g1 += c.g1
            g2 += c.g2
        else:
            g1 -= c.g1
            g2 -= c.g2
    return ColorVector(g1, g2)


# ---------------------------------------------------------------------------
# Gain union-find: the workhorse for counts, rank and potentials.
# ---------------------------------------------------------------------------


class GainScan:
    """Union-find with Z^2 potentials over a list of colored edges.

    Feeding every edge of a subset through :meth:`add` yields, in one pass:
    the spanned vertices, the connected components, a potential per vertex
    (signed color sum along a forest path to its component root) and the
    images of all fundamental cycles.
    """

    __slots__ = ("parent", "pot", "rank", "images", "tree_edges")

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.pot: dict[int, ColorVector] = {}
        self.rank: dict[int, int] = {}
        self.images: list[ColorVector] = []
        self.tree_edges: list[int] = []

    def ensure_vertex(self, v: int):
        if v not in self.parent:
            self.parent[v] = v
            self.pot[v] = ZERO
            self.rank[v] = 0

    def find(self, v: int) -> tuple[int, ColorVector]:
        """Root of v's component and the potential of v relative to the root."""
        parent, pot = self.parent, self.pot
        chain = []
        while parent[v] != v:
            chain.append(v)
            v = parent[v]
        root = v
        acc = ZERO
        for u in reversed(chain):
            acc = acc.plus(pot[u])
            parent[u] = root
            pot[u] = acc
        if chain:
            return root, pot[chain[0]]
        return root, ZERO

    def add(self, eid: int, tail: int, head: int, color: ColorVector):
        """Insert one edge; records either a tree edge or a cycle image."""
        self.ensure_vertex(tail)
        self.ensure_vertex(head)
        rt, pt = self.find(tail)
        rh, ph = self.find(head)
        if rt == rh:
            self.images.append(color.plus(pt).minus(ph))
            return
        self.tree_edges.append(eid)
        # want sigma(head) = sigma(tail) + color
        if self.rank[rt] < self.rank[rh]:
            self.parent[rt] = rh
            self.pot[rt] = ph.minus(pt).minus(color)
        else:
            self.parent[rh] = rt
            self.pot[rh] = color.plus(pt).minus(ph)
            if self.rank[rt] == self.rank[rh]:
                self.rank[rt] += 1

    # -- results ------------------------------------------------------------

    def spanned(self) -> list[int]:
        return sorted(self.parent)

    def component_count(self) -> int:
        return sum(1 for v in self.parent if self.parent[v] == v)

    def component_map(self) -> dict[int, int]:
        """Vertex -> component index; components numbered by min vertex."""
        roots: dict[int, list[int]] = {}
        for v in self.parent:
            roots.setdefault(self.find(v)[0], []).append(v)
        ordered = sorted(roots.values(), key=min)
        return {v: i for i, comp in enumerate(ordered) for v in sorted(comp)}

    def potential(self, v: int) -> ColorVector:
        return self.find(v)[1]


def image_rank(images: Iterable[Sequence[int]]) -> int:
    """Rank over Q of a family of Z^2 vectors: 0, 1 or 2."""
    ax = ay = 0
    seen = False
    for x, y in images:
        if x == 0 and y == 0:
            continue
        if not seen:
            ax, ay, seen = x, y, True
        elif ax * y - ay * x != 0:
            return 2
    return 1 if seen else 0


def lattice_index(images: Iterable[Sequence[int]]) -> int | None:
    """Index in Z^2 of the subgroup generated by the images; None if infinite.

    Equals the gcd of all 2x2 minors of the matrix with the images as
    columns (the product of the Smith normal form diagonal).
    """
    vecs = [(x, y) for x, y in images if x or y]
    g = 0
    for i in range(len(vecs)):
        xi, yi = vecs[i]
        for j in range(i + 1, len(vecs)):
            xj, yj = vecs[j]
            g = gcd(g, abs(xi * yj - yi * xj))
    return g if g else None


def scan_subset(subset: EdgeSubset) -> GainScan:
    scan = GainScan()
    graph = subset.graph
    for eid in subset.sorted_ids():
        e = graph.edge(eid)
        scan.add(e.id, e.tail, e.head, e.color)
    return scan


def z2_rank(subset: EdgeSubset) -> int:
    """Rank of the subgroup of Z^2 generated by the subset's cycle images."""
    return image_rank(scan_subset(subset).images)


def components(subset: EdgeSubset) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Connected components of the edge-induced subgraph.

    Returns (count, partition of the spanned vertices); the empty subset
    spans nothing and has zero components.
    """
    scan = scan_subset(subset)
    cmap = scan.component_map()
    parts: dict[int, list[int]] = {}
    for v, c in cmap.items():
        parts.setdefault(c, []).append(v)
    ordered = tuple(tuple(sorted(parts[c])) for c in sorted(parts))
    return len(ordered), ordered


def fundamental_cycles(subset: EdgeSubset) -> list[tuple[int, ClosedWalk]]:
    """One closed walk per non-tree edge of a DFS forest of the subset.

    The walk traverses the extra edge forward and returns along the forest.
    All downstream results are independent of the forest choice.
    """
    graph = subset.graph
    ids = subset.sorted_ids()
    adj: dict[int, list[tuple[int, int, bool]]] = {}
    for eid in ids:
        e = graph.edge(eid)
        adj.setdefault(e.tail, []).append((e.head, eid, True))
        if e.tail != e.head:
            adj.setdefault(e.head, []).append((e.tail, eid, False))
    parent: dict[int, tuple[int, int, bool] | None] = {}
    tree: set[int] = set()
    for start in sorted(adj):
        if start in parent:
            continue
        parent[start] = None
        stack = [start]
        while stack:
            v = stack.pop()
            for w, eid, fwd in adj.get(v, ()):
                if w not in parent and eid not in tree:
                    tree.add(eid)
                    parent[w] = (v, eid, fwd)
                    stack.append(w)

    def path_to_root(v: int) -> list[tuple[int, int, bool]]:
        out = []
        while parent[v] is not None:
            u, eid, fwd = parent[v]
            out.append((v, eid, fwd))
            v = u
        return out

    cycles = []
    for eid in ids:
        if eid in tree:
            continue
        e = graph.edge(eid)
        up_h = path_to_root(e.head)
        up_t = path_to_root(e.tail)
        while up_h and up_t and up_h[-1][1] == up_t[-1][1]:
            up_h.pop()
            up_t.pop()
        steps: list[tuple[int, bool]] = [(eid, True)]
        # head -> LCA: traverse parent edges against their tree direction
        for _, peid, fwd in up_h:
            steps.append((peid, not fwd))
        # LCA -> tail: traverse downward, i.e. with the tree direction
        for _, peid, fwd in reversed(up_t):
            steps.append((peid, fwd))
        cycles.append((eid, ClosedWalk(graph, tuple(steps))))
    return cycles


# ---------------------------------------------------------------------------
# Developments: finite windows of the infinite periodic graph.
# ---------------------------------------------------------------------------

Window = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class ComponentClassification:
    """Development prediction for one connected component of the quotient."""

    vertices: tuple[int, ...]
    k: int
    index: int | None  # finite only when k == 2
    prediction: str


@dataclass(frozen=True)
class DevelopmentReport:
    window: Window
    vertices: tuple[tuple[int, ColorVector], ...]
    edges: tuple[tuple[int, ColorVector, tuple[int, ColorVector], tuple[int, ColorVector]], ...]
    k: int
    index: int | None
    per_component: tuple[ComponentClassification, ...]
    predicted_infinite_components: float  # int count or math.inf
    predicted_finite_components: float  # 0 or math.inf
    observed_components: int
    observed_core_components: int
    component_of: dict[tuple[int, ColorVector], int]


def _predict(k: int, index: int | None) -> str:
    if k == 2:
        return f"{index} infinite components"
    if k == 1:
        return "infinitely many infinite components"
    return "infinitely many finite components"


def develop_window(graph: ColoredGraph, window: Window) -> DevelopmentReport:
    """Develop the quotient graph over a finite rectangle of translates.

    The development has vertex set V x Z^2; this materializes the cells in
    `window` (inclusive bounds), keeps the edges with both endpoints inside,
    and compares the observed connectivity with the prediction derived from
    the cycle-image rank k and, for k = 2, the index of the image lattice.
    Component counting uses the window core (a 1-cell margin is dropped) so
    that truncation artifacts at the boundary do not split components.
    """
    (x0, x1), (y0, y1) = window
    if x1 < x0 or y1 < y0:
        raise StructuralError("empty development window")

    cells = [
        ColorVector(gx, gy) for gx in range(x0, x1 + 1) for gy in range(y0, y1 + 1)
    ]
    verts = tuple((i, cell) for cell in cells for i in range(graph.n))

    def in_window(c: ColorVector) -> bool:
        return x0 <= c.g1 <= x1 and y0 <= c.g2 <= y1

    dev_edges = []
    uf: dict[tuple[int, ColorVector], tuple[int, ColorVector]] = {v: v for v in verts}

    def find(v):
        while uf[v] != v:
            uf[v] = uf[uf[v]]
            v = uf[v]
        return v

    for e in graph.edges:
        for cell in cells:
            target = cell.plus(e.color)
            if in_window(target):
                a, b = (e.tail, cell), (e.head, target)
                dev_edges.append((e.id, cell, a, b))
                ra, rb = find(a), find(b)
                if ra != rb:
                    uf[ra] = rb

    roots: dict[tuple[int, ColorVector], list] = {}
    for v in verts:
        roots.setdefault(find(v), []).append(v)
    ordered = sorted(roots.values(), key=lambda comp: min(comp))
    component_of = {v: i for i, comp in enumerate(ordered) for v in comp}

    core = [
        v
        for v in verts
        if x0 + 1 <= v[1].g1 <= x1 - 1 and y0 + 1 <= v[1].g2 <= y1 - 1
    ]
    core_components = len({component_of[v] for v in core})

    # classification of the quotient graph, component by component
    full_scan = scan_subset(EdgeSubset.full(graph))
    for v in range(graph.n):
        full_scan.ensure_vertex(v)
    cmap = full_scan.component_map()
    comp_edges: dict[int, list[int]] = {c: [] for c in set(cmap.values())}
    for e in graph.edges:
        comp_edges[cmap[e.tail]].append(e.id)
    per_component = []
    pred_inf: float = 0
    pred_fin: float = 0
    for c in sorted(comp_edges):
        sub = EdgeSubset.of(graph, comp_edges[c])
        imgs = scan_subset(sub).images
        k_c = image_rank(imgs)
        idx_c = lattice_index(imgs) if k_c == 2 else None
        vs = tuple(sorted(v for v, cc in cmap.items() if cc == c))
        per_component.append(
            ComponentClassification(vs, k_c, idx_c, _predict(k_c, idx_c))
        )
        if k_c == 2:
            pred_inf += idx_c
        elif k_c == 1:
            pred_inf = math.inf
        else:
            pred_fin = math.inf

    k = image_rank(full_scan.images)
    index = lattice_index(full_scan.images) if k == 2 else None
    return DevelopmentReport(
        window=window,
        vertices=verts,
        edges=tuple(dev_edges),
        k=k,
        index=index,
        per_component=tuple(per_component),
        predicted_infinite_components=pred_inf,
        predicted_finite_components=pred_fin,
        observed_components=len(ordered),
        observed_core_components=core_components,
        component_of=component_of,
    )


# ---------------------------------------------------------------------------
# Sub-lattice covers.
# ---------------------------------------------------------------------------


def _hnf_columns(basis: Sequence[Sequence[int]]) -> tuple[int, int, int]:
    """Lower-triangular column Hermite form (h11, h21, h22) of a 2x2 basis."""
    a, b = int(basis[0][0]), int(basis[0][1])
    c, d = int(basis[1][0]), int(basis[1][1])
    det = a * d - b * c
    if det == 0:
        raise StructuralError("sub-lattice basis must have nonzero determinant")
    # column ops to zero the top entry of the second column
    u = (a, c)
    v = (b, d)
    while v[0] != 0:
        q = u[0] // v[0]
        u, v = v, (u[0] - q * v[0], u[1] - q * v[1])
    h11, h21 = u
    h22 = v[1]
    if h11 < 0:
        h11, h21 = -h11, -h21
    if h22 < 0:
        h22 = -h22
    h21 %= h22
    return h11, h21, h22


def sublattice_cover(
    graph: ColoredGraph, basis: Sequence[Sequence[int]]
) -> ColoredGraph:
    """Pass to the finite cover determined by a sub-lattice of Z^2.

    `basis` is a 2x2 integer matrix (rows) whose columns generate the
    sub-lattice.  The cover has one vertex (i, r) per original vertex and
    residue class r, an edge (i, r) -> (j, r + color mod Lambda) for every
    original edge, and colors rewritten in sub-lattice coordinates.  Vertex
    (i, r) gets index i * l + rank(r) with residues ordered lexicographically.
    """
    a, b = int(basis[0][0]), int(basis[0][1])
    c, d = int(basis[1][0]), int(basis[1][1])
    det = a * d - b * c
    if det == 0:
        raise StructuralError("sub-lattice basis must have nonzero determinant")
    h11, h21, h22 = _hnf_columns(basis)
    sheets = h11 * h22

    def residue(x: int, y: int) -> tuple[int, int]:
        r1 = x % h11
        y -= ((x - r1) // h11) * h21
        return r1, y % h22

    residues = [(rx, ry) for rx in range(h11) for ry in range(h22)]
    res_index = {r: i for i, r in enumerate(residues)}

    def lattice_coords(x: int, y: int) -> ColorVector:
        # solve basis * t = (x, y) exactly
        tx = d * x - b * y
        ty = -c * x + a * y
        if tx % det or ty % det:
            raise StructuralError("vector is not in the sub-lattice")
        return ColorVector(tx // det, ty // det)

    new_edges = []
    for e in graph.edges:
        for r in residues:
            sx, sy = r
            tx, ty = sx + e.color.g1, sy + e.color.g2
            rx, ry = residue(tx, ty)
            shift = lattice_coords(tx - rx, ty - ry)
            new_edges.append(
                (
                    e.tail * sheets + res_index[r],
                    e.head * sheets + res_index[(rx, ry)],
                    shift,
                )
            )
    return ColoredGraph.build(graph.n * sheets, new_edges)
