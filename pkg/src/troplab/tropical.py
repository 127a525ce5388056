"""Weighted metric graphs, their diameters, and tropical Jacobians.

A weighted metric graph is a connected finite graph with positive edge
lengths and nonnegative integer vertex weights; loops and parallel edges
are allowed.  The Jacobian is the lattice of integer cycles with the
inner product that weighs each edge by its length, and the Torelli map
sends the graph to the unit-diameter real torus of that lattice.

Diameter means the diameter of the metric realization: the maximum
distance between any two points, edge interiors included.  It is
computed exactly (for rational lengths) from all-pairs vertex distances
plus a per-edge-pair maximization of the concave piecewise-linear
distance function, so downstream rescaling stays in exact arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ModeMixError, PreconditionError, SchemaError
from .forms import FlatTorus, QuadraticForm, Scalar, rescale_to_diameter_one
from .rationals import format_scalar, parse_scalar


class WeightedMetricGraph:
    """Connected multigraph with vertex weights and positive edge lengths.

    Vertices are (id, weight) pairs with unique hashable ids; edges are
    (u, v, length) triples in a fixed input order that all cycle-space
    coordinates refer to.  Lengths are all Fraction ("exact" mode) or all
    float ("float"), mirroring QuadraticForm.
    """

    __slots__ = ("vertices", "edges", "mode", "_pos")

    def __init__(self, vertices: Sequence[Tuple], edges: Sequence[Tuple], mode: Optional[str] = None):
        verts = []
        for v in vertices:
            vid, w = v
            if isinstance(w, bool) or not isinstance(w, int) or w < 0:
                raise PreconditionError(
                    "vertex-weight", f"weight of vertex {vid!r} must be a nonnegative integer"
                )
            verts.append((vid, w))
        if not verts:
            raise PreconditionError("nonempty-graph", "a graph needs at least one vertex")
        pos = {}
        for i, (vid, _) in enumerate(verts):
            if vid in pos:
                raise PreconditionError("unique-vertex-ids", f"duplicate vertex id {vid!r}")
            pos[vid] = i

        lengths = [e[2] for e in edges]
        if mode is None:
            mode = "float" if any(isinstance(x, float) for x in lengths) else "exact"
        if mode not in ("exact", "float"):
            raise PreconditionError("arithmetic-mode", f"unknown mode {mode!r}")
        parsed = []
        for k, e in enumerate(edges):
            u, v, length = e
            if u not in pos or v not in pos:
                raise PreconditionError("edge-endpoints", f"edge {k} references an unknown vertex")
            if mode == "exact":
                if isinstance(length, float):
                    raise ModeMixError("float edge length in exact mode")
                length = Fraction(length)
            else:
                length = float(length)
            if length <= 0:
                raise PreconditionError("positive-length", f"edge {k} has nonpositive length")
            parsed.append((u, v, length))

        # connectivity over the undirected skeleton
        if len(verts) > 1:
            adj: Dict[object, list] = {vid: [] for vid in pos}
            for u, v, _ in parsed:
                adj[u].append(v)
                adj[v].append(u)
            seen = {verts[0][0]}
            stack = [verts[0][0]]
            while stack:
                for w_ in adj[stack.pop()]:
                    if w_ not in seen:
                        seen.add(w_)
                        stack.append(w_)
            if len(seen) != len(verts):
                raise PreconditionError("connected", "graph is not connected")

        self.vertices = tuple(verts)
        self.edges = tuple(parsed)
        self.mode = mode
        self._pos = pos

    def vertex_index(self, vid) -> int:
        return self._pos[vid]

    def valence(self, vid) -> int:
        """Number of edge ends at the vertex; a loop contributes 2."""
        if vid not in self._pos:
            raise PreconditionError("edge-endpoints", f"unknown vertex {vid!r}")
        return sum((u == vid) + (v == vid) for u, v, _ in self.edges)

    def weight_sum(self) -> int:
        return sum(w for _, w in self.vertices)

    def scaled(self, c: Scalar) -> "WeightedMetricGraph":
        """Same combinatorics with every length multiplied by c > 0."""
        if c <= 0:
            raise PreconditionError("positive-scale", "scale factor must be > 0")
        if self.mode == "exact" and isinstance(c, float):
            raise ModeMixError("float scale on an exact graph; convert lengths first")
        return WeightedMetricGraph(
            self.vertices, [(u, v, c * l) for u, v, l in self.edges], self.mode
        )

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "vertices": [{"id": vid, "w": w} for vid, w in self.vertices],
            "edges": [
                {"u": u, "v": v, "len": format_scalar(l)} for u, v, l in self.edges
            ],
        }

    @classmethod
    def from_json_dict(cls, obj, pointer: str = "") -> "WeightedMetricGraph":
        if not isinstance(obj, dict):
            raise SchemaError("expected a graph object", pointer or "/")
        mode = obj.get("mode", "exact")
        if mode not in ("exact", "float"):
            raise SchemaError("mode must be 'exact' or 'float'", pointer + "/mode")
        raw_vs = obj.get("vertices")
        raw_es = obj.get("edges", [])
        if not isinstance(raw_vs, list) or not raw_vs:
            raise SchemaError("vertices must be a nonempty list", pointer + "/vertices")
        if not isinstance(raw_es, list):
            raise SchemaError("edges must be a list", pointer + "/edges")
        verts = []
        for i, v in enumerate(raw_vs):
            here = f"{pointer}/vertices/{i}"
            if not isinstance(v, dict) or "id" not in v or "w" not in v:
                raise SchemaError("vertex needs 'id' and 'w'", here)
            if not isinstance(v["id"], (str, int)) or isinstance(v["id"], bool):
                raise SchemaError("vertex id must be a string or integer", here + "/id")
            if not isinstance(v["w"], int) or isinstance(v["w"], bool) or v["w"] < 0:
                raise SchemaError("weight must be a nonnegative integer", here + "/w")
            verts.append((v["id"], v["w"]))
        edges = []
        for i, e in enumerate(raw_es):
            here = f"{pointer}/edges/{i}"
            if not isinstance(e, dict) or any(k not in e for k in ("u", "v", "len")):
                raise SchemaError("edge needs 'u', 'v', and 'len'", here)
            edges.append((e["u"], e["v"], parse_scalar(e["len"], mode, here + "/len")))
        return cls(verts, edges, mode)


def first_betti(graph: WeightedMetricGraph) -> int:
    """Rank of the cycle space: #edges - #vertices + 1 (graph is connected)."""
    return len(graph.edges) - len(graph.vertices) + 1


def is_stable_type(graph: WeightedMetricGraph, g: int) -> bool:
    """Genus count b1 + sum of weights equals g, and weight-0 vertices have valence >= 3."""
    if first_betti(graph) + graph.weight_sum() != g:
        return False
    return all(w > 0 or graph.valence(vid) >= 3 for vid, w in graph.vertices)


def genus_condition_counting_leaves(graph: WeightedMetricGraph, g: int) -> bool:
    """Variant genus count that also adds the number of valence-1 vertices.

    Disagrees with is_stable_type's count exactly on graphs with leaves;
    exposed separately so both conventions stay testable.
    """
    v1 = sum(1 for vid, _ in graph.vertices if graph.valence(vid) == 1)
    return v1 + first_betti(graph) + graph.weight_sum() == g


# -- metric realization ----------------------------------------------------


def _vertex_distances(graph: WeightedMetricGraph) -> List[list]:
    n = len(graph.vertices)
    inf = float("inf")
    dist = [[inf] * n for _ in range(n)]
    zero = Fraction(0) if graph.mode == "exact" else 0.0
    for i in range(n):
        dist[i][i] = zero
    for u, v, l in graph.edges:
        i, j = graph.vertex_index(u), graph.vertex_index(v)
        if i != j and l < dist[i][j]:
            dist[i][j] = dist[j][i] = l
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return dist


def _pair_max(le, lf, funcs) -> Scalar:
    """Max over [0,le]x[0,lf] of min of affine funcs (cx, cy, c0).

    The min of affine functions is concave, so the max sits on a vertex
    of the arrangement cut out by the box sides and the equality lines
    of the function pairs; enumerate all pairwise intersections.
    """
    zero = le - le
    lines = [
        (1, 0, zero),
        (1, 0, le),
        (0, 1, zero),
        (0, 1, lf),
    ]
    m = len(funcs)
    for a in range(m):
        for b in range(a + 1, m):
            ax, ay, a0 = funcs[a]
            bx, by, b0 = funcs[b]
            lines.append((ax - bx, ay - by, b0 - a0))
    best = None
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            a1, b1, c1 = lines[a]
            a2, b2, c2 = lines[b]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if x < 0 or x > le or y < 0 or y > lf:
                continue
            val = min(cx * x + cy * y + c0 for cx, cy, c0 in funcs)
            if best is None or val > best:
                best = val
    return best


def graph_diameter(graph: WeightedMetricGraph) -> Scalar:
    """Diameter of the metric realization, exact for rational lengths."""
    zero = Fraction(0) if graph.mode == "exact" else 0.0
    if not graph.edges:
        return zero
    dist = _vertex_distances(graph)
    best = max(max(row) for row in dist)
    edges = graph.edges
    one = zero + 1
    for a in range(len(edges)):
        ua, va, le = edges[a]
        ia, ja = graph.vertex_index(ua), graph.vertex_index(va)
        # points x <= y on the same edge: the far side of min(direct, around)
        around = (le + dist[ia][ja]) / 2
        best = max(best, min(le, around))
        for b in range(a + 1, len(edges)):
            ub, vb, lf = edges[b]
            ib, jb = graph.vertex_index(ub), graph.vertex_index(vb)
            funcs = [
                (one, one, dist[ia][ib]),
                (one, -one, lf + dist[ia][jb]),
                (-one, one, le + dist[ja][ib]),
                (-one, -one, le + lf + dist[ja][jb]),
            ]
            val = _pair_max(le, lf, funcs)
            if val > best:
                best = val
    return best


def rescale_graph_to_diameter_one(graph: WeightedMetricGraph) -> WeightedMetricGraph:
    diam = graph_diameter(graph)
    if diam <= 0:
        raise PreconditionError(
            "positive-diameter", "cannot rescale a graph with no edges"
        )
    return graph.scaled(1 / diam)


# -- cycle space -------------------------------------------------------------


def _spanning_tree(graph: WeightedMetricGraph) -> List[int]:
    """Edge indices of the lexicographic-Kruskal spanning tree."""
    order = sorted(
        range(len(graph.edges)),
        key=lambda k: (
            tuple(sorted((repr(graph.edges[k][0]), repr(graph.edges[k][1])))),
            k,
        ),
    )
    parent = list(range(len(graph.vertices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tree = []
    for k in order:
        u, v, _ = graph.edges[k]
        ru, rv = find(graph.vertex_index(u)), find(graph.vertex_index(v))
        if ru != rv:
            parent[ru] = rv
            tree.append(k)
    return tree


def cycle_basis(graph: WeightedMetricGraph) -> List[List[int]]:
    """Fundamental cycles of the deterministic spanning tree.

    Rows are indexed by non-tree edges in input order; columns by all
    edges in input order, entries in {-1, 0, 1}.  Each non-tree edge
    (u, v) is traversed u->v and closed through the tree.
    """
    tree = set(_spanning_tree(graph))
    adj: Dict[object, list] = {vid: [] for vid, _ in graph.vertices}
    for k in tree:
        u, v, _ = graph.edges[k]
        adj[u].append((v, k, 1))
        adj[v].append((u, k, -1))

    root = graph.vertices[0][0]
    # up[vid] = (parent vid, edge index, sign of the stored edge when
    # traversed climbing vid -> parent)
    up: Dict[object, Tuple] = {root: None}
    queue = [root]
    while queue:
        cur = queue.pop()
        for nxt, k, s in adj[cur]:
            if nxt not in up:
                up[nxt] = (cur, k, -s)
                queue.append(nxt)

    def chain(vid):
        verts = [vid]
        steps = []
        while up[vid] is not None:
            p, k, s = up[vid]
            steps.append((k, s))
            verts.append(p)
            vid = p
        return verts, steps

    rows = []
    for k, (u, v, _) in enumerate(graph.edges):
        if k in tree:
            continue
        row = [0] * len(graph.edges)
        row[k] = 1
        if u != v:
            v_verts, v_steps = chain(v)
            u_verts, u_steps = chain(u)
            u_depth = {vid: i for i, vid in enumerate(u_verts)}
            lca_at = next(i for i, vid in enumerate(v_verts) if vid in u_depth)
            for ek, s in v_steps[:lca_at]:
                row[ek] += s
            for ek, s in u_steps[: u_depth[v_verts[lca_at]]]:
                row[ek] -= s
        rows.append(row)
    return rows


@dataclass(frozen=True)
class TropicalAV:
    """Integer cycle lattice with its length-weighted inner product."""

    b1: int
    gram: QuadraticForm

    def __post_init__(self):
        if self.b1 != self.gram.n:
            raise PreconditionError("rank-matches-gram", "rank must equal the Gram size")

    def to_json_dict(self) -> dict:
        return {
            "b1": self.b1,
            "mode": self.gram.mode,
            "gram": [[format_scalar(x) for x in row] for row in self.gram.entries],
        }

    @classmethod
    def from_json_dict(cls, obj, pointer: str = "") -> "TropicalAV":
        if not isinstance(obj, dict) or "gram" not in obj:
            raise SchemaError("expected an object with 'gram'", pointer or "/")
        mode = obj.get("mode", "exact")
        raw = obj["gram"]
        if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
            raise SchemaError("gram must be a matrix", pointer + "/gram")
        rows = [
            [parse_scalar(x, mode, f"{pointer}/gram/{i}/{j}") for j, x in enumerate(r)]
            for i, r in enumerate(raw)
        ]
        gram = QuadraticForm(rows, mode)
        return cls(obj.get("b1", gram.n), gram)


def tropical_jacobian(graph: WeightedMetricGraph) -> TropicalAV:
    """Cycle lattice with gram[a][b] = sum over edges of a_e * b_e * length."""
    basis = cycle_basis(graph)
    if not basis:
        raise PreconditionError(
            "positive-genus", "tropical Jacobian of a tree is a point"
        )
    lengths = [l for _, _, l in graph.edges]
    gram = [
        [
            sum(ra[e] * rb[e] * lengths[e] for e in range(len(lengths)))
            for rb in basis
        ]
        for ra in basis
    ]
    return TropicalAV(len(basis), QuadraticForm(gram, graph.mode))


def torelli(graph: WeightedMetricGraph, tol: float = 1e-6) -> FlatTorus:
    """Unit-diameter flat torus of the tropical Jacobian."""
    return rescale_to_diameter_one(tropical_jacobian(graph).gram, tol=tol)
