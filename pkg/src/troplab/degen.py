"""One-parameter degenerations: abelian families, curve families, collars.

An abelian family is summarized by the valuation matrix of its period
monomials; the limit torus is just that matrix rescaled, and a numeric
oracle rebuilds the same answer from sampled metrics at small t.  A
curve family is a stable dual graph with a node multiplicity per edge;
its metric limit forgets the multiplicities (all edges become equal),
while the hybrid limit keeps them as projective weights.  The collar
integral measures the hyperbolic length across a plumbing annulus.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from scipy.integrate import quad

from .errors import PreconditionError, SchemaError, ToleranceBudgetError
from .forms import FlatTorus, QuadraticForm, is_homothetic, rescale_to_diameter_one
from .hybrid import GluingFunction
from .tropical import (
    WeightedMetricGraph,
    first_betti,
    rescale_graph_to_diameter_one,
    torelli,
    tropical_jacobian,
)

TWO_PI = 2 * math.pi


class AVFamily:
    """Degenerating abelian family given by its period valuation matrix.

    valuation_matrix[i][j] is the vanishing order of the (i, j) period
    entry; it must be symmetric positive definite with exact rational
    entries.  An optional constant positive-definite block records the
    non-degenerating abelian part of a split extension; it never affects
    the limit.  Non-split extension data has no input slot on purpose:
    only the split case is in scope.
    """

    __slots__ = ("valuation_matrix", "abelian_block")

    def __init__(self, valuation_matrix, abelian_block=None):
        if not isinstance(valuation_matrix, QuadraticForm):
            valuation_matrix = QuadraticForm(valuation_matrix, "exact")
        if valuation_matrix.mode != "exact":
            raise PreconditionError(
                "exact-valuations", "valuation matrices are exact rationals"
            )
        if valuation_matrix.n < 1:
            raise PreconditionError("torus-rank", "need at least one degenerating direction")
        if abelian_block is not None and not isinstance(abelian_block, QuadraticForm):
            abelian_block = QuadraticForm(abelian_block)
        self.valuation_matrix = valuation_matrix
        self.abelian_block = abelian_block

    @property
    def torus_rank(self) -> int:
        return self.valuation_matrix.n

    def to_json_dict(self) -> dict:
        out = {
            "r": self.torus_rank,
            "M": self.valuation_matrix.to_json_dict()["entries"],
        }
        if self.abelian_block is not None:
            out["abelian_block"] = self.abelian_block.to_json_dict()["entries"]
        return out

    @classmethod
    def from_json_dict(cls, obj, pointer: str = "") -> "AVFamily":
        if not isinstance(obj, dict) or "M" not in obj:
            raise SchemaError("expected an object with 'M'", pointer or "/")
        m = _parse_matrix(obj["M"], pointer + "/M")
        if "r" in obj and obj["r"] != len(m):
            raise SchemaError("r does not match the size of M", pointer + "/r")
        block = None
        if obj.get("abelian_block") is not None:
            block = QuadraticForm(
                _parse_matrix(obj["abelian_block"], pointer + "/abelian_block")
            )
        return cls(QuadraticForm(m, "exact"), block)


def _parse_matrix(raw, pointer: str) -> List[List[Fraction]]:
    from .rationals import parse_rational

    if not isinstance(raw, list) or not raw:
        raise SchemaError("expected a nonempty matrix", pointer)
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != len(raw):
            raise SchemaError("matrix must be square", f"{pointer}/{i}")
        out.append(
            [parse_rational(x, f"{pointer}/{i}/{j}") for j, x in enumerate(row)]
        )
    return out


def av_family_limit(fam: AVFamily, tol: float = 1e-6) -> FlatTorus:
    """Diameter-1 torus of the valuation matrix; the abelian block drops out."""
    return rescale_to_diameter_one(fam.valuation_matrix, tol=tol)


def av_family_numeric_oracle(
    fam: AVFamily, t_samples: Sequence[float], tol: float = 1e-6
) -> List[FlatTorus]:
    """Rescaled metric tori sampled along the family at small t.

    With monomial period entries of order M[i][j], the imaginary part of
    the period matrix at parameter t is M * (-log t) / (2 pi); each
    sample is rescaled to diameter 1 so the tail can be compared with
    av_family_limit directly.
    """
    mfloat = fam.valuation_matrix.to_float().entries
    out = []
    for k, t in enumerate(t_samples):
        t = float(t)
        if not 0.0 < t < 1.0:
            raise PreconditionError("t-range", f"sample {k} must lie in (0, 1)")
        scale = -math.log(t) / TWO_PI
        y = [[x * scale for x in row] for row in mfloat]
        out.append(rescale_to_diameter_one(QuadraticForm(y, "float"), tol=tol))
    return out


class CurveFamily:
    """Nodal degeneration of curves: dual graph shape plus node multiplicities.

    Edge lengths on the input graph are ignored; only the combinatorics
    and the per-edge multiplicity m_e >= 1 matter.  The graph must be a
    stable dual graph for its genus b1 + sum of weights whenever that
    genus is at least 2 (smaller genera admit the degenerate shapes,
    e.g. a one-node irreducible curve whose graph is a single loop).
    """

    __slots__ = ("graph", "multiplicities")

    def __init__(self, graph: WeightedMetricGraph, multiplicities: Sequence[int]):
        mult = []
        for k, m in enumerate(multiplicities):
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise PreconditionError(
                    "positive-multiplicity", f"multiplicity of edge {k} must be >= 1"
                )
            mult.append(m)
        if len(mult) != len(graph.edges):
            raise PreconditionError(
                "multiplicity-count",
                f"expected {len(graph.edges)} multiplicities, got {len(mult)}",
            )
        genus = first_betti(graph) + graph.weight_sum()
        if genus >= 2:
            for vid, w in graph.vertices:
                if w == 0 and graph.valence(vid) < 3:
                    raise PreconditionError(
                        "stable-dual-graph",
                        f"weight-0 vertex {vid!r} has valence < 3 in a genus-{genus} graph",
                    )
        self.graph = graph
        self.multiplicities = tuple(mult)

    @property
    def genus(self) -> int:
        return first_betti(self.graph) + self.graph.weight_sum()

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "multiplicities": list(self.multiplicities),
        }

    @classmethod
    def from_json_dict(cls, obj, pointer: str = "") -> "CurveFamily":
        if not isinstance(obj, dict) or "graph" not in obj:
            raise SchemaError(
                "expected an object with 'graph' and 'multiplicities'", pointer or "/"
            )
        raw_graph = obj["graph"]
        # lengths are irrelevant here, so edges may omit "len"
        if isinstance(raw_graph, dict) and isinstance(raw_graph.get("edges"), list):
            raw_graph = dict(raw_graph)
            raw_graph["edges"] = [
                {**e, "len": e.get("len", 1)} if isinstance(e, dict) else e
                for e in raw_graph["edges"]
            ]
        graph = WeightedMetricGraph.from_json_dict(raw_graph, pointer + "/graph")
        mult = obj.get("multiplicities")
        if not isinstance(mult, list):
            raise SchemaError("multiplicities must be a list", pointer + "/multiplicities")
        return cls(graph, mult)


def _require_edges(fam: CurveFamily):
    if not fam.graph.edges:
        raise PreconditionError(
            "nodal-central-fiber",
            "no collapse; limit is a Riemann surface, out of scope",
        )


def curve_family_gh_limit(fam: CurveFamily) -> WeightedMetricGraph:
    """Metric limit: all edges the same length, diameter 1.

    The multiplicities cancel out of the rescaled limit, which is why
    the answer depends only on the dual graph.
    """
    _require_edges(fam)
    unit = WeightedMetricGraph(
        fam.graph.vertices,
        [(u, v, Fraction(1)) for u, v, _ in fam.graph.edges],
        "exact",
    )
    return rescale_graph_to_diameter_one(unit)


def curve_family_hybrid_limit(
    fam: CurveFamily, gluing: GluingFunction
) -> WeightedMetricGraph:
    """Limit dual graph with projectivized edge lengths (summing to 1).

    Plain log keeps the multiplicities as weights; iterated log forgets
    them and distributes length uniformly.
    """
    _require_edges(fam)
    if gluing is GluingFunction.LOG:
        total = sum(fam.multiplicities)
        lengths = [Fraction(m, total) for m in fam.multiplicities]
    else:
        lengths = [Fraction(1, len(fam.multiplicities))] * len(fam.multiplicities)
    return WeightedMetricGraph(
        fam.graph.vertices,
        [(u, v, l) for (u, v, _), l in zip(fam.graph.edges, lengths)],
        "exact",
    )


def collar_length(t, c_star: float) -> float:
    """Hyperbolic length across the plumbing collar t/c* < |z| < c*.

    In the normalized variable x = log|z| / log|t| the collar becomes
    [eps, 1 - eps] with eps = log(c*) / log|t|, and the integrand is
    pi / sin(pi x); only |t| matters.  Grows like 2 log(-log|t|).
    """
    at = abs(t)
    if not isinstance(c_star, (int, float)) or isinstance(c_star, bool):
        raise PreconditionError("collar-range", "c_star must be a real number")
    c_star = float(c_star)
    if not (0.0 < at < c_star**4 < 1.0):
        raise PreconditionError(
            "collar-range", "need 0 < |t| < c_star^4 < 1"
        )
    eps = math.log(c_star) / math.log(at)
    value, err = quad(
        lambda x: math.pi / math.sin(math.pi * x),
        eps,
        1.0 - eps,
        epsabs=0.0,
        epsrel=1e-9,
        limit=200,
    )
    if not math.isfinite(value) or err > 1e-6 * abs(value):
        raise ToleranceBudgetError(value - err, value + err, 1e-6)
    return value


@dataclass(frozen=True)
class TorelliComparison:
    """Both limit tori of a curve family and whether they agree."""

    gh_side: FlatTorus
    av_side: FlatTorus
    continuous: bool

    def to_json_dict(self) -> dict:
        return {
            "gh_side": self.gh_side.to_json_dict(),
            "av_side": self.av_side.to_json_dict(),
            "continuous": self.continuous,
        }


def torelli_family_compare(fam: CurveFamily, tol: float = 1e-6) -> TorelliComparison:
    """Compare the metric-limit torus with the abelian-family limit torus.

    The metric side rescales the Jacobian of the equal-length limit
    graph.  The abelian side weights each cycle by the multiplicities
    (edge e contributes m_e to the valuation form) and rescales that.
    They agree only for special multiplicity patterns.
    """
    if first_betti(fam.graph) < 1:
        raise PreconditionError(
            "positive-genus", "tropical Jacobian of a tree is a point"
        )
    gh_side = torelli(curve_family_gh_limit(fam), tol=tol)
    weighted = WeightedMetricGraph(
        fam.graph.vertices,
        [
            (u, v, Fraction(m))
            for (u, v, _), m in zip(fam.graph.edges, fam.multiplicities)
        ],
        "exact",
    )
    av_fam = AVFamily(tropical_jacobian(weighted).gram)
    av_side = av_family_limit(av_fam, tol=tol)
    continuous = is_homothetic(gh_side.gram, av_side.gram, tol=tol) is not None
    return TorelliComparison(gh_side, av_side, continuous)
