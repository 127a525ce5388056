"""Dual complexes of boundary divisors, finite quotients, and hybrid limits.

The input is combinatorial: divisor ids 1..n and the collection of
nonempty intersections (strata).  The dual complex has one cell per
stratum; a finite group permuting divisors acts on it, and the quotient
is computed on the barycentric subdivision, where chains of strata have
pairwise distinct sizes so no cell is flipped onto itself.

A monomial path chart records the vanishing order of each divisor
equation along a one-parameter path.  Its hybrid limit is a barycentric
point on the cell of the path's support, and the coordinates depend on
the chosen gluing function: plain log gives mass proportional to the
exponents, iterated log washes the exponents out entirely.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, SchemaError
from .rationals import parse_rational


def downward_closure(sets: Iterable[Iterable[int]]) -> FrozenSet[FrozenSet[int]]:
    """All nonempty subsets of the given index sets."""
    out = set()
    for s in sets:
        s = frozenset(s)
        stack = [s]
        while stack:
            cur = stack.pop()
            if cur and cur not in out:
                out.add(cur)
                for x in cur:
                    stack.append(cur - {x})
    return frozenset(out)


class IncidenceComplex:
    """Divisors 1..n together with the subsets that actually intersect."""

    __slots__ = ("n", "strata")

    def __init__(self, n: int, strata: Iterable[Iterable[int]]):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise PreconditionError("divisor-count", "n must be a positive integer")
        packed = set()
        for s in strata:
            fs = frozenset(s)
            if not fs:
                raise PreconditionError("nonempty-stratum", "strata must be nonempty")
            for i in fs:
                if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
                    raise PreconditionError(
                        "divisor-range", f"divisor id {i!r} outside 1..{n}"
                    )
            packed.add(fs)
        for s in packed:
            for x in s:
                if len(s) > 1 and (s - {x}) not in packed:
                    raise PreconditionError(
                        "downward-closure",
                        f"stratum {sorted(s)} present but {sorted(s - {x})} missing",
                    )
        self.n = n
        self.strata = frozenset(packed)

    def has_stratum(self, s: Iterable[int]) -> bool:
        return frozenset(s) in self.strata

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "strata": sorted(sorted(s) for s in self.strata),
        }

    @classmethod
    def from_json_dict(cls, obj, pointer: str = "") -> "IncidenceComplex":
        if not isinstance(obj, dict) or "n" not in obj:
            raise SchemaError("expected an object with 'n' and 'strata'", pointer or "/")
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError("n must be an integer", pointer + "/n")
        raw = obj.get("strata")
        if not isinstance(raw, list):
            raise SchemaError("strata must be a list of id lists", pointer + "/strata")
        strata = []
        for i, s in enumerate(raw):
            if not isinstance(s, list):
                raise SchemaError("stratum must be a list", f"{pointer}/strata/{i}")
            strata.append(s)
        return cls(n, strata)


class DualComplex:
    """Generalized cell complex: labeled cells by dimension with facet lists.

    A d-cell lists its d+1 facets (labels of (d-1)-cells); facets may
    repeat when the complex arises from a quotient.
    """

    __slots__ = ("cells", "facets")

    def __init__(self, cells: Dict[int, Sequence], facets: Dict[object, Sequence]):
        norm_cells = {}
        for d, labels in cells.items():
            if labels:
                norm_cells[d] = tuple(labels)
        level = {}
        for d, labels in norm_cells.items():
            for lab in labels:
                if lab in level:
                    raise PreconditionError("unique-cells", f"duplicate cell {lab!r}")
                level[lab] = d
        norm_facets = {}
        for d, labels in norm_cells.items():
            for lab in labels:
                fs = tuple(facets.get(lab, ()))
                if d == 0:
                    if fs:
                        raise PreconditionError(
                            "facet-count", "a vertex has no facets"
                        )
                else:
                    if len(fs) != d + 1:
                        raise PreconditionError(
                            "facet-count", f"{d}-cell {lab!r} needs {d + 1} facets"
                        )
                    for f in fs:
                        if level.get(f) != d - 1:
                            raise PreconditionError(
                                "facet-dimension",
                                f"facet {f!r} of {lab!r} is not a {d - 1}-cell",
                            )
                norm_facets[lab] = fs
        self.cells = norm_cells
        self.facets = norm_facets

    def dimension(self) -> int:
        return max(self.cells) if self.cells else -1

    def counts(self) -> Dict[int, int]:
        return {d: len(v) for d, v in sorted(self.cells.items())}

    def to_json_dict(self) -> dict:
        return {
            "counts": {str(d): c for d, c in self.counts().items()},
            "cells": {
                str(d): [
                    {
                        "label": _label_json(lab),
                        "facets": [_label_json(f) for f in self.facets[lab]],
                    }
                    for lab in labels
                ]
                for d, labels in sorted(self.cells.items())
            },
        }


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    return label


def dual_complex(inc: IncidenceComplex) -> DualComplex:
    """One (|S|-1)-cell per stratum S, facets by dropping one divisor."""
    cells: Dict[int, list] = {}
    facets = {}
    for s in sorted(inc.strata, key=lambda s: (len(s), sorted(s))):
        lab = tuple(sorted(s))
        d = len(s) - 1
        cells.setdefault(d, []).append(lab)
        if d > 0:
            facets[lab] = tuple(
                tuple(x for x in lab if x != drop) for drop in lab
            )
    return DualComplex(cells, facets)


class GroupAction:
    """Finite group of divisor permutations preserving the strata.

    Permutations are stored one-indexed: perm[i-1] is the image of
    divisor i.  The element list must contain the identity and be closed
    under composition and inverse; from_generators builds that closure.
    """

    __slots__ = ("complex", "elements")

    def __init__(self, inc: IncidenceComplex, elements: Iterable[Sequence[int]]):
        n = inc.n
        elems = []
        seen = set()
        for p in elements:
            t = tuple(p)
            if sorted(t) != list(range(1, n + 1)):
                raise PreconditionError(
                    "permutation", f"{p!r} is not a permutation of 1..{n}"
                )
            if t not in seen:
                seen.add(t)
                elems.append(t)
        ident = tuple(range(1, n + 1))
        if ident not in seen:
            raise PreconditionError("group-identity", "identity permutation missing")
        for p in elems:
            inv = _perm_inverse(p)
            if inv not in seen:
                raise PreconditionError("group-inverse", f"inverse of {p!r} missing")
            for q in elems:
                if _perm_compose(p, q) not in seen:
                    raise PreconditionError(
                        "group-closure", "element set not closed under composition"
                    )
        for p in elems:
            for s in inc.strata:
                if frozenset(p[i - 1] for i in s) not in inc.strata:
                    raise PreconditionError(
                        "strata-preserving",
                        f"permutation {p!r} does not map stratum {sorted(s)} to a stratum",
                    )
        self.complex = inc
        self.elements = tuple(elems)

    @classmethod
    def trivial(cls, inc: IncidenceComplex) -> "GroupAction":
        return cls(inc, [tuple(range(1, inc.n + 1))])

    @classmethod
    def from_generators(cls, inc: IncidenceComplex, generators: Iterable[Sequence[int]]) -> "GroupAction":
        n = inc.n
        ident = tuple(range(1, n + 1))
        gens = [tuple(g) for g in generators]
        for g in gens:
            if sorted(g) != list(range(1, n + 1)):
                raise PreconditionError(
                    "permutation", f"{g!r} is not a permutation of 1..{n}"
                )
        closure = {ident}
        frontier = [ident]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = _perm_compose(g, cur)
                if nxt not in closure:
                    if len(closure) >= 40320:  # 8! guard against huge groups
                        raise PreconditionError(
                            "group-size", "group closure exceeds the supported size"
                        )
                    closure.add(nxt)
                    frontier.append(nxt)
        return cls(inc, sorted(closure))


def _perm_compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    """(p after q): i -> p[q[i]]."""
    return tuple(p[q[i] - 1] for i in range(len(p)))


def _perm_inverse(p: Tuple[int, ...]) -> Tuple[int, ...]:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v - 1] = i + 1
    return tuple(inv)


def quotient_complex(c: DualComplex, a: GroupAction) -> DualComplex:
    """Barycentric subdivision of c with chain cells identified along orbits.

    Cells of c must be stratum labels (as produced by dual_complex) so
    the divisor permutations act on them.  Chains of strata have strictly
    increasing sizes, hence a group element fixing a chain fixes it
    pointwise and the orbit complex is again a well-formed cell complex.
    """
    strata = []
    for d, labels in c.cells.items():
        for lab in labels:
            if not isinstance(lab, tuple) or not all(
                isinstance(x, int) and not isinstance(x, bool) for x in lab
            ):
                raise PreconditionError(
                    "stratum-cells",
                    "quotients apply to stratum-labeled complexes from dual_complex",
                )
            if len(lab) != d + 1:
                raise PreconditionError("stratum-cells", "label size must match dimension")
            strata.append(lab)
    own = {frozenset(lab) for lab in strata}
    if own != a.complex.strata:
        raise PreconditionError(
            "matching-strata", "the action was built on a different incidence complex"
        )

    # chains of strictly nested strata, one (len-1)-cell each
    by_size: Dict[int, list] = {}
    for lab in strata:
        by_size.setdefault(len(lab), []).append(frozenset(lab))
    chains: Dict[int, List[Tuple]] = {0: [(s,) for s in sorted(own, key=_set_key)]}
    max_dim = 0
    while True:
        nxt = []
        for ch in chains[max_dim]:
            top = ch[-1]
            for size in sorted(by_size):
                if size <= len(top):
                    continue
                for cand in by_size[size]:
                    if top < cand:
                        nxt.append(ch + (cand,))
        if not nxt:
            break
        max_dim += 1
        chains[max_dim] = sorted(nxt, key=lambda ch: [_set_key(s) for s in ch])

    def act(p, chain):
        return tuple(frozenset(p[i - 1] for i in s) for s in chain)

    def orbit_rep(chain):
        return min(
            (act(p, chain) for p in a.elements),
            key=lambda ch: [_set_key(s) for s in ch],
        )

    cells: Dict[int, list] = {}
    facets: Dict[object, tuple] = {}
    rep_label = {}
    for d in sorted(chains):
        labels = []
        for ch in chains[d]:
            rep = orbit_rep(ch)
            if rep in rep_label:
                continue
            lab = tuple(tuple(sorted(s)) for s in rep)
            rep_label[rep] = lab
            labels.append(lab)
            if d > 0:
                facets[lab] = tuple(
                    rep_label[orbit_rep(rep[:i] + rep[i + 1 :])]
                    for i in range(len(rep))
                )
        cells[d] = labels
    return DualComplex(cells, facets)


def _set_key(s: FrozenSet[int]):
    return (len(s), sorted(s))


class GluingFunction(enum.Enum):
    """Scale used to read off boundary coordinates from a shrinking path."""

    LOG = "log"
    LOGLOG = "loglog"

    @classmethod
    def from_string(cls, text: str) -> "GluingFunction":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise SchemaError(
                f"unknown gluing function {text!r}; expected 'log' or 'loglog'",
                "/gluing",
            )

    def evaluate(self, z: float) -> float:
        """Divergence scale at |z| = z, for 0 < z < 1."""
        if not 0.0 < z < 1.0:
            raise PreconditionError("unit-disc", "gluing functions read 0 < |z| < 1")
        if self is GluingFunction.LOG:
            return -math.log(z)
        return math.log(-math.log(z))


@dataclass(frozen=True)
class MonomialPathChart:
    """Vanishing orders m_i >= 0 of each divisor equation along a path.

    The support {i : m_i > 0} must be a stratum: the path lands on the
    corresponding cell.  All-zero exponents describe a path staying in
    the interior; hybrid_limit rejects it.
    """

    complex: IncidenceComplex
    exponents: Tuple[Fraction, ...]

    def __init__(self, complex: IncidenceComplex, exponents: Sequence):
        exps = []
        for i, m in enumerate(exponents):
            if isinstance(m, float):
                raise PreconditionError(
                    "exact-exponents", "exponents must be exact rationals"
                )
            m = Fraction(m)
            if m < 0:
                raise PreconditionError(
                    "nonnegative-exponents", f"exponent {i + 1} is negative"
                )
            exps.append(m)
        if len(exps) != complex.n:
            raise PreconditionError(
                "exponent-count", f"expected {complex.n} exponents, got {len(exps)}"
            )
        support = frozenset(i + 1 for i, m in enumerate(exps) if m > 0)
        if support and support not in complex.strata:
            raise PreconditionError(
                "support-stratum",
                f"support {sorted(support)} is not a stratum of the complex",
            )
        object.__setattr__(self, "complex", complex)
        object.__setattr__(self, "exponents", tuple(exps))

    def support(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i, m in enumerate(self.exponents) if m > 0)


@dataclass(frozen=True)
class HybridLimit:
    """Barycentric point on the cell of the support divisors."""

    support: Tuple[int, ...]
    coordinates: Tuple[Fraction, ...]

    def to_json_dict(self) -> dict:
        from .rationals import format_rational

        return {
            "support": list(self.support),
            "coords": [format_rational(c) for c in self.coordinates],
        }


def hybrid_limit(path: MonomialPathChart, f: GluingFunction) -> HybridLimit:
    """Limit coordinates of the path on its support cell.

    Log weighs divisor i by its exponent; LogLog sees every exponent's
    scale as log(m_i * L) ~ log L and distributes mass uniformly.
    """
    support = path.support()
    if not support:
        raise PreconditionError(
            "boundary-approach", "path does not approach the boundary"
        )
    if f is GluingFunction.LOG:
        total = sum(path.exponents)
        coords = tuple(path.exponents[i - 1] / total for i in support)
    else:
        coords = tuple(Fraction(1, len(support)) for _ in support)
    return HybridLimit(support, coords)


@dataclass(frozen=True)
class Tropicalization:
    """Componentwise -log|z| images and, when stable, their ray direction."""

    vectors: Tuple[Tuple[float, ...], ...]
    direction: Optional[Tuple[float, ...]]

    def to_json_dict(self) -> dict:
        return {
            "vectors": [list(v) for v in self.vectors],
            "direction": None if self.direction is None else list(self.direction),
        }


def tropicalize(points: Sequence[Sequence[complex]], tol: float = 1e-6) -> Tropicalization:
    """Map torus points by -log|coordinate| and detect a limit direction.

    The direction (a point of the sphere of rays) is reported when the
    vectors blow up, the last three norms strictly increase with the
    final norm at least twice the first sample's, and the normalized
    tail has settled to within tol in the max norm.
    """
    if not points:
        raise PreconditionError("sample-count", "need at least one point")
    vectors = []
    width = None
    for k, p in enumerate(points):
        coords = list(p)
        if width is None:
            width = len(coords)
        if len(coords) != width or width == 0:
            raise PreconditionError(
                "coordinate-count", "points must share a positive dimension"
            )
        v = []
        for i, z in enumerate(coords):
            az = abs(z)
            if az == 0:
                raise PreconditionError(
                    "nonzero-coordinates", f"point {k} has a zero coordinate {i}"
                )
            v.append(-math.log(az))
        vectors.append(tuple(v))

    direction = None
    if len(vectors) >= 3:
        norms = [math.sqrt(sum(x * x for x in v)) for v in vectors]
        tail = norms[-3:]
        if (
            tail[0] < tail[1] < tail[2]
            and norms[0] > 0
            and tail[2] >= 2 * norms[0]
        ):
            units = [
                tuple(x / n for x in v)
                for v, n in zip(vectors[-3:], tail)
            ]
            spread = max(
                abs(units[a][i] - units[b][i])
                for a in range(3)
                for b in range(a + 1, 3)
                for i in range(width)
            )
            if spread <= tol:
                direction = units[-1]
    return Tropicalization(tuple(vectors), direction)


def pushforward_map(m: Sequence[Sequence[int]], x: Sequence) -> Tuple[Fraction, ...]:
    """Barycentric image of x under the monomial exponent matrix m.

    Rows index target divisors, columns source divisors.  Coordinates
    mapping to nothing are dropped and the rest renormalized; if the
    whole support is killed the image path never reaches the boundary
    and the map is undefined there.
    """
    coords = []
    for i, c in enumerate(x):
        if isinstance(c, float):
            raise PreconditionError("exact-coordinates", "coordinates must be exact")
        c = Fraction(c)
        if c < 0:
            raise PreconditionError(
                "barycentric-coordinates", f"coordinate {i} is negative"
            )
        coords.append(c)
    if sum(coords) != 1:
        raise PreconditionError("barycentric-coordinates", "coordinates must sum to 1")
    rows = [list(r) for r in m]
    if not rows or any(len(r) != len(coords) for r in rows):
        raise PreconditionError(
            "matrix-shape", "matrix columns must match the coordinate count"
        )
    for r in rows:
        for v in r:
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise PreconditionError(
                    "nonnegative-integer-matrix", "entries must be integers >= 0"
                )
    y = [sum(Fraction(r[j]) * coords[j] for j in range(len(coords))) for r in rows]
    total = sum(y)
    if total == 0:
        raise PreconditionError(
            "positive-column",
            "zero columns over the whole support: the image stays off the boundary",
        )
    return tuple(v / total for v in y)
