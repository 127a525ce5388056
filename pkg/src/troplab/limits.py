"""Collapse limits of one-parameter families of polarized flat tori.

Families are monomial paths in the upper half space (entrywise c * s^e as
s grows) or finite numeric sample sequences.  Classification finds which
Jacobi diagonal directions stay comparable to the largest one, assembles
the limit Gram from the limiting unit-triangular frame, and rescales to
diameter one.  Two further normalizations are provided: the fixed-volume
limit (keeps the converging block as a torus factor) and the fixed
injectivity radius limit (keeps every direction as a circle factor).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import _linalg as la
from .errors import PreconditionError, SchemaError
from .forms import FlatTorus, LimitSpace, QuadraticForm, rescale_to_diameter_one
from .rationals import format_rational, parse_rational
from .siegel import SiegelPoint, default_u0, in_siegel_set, jacobi_decompose, metric_matrix

Scalar = Union[Fraction, float]


@dataclass(frozen=True)
class MonomialEntry:
    """coefficient * s^exponent in the s -> +infinity convention.

    The zero entry is coefficient 0 with exponent normalized to 0.
    """

    coefficient: Fraction = Fraction(0)
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        exp = Fraction(self.exponent) if self.coefficient != 0 else Fraction(0)
        object.__setattr__(self, "exponent", exp)

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0

    @property
    def is_bounded(self) -> bool:
        return self.is_zero or self.exponent <= 0

    def limit(self) -> Fraction:
        """Value as s -> infinity; requires boundedness."""
        if self.is_zero or self.exponent < 0:
            return Fraction(0)
        if self.exponent == 0:
            return self.coefficient
        raise PreconditionError("bounded-entry", "entry diverges")

    def value_at(self, s: Fraction) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        e = self.exponent
        if e.denominator != 1:
            raise PreconditionError(
                "integer-exponent", "pointwise evaluation needs integer exponents"
            )
        return self.coefficient * Fraction(s) ** int(e)

    def reparametrized(self, k: int) -> "MonomialEntry":
        """Substitute s -> s^k."""
        return MonomialEntry(self.coefficient, self.exponent * k)

    def to_json_dict(self) -> dict:
        return {"c": format_rational(self.coefficient), "e": format_rational(self.exponent)}

    @classmethod
    def from_json_dict(cls, doc, pointer: str = "/", t_convention: bool = False):
        if not isinstance(doc, dict) or "c" not in doc:
            raise SchemaError("monomial must be an object with 'c'", pointer)
        c = parse_rational(doc["c"], pointer + "/c")
        e = parse_rational(doc.get("e", 0), pointer + "/e")
        if t_convention:
            e = -e
        return cls(c, e)


CONSTANT_ONE = MonomialEntry(Fraction(1), Fraction(0))


class SymbolicSiegelPath:
    """Monomial path assembled from X, the Jacobi frame B, and diagonal D.

    Shape is validated on construction (X symmetric, B unit upper
    triangular, D positive coefficients); the analytic admissibility
    conditions (bounded X and B, ordered D exponents) are checked by the
    operations that need them so that invalid paths produce the documented
    errors rather than being unconstructible.
    """

    __slots__ = ("g", "x", "b", "d", "convention")

    def __init__(self, x, b, d, convention: str = "s"):
        g = len(d)
        if convention not in ("s", "t"):
            raise PreconditionError("parameter-convention", "convention is 's' or 't'")
        x = [list(r) for r in x]
        b = [list(r) for r in b]
        if len(x) != g or any(len(r) != g for r in x):
            raise PreconditionError("shape-match", "X must be g x g")
        if len(b) != g or any(len(r) != g for r in b):
            raise PreconditionError("shape-match", "B must be g x g")
        for i in range(g):
            for j in range(g):
                if not isinstance(x[i][j], MonomialEntry) or not isinstance(
                    b[i][j], MonomialEntry
                ):
                    raise PreconditionError("monomial-entries", "entries must be monomials")
        for i in range(g):
            for j in range(i + 1, g):
                if x[i][j] != x[j][i]:
                    raise PreconditionError("symmetric", "X must be symmetric")
        for i in range(g):
            if b[i][i] != CONSTANT_ONE:
                raise PreconditionError("unit-triangular", "B diagonal must be 1")
            for j in range(i):
                if not b[i][j].is_zero:
                    raise PreconditionError("unit-triangular", "B below diagonal must be 0")
        for j, entry in enumerate(d):
            if not isinstance(entry, MonomialEntry) or entry.coefficient <= 0:
                raise PreconditionError("positive-diagonal", f"d[{j}] must have c > 0")
        self.g = g
        self.x = tuple(tuple(r) for r in x)
        self.b = tuple(tuple(r) for r in b)
        self.d = tuple(d)
        self.convention = convention

    @classmethod
    def diagonal(cls, d_entries: Sequence[MonomialEntry]) -> "SymbolicSiegelPath":
        g = len(d_entries)
        zero = MonomialEntry()
        x = [[zero] * g for _ in range(g)]
        b = [[CONSTANT_ONE if i == j else zero for j in range(g)] for i in range(g)]
        return cls(x, b, list(d_entries))

    def reparametrized(self, k: int) -> "SymbolicSiegelPath":
        if k < 1:
            raise PreconditionError("positive-power", "k must be >= 1")
        re = lambda m: m.reparametrized(k)
        return SymbolicSiegelPath(
            [[re(v) for v in r] for r in self.x],
            [[re(v) for v in r] for r in self.b],
            [re(v) for v in self.d],
            self.convention,
        )

    def point_at(self, s) -> SiegelPoint:
        """Exact evaluation at a parameter value (integer exponents only)."""
        s = Fraction(s)
        g = self.g
        xv = [[self.x[i][j].value_at(s) for j in range(g)] for i in range(g)]
        bv = [[self.b[i][j].value_at(s) for j in range(g)] for i in range(g)]
        dv = [self.d[j].value_at(s) for j in range(g)]
        dm = [[dv[i] if i == j else Fraction(0) for j in range(g)] for i in range(g)]
        y = la.mat_mul(la.transpose(bv), la.mat_mul(dm, bv))
        return SiegelPoint(xv, QuadraticForm(y))

    def _validate_bounded_frame(self):
        for name, mat in (("X", self.x), ("B", self.b)):
            for i in range(self.g):
                for j in range(self.g):
                    if not mat[i][j].is_bounded:
                        raise PreconditionError(
                            "bounded-entry",
                            f"{name}[{i}][{j}] diverges; no limit exists",
                        )

    def _validate_d_ordering(self):
        exps = [m.exponent for m in self.d]
        for j, e in enumerate(exps):
            if e < 0:
                raise PreconditionError(
                    "siegel-lower-bound",
                    f"d[{j}] decays; the path leaves every fundamental set",
                )
        for j in range(self.g - 1):
            if exps[j] > exps[j + 1]:
                raise PreconditionError(
                    "d-ordering", f"d[{j}] outgrows d[{j + 1}] beyond the allowed slack"
                )
        return exps

    def limit_frame(self):
        g = self.g
        x_inf = [[self.x[i][j].limit() for j in range(g)] for i in range(g)]
        b_inf = [[self.b[i][j].limit() for j in range(g)] for i in range(g)]
        return x_inf, b_inf

    def to_json_dict(self) -> dict:
        flip = self.convention == "t"

        def mono(m: MonomialEntry) -> dict:
            e = -m.exponent if flip else m.exponent
            return {"c": format_rational(m.coefficient), "e": format_rational(e)}

        return {
            "g": self.g,
            "convention": self.convention,
            "X": [[mono(v) for v in r] for r in self.x],
            "B": [[mono(v) for v in r] for r in self.b],
            "D": [mono(v) for v in self.d],
        }

    @classmethod
    def from_json_dict(cls, doc: dict, pointer: str = "/") -> "SymbolicSiegelPath":
        if not isinstance(doc, dict):
            raise SchemaError("path must be an object", pointer)
        convention = doc.get("convention", "s")
        if convention not in ("s", "t"):
            raise SchemaError("convention must be 's' or 't'", pointer + "/convention")
        flip = convention == "t"
        for key in ("X", "B", "D"):
            if not isinstance(doc.get(key), list):
                raise SchemaError(f"missing '{key}'", f"{pointer}/{key}")
        x = [
            [
                MonomialEntry.from_json_dict(v, f"{pointer}/X/{i}/{j}", flip)
                for j, v in enumerate(r)
            ]
            for i, r in enumerate(doc["X"])
        ]
        b = [
            [
                MonomialEntry.from_json_dict(v, f"{pointer}/B/{i}/{j}", flip)
                for j, v in enumerate(r)
            ]
            for i, r in enumerate(doc["B"])
        ]
        d = [
            MonomialEntry.from_json_dict(v, f"{pointer}/D/{j}", flip)
            for j, v in enumerate(doc["D"])
        ]
        return cls(x, b, d, convention)


@dataclass(frozen=True)
class NumericReport:
    """Ratio trajectories backing a numeric classification."""

    d_top: tuple
    ratios: Dict[int, tuple]
    collapsed_directions: tuple
    diverging: bool

    def to_json_dict(self) -> dict:
        return {
            "d_top": list(self.d_top),
            "ratios": {str(k): list(v) for k, v in self.ratios.items()},
            "collapsed_directions": list(self.collapsed_directions),
            "diverging": self.diverging,
        }


@dataclass(frozen=True)
class CollapseResult:
    """r collapsed directions, the limit ratios, and the rescaled limit.

    collapsed is False for paths whose largest diagonal stays bounded; the
    limit is then the full 2g-dimensional rescaled torus of the limiting
    point rather than a (g - r)-dimensional quotient.
    """

    r: int
    profile: tuple
    limit: FlatTorus
    collapsed: bool = True
    report: Optional[NumericReport] = None

    def to_json_dict(self) -> dict:
        from .rationals import format_scalar

        return {
            "r": self.r,
            "profile": [format_scalar(a) for a in self.profile],
            "collapsed": self.collapsed,
            "limit": self.limit.to_json_dict(),
            "report": self.report.to_json_dict() if self.report else None,
        }


def classify_collapse_symbolic(path: SymbolicSiegelPath) -> CollapseResult:
    """Limit of the rescaled tori along a monomial path.

    The ratios d_j / d_g converge to a_j (zero exactly when the exponent
    lags).  With r zeros, the limit Gram is the lower-right (g - r) block
    of B_inf^T diag(a) B_inf; the discarded block is the kernel because
    B_inf is unit upper triangular.  Exact output whenever that block has
    orthogonal components of dimension <= 2.
    """
    path._validate_bounded_frame()
    exps = path._validate_d_ordering()
    g = path.g
    x_inf, b_inf = path.limit_frame()
    top = exps[g - 1]
    if top == 0:
        d_inf = [m.limit() for m in path.d]
        dm = [[d_inf[i] if i == j else Fraction(0) for j in range(g)] for i in range(g)]
        y_inf = la.mat_mul(la.transpose(b_inf), la.mat_mul(dm, b_inf))
        z_inf = SiegelPoint(x_inf, QuadraticForm(y_inf))
        torus = rescale_to_diameter_one(metric_matrix(z_inf))
        profile = tuple(d_inf[j] / d_inf[g - 1] for j in range(g))
        return CollapseResult(r=0, profile=profile, limit=torus, collapsed=False)
    a = [
        path.d[j].coefficient / path.d[g - 1].coefficient if exps[j] == top else Fraction(0)
        for j in range(g)
    ]
    r = sum(1 for v in a if v == 0)
    lam = [[a[i] if i == j else Fraction(0) for j in range(g)] for i in range(g)]
    p_full = la.mat_mul(la.transpose(b_inf), la.mat_mul(lam, b_inf))
    block = [[p_full[i][j] for j in range(r, g)] for i in range(r, g)]
    torus = rescale_to_diameter_one(QuadraticForm(block))
    return CollapseResult(r=r, profile=tuple(a[r:]), limit=torus, collapsed=True)


def classify_collapse_numeric(
    samples: Sequence[SiegelPoint], tol: float = 1e-3, u=None
) -> CollapseResult:
    """Finite-sample version of the collapse classification.

    Requires at least 8 samples inside the fundamental set at slack u.
    Divergence of the top diagonal: strictly increasing over the last
    three samples and at least doubled overall.  A direction is collapsed
    when its ratio tail is below tol and decreasing; a non-collapsed tail
    must have settled within tol or the classification refuses.
    """
    samples = list(samples)
    if len(samples) < 8:
        raise PreconditionError("sample-count", "need at least 8 sample points")
    g = samples[0].g
    if any(s.g != g for s in samples):
        raise PreconditionError("shape-match", "samples must share one genus")
    if u is None:
        u = default_u0(g)
    for idx, s in enumerate(samples):
        if not in_siegel_set(s, u):
            raise PreconditionError(
                "siegel-membership", f"sample {idx} is outside the fundamental set at u={u}"
            )
    decs = [jacobi_decompose(s.y) for s in samples]
    d_top = [float(dec.d[g - 1]) for dec in decs]
    ratios = {
        j + 1: tuple(float(dec.d[j]) / float(dec.d[g - 1]) for dec in decs)
        for j in range(g)
    }
    tail = d_top[-3:]
    diverging = tail[0] < tail[1] < tail[2] and d_top[-1] >= 2 * d_top[0]
    if not diverging:
        last = samples[-1]
        torus = rescale_to_diameter_one(metric_matrix(last))
        profile = tuple(ratios[j + 1][-1] for j in range(g))
        report = NumericReport(
            d_top=tuple(d_top),
            ratios=ratios,
            collapsed_directions=(),
            diverging=False,
        )
        return CollapseResult(
            r=0, profile=profile, limit=torus, collapsed=False, report=report
        )
    collapsed_flags = []
    for j in range(g):
        t3 = ratios[j + 1][-3:]
        if max(t3) < tol and t3[0] > t3[1] > t3[2]:
            collapsed_flags.append(True)
        elif max(t3) - min(t3) <= tol * max(1.0, t3[-1]):
            collapsed_flags.append(False)
        else:
            raise PreconditionError(
                "oscillating-ratios",
                f"ratio d_{j + 1}/d_{g} oscillates beyond tol; no subsequence classified",
            )
    r = sum(collapsed_flags)
    if any(collapsed_flags[r:]):
        raise PreconditionError(
            "oscillating-ratios", "collapsed directions are not an initial block"
        )
    a = [0.0 if collapsed_flags[j] else ratios[j + 1][-1] for j in range(g)]
    b_inf = [[float(v) for v in row] for row in decs[-1].b]
    lam = [[a[i] if i == j else 0.0 for j in range(g)] for i in range(g)]
    p_full = la.mat_mul(la.transpose(b_inf), la.mat_mul(lam, b_inf))
    block = [[p_full[i][j] for j in range(r, g)] for i in range(r, g)]
    torus = rescale_to_diameter_one(QuadraticForm(block, "float"))
    report = NumericReport(
        d_top=tuple(d_top),
        ratios=ratios,
        collapsed_directions=tuple(j + 1 for j in range(g) if collapsed_flags[j]),
        diverging=True,
    )
    return CollapseResult(
        r=r, profile=tuple(a[r:]), limit=torus, collapsed=True, report=report
    )


def fixed_volume_limit(path: SymbolicSiegelPath) -> LimitSpace:
    """Limit without rescaling: torus factor from the converging block.

    The first r diagonal directions (exponent zero) survive as a
    2r-dimensional polarized torus built from the limiting upper-left
    blocks; each diverging direction contributes one flat R factor.
    """
    path._validate_bounded_frame()
    exps = path._validate_d_ordering()
    g = path.g
    r = sum(1 for e in exps if e == 0)
    if r == 0:
        return LimitSpace((), g, None)
    x_inf, b_inf = path.limit_frame()
    x_blk = [[x_inf[i][j] for j in range(r)] for i in range(r)]
    b_blk = [[b_inf[i][j] for j in range(r)] for i in range(r)]
    d_blk = [path.d[j].coefficient for j in range(r)]
    dm = [[d_blk[i] if i == j else Fraction(0) for j in range(r)] for i in range(r)]
    y_blk = la.mat_mul(la.transpose(b_blk), la.mat_mul(dm, b_blk))
    torus = FlatTorus(metric_matrix(SiegelPoint(x_blk, QuadraticForm(y_blk))))
    return LimitSpace((), g - r, torus)


def fixed_injrad_limit(
    a: Sequence, r: int, u0=None, x=None, b=None
) -> LimitSpace:
    """Circle factors with circumferences a_g / a_j, j > r, plus R^{g+r}.

    Only the split frame (X = 0, B = I) is supported; passing a
    nontrivial frame is rejected.  The profile must satisfy the
    fundamental-set style constraints 1 < u0 a_1 and a_i < u0 a_{i+1}.
    """
    a = [Fraction(v) if not isinstance(v, float) else v for v in a]
    g = len(a)
    if g == 0:
        raise PreconditionError("positive-genus", "profile must be nonempty")
    if not 0 <= r < g:
        raise PreconditionError("rank-range", "need 0 <= r < g")
    if x is not None or b is not None:
        trivial_x = x is None or all(v == 0 for row in x for v in row)
        trivial_b = b is None or all(
            v == (1 if i == j else 0) for i, row in enumerate(b) for j, v in enumerate(row)
        )
        if not (trivial_x and trivial_b):
            raise PreconditionError(
                "simplified-case",
                "only the split frame X = 0, B = I is supported here",
            )
    if u0 is None:
        u0 = default_u0(g)
    if not 1 < u0 * a[0]:
        raise PreconditionError("slack-range", "need 1 < u0 * a_1")
    for i in range(g - 1):
        if not a[i] < u0 * a[i + 1]:
            raise PreconditionError("slack-range", f"need a_{i + 1} < u0 * a_{i + 2}")
    circles = tuple(a[g - 1] / a[j] for j in range(r, g))
    return LimitSpace(circles, g + r, None)


def product_collapse_reduce(
    blocks: Sequence[Tuple[FlatTorus, Scalar]]
) -> FlatTorus:
    """Rescaled limit of a metric product whose factors blow up at
    different monomial rates: only the strictly dominant factor survives.
    """
    blocks = list(blocks)
    if not blocks:
        raise PreconditionError("nonempty-product", "no factors given")
    exps = [Fraction(e) if not isinstance(e, float) else e for _, e in blocks]
    top = max(exps)
    winners = [i for i, e in enumerate(exps) if e == top]
    if len(winners) != 1:
        raise PreconditionError(
            "dominant-factor", "no strictly dominant factor; the limit mixes blocks"
        )
    return rescale_to_diameter_one(blocks[winners[0]][0])
