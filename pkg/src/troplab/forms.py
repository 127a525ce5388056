"""Positive-definite quadratic forms, flat tori, and exact lattice geometry.

The form is the Gram matrix of a lattice basis; the associated flat torus
is R^n / Z^n with that inner product.  Exact mode keeps every entry a
Fraction so reduction, equivalence testing, and 1- and 2-dimensional
covering radii are exact; float mode runs the same algorithms in doubles
for numerically sampled inputs.

Mixing modes silently would hide precision loss, so mixed-mode operations
raise and callers convert explicitly (to_float is lossy and deliberate,
to_exact is lossless binary expansion).
"""

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from . import _linalg as la
from .errors import (
    ModeMixError,
    NotPositiveDefiniteError,
    PreconditionError,
    SchemaError,
    ToleranceBudgetError,
)
from .rationals import format_scalar, parse_scalar

Scalar = Union[Fraction, float]

_BB_DEFAULT_BUDGET = 250_000


class QuadraticForm:
    """Symmetric positive-definite matrix with a declared arithmetic mode.

    Entries are normalized to Fraction ("exact") or float ("float") and
    stored immutably.  Positive definiteness is checked on construction;
    the error names the first failing leading principal minor.
    """

    __slots__ = ("n", "entries", "mode", "_det")

    def __init__(self, entries: Sequence[Sequence], mode: Optional[str] = None):
        rows = [list(r) for r in entries]
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise PreconditionError("square-matrix", "entries must be n x n")
        if mode is None:
            has_float = any(isinstance(x, float) for r in rows for x in r)
            mode = "float" if has_float else "exact"
        if mode not in ("exact", "float"):
            raise PreconditionError("arithmetic-mode", f"unknown mode {mode!r}")
        if mode == "exact":
            coerced = []
            for r in rows:
                cr = []
                for x in r:
                    if isinstance(x, float):
                        raise ModeMixError(
                            "float entry in exact mode; call to_exact explicitly"
                        )
                    cr.append(Fraction(x))
                coerced.append(cr)
            rows = coerced
        else:
            rows = [[float(x) for x in r] for r in rows]
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise PreconditionError(
                        "symmetric", f"entries[{i}][{j}] != entries[{j}][{i}]"
                    )
        self.n = n
        self.entries = tuple(tuple(r) for r in rows)
        self.mode = mode
        self._det = None
        _check_positive_definite(self.entries)

    # -- basic algebra ---------------------------------------------------

    def det(self) -> Scalar:
        if self._det is None:
            self._det = la.det([list(r) for r in self.entries]) if self.n else (
                Fraction(1) if self.mode == "exact" else 1.0
            )
        return self._det

    def scale(self, c: Scalar) -> "QuadraticForm":
        if c <= 0:
            raise PreconditionError("positive-scale", "scale factor must be > 0")
        if self.mode == "exact" and isinstance(c, float):
            raise ModeMixError("float scale on an exact form; convert first")
        return QuadraticForm(
            [[c * x for x in row] for row in self.entries], self.mode
        )

    def evaluate(self, v: Sequence[int]) -> Scalar:
        """Value of the form on an integer vector."""
        return sum(
            self.entries[i][j] * v[i] * v[j]
            for i in range(self.n)
            for j in range(self.n)
        )

    def transform(self, u: Sequence[Sequence[int]]) -> "QuadraticForm":
        """U^T F U for an integer matrix U (columns are new basis vectors)."""
        ut = la.transpose(u)
        m = la.mat_mul(ut, la.mat_mul([list(r) for r in self.entries], u))
        return QuadraticForm(_symmetrized(m), self.mode)

    def principal_submatrix(self, indices: Sequence[int]) -> "QuadraticForm":
        return QuadraticForm(
            [[self.entries[i][j] for j in indices] for i in indices], self.mode
        )

    def to_float(self) -> "QuadraticForm":
        return QuadraticForm(
            [[float(x) for x in row] for row in self.entries], "float"
        )

    def to_exact(self) -> "QuadraticForm":
        # float -> Fraction is the exact binary expansion, never lossy
        return QuadraticForm(
            [[Fraction(x) for x in row] for row in self.entries], "exact"
        )

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, QuadraticForm)
            and self.mode == other.mode
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.mode, self.entries))

    def __repr__(self):
        return f"QuadraticForm({[list(r) for r in self.entries]!r}, mode={self.mode!r})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "entries": [[format_scalar(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json_dict(cls, doc: dict, pointer: str = "/") -> "QuadraticForm":
        if not isinstance(doc, dict):
            raise SchemaError("form must be an object", pointer)
        mode = doc.get("mode", "exact")
        entries = doc.get("entries")
        if not isinstance(entries, list):
            raise SchemaError("missing 'entries' array", pointer + "/entries")
        rows = []
        for i, row in enumerate(entries):
            if not isinstance(row, list):
                raise SchemaError("entries rows must be arrays", f"{pointer}/entries/{i}")
            rows.append(
                [
                    parse_scalar(x, mode, f"{pointer}/entries/{i}/{j}")
                    for j, x in enumerate(row)
                ]
            )
        n = doc.get("n", len(rows))
        if n != len(rows):
            raise SchemaError("'n' disagrees with entries shape", pointer + "/n")
        return cls(rows, mode)

    @property
    def rows(self) -> List[list]:
        return [list(r) for r in self.entries]


def _symmetrized(m):
    n = len(m)
    return [
        [(m[i][j] + m[j][i]) / 2 if i != j else m[i][i] for j in range(n)]
        for i in range(n)
    ]


def _check_positive_definite(entries):
    # LDL^T elimination; d_j <= 0 pins the first bad leading minor
    n = len(entries)
    a = [list(r) for r in entries]
    lmat = la.identity(n)
    dvec = []
    for j in range(n):
        dj = a[j][j] - sum(lmat[j][k] * lmat[j][k] * dvec[k] for k in range(j))
        if dj <= 0:
            raise NotPositiveDefiniteError(j + 1)
        dvec.append(dj)
        for i in range(j + 1, n):
            lmat[i][j] = (
                a[i][j] - sum(lmat[i][k] * lmat[j][k] * dvec[k] for k in range(j))
            ) / dj
    return lmat, dvec


@dataclass(frozen=True)
class JacobiDecomposition:
    """F = B^T diag(d) B with B unit upper triangular and d positive."""

    b: tuple
    d: tuple

    def recompose(self) -> QuadraticForm:
        n = len(self.d)
        bm = [list(r) for r in self.b]
        dm = [[self.d[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return QuadraticForm(la.mat_mul(la.transpose(bm), la.mat_mul(dm, bm)))


def jacobi_decompose(form: QuadraticForm) -> JacobiDecomposition:
    """Unit-upper-triangular diagonalization of a positive-definite form.

    The diagonal entries are the squared lengths of the Gram-Schmidt
    vectors of the standard basis; positivity failure reports the first
    violated leading principal minor.
    """
    lmat, dvec = _check_positive_definite(form.entries)
    bmat = la.transpose(lmat)
    return JacobiDecomposition(
        b=tuple(tuple(r) for r in bmat), d=tuple(dvec)
    )


# -- LLL reduction ---------------------------------------------------------


def lll_reduce(
    form: QuadraticForm, delta: Scalar = Fraction(3, 4)
) -> Tuple[QuadraticForm, List[List[int]]]:
    """Gram-matrix LLL.  Returns (reduced, U) with U^T F U = reduced.

    Exact over Fractions; the same loop runs in doubles for float forms
    with an iteration guard since floating ties need not terminate.
    """
    n = form.n
    m = [list(r) for r in form.entries]
    u = la.identity(n)
    if n <= 1:
        return QuadraticForm(m, form.mode), u
    if form.mode == "float":
        delta = float(delta)
    if not (0.25 < float(delta) < 1.0):
        raise PreconditionError("lll-delta", "delta must lie in (1/4, 1)")

    def gso():
        mu = la.zeros(n, n)
        bst = [None] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = (
                    m[i][j] - sum(mu[i][k] * mu[j][k] * bst[k] for k in range(j))
                ) / bst[j]
            bst[i] = m[i][i] - sum(mu[i][k] ** 2 * bst[k] for k in range(i))
        return mu, bst

    def translate(k, j, q):
        # b_k <- b_k - q b_j
        for r in range(n):
            u[r][k] -= q * u[r][j]
        mkk = m[k][k] - 2 * q * m[k][j] + q * q * m[j][j]
        for i in range(n):
            if i != k:
                m[k][i] -= q * m[j][i]
                m[i][k] = m[k][i]
        m[k][k] = mkk

    def swap(k):
        for r in range(n):
            u[r][k - 1], u[r][k] = u[r][k], u[r][k - 1]
        m[k - 1], m[k] = m[k], m[k - 1]
        for r in range(n):
            m[r][k - 1], m[r][k] = m[r][k], m[r][k - 1]

    k = 1
    guard = 0
    cap = 20000 * n * n
    while k < n:
        guard += 1
        if guard > cap:
            # only reachable through float round-off ties
            break
        mu, bst = gso()
        for j in range(k - 1, -1, -1):
            q = _nearest_int(mu[k][j])
            if q != 0:
                translate(k, j, q)
                mu, bst = gso()
        if bst[k] >= (delta - mu[k][k - 1] ** 2) * bst[k - 1]:
            k += 1
        else:
            swap(k)
            k = max(k - 1, 1)
    return QuadraticForm(m, form.mode), u


def _nearest_int(x) -> int:
    if isinstance(x, Fraction):
        # round half away from zero keeps |mu| <= 1/2 after reduction
        num, den = x.numerator, x.denominator
        q, r = divmod(abs(num), den)
        if 2 * r >= den:
            q += 1
        return q if num >= 0 else -q
    return int(math.floor(x + 0.5))


# -- enumeration -----------------------------------------------------------


def _enumerate_up_to(bmat, dvec, bound) -> List[Tuple[Tuple[int, ...], Scalar]]:
    """All nonzero integer vectors with form value <= bound (both signs)."""
    n = len(dvec)
    found = []
    x = [0] * n

    def recurse(j, partial):
        if j < 0:
            if any(x):
                found.append((tuple(x), partial))
            return
        c = sum(bmat[j][i] * x[i] for i in range(j + 1, n))
        room = bound - partial
        if room < 0:
            return
        rad = math.sqrt(max(0.0, float(room / dvec[j]))) if dvec[j] else 0.0
        cf = float(c)
        lo = math.floor(-cf - rad) - 1
        hi = math.ceil(-cf + rad) + 1
        for xj in range(lo, hi + 1):
            term = dvec[j] * (xj + c) ** 2
            if term <= room:
                x[j] = xj
                recurse(j - 1, partial + term)
        x[j] = 0

    recurse(n - 1, 0 * dvec[0] if n else 0)
    return found


def shortest_vector(form: QuadraticForm) -> Tuple[Tuple[int, ...], Scalar]:
    """A shortest nonzero lattice vector and its squared length.

    Deterministic: among all minimizers the sign-canonical lexicographically
    smallest coordinate vector is returned.
    """
    if form.n == 0:
        raise PreconditionError("positive-dimension", "no vectors in dimension 0")
    reduced, u = lll_reduce(form)
    dec = jacobi_decompose(reduced)
    bound = min(reduced.entries[i][i] for i in range(form.n))
    candidates = _enumerate_up_to(dec.b, dec.d, bound)
    best_val = None
    best_vecs = []
    for vec, val in candidates:
        if best_val is None or val < best_val:
            best_val, best_vecs = val, [vec]
        elif val == best_val:
            best_vecs.append(vec)
    out = []
    for vec in best_vecs:
        w = la.mat_vec(u, list(vec))
        w = [int(c) for c in w]
        for c in w:
            if c != 0:
                if c < 0:
                    w = [-t for t in w]
                break
        out.append(tuple(w))
    return min(out), best_val


# -- covering radius -------------------------------------------------------


def _orthogonal_components(form: QuadraticForm) -> List[List[int]]:
    """Connected components of the off-diagonal support graph."""
    n = form.n
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and form.entries[i][j] != 0:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _lagrange_reduce_2d(a):
    """Gauss reduction of a 2x2 Gram matrix, in its own arithmetic."""
    m = [list(r) for r in a]
    for _ in range(512):
        if m[0][0] > m[1][1]:
            m[0][0], m[1][1] = m[1][1], m[0][0]
        q = _nearest_int(m[0][1] / m[0][0])
        if q == 0:
            break
        # b_1 <- b_1 - q b_0
        m11 = m[1][1] - 2 * q * m[0][1] + q * q * m[0][0]
        m[0][1] -= q * m[0][0]
        m[1][0] = m[0][1]
        m[1][1] = m11
    if m[0][0] > m[1][1]:
        m[0][0], m[1][1] = m[1][1], m[0][0]
    return m


def _covering_radius_sq_small(form: QuadraticForm) -> Scalar:
    """Exact covering radius squared in dimension <= 2.

    n = 1 is half the circle.  n = 2 reduces to an obtuse superbase; the
    Delaunay triangles are then non-obtuse and congruent, so the covering
    radius is their circumradius: R^2 = q1 q2 q3 / (4 det).
    """
    n = form.n
    if n == 0:
        return Fraction(0) if form.mode == "exact" else 0.0
    if n == 1:
        return form.entries[0][0] / 4
    m = _lagrange_reduce_2d(form.entries)
    if m[0][1] > 0:
        m[0][1] = -m[0][1]
        m[1][0] = m[0][1]
    q1, q2 = m[0][0], m[1][1]
    q3 = q1 + 2 * m[0][1] + q2
    detval = q1 * q2 - m[0][1] ** 2
    return (q1 * q2 * q3) / (4 * detval)


def _cvp_sq(bmat, dvec, target, upper=None) -> float:
    """Squared distance from a real point to Z^n, float arithmetic."""
    n = len(dvec)
    shift = [0.0] * n
    best = [math.inf]
    x = [0] * n

    # Babai nearest plane seeds the pruning bound
    def babai():
        val = 0.0
        xs = [0] * n
        for j in range(n - 1, -1, -1):
            c = sum(bmat[j][i] * (xs[i] - target[i]) for i in range(j + 1, n))
            xs[j] = int(math.floor(target[j] - c + 0.5))
            val += dvec[j] * (xs[j] - target[j] + c) ** 2
        return val

    best[0] = babai() * (1 + 1e-12) + 1e-300
    if upper is not None:
        best[0] = min(best[0], upper)

    def recurse(j, partial):
        if partial >= best[0]:
            return
        if j < 0:
            best[0] = partial
            return
        c = sum(bmat[j][i] * (x[i] - target[i]) for i in range(j + 1, n))
        center = target[j] - c
        room = best[0] - partial
        rad = math.sqrt(max(0.0, room / dvec[j]))
        lo = math.floor(center - rad)
        hi = math.ceil(center + rad)
        order = sorted(range(lo, hi + 1), key=lambda t: abs(t - center))
        for xj in order:
            term = dvec[j] * (xj - target[j] + c) ** 2
            if partial + term < best[0]:
                x[j] = xj
                recurse(j - 1, partial + term)
        x[j] = 0

    recurse(n - 1, 0.0)
    return best[0]


def _cell_circumradius_sq(g, hw) -> float:
    """Max squared G-norm over the corners of a centered box, exact max."""
    n = len(hw)
    best = 0.0
    for mask in range(1 << max(0, n - 1)):
        s = [1.0]
        for b in range(n - 1):
            s.append(-1.0 if (mask >> b) & 1 else 1.0)
        v = [s[i] * hw[i] for i in range(n)]
        val = sum(g[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
        best = max(best, val)
    return best


def _covering_radius_bb(
    form: QuadraticForm, tol: float, budget: int = _BB_DEFAULT_BUDGET
) -> float:
    """Certified branch and bound on the unit cube in reduced coordinates.

    The distance-to-lattice function is 1-Lipschitz in the form's metric,
    so a cell's value is at most (distance at center) + (cell circumradius).
    Cells whose bound cannot beat the running lower bound are pruned; the
    gap closes geometrically near conical deep holes.
    """
    reduced, _ = lll_reduce(form)
    raw = [[float(x) for x in row] for row in reduced.entries]
    scale = max(raw[i][i] for i in range(form.n))
    g = [[x / scale for x in row] for row in raw]
    dec = _check_positive_definite(g)
    lmat, dvec = dec
    bmat = la.transpose(lmat)

    n = form.n
    # d(x) = d(1 - x), so half the cube along the first axis suffices
    center0 = [0.25] + [0.5] * (n - 1)
    hw0 = [0.25] + [0.5] * (n - 1)

    def bound_cell(center, hw):
        d = math.sqrt(_cvp_sq(bmat, dvec, center))
        h = math.sqrt(_cell_circumradius_sq(g, hw))
        return d, d + h

    lower, upper0 = bound_cell(center0, hw0)
    heap = [(-upper0, 0, tuple(center0), tuple(hw0))]
    counter = 1
    processed = 0
    while heap:
        neg_up, _, center, hw = heapq.heappop(heap)
        upper = -neg_up
        if upper - lower <= tol * max(1.0, lower):
            return math.sqrt(scale) * (lower + upper) / 2
        processed += 1
        if processed > budget:
            s = math.sqrt(scale)
            raise ToleranceBudgetError(s * lower, s * upper, tol)
        axis = max(range(n), key=lambda i: hw[i] * hw[i] * g[i][i])
        for side in (-1, 1):
            c2 = list(center)
            h2 = list(hw)
            h2[axis] = hw[axis] / 2
            c2[axis] = center[axis] + side * h2[axis]
            d, up = bound_cell(c2, h2)
            lower = max(lower, d)
            if up > lower:
                heapq.heappush(heap, (-up, counter, tuple(c2), tuple(h2)))
                counter += 1
    return math.sqrt(scale) * lower


def covering_radius_sq(
    form: QuadraticForm, tol: float = 1e-6, decompose: bool = True
) -> Scalar:
    """Covering radius squared.

    Splits the form into orthogonal blocks (zero off-diagonal couplings)
    and combines them by the Pythagorean law; blocks of dimension <= 2 are
    exact, larger blocks go through the certified branch and bound.  Pass
    decompose=False to force the sampled path on the whole form.
    """
    if form.n == 0:
        return Fraction(0) if form.mode == "exact" else 0.0
    comps = _orthogonal_components(form) if decompose else [list(range(form.n))]
    bb_count = sum(1 for c in comps if len(c) > 2)
    comp_tol = tol / max(1, bb_count)
    total: Scalar = Fraction(0) if form.mode == "exact" else 0.0
    for comp in comps:
        sub = form.principal_submatrix(comp)
        if sub.n <= 2:
            total = total + _covering_radius_sq_small(sub)
        else:
            mu = _covering_radius_bb(sub, comp_tol)
            total = float(total) + mu * mu
    return total


def covering_radius(
    form: QuadraticForm, tol: float = 1e-6, decompose: bool = True
) -> float:
    return math.sqrt(float(covering_radius_sq(form, tol, decompose)))


# -- equivalence and homothety ----------------------------------------------


def _match_scale(m1: QuadraticForm, m2: QuadraticForm) -> float:
    vals = [1.0]
    for f in (m1, m2):
        vals.extend(abs(float(x)) for row in f.entries for x in row)
    return max(vals)


def is_equivalent(
    f1: QuadraticForm, f2: QuadraticForm, tol: Optional[float] = None
) -> Optional[List[List[int]]]:
    """GL(n, Z) equivalence.  Returns U with U^T f1 U = f2, or None.

    Exact mode (both forms exact, tol omitted) certifies absence: the
    candidate images of each reduced basis vector are complete lists of
    lattice vectors of the required length, and the backtracking exhausts
    every matching of pairwise inner products.  With tol, matching is
    approximate and None only means no match within tolerance.
    """
    if f1.n != f2.n:
        raise PreconditionError("dimension-match", "forms have different ranks")
    n = f1.n
    if n == 0:
        return []
    exact = f1.mode == "exact" and f2.mode == "exact" and tol is None
    if not exact:
        if tol is None:
            raise ModeMixError(
                "float-mode equivalence needs an explicit tol; "
                "exact certification requires two exact forms"
            )
        f1, f2 = f1.to_float(), f2.to_float()

    m1, u1 = lll_reduce(f1)
    m2, u2 = lll_reduce(f2)
    if exact and m1.det() != m2.det():
        return None
    scale = 1 if exact else _match_scale(m1, m2)
    slack = 0 if exact else tol * scale

    def close(a, b):
        return a == b if exact else abs(a - b) <= slack

    dec2 = jacobi_decompose(m2)
    need = [m1.entries[i][i] for i in range(n)]
    maxnorm = max(need) + slack
    pool = _enumerate_up_to(dec2.b, dec2.d, maxnorm)
    cands = []
    for i in range(n):
        ci = sorted(vec for vec, val in pool if close(val, need[i]))
        if not ci:
            return None
        cands.append(ci)

    m2rows = m2.rows
    chosen: List[Tuple[int, ...]] = []

    def inner(a, b):
        return sum(m2rows[i][j] * a[i] * b[j] for i in range(n) for j in range(n))

    def extend(i):
        if i == n:
            return True
        for v in cands[i]:
            ok = True
            for j in range(i):
                if not close(inner(v, chosen[j]), m1.entries[i][j]):
                    ok = False
                    break
            if ok:
                chosen.append(v)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    if not extend(0):
        return None
    t = la.transpose([list(v) for v in chosen])  # columns are images
    if not la.is_unimodular(t):
        return None
    t_inv = la.int_matrix(la.inv([[Fraction(x) for x in row] for row in t]))
    u2_inv = la.int_matrix(la.inv([[Fraction(x) for x in row] for row in u2]))
    u = la.mat_mul(u1, la.mat_mul(t_inv, u2_inv))
    u = la.int_matrix(u)
    if exact:
        assert f1.transform(u) == f2, "witness verification failed"
    return u


def _integer_nth_root(value: int, n: int) -> Optional[int]:
    if value < 0:
        return None
    if value in (0, 1):
        return value
    r = int(round(value ** (1.0 / n)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == value:
            return cand
    return None


def _fraction_nth_root(x: Fraction, n: int) -> Optional[Fraction]:
    num = _integer_nth_root(x.numerator, n)
    if num is None:
        return None
    den = _integer_nth_root(x.denominator, n)
    if den is None:
        return None
    return Fraction(num, den)


def is_homothetic(
    f1: QuadraticForm, f2: QuadraticForm, tol: float = 1e-6
) -> Optional[Tuple[Scalar, List[List[int]]]]:
    """Equality up to positive scale: returns (c, U) with U^T (c f1) U = f2.

    The determinant pins the only possible scale, c = (det f2 / det f1)^(1/n).
    When both forms are exact and that ratio is a perfect n-th power the
    whole test is exact; otherwise the float path with tol decides.
    """
    if f1.n != f2.n:
        raise PreconditionError("dimension-match", "forms have different ranks")
    n = f1.n
    if n == 0:
        return (Fraction(1), []) if f1.mode == "exact" else (1.0, [])
    if f1.mode == "exact" and f2.mode == "exact":
        ratio = Fraction(f2.det()) / Fraction(f1.det())
        c = _fraction_nth_root(ratio, n)
        if c is not None:
            u = is_equivalent(f1.scale(c), f2)
            return (c, u) if u is not None else None
    c = (float(f2.det()) / float(f1.det())) ** (1.0 / n)
    u = is_equivalent(f1.to_float().scale(c), f2.to_float(), tol=tol)
    return (c, u) if u is not None else None


# -- flat tori ---------------------------------------------------------------


class FlatTorus:
    """R^n / Z^n with the inner product given by a positive-definite Gram.

    The diameter equals the covering radius of the Gram form; it is cached
    together with the tolerance it was certified at.
    """

    __slots__ = ("gram", "_diameter")

    def __init__(self, gram, certified_diameter: Optional[Tuple[float, float]] = None):
        if not isinstance(gram, QuadraticForm):
            gram = QuadraticForm(gram)
        self.gram = gram
        self._diameter = certified_diameter

    @property
    def dimension(self) -> int:
        return self.gram.n

    def diameter(self, tol: float = 1e-6) -> float:
        if self._diameter is not None and self._diameter[1] <= tol:
            return self._diameter[0]
        value = covering_radius(self.gram, tol)
        self._diameter = (value, tol)
        return value

    def __eq__(self, other):
        return isinstance(other, FlatTorus) and self.gram == other.gram

    def __repr__(self):
        return f"FlatTorus({self.gram!r})"

    def to_json_dict(self) -> dict:
        return {"gram": self.gram.to_json_dict()}

    @classmethod
    def from_json_dict(cls, doc: dict, pointer: str = "/") -> "FlatTorus":
        if not isinstance(doc, dict) or "gram" not in doc:
            raise SchemaError("torus must be an object with 'gram'", pointer)
        return cls(QuadraticForm.from_json_dict(doc["gram"], pointer + "/gram"))


def rescale_to_diameter_one(torus, tol: float = 1e-6) -> FlatTorus:
    """Scale the metric so the diameter is 1.

    Exact whenever every orthogonal block of the Gram has dimension <= 2
    (the covering radius squared is then rational); larger blocks force
    float mode, which is the documented mode change.
    """
    form = torus.gram if isinstance(torus, FlatTorus) else torus
    if not isinstance(form, QuadraticForm):
        form = QuadraticForm(form)
    if form.n == 0:
        raise PreconditionError("positive-dimension", "cannot rescale a point")
    musq = covering_radius_sq(form, tol)
    if isinstance(musq, Fraction) and form.mode == "exact":
        gram = form.scale(1 / musq)
    else:
        gram = QuadraticForm(
            [[float(x) / float(musq) for x in row] for row in form.entries],
            "float",
        )
    return FlatTorus(gram, certified_diameter=(1.0, tol))


def product(t1: FlatTorus, t2: FlatTorus) -> FlatTorus:
    """Metric product; the Gram is the block diagonal sum."""
    if t1.dimension == 0:
        return t2
    if t2.dimension == 0:
        return t1
    if t1.gram.mode != t2.gram.mode:
        raise ModeMixError("product of mixed-mode tori; convert one side")
    n1, n2 = t1.dimension, t2.dimension
    zero = Fraction(0) if t1.gram.mode == "exact" else 0.0
    rows = []
    for i in range(n1):
        rows.append(list(t1.gram.entries[i]) + [zero] * n2)
    for i in range(n2):
        rows.append([zero] * n1 + list(t2.gram.entries[i]))
    return FlatTorus(QuadraticForm(rows, t1.gram.mode))


def join_path(x: FlatTorus, t, tol: float = 1e-6) -> FlatTorus:
    """Point on the canonical path joining a torus to the unit-diameter circle.

    At parameter t the Gram is blockdiag((1-t)^2 X, [t^2]) rescaled to
    diameter one; t = 0 returns the rescaled torus itself and t = 1 the
    circle [4].
    """
    if isinstance(t, float):
        tq: Scalar = t
    else:
        tq = Fraction(t)
    if tq < 0 or tq > 1:
        raise PreconditionError("join-parameter", "t must lie in [0, 1]")
    exact = x.gram.mode == "exact" and not isinstance(tq, float)
    if tq == 0:
        return rescale_to_diameter_one(x, tol)
    if tq == 1:
        one = Fraction(4) if exact else 4.0
        return FlatTorus(QuadraticForm([[one]]), certified_diameter=(1.0, 0.0))
    if exact:
        shrunk = x.gram.scale((1 - tq) ** 2)
        circle = QuadraticForm([[tq * tq]])
    else:
        tf = float(tq)
        shrunk = x.gram.to_float().scale((1 - tf) ** 2)
        circle = QuadraticForm([[tf * tf]], "float")
    joined = product(FlatTorus(shrunk), FlatTorus(circle))
    return rescale_to_diameter_one(joined, tol)


@dataclass(frozen=True)
class LimitSpace:
    """Product description of a collapse limit.

    circle_circumferences lists the compact circle factors, euclidean_rank
    counts flat R factors, torus_part is an optional flat torus factor.
    """

    circle_circumferences: tuple
    euclidean_rank: int
    torus_part: Optional[FlatTorus] = None

    def __post_init__(self):
        for c in self.circle_circumferences:
            if c <= 0:
                raise PreconditionError(
                    "positive-circumference", "circle factors must be positive"
                )
        if self.euclidean_rank < 0:
            raise PreconditionError("nonnegative-rank", "euclidean rank < 0")

    def to_json_dict(self) -> dict:
        return {
            "circle_circumferences": [
                format_scalar(c) for c in self.circle_circumferences
            ],
            "euclidean_rank": self.euclidean_rank,
            "torus_part": self.torus_part.to_json_dict() if self.torus_part else None,
        }
