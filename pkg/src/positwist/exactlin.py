"""Exact rational linear algebra: matrices with a twisted cyclic column rule,
minors, Plücker vectors, ranks, kernels, and first-order jets.

Every number here is a ``fractions.Fraction`` (or a :class:`Jet` whose parts
are Fractions).  Nothing is ever rounded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm


class SingularMatrixError(ValueError):
    pass


class RankDeficientError(ValueError):
    pass


def frac(x) -> Fraction:
    """Coerce ints/strings/Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# first-order jets


@dataclass(frozen=True)
class Jet:
    """Value plus directional derivatives along a fixed frame of d directions.

    Ring operations are exact; division requires a nonzero value part.
    """

    value: Fraction
    partials: tuple[Fraction, ...]

    @staticmethod
    def const(v, d: int) -> "Jet":
        return Jet(frac(v), (Fraction(0),) * d)

    @property
    def dim(self) -> int:
        return len(self.partials)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ValueError("jet dimension mismatch")
            return other
        return Jet.const(other, self.dim)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet(self.value + o.value,
                   tuple(a + b for a, b in zip(self.partials, o.partials)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, tuple(-a for a in self.partials))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet(self.value * o.value,
                   tuple(self.value * b + o.value * a
                         for a, b in zip(self.partials, o.partials)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.value == 0:
            raise ZeroDivisionError("jet with zero value part")
        v = self.value / o.value
        return Jet(v, tuple((a - v * b) / o.value
                            for a, b in zip(self.partials, o.partials)))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.value == other.value and self.partials == other.partials
        return self.value == other and all(p == 0 for p in self.partials)

    def __hash__(self):
        return hash((self.value, self.partials))


def jet_vars(values, d: int | None = None) -> list[Jet]:
    """Jets for independent variables: partial i of variable i is 1."""
    values = [frac(v) for v in values]
    d = len(values) if d is None else d
    out = []
    for i, v in enumerate(values):
        parts = [Fraction(0)] * d
        parts[i] = Fraction(1)
        out.append(Jet(v, tuple(parts)))
    return out


def _is_zero(x) -> bool:
    if isinstance(x, Jet):
        return x.value == 0
    return x == 0


def _zero_like(x):
    return Jet.const(0, x.dim) if isinstance(x, Jet) else Fraction(0)


# ---------------------------------------------------------------------------
# generic dense routines (entries: Fraction or Jet)


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    assert len(A[0]) == m
    return [[sum((A[i][t] * B[t][j] for t in range(m)), start=Fraction(0))
             for j in range(p)] for i in range(n)]


def mat_solve(A, b):
    """Solve A x = b exactly (A square, entries Fraction or Jet)."""
    n = len(A)
    M = [list(row) + [bv] for row, bv in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not _is_zero(M[r][col])), None)
        if piv is None:
            raise SingularMatrixError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [x / inv for x in M[col]]
        for r in range(n):
            if r != col and not _is_zero(M[r][col]):
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def det(M):
    """Exact determinant; fraction-free Bareiss for rational matrices."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    assert all(len(row) == n for row in M)
    if any(isinstance(x, Jet) for row in M for x in row):
        return _det_elimination(M)
    return _det_bareiss(M)


def _det_bareiss(M):
    n = len(M)
    scale = Fraction(1)
    A = []
    for row in M:
        row = [frac(x) for x in row]
        d = lcm(*(x.denominator for x in row)) if row else 1
        scale /= d
        A.append([int(x * d) for x in row])
    sign = 1
    prev = 1
    for col in range(n - 1):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            sign = -sign
        for r in range(col + 1, n):
            for c in range(col + 1, n):
                A[r][c] = (A[r][c] * A[col][col] - A[r][col] * A[col][c]) // prev
            A[r][col] = 0
        prev = A[col][col]
    return sign * scale * A[n - 1][n - 1]


def _det_elimination(M):
    n = len(M)
    A = [list(row) for row in M]
    sign = 1
    result_one = None
    for col in range(n):
        piv = next((r for r in range(col, n) if not _is_zero(A[r][col])), None)
        if piv is None:
            return _zero_like(A[0][0])
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            sign = -sign
        for r in range(col + 1, n):
            if not _is_zero(A[r][col]):
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    result_one = A[0][0]
    for i in range(1, n):
        result_one = result_one * A[i][i]
    return -result_one if sign < 0 else result_one


def det_cofactor(M):
    """Laplace expansion along the first row (independent oracle)."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return M[0][0]
    total = None
    for j in range(n):
        if _is_zero(M[0][j]):
            continue
        sub = [[row[c] for c in range(n) if c != j] for row in M[1:]]
        term = M[0][j] * det_cofactor(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return _zero_like(M[0][0]) if total is None else total


def rank(M) -> int:
    if not M:
        return 0
    A = [list(row) for row in M]
    rows, cols = len(A), len(A[0])
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if not _is_zero(A[i][col])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, rows):
            if not _is_zero(A[i][col]):
                f = A[i][col] / A[r][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def kernel_basis(M):
    """Basis of the right kernel {v : M v = 0}, exact, one vector per free column."""
    if not M:
        return []
    A = [[frac(x) for x in row] for row in M]
    rows, cols = len(A), len(A[0])
    pivots = []
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        A[r] = [x / A[r][col] for x in A[r]]
        for i in range(rows):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# cyclic matrices


@dataclass(frozen=True)
class CyclicMatrix:
    """r×n matrix whose column accessor is extended to all j ∈ ℤ by
    column(j + n) = (−1)^sign_exponent · column(j)."""

    rows: int
    cols: int
    sign_exponent: int
    entries: tuple[tuple[object, ...], ...]

    @staticmethod
    def from_rows(rows_data, sign_exponent: int) -> "CyclicMatrix":
        ent = tuple(tuple(x if isinstance(x, Jet) else frac(x) for x in row)
                    for row in rows_data)
        r = len(ent)
        n = len(ent[0]) if r else 0
        assert all(len(row) == n for row in ent)
        return CyclicMatrix(r, n, sign_exponent, ent)

    def column(self, j: int):
        shift, base = divmod(j - 1, self.cols)
        col = [self.entries[r][base] for r in range(self.rows)]
        if (self.sign_exponent * shift) % 2:
            col = [-x for x in col]
        return col

    def row_list(self):
        return [list(row) for row in self.entries]

    def submatrix_by_columns(self, col_indices):
        cols = [self.column(j) for j in col_indices]
        return [[cols[c][r] for c in range(len(cols))] for r in range(self.rows)]

    def minor(self, col_indices, row_indices=None):
        """Exact minor; column indices may be any integers (cyclic sign rule)."""
        sub = self.submatrix_by_columns(col_indices)
        if row_indices is not None:
            sub = [sub[r] for r in row_indices]
        if len(sub) != len(col_indices):
            raise ValueError("minor must be square")
        return det(sub)

    def window_minor(self, a: int, b: int):
        """Minor on the consecutive columns [a, b)."""
        return self.minor(list(range(a, b)))

    def rank_range(self, a: int, b: int) -> int:
        """rk([column(a) | ... | column(b−1)])."""
        assert a < b
        cols = [self.column(j) for j in range(a, b)]
        return rank([[cols[c][r] for c in range(len(cols))]
                     for r in range(self.rows)])

    def scale_columns(self, factors) -> "CyclicMatrix":
        ent = tuple(tuple(row[j] * frac(factors[j]) for j in range(self.cols))
                    for row in self.entries)
        return CyclicMatrix(self.rows, self.cols, self.sign_exponent, ent)

    def values(self) -> "CyclicMatrix":
        """Drop jet partials, keeping values (no-op on rational matrices)."""
        ent = tuple(tuple(x.value if isinstance(x, Jet) else x for x in row)
                    for row in self.entries)
        return CyclicMatrix(self.rows, self.cols, self.sign_exponent, ent)

    def to_json_obj(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "sign_exponent": self.sign_exponent,
            "entries": [[format_rational(x) for x in row] for row in self.entries],
        }

    @staticmethod
    def from_json_obj(obj) -> "CyclicMatrix":
        ent = [[parse_rational(s) for s in row] for row in obj["entries"]]
        m = CyclicMatrix.from_rows(ent, int(obj["sign_exponent"]))
        assert m.rows == int(obj["rows"]) and m.cols == int(obj["cols"])
        return m

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @staticmethod
    def loads(s: str) -> "CyclicMatrix":
        return CyclicMatrix.from_json_obj(json.loads(s))


def stack(V: CyclicMatrix, W: CyclicMatrix) -> CyclicMatrix:
    assert V.cols == W.cols and V.sign_exponent == W.sign_exponent
    return CyclicMatrix(V.rows + W.rows, V.cols, V.sign_exponent,
                        V.entries + W.entries)


def orthogonal_complement(M: CyclicMatrix, sign_exponent: int | None = None) -> CyclicMatrix:
    """Rows spanning ker(M ·ᵗ): result has n−r rows and M · resultᵗ = 0."""
    if M.rows and rank(M.row_list()) != M.rows:
        raise RankDeficientError("matrix does not have full row rank")
    basis = kernel_basis(M.row_list())
    e = (M.cols - M.rows - 1) if sign_exponent is None else sign_exponent
    return CyclicMatrix.from_rows(basis, e)


# ---------------------------------------------------------------------------
# Plücker vectors


@dataclass(frozen=True)
class PluckerVector:
    k: int
    n: int
    coords: tuple  # ((subset tuple, value), ...) in lex order

    @staticmethod
    def of(M: CyclicMatrix, k: int | None = None) -> "PluckerVector":
        k = M.rows if k is None else k
        if rank(M.row_list()) != k:
            raise RankDeficientError("matrix does not have full row rank")
        items = []
        for I in combinations(range(1, M.cols + 1), k):
            items.append((I, M.minor(list(I))))
        return PluckerVector(k, M.cols, tuple(items))

    def as_dict(self):
        return dict(self.coords)

    def __getitem__(self, I):
        return self.as_dict()[tuple(sorted(I))]

    def support(self):
        return frozenset(I for I, v in self.coords if not _is_zero(v))

    def first_nonzero(self):
        for I, v in self.coords:
            if not _is_zero(v):
                return I, v
        raise ValueError("identically zero Plücker vector")

    def normalized(self) -> "PluckerVector":
        """Canonical representative: first nonzero lex coordinate becomes 1."""
        _, v = self.first_nonzero()
        return PluckerVector(self.k, self.n,
                             tuple((I, x / v) for I, x in self.coords))

    def sign_normalized(self) -> "PluckerVector":
        """Scale by ±1 so the first nonzero lex coordinate is positive."""
        _, v = self.first_nonzero()
        if v < 0:
            return PluckerVector(self.k, self.n,
                                 tuple((I, -x) for I, x in self.coords))
        return self

    def projective_equal(self, other: "PluckerVector") -> bool:
        if (self.k, self.n) != (other.k, other.n):
            return False
        return self.normalized().coords == other.normalized().coords

    def abs_projective_equal(self, other: "PluckerVector") -> bool:
        """Equality up to global scale and per-coordinate sign (|Δ| comparison)."""
        if (self.k, self.n) != (other.k, other.n):
            return False
        a = [(I, abs(v)) for I, v in self.coords]
        b = [(I, abs(v)) for I, v in other.coords]
        ra = next(v for _, v in a if v != 0)
        rb = next(v for _, v in b if v != 0)
        return all(va * rb == vb * ra for (_, va), (_, vb) in zip(a, b))


def plucker(M: CyclicMatrix, k: int | None = None) -> PluckerVector:
    return PluckerVector.of(M, k)


def check_three_term_relation(P: PluckerVector, S, quad) -> bool:
    """Three-term Plücker relation on sorted quad (a<b<c<d) over context set S."""
    a, b, c, d = sorted(quad)
    D = P.as_dict()

    def g(extra):
        key = tuple(sorted(set(S) | set(extra)))
        if len(key) != P.k:
            raise ValueError("bad relation instance")
        return D[key]

    lhs = g((a, c)) * g((b, d))
    rhs = g((a, b)) * g((c, d)) + g((a, d)) * g((b, c))
    return lhs == rhs
