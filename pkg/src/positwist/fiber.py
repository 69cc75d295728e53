"""Fibers of the amplituhedron map in the shift parametrization V′ = V + A·W.

For Z of full rank with kernel W, the fiber of Y = V·Zᵗ through V consists of
the shifts V + A·W over k×ℓ matrices A.  A candidate cell f claims a sample
when the vanishing system "non-positroid Plückers of V + A·W are zero" has an
exact rational solution that is totally nonnegative and lies in the open cell.

The vanishing system is affine-linear in A when min(k, ℓ) = 1 and is solved
exactly; otherwise a multiprecision Newton stage with continued-fraction
rational reconstruction produces candidate solutions that are verified (or a
Gröbner elimination settles the pair deterministically).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .affperm import AffinePermutation
from .exactlin import CyclicMatrix, frac, kernel_basis, orthogonal_complement, rank
from .positroid import positroid_of, in_gr_ge_m
from .twist import alt


class DegenerateSampleError(ValueError):
    pass


def stream(seed: int, *path) -> random.Random:
    digest = hashlib.sha256(repr((seed,) + path).encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def random_positive_fraction(rng: random.Random, span: int = 8) -> Fraction:
    return Fraction(rng.randrange(1, span + 1), rng.randrange(1, span + 1))


def sample_positive(k: int, n: int, seed_or_rng) -> CyclicMatrix:
    """Totally positive k×n matrix: rows are moment-curve powers at random
    increasing positive rationals t_1 < … < t_n (generalized Vandermonde)."""
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else stream(seed_or_rng, "tp")
    ts = [Fraction(j) + Fraction(rng.randrange(0, 8), 9) for j in range(1, n + 1)]
    rows = [[t ** r for t in ts] for r in range(k)]
    M = CyclicMatrix.from_rows(rows, k - 1)
    from .positroid import tnn_membership, TNNClass
    assert tnn_membership(M, k) is TNNClass.TOTALLY_POSITIVE
    return M


def sample_z_w(n: int, k: int, m: int, seed_or_rng) -> tuple[CyclicMatrix, CyclicMatrix]:
    """Z ∈ Gr_{>0}(k+m, n) from the moment curve and W = Z^⊥ with the stacking
    sign rule; alt(W) is asserted totally positive."""
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else stream(seed_or_rng, "zw")
    Zraw = sample_positive(k + m, n, rng)
    Z = CyclicMatrix(k + m, n, k + m - 1, Zraw.entries)
    W = orthogonal_complement(Z, sign_exponent=k - 1)
    from .positroid import tnn_membership, TNNClass
    assert tnn_membership(alt(W), W.rows) is TNNClass.TOTALLY_POSITIVE
    return Z, W


# ---------------------------------------------------------------------------
# amplituhedron map


@dataclass(frozen=True)
class AmplituhedronPoint:
    rows: tuple  # k×(k+m) rational matrix, considered up to row operations
    k: int
    m: int

    def rank(self) -> int:
        return rank([list(r) for r in self.rows])


def zmap(V: CyclicMatrix, Z: CyclicMatrix) -> AmplituhedronPoint:
    """Y = V·Zᵗ (exact); rank collapse is reported."""
    k, n = V.rows, V.cols
    if Z.cols != n:
        raise ValueError("Z must have the same column count as V")
    rows = tuple(tuple(sum((V.entries[r][j] * Z.entries[s][j] for j in range(n)),
                           start=Fraction(0))
                       for s in range(Z.rows))
                 for r in range(k))
    Y = AmplituhedronPoint(rows, k, Z.rows - k)
    if Y.rank() != k:
        raise DegenerateSampleError("image has rank below k")
    return Y


def boundary_sign_profile(Y: AmplituhedronPoint, Z: CyclicMatrix):
    """α(Y, Z, j) = det([y_1|…|y_k|Z(j)|…|Z(j+m−1)]) for j = 1..n; zero
    entries flag boundary points outside the interior stratum."""
    from .exactlin import det

    k, m, n = Y.k, Y.m, Z.cols
    out = []
    for j in range(1, n + 1):
        cols = [list(y) for y in Y.rows] + [Z.column(j + t) for t in range(m)]
        M = [[cols[c][r] for c in range(k + m)] for r in range(k + m)]
        out.append(det(M))
    return out


# ---------------------------------------------------------------------------
# polynomials in the entries of A (row-major variables)


@dataclass(frozen=True)
class Poly:
    """Multivariate polynomial with Fraction coefficients, monomials keyed by
    exponent tuples."""

    nvars: int
    terms: tuple  # ((exponents, coeff), ...)

    @staticmethod
    def const(c, nvars: int) -> "Poly":
        c = frac(c)
        if c == 0:
            return Poly(nvars, ())
        return Poly(nvars, (((0,) * nvars, c),))

    @staticmethod
    def var(i: int, nvars: int) -> "Poly":
        e = tuple(1 if t == i else 0 for t in range(nvars))
        return Poly(nvars, ((e, Fraction(1)),))

    def _as_dict(self):
        return dict(self.terms)

    @staticmethod
    def _from_dict(d, nvars):
        items = tuple(sorted((e, c) for e, c in d.items() if c != 0))
        return Poly(nvars, items)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        d = self._as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, Fraction(0)) + c
        return Poly._from_dict(d, self.nvars)

    def __neg__(self):
        return Poly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, Fraction(0)) + c1 * c2
        return Poly._from_dict(d, self.nvars)

    def eval(self, point):
        total = Fraction(0)
        for e, c in self.terms:
            t = c
            for x, p in zip(point, e):
                for _ in range(p):
                    t *= x
            total += t
        return total

    def deriv(self, i: int) -> "Poly":
        d = {}
        for e, c in self.terms:
            if e[i] == 0:
                continue
            e2 = tuple(p - 1 if t == i else p for t, p in enumerate(e))
            d[e2] = d.get(e2, Fraction(0)) + c * e[i]
        return Poly._from_dict(d, self.nvars)

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms


def shifted_minor_polys(V: CyclicMatrix, W: CyclicMatrix):
    """All maximal minors of V + A·W as polynomials in the kℓ entries of A."""
    k, ell, n = V.rows, W.rows, V.cols
    nv = k * ell
    entries = []
    for r in range(k):
        row = []
        for j in range(n):
            p = Poly.const(V.entries[r][j], nv)
            for s in range(ell):
                p = p + Poly.var(r * ell + s, nv) * Poly.const(W.entries[s][j], nv)
            row.append(p)
        entries.append(row)

    def minor_poly(cols):
        def rec(rows_left, cols_left):
            if len(rows_left) == 1:
                return entries[rows_left[0]][cols_left[0]]
            total = Poly.const(0, nv)
            r0 = rows_left[0]
            for idx, c in enumerate(cols_left):
                term = entries[r0][c] * rec(rows_left[1:], cols_left[:idx] + cols_left[idx + 1:])
                total = total + term if idx % 2 == 0 else total - term
            return total
        return rec(list(range(k)), list(cols))

    return {I: minor_poly([j - 1 for j in I])
            for I in combinations(range(1, n + 1), k)}


# ---------------------------------------------------------------------------
# solving one (sample, cell) pair


class SolveStatus(Enum):
    EXACT_LINEAR = "ExactLinear"
    RECONSTRUCTED_VERIFIED = "ReconstructedVerified"
    NO_SOLUTION = "NoSolution"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class FiberPoint:
    A: tuple
    cell: AffinePermutation
    status: SolveStatus


@dataclass(frozen=True)
class SolverConfig:
    precisions: tuple[int, ...] = (64, 256, 1024)
    restarts: int = 8
    denominator_bound: int = 10 ** 40
    newton_iterations: int = 80
    use_groebner_fallback: bool = True


@dataclass
class SolveOutcome:
    status: SolveStatus
    point: FiberPoint | None = None
    claimed: bool = False
    detail: str = ""


def _solve_linear_system(polys, nv):
    """Exact solve of an affine-linear system; returns ('unique', A),
    ('none', None) with an inconsistency certificate, or ('under', None)."""
    rows = []
    for p in polys:
        coeffs = [Fraction(0)] * nv
        const = Fraction(0)
        for e, c in p.terms:
            s = sum(e)
            if s == 0:
                const = c
            elif s == 1:
                coeffs[e.index(1)] = c
            else:
                raise ValueError("system is not linear")
        rows.append(coeffs + [-const])
    A = [list(r) for r in rows]
    rows_n, cols_n = len(A), nv + 1
    r = 0
    pivots = []
    for col in range(nv):
        piv = next((i for i in range(r, rows_n) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        A[r] = [x / A[r][col] for x in A[r]]
        for i in range(rows_n):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
    for i in range(r, rows_n):
        if A[i][nv] != 0:
            return "none", None
    if len(pivots) < nv:
        return "under", None
    sol = [Fraction(0)] * nv
    for i, col in enumerate(pivots):
        sol[col] = A[i][nv]
    return "unique", sol


def _reconstruct(x_mpf, prec: int, bound: int) -> Fraction | None:
    import mpmath

    scaled = mpmath.floor(x_mpf * mpmath.mpf(2) ** prec + mpmath.mpf("0.5"))
    approx = Fraction(int(scaled), 2 ** prec)
    cand = approx.limit_denominator(min(bound, 2 ** max(8, (prec - 16) // 2)))
    err = abs(cand - approx)
    if err > Fraction(1, 2 ** max(16, prec // 2)):
        return None
    return cand


def _compiled(p: Poly, conv):
    """[(coeff, [var indices with multiplicity])] with coeff mapped by conv."""
    out = []
    for e, c in p.terms:
        idx = []
        for i, pw in enumerate(e):
            idx.extend([i] * pw)
        out.append((conv(c), idx))
    return out


def _ceval(cp, x):
    total = None
    for c, idx in cp:
        t = c
        for i in idx:
            t = t * x[i]
        total = t if total is None else total + t
    return total


def _solve_square(M, b):
    """In-place Gaussian elimination on lists (floats or mpfs); None if singular."""
    n = len(b)
    A = [list(row) + [bv] for row, bv in zip(M, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if not A[piv][col]:
            return None
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col] / pv
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] / A[r][r] for r in range(n)]


def _newton_iterate(cf, cj, x, iterations, tol):
    """Damped Newton via normal equations on an overdetermined system."""
    n = len(x)
    for _ in range(iterations):
        fx = [_ceval(p, x) for p in cf]
        J = [[_ceval(d, x) for d in row] for row in cj]
        # normal equations J^T J dx = -J^T f
        JtJ = [[sum(J[r][i] * J[r][j] for r in range(len(J))) for j in range(n)]
               for i in range(n)]
        Jtf = [sum(J[r][i] * fx[r] for r in range(len(J))) for i in range(n)]
        dx = _solve_square(JtJ, [-v for v in Jtf])
        if dx is None:
            return None
        x = [a + b for a, b in zip(x, dx)]
        if max(abs(v) for v in dx) < tol and max(abs(v) for v in fx) < tol:
            return x
    return None


def _newton_solve(polys, nv, config: SolverConfig, rng: random.Random):
    """Double-precision Newton search, multiprecision refinement of the
    converged point, continued-fraction reconstruction, exact verification."""
    import mpmath

    derivs = [[p.deriv(i) for i in range(nv)] for p in polys]
    cf64 = [_compiled(p, float) for p in polys]
    cj64 = [[_compiled(d, float) for d in row] for row in derivs]

    starts = []
    for _ in range(config.restarts):
        starts.append([rng.randrange(-40, 41) / rng.randrange(17, 41)
                       for _ in range(nv)])

    found = []
    for x0 in starts:
        x = _newton_iterate(cf64, cj64, list(x0), config.newton_iterations, 1e-10)
        if x is not None and not any(
                max(abs(a - b) for a, b in zip(x, y)) < 1e-6 for y in found):
            found.append(x)

    for prec in config.precisions:
        with mpmath.workprec(prec + 64):
            conv = lambda c: mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
            cfm = [_compiled(p, conv) for p in polys]
            cjm = [[_compiled(d, conv) for d in row] for row in derivs]
            tol = mpmath.mpf(2) ** (-prec)
            for xd in found:
                x = _newton_iterate(cfm, cjm, [mpmath.mpf(v) for v in xd], 24, tol)
                if x is None:
                    continue
                sol = []
                for i in range(nv):
                    q = _reconstruct(x[i], prec, config.denominator_bound)
                    if q is None:
                        sol = None
                        break
                    sol.append(q)
                if sol is None:
                    continue
                if all(p.eval(sol) == 0 for p in polys):
                    return sol
    # last resort: full multiprecision search from scratch
    with mpmath.workprec(config.precisions[-1] + 64):
        conv = lambda c: mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
        cfm = [_compiled(p, conv) for p in polys]
        cjm = [[_compiled(d, conv) for d in row] for row in derivs]
        tol = mpmath.mpf(2) ** (-config.precisions[-1])
        for x0 in starts:
            x = _newton_iterate(cfm, cjm, [mpmath.mpf(v) for v in x0],
                                config.newton_iterations, tol)
            if x is None:
                continue
            sol = []
            for i in range(nv):
                q = _reconstruct(x[i], config.precisions[-1], config.denominator_bound)
                if q is None:
                    sol = None
                    break
                sol.append(q)
            if sol is not None and all(p.eval(sol) == 0 for p in polys):
                return sol
    return None


def _groebner_resolve(polys, nv):
    """Deterministic exact fallback: lex Gröbner basis settles existence and
    recovers the rational solutions of the full vanishing system."""
    import sympy

    xs = sympy.symbols(f"a0:{nv}")
    sys_polys = []
    for p in polys:
        expr = sympy.Integer(0)
        for e, c in p.terms:
            t = sympy.Rational(c.numerator, c.denominator)
            for xi, pw in zip(xs, e):
                t *= xi ** pw
            expr += t
        sys_polys.append(expr)
    gb = sympy.groebner(sys_polys, *xs, order="lex")
    if list(gb.exprs) == [sympy.Integer(1)]:
        return "none", None
    try:
        sols = sympy.solve(sys_polys, list(xs), dict=True)
    except NotImplementedError:
        return "unresolved", None
    rational = []
    for s in sols:
        if len(s) < nv:
            return "under", None
        vals = []
        ok = True
        for xi in xs:
            v = sympy.nsimplify(s[xi])
            if not v.is_rational:
                ok = False
                break
            vals.append(Fraction(int(sympy.numer(v)), int(sympy.denom(v))))
        if ok:
            rational.append(vals)
    rational = [v for v in rational if all(p.eval(v) == 0 for p in polys)]
    if not rational:
        return "none", None
    if len(rational) > 1:
        return "multiple", rational
    return "unique", rational[0]


def classify_shift(V: CyclicMatrix, W: CyclicMatrix, A, f: AffinePermutation, k: int):
    """Is V + A·W in the open cell Π_f (and totally nonnegative)?"""
    from .exactlin import RankDeficientError, plucker

    Vp = shifted_matrix(V, W, A)
    try:
        P = plucker(Vp, k).sign_normalized()
    except (RankDeficientError, ValueError):
        return False, Vp
    support = frozenset(I for I, v in P.coords if v != 0)
    tnn = all(v >= 0 for _, v in P.coords)
    return tnn and support == frozenset(positroid_of(f, k)), Vp


def shifted_matrix(V: CyclicMatrix, W: CyclicMatrix, A) -> CyclicMatrix:
    k, ell, n = V.rows, W.rows, V.cols
    rows = []
    for r in range(k):
        rows.append([V.entries[r][j]
                     + sum((frac(A[r][s]) * W.entries[s][j] for s in range(ell)),
                           start=Fraction(0))
                     for j in range(n)])
    return CyclicMatrix.from_rows(rows, V.sign_exponent)


def fiber_solve(f: AffinePermutation, V: CyclicMatrix, W: CyclicMatrix,
                config: SolverConfig = SolverConfig(),
                rng: random.Random | None = None,
                minor_polys=None) -> SolveOutcome:
    """Solve for the unique A with all non-positroid Plückers of V + A·W zero.

    `minor_polys` may be shared across cells for the same (V, W)."""
    k, ell = V.rows, W.rows
    nv = k * ell
    rng = rng or random.Random(0)
    if minor_polys is None:
        minor_polys = shifted_minor_polys(V, W)
    support = set(positroid_of(f, k))
    vanish = [p for I, p in minor_polys.items() if I not in support]
    vanish = [p for p in vanish if not p.is_zero()]
    if all(p.degree() <= 1 for p in vanish):
        kind, sol = _solve_linear_system(vanish, nv)
        if kind == "none":
            return SolveOutcome(SolveStatus.NO_SOLUTION, detail="inconsistent linear system")
        if kind == "under":
            raise DegenerateSampleError("underdetermined fiber system")
        A = tuple(tuple(sol[r * ell + s] for s in range(ell)) for r in range(k))
        claimed, _ = classify_shift(V, W, A, f, k)
        return SolveOutcome(SolveStatus.EXACT_LINEAR,
                            FiberPoint(A, f, SolveStatus.EXACT_LINEAR), claimed)
    sol = _newton_solve(vanish, nv, config, rng)
    if sol is not None:
        A = tuple(tuple(sol[r * ell + s] for s in range(ell)) for r in range(k))
        claimed, _ = classify_shift(V, W, A, f, k)
        return SolveOutcome(SolveStatus.RECONSTRUCTED_VERIFIED,
                            FiberPoint(A, f, SolveStatus.RECONSTRUCTED_VERIFIED), claimed)
    if config.use_groebner_fallback:
        kind, data = _groebner_resolve(vanish, nv)
        if kind == "none":
            return SolveOutcome(SolveStatus.NO_SOLUTION, detail="Groebner basis is (1)")
        if kind == "unique":
            A = tuple(tuple(data[r * ell + s] for s in range(ell)) for r in range(k))
            claimed, _ = classify_shift(V, W, A, f, k)
            return SolveOutcome(SolveStatus.RECONSTRUCTED_VERIFIED,
                                FiberPoint(A, f, SolveStatus.RECONSTRUCTED_VERIFIED), claimed)
        if kind in ("under", "multiple"):
            raise DegenerateSampleError(f"fiber system is degenerate ({kind})")
    return SolveOutcome(SolveStatus.UNRESOLVED, detail="solver budget exhausted")


def claims(V: CyclicMatrix, W: CyclicMatrix, candidates,
           config: SolverConfig = SolverConfig(),
           seed: int = 0, sample_id: int = 0):
    """Claim set of the fiber of (V, Z=W^⊥): candidate cells whose fiber point
    is exact, totally nonnegative, and in the open cell.  Returns
    (claimed cells, outcomes per cell)."""
    minor_polys = shifted_minor_polys(V, W)
    outcomes = {}
    claimed = []
    for f in candidates:
        rng = stream(seed, "newton", sample_id, str(f))
        out = fiber_solve(f, V, W, config, rng, minor_polys)
        outcomes[f] = out
        if out.claimed:
            claimed.append(f)
    return claimed, outcomes


def fiber_twist_check(V: CyclicMatrix, W: CyclicMatrix, shifts) -> list[bool]:
    """θ(V + A·W, W) = (W̃, Ṽ − Aᵗ·W̃) exactly, for each A in `shifts`."""
    from .twist import stacked_twist

    Wt, Vt = stacked_twist(V, W)
    k, ell = V.rows, W.rows
    results = []
    for A in shifts:
        Vp = shifted_matrix(V, W, A)
        Wt2, Vt2 = stacked_twist(Vp, W)
        At = [[frac(A[r][s]) for r in range(k)] for s in range(ell)]
        expected_rows = [[Vt.entries[s][j]
                          - sum((At[s][r] * Wt.entries[r][j] for r in range(k)),
                                start=Fraction(0))
                          for j in range(V.cols)] for s in range(ell)]
        results.append(Wt2.entries == Wt.entries
                       and [list(r) for r in Vt2.entries] == expected_rows)
    return results
