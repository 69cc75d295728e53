"""Right/left twists on stacked matrices and the stacked twist map θ.

For U with columns U(j), U(j+n) = (−1)^{k−1} U(j), the right twist Ũ = τ(U)
is defined column-wise by
    ⟨ũ(j), U(j−ℓ)⟩ = (−1)^j,   ⟨ũ(j), U(j−ℓ+1)⟩ = … = ⟨ũ(j), U(j+k−1)⟩ = 0,
requiring every circular window [j−ℓ, j+k) of columns to be a basis.  The
stacked twist map sends (V, W) to (W̃, Ṽ) where stack(W̃, Ṽ) = τ(stack(V, W)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlin import CyclicMatrix, Jet, frac, mat_solve, stack


class NotCircularGenericError(ValueError):
    def __init__(self, window_start: int):
        super().__init__(f"window [{window_start}, ...) is singular")
        self.window_start = window_start


@dataclass(frozen=True)
class StackedPair:
    """V (k×n) on top of W (ℓ×n), both with column sign rule (−1)^{k−1};
    requires m := n − k − ℓ even."""

    V: CyclicMatrix
    W: CyclicMatrix

    def __post_init__(self):
        k, ell, n = self.V.rows, self.W.rows, self.V.cols
        if self.W.cols != n:
            raise ValueError("V and W must have the same number of columns")
        if (n - k - ell) % 2:
            raise ValueError("m = n − k − ℓ must be even")
        if self.V.sign_exponent != k - 1 or self.W.sign_exponent != k - 1:
            raise ValueError("V and W must both carry sign exponent k−1")

    @property
    def k(self) -> int:
        return self.V.rows

    @property
    def ell(self) -> int:
        return self.W.rows

    @property
    def n(self) -> int:
        return self.V.cols

    @property
    def m(self) -> int:
        return self.n - self.k - self.ell

    def stacked(self) -> CyclicMatrix:
        return stack(self.V, self.W)

    def is_circular_generic(self) -> bool:
        return is_circular_generic(self.stacked(), self.ell)


def window_determinants(U: CyclicMatrix, ell: int):
    """The n circular window determinants Δ_{[j−ℓ, j+k)}(U), j = 1..n."""
    return [U.window_minor(j - ell, j - ell + U.rows) for j in range(1, U.cols + 1)]


def is_circular_generic(U: CyclicMatrix, ell: int) -> bool:
    return all(not _val_zero(d) for d in window_determinants(U, ell))


def _val_zero(x) -> bool:
    return (x.value == 0) if isinstance(x, Jet) else (x == 0)


def right_twist(U: CyclicMatrix, ell: int) -> CyclicMatrix:
    """τ(U): per column one exact (k+ℓ)×(k+ℓ) solve; output satisfies
    ũ(j+n) = (−1)^{ℓ−1} ũ(j)."""
    r, n = U.rows, U.cols
    k = r - ell
    if U.sign_exponent != k - 1:
        raise ValueError("U must carry sign exponent k−1 = rows−ℓ−1")
    cols = []
    for j in range(1, n + 1):
        window = [U.column(t) for t in range(j - ell, j + k)]
        rhs = [Fraction(0)] * r
        rhs[0] = Fraction(-1 if j % 2 else 1)
        try:
            cols.append(mat_solve(window, rhs))
        except Exception as exc:
            raise NotCircularGenericError(j - ell) from exc
    rows = [[cols[j][i] for j in range(n)] for i in range(r)]
    return CyclicMatrix.from_rows(rows, ell - 1)


def left_twist(Ut: CyclicMatrix, ell: int) -> CyclicMatrix:
    """Inverse of the right twist: U(j) is pinned by ⟨ũ(j+ℓ), U(j)⟩ = (−1)^{j+ℓ}
    and ⟨ũ(i), U(j)⟩ = 0 for i ∈ (j−k, j+ℓ)."""
    r, n = Ut.rows, Ut.cols
    k = r - ell
    if Ut.sign_exponent != ell - 1:
        raise ValueError("twisted matrix must carry sign exponent ℓ−1")
    cols = []
    for j in range(1, n + 1):
        idx = list(range(j - k + 1, j + ell + 1))
        window = [Ut.column(i) for i in idx]
        rhs = [Fraction(0)] * r
        rhs[-1] = Fraction(-1 if (j + ell) % 2 else 1)
        try:
            cols.append(mat_solve(window, rhs))
        except Exception as exc:
            raise NotCircularGenericError(j - k + 1) from exc
    rows = [[cols[j][i] for j in range(n)] for i in range(r)]
    return CyclicMatrix.from_rows(rows, k - 1)


def stacked_twist(V: CyclicMatrix, W: CyclicMatrix) -> tuple[CyclicMatrix, CyclicMatrix]:
    """θ(V, W) = (W̃, Ṽ): W̃ is the first k rows of τ(stack(V, W)), Ṽ the last ℓ."""
    pair = StackedPair(V, W)
    Ut = right_twist(pair.stacked(), pair.ell)
    Wt = CyclicMatrix(pair.k, pair.n, Ut.sign_exponent, Ut.entries[: pair.k])
    Vt = CyclicMatrix(pair.ell, pair.n, Ut.sign_exponent, Ut.entries[pair.k:])
    return Wt, Vt


def alt(W: CyclicMatrix) -> CyclicMatrix:
    """Multiply column j by (−1)^{j−1}."""
    ent = tuple(tuple(x if j % 2 == 0 else -x for j, x in enumerate(row))
                for row in W.entries)
    return CyclicMatrix(W.rows, W.cols, W.sign_exponent, ent)


# ---------------------------------------------------------------------------
# minor identities as verifiable contracts


def _abs(x: Fraction) -> Fraction:
    return -x if x < 0 else x


def _sign_str(lhs, rhs) -> str:
    if lhs == rhs:
        return "+"
    if lhs == -rhs:
        return "-"
    return "?"


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    instance: tuple
    lhs: Fraction
    rhs_abs: Fraction
    sign: str
    ok: bool


def _circular_set(vals, n):
    reduced = sorted({(v - 1) % n + 1 for v in vals})
    return tuple(reduced)


def verify_minor_identities(V: CyclicMatrix, W: CyclicMatrix) -> list[IdentityCheck]:
    """Exhaustively check the twist minor identities on (V, W):

    * window inversion: Δ_{[j, j+k+ℓ)}(Ũ) · Δ_{[j−ℓ, j+k)}(U) = (−1)^{j+…+(j+k+ℓ−1)}
    * double-interval exchange: Δ_J(Ũ) = ±Δ_I(U)/(Δ_{[a−ℓ,a+k)}(U)·Δ_{[b−ℓ,b+k)}(U))
      for J = [a,a+p) ∪ [b,b+q), I = [a+k−q,a+k) ∪ [b+k−p,b+k), p+q = k+ℓ
    * consecutive minors: Δ_{[j−k,j)}(W̃)·Δ_{[j−k−ℓ,j)}(U) = ±Δ_{[j−ℓ,j)}(W) and
      Δ_{[j,j+ℓ)}(Ṽ)·Δ_{[j−ℓ,j+k)}(U) = ±Δ_{[j,j+k)}(V)

    Violations are reported, not raised.
    """
    pair = StackedPair(V, W)
    k, ell, n = pair.k, pair.ell, pair.n
    U = pair.stacked()
    Ut = right_twist(U, ell)
    Wt = CyclicMatrix(k, n, Ut.sign_exponent, Ut.entries[:k])
    Vt = CyclicMatrix(ell, n, Ut.sign_exponent, Ut.entries[k:])
    checks: list[IdentityCheck] = []

    for j in range(1, n + 1):
        lhs = Ut.window_minor(j, j + k + ell)
        dU = U.window_minor(j - ell, j + k)
        exponent = sum(range(j, j + k + ell))
        target = Fraction(-1 if exponent % 2 else 1)
        checks.append(IdentityCheck(
            "window_inversion", (j,), lhs, _abs(target / dU),
            _sign_str(lhs * dU, target), lhs * dU == target))

    for p in range(0, k + ell + 1):
        q = k + ell - p
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                J = [a + t for t in range(p)] + [b + t for t in range(q)]
                I = [a + k - q + t for t in range(q)] + [b + k - p + t for t in range(p)]
                Jset = _circular_set(J, n)
                Iset = _circular_set(I, n)
                if len(Jset) != k + ell or len(Iset) != k + ell:
                    continue
                lhs = Ut.minor(list(Jset))
                rhs = U.minor(list(Iset)) / (
                    U.window_minor(a - ell, a + k) * U.window_minor(b - ell, b + k))
                checks.append(IdentityCheck(
                    "double_interval", (p, q, a, b), lhs, _abs(rhs),
                    _sign_str(lhs, rhs), _abs(lhs) == _abs(rhs)))

    for j in range(1, n + 1):
        lhs = Wt.window_minor(j - k, j)
        rhs = W.window_minor(j - ell, j) / U.window_minor(j - k - ell, j)
        checks.append(IdentityCheck(
            "consecutive_W", (j,), lhs, _abs(rhs),
            _sign_str(lhs, rhs), _abs(lhs) == _abs(rhs)))
        lhs = Vt.window_minor(j, j + ell)
        rhs = V.window_minor(j, j + k) / U.window_minor(j - ell, j + k)
        checks.append(IdentityCheck(
            "consecutive_V", (j,), lhs, _abs(rhs),
            _sign_str(lhs, rhs), _abs(lhs) == _abs(rhs)))

    return checks


def twist_equivariance_holds(U: CyclicMatrix, ell: int, g) -> bool:
    """τ(g·U) = (g⁻¹)ᵗ · τ(U) for invertible g, checked exactly."""
    from .exactlin import mat_mul

    r = U.rows
    gU = CyclicMatrix.from_rows(mat_mul(g, U.row_list()), U.sign_exponent)
    lhs = right_twist(gU, ell).row_list()
    ginv_t = _inverse_transpose(g)
    rhs = mat_mul(ginv_t, right_twist(U, ell).row_list())
    return lhs == rhs


def _inverse_transpose(g):
    n = len(g)
    cols = []
    for i in range(n):
        e = [Fraction(1) if t == i else Fraction(0) for t in range(n)]
        cols.append(mat_solve([list(map(frac, row)) for row in g], e))
    # columns of g^{-1} are cols; (g^{-1})^t has them as rows
    return [list(c) for c in cols]
