"""Positroid cells: Grassmann necklaces, Gale orders, cell identification,
weak separation, clusters, Le-diagram network parametrization, stackability.

Cells are indexed by affine permutations f ∈ S̃_n(−k, n−k); the open cell Π_f
consists of the totally nonnegative points whose Plücker support is exactly
the positroid of f.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .affperm import AffinePermutation
from .exactlin import CyclicMatrix, PluckerVector, frac, plucker


class NotTNNError(ValueError):
    def __init__(self, witness):
        super().__init__(f"negative Plücker coordinate at {witness}")
        self.witness = witness


class WindowClassError(ValueError):
    pass


def necklace_of(f: AffinePermutation, k: int) -> tuple[tuple[int, ...], ...]:
    """Grassmann necklace (I_1, ..., I_n): I_i = {f(j)+k | j < i, f(j)+k ≥ i} mod n."""
    n = f.n
    if not f.in_class(k, n - k):
        raise WindowClassError(f"{f} not in S̃_{n}(−{k},{n - k})")
    neck = []
    for i in range(1, n + 1):
        vals = [f(j) + k for j in range(i - n, i) if f(j) + k >= i]
        if len(vals) != k:
            raise WindowClassError(f"necklace entry I_{i} has size {len(vals)} != {k}")
        neck.append(tuple(sorted((v - 1) % n + 1 for v in vals)))
    return tuple(neck)


def gale_key(i: int, n: int):
    return lambda x: (x - i) % n


def gale_leq(S, T, i: int, n: int) -> bool:
    """Componentwise comparison of k-subsets in the cyclic order starting at i."""
    key = gale_key(i, n)
    s = sorted(S, key=key)
    t = sorted(T, key=key)
    return all(key(a) <= key(b) for a, b in zip(s, t))


def positroid_of(f: AffinePermutation, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets J with I_i ⪯_i J for every necklace entry I_i."""
    n = f.n
    neck = necklace_of(f, k)
    out = []
    for J in combinations(range(1, n + 1), k):
        if all(gale_leq(neck[i - 1], J, i, n) for i in range(1, n + 1)):
            out.append(J)
    return tuple(out)


def _expected_rank(f: AffinePermutation, k: int, a: int, b: int) -> int:
    # i < a and a ≤ f(i)+k requires i ≥ a − k − (window up-bound); scan generously
    _, up = f.displacement_bounds
    return sum(1 for i in range(a - f.n - up - k, a) if a <= f(i) + k < b)


def cell_of(V: CyclicMatrix, k: int | None = None) -> AffinePermutation:
    """The unique f with V ∈ Π_f, for totally nonnegative full-rank V.

    Primary algorithm: f(i) = min{j ≥ i : V(i) ∈ span(V(i+1..j))} − k, then
    mandatory verification of the rank characterization
    rk(V; a, b) = #{i < a | a ≤ f(i)+k < b} for all 1 ≤ a < b ≤ a + n.
    """
    k = V.rows if k is None else k
    n = V.cols
    P = plucker(V, k).sign_normalized()
    for I, val in P.coords:
        if val < 0:
            raise NotTNNError(I)
    window = []
    for i in range(1, n + 1):
        if all(x == 0 for x in V.column(i)):
            window.append(i - k)
            continue
        j = i + 1
        while True:
            if V.rank_range(i, j + 1) == V.rank_range(i + 1, j + 1):
                window.append(j - k)
                break
            j += 1
            if j > i + n:
                raise ValueError("column never enters following span")
    f = AffinePermutation(n, tuple(window))
    for a in range(1, n + 1):
        for b in range(a + 1, a + n + 1):
            if V.rank_range(a, b) != _expected_rank(f, k, a, b):
                raise ValueError("rank characterization failed; input not TNN?")
    return f


class TNNClass(Enum):
    NOT_TNN = "NotTNN"
    TNN = "TNN"
    TOTALLY_POSITIVE = "TotallyPositive"
    IN_GR_GE_M = "InGrGeM"


def tnn_membership(V: CyclicMatrix, k: int | None = None, m: int | None = None) -> TNNClass:
    """Classify by exhaustive Plücker signs, plus the circular window rank test
    (window length k+ℓ with ℓ = n−k−m) when m is given."""
    k = V.rows if k is None else k
    n = V.cols
    try:
        P = plucker(V, k).sign_normalized()
    except Exception:
        return TNNClass.NOT_TNN
    vals = [v for _, v in P.coords]
    if any(v < 0 for v in vals):
        return TNNClass.NOT_TNN
    if all(v > 0 for v in vals):
        return TNNClass.TOTALLY_POSITIVE
    if m is not None:
        ell = n - k - m
        if all(V.rank_range(j - ell, j + k) == k for j in range(1, n + 1)):
            return TNNClass.IN_GR_GE_M
    return TNNClass.TNN


def in_gr_ge_m(V: CyclicMatrix, k: int, m: int) -> bool:
    return tnn_membership(V, k, m) in (TNNClass.TOTALLY_POSITIVE, TNNClass.IN_GR_GE_M)


def is_weakly_separated(S, T) -> bool:
    """No a < b < c < d with a, c ∈ S∖T and b, d ∈ T∖S (or vice versa)."""
    A = sorted(set(S) - set(T))
    B = sorted(set(T) - set(S))

    def crosses(X, Y):
        # some a < b < c < d with a, c ∈ X and b, d ∈ Y (sets are tiny)
        for a, c in combinations(X, 2):
            if any(a < b < c for b in Y) and any(d > c for d in Y):
                return True
        return False

    return not crosses(A, B) and not crosses(B, A)


@dataclass(frozen=True)
class Cluster:
    """Maximal weakly separated collection inside a positroid, containing the
    Grassmann necklace; gives a positive coordinate chart on the cell."""

    base: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    @property
    def coordinates(self) -> tuple[tuple[int, ...], ...]:
        return tuple(J for J in self.members if J != self.base)


def cluster_of(f: AffinePermutation, k: int) -> Cluster:
    """Greedy completion of the necklace to a maximal weakly separated
    collection inside the positroid (deterministic lex candidate order)."""
    n = f.n
    neck = necklace_of(f, k)
    mf = positroid_of(f, k)
    chosen: list[tuple[int, ...]] = []
    for J in dict.fromkeys(neck):
        chosen.append(J)
    for a, b in combinations(chosen, 2):
        assert is_weakly_separated(a, b), "necklace is not weakly separated"
    for J in mf:
        if J in chosen:
            continue
        if all(is_weakly_separated(J, C) for C in chosen):
            chosen.append(J)
    expected = k * (n - k) + 1 - f.inversions
    if len(chosen) != expected:
        raise AssertionError(
            f"cluster size {len(chosen)} != k(n−k)+1−inv = {expected} for {f}")
    base = neck[0]
    members = (base,) + tuple(sorted(J for J in chosen if J != base))
    return Cluster(base, members)


# ---------------------------------------------------------------------------
# Le-diagrams and the network chart


@dataclass(frozen=True)
class LeDiagram:
    """Young-diagram shape inside k×(n−k) with a 0/+ filling obeying the
    Le-condition.  Rows are labeled by the pivots I_1 (top to bottom), columns
    by the non-pivots in decreasing order (left to right); the box (i, j)
    exists iff pivot i < non-pivot j."""

    n: int
    k: int
    pivots: tuple[int, ...]
    plus_boxes: frozenset  # of (pivot, nonpivot) pairs

    @property
    def nonpivots(self) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.n + 1) if j not in self.pivots)

    def boxes(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.pivots for j in self.nonpivots if j > i]

    def box_order(self) -> list[tuple[int, int]]:
        """Deterministic parameter order: by column label, then by row."""
        return sorted((b for b in self.boxes() if b in self.plus_boxes),
                      key=lambda b: (b[1], b[0]))

    def is_le(self) -> bool:
        for (i, j) in self.boxes():
            if (i, j) in self.plus_boxes:
                continue
            above = any((i2, j) in self.plus_boxes for i2 in self.pivots if i2 < i)
            left = any((i, j2) in self.plus_boxes for j2 in self.nonpivots if j2 > j)
            if above and left:
                return False
        return True

    def binary_rows(self) -> list[list[int]]:
        cols = sorted((j for j in self.nonpivots), reverse=True)
        out = []
        for i in self.pivots:
            out.append([1 if (i, j) in self.plus_boxes else 0
                        for j in cols if j > i])
        return out

    def dimension(self) -> int:
        return len(self.plus_boxes)


def _paths(diagram: LeDiagram, row: int, target: int):
    """Staircase paths from source row `row` to sink column `target`:
    alternating down-turns and left-turns at + boxes, with strictly increasing
    column labels ending at `target` and strictly increasing rows.

    Yields (down_turn_boxes, left_turn_boxes)."""
    pivots = diagram.pivots
    plus = diagram.plus_boxes

    def rows_below(r):
        return [p for p in pivots if p > r]

    def extend(r, min_col, downs, lefts):
        # choose the next down-turn in row r at column c with min_col < c ≤ target
        for c in diagram.nonpivots:
            if c <= min_col or c > target or c <= r:
                continue
            if (r, c) not in plus:
                continue
            if c == target:
                yield downs + [(r, c)], lefts
                continue
            # turn left lower in column c, then keep going
            for r2 in rows_below(r):
                if (r2, c) in plus:
                    yield from extend(r2, c, downs + [(r, c)], lefts + [(r2, c)])

    yield from extend(row, 0, [], [])


def network_matrix(diagram: LeDiagram, weights: dict) -> CyclicMatrix:
    """Boundary-measurement matrix of the Le-network in row echelon form:
    entry (r, j) = (−1)^{#pivots between} Σ_paths ∏ w(down turns) / ∏ w(left turns)."""
    n, k = diagram.n, diagram.k
    pivots = diagram.pivots
    rows = []
    for ridx, i in enumerate(pivots):
        row = [Fraction(0)] * n
        row[i - 1] = Fraction(1)
        for j in diagram.nonpivots:
            if j <= i:
                continue
            total = Fraction(0)
            for downs, lefts in _paths(diagram, i, j):
                term = Fraction(1)
                for b in downs:
                    term *= weights[b]
                for b in lefts:
                    term /= weights[b]
                total += term
            between = sum(1 for p in pivots if i < p < j)
            row[j - 1] = total if between % 2 == 0 else -total
        rows.append(row)
    return CyclicMatrix.from_rows(rows, k - 1)


def _le_fillings(n: int, k: int, pivots, dim: int):
    """All Le-valid fillings of the shape with exactly `dim` plus boxes."""
    boxes = [(i, j) for i in pivots
             for j in range(1, n + 1) if j not in pivots and j > i]
    for plus in combinations(boxes, dim):
        d = LeDiagram(n, k, tuple(pivots), frozenset(plus))
        if d.is_le():
            yield d


_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]


@lru_cache(maxsize=None)
def le_diagram_of(f: AffinePermutation, k: int) -> LeDiagram:
    """The Le-diagram of the cell of f, found among Le-valid fillings of the
    necklace shape by exact support matching (subtraction-free path sums make
    the support independent of the choice of positive weights)."""
    n = f.n
    neck = necklace_of(f, k)
    pivots = neck[0]
    dim = k * (n - k) - f.inversions
    support = frozenset(positroid_of(f, k))
    for d in _le_fillings(n, k, pivots, dim):
        w = {b: Fraction(p) for b, p in zip(sorted(d.plus_boxes), _PRIMES)}
        X = network_matrix(d, w)
        if plucker(X, k).support() == support:
            assert cell_of(X, k) == f
            return d
    raise ValueError(f"no Le-diagram found for {f} (k={k})")


def parametrize_cell(f: AffinePermutation, k: int, params) -> CyclicMatrix:
    """Point of Π_f from k(n−k)−inv(f) positive box weights (column-label then
    row order); output has all positroid Plückers > 0 and the rest exactly 0."""
    d = le_diagram_of(f, k)
    params = [frac(p) for p in params]
    if len(params) != d.dimension():
        raise ValueError(f"need {d.dimension()} parameters, got {len(params)}")
    if any(p <= 0 for p in params):
        raise ValueError("parameters must be positive")
    weights = dict(zip(d.box_order(), params))
    return network_matrix(d, weights)


def parametrize_cell_jets(f: AffinePermutation, k: int, params, directions=None) -> CyclicMatrix:
    """Same chart with jet-valued weights: partial i is along parameter i
    (or along the given velocity vectors)."""
    from .exactlin import Jet

    d = le_diagram_of(f, k)
    params = [frac(p) for p in params]
    if directions is None:
        dim = len(params)
        jets = [Jet(p, tuple(Fraction(1 if t == i else 0) for t in range(dim)))
                for i, p in enumerate(params)]
    else:
        dim = len(directions)
        jets = [Jet(p, tuple(frac(v[i]) for v in directions))
                for i, p in enumerate(params)]
    weights = dict(zip(d.box_order(), jets))
    return network_matrix(d, weights)


# ---------------------------------------------------------------------------
# pipe dreams / plabic graph data


@dataclass(frozen=True)
class PlabicGraph:
    """Minimal plabic-graph view of a Le-diagram: trip permutation via the
    pipe dream (cross at 0, elbows at +) and face count via Euler's formula."""

    diagram: LeDiagram

    def trip_permutation(self) -> AffinePermutation:
        d = self.diagram
        n, k = d.n, d.k
        pivots = list(d.pivots)
        nonpivots = list(d.nonpivots)
        width = n - k
        desc = sorted(nonpivots, reverse=True)  # column label at x-position 1..width

        def label_at(x):
            return desc[x - 1]

        def is_elbow(r, x):
            i = pivots[r - 1]
            j = label_at(x)
            return j > i and (i, j) in d.plus_boxes

        g_vals = {}
        for step in range(1, n + 1):
            # boundary step `step` is a down-step at pivot rows, left-step otherwise
            if step in pivots:
                r, x, heading = pivots.index(step) + 1, width, "W"
            else:
                r, x, heading = k, desc.index(step) + 1, "N"
            while 1 <= r <= k and 1 <= x <= width:
                if heading == "W":
                    if is_elbow(r, x):
                        heading = "N"
                        r -= 1
                    else:
                        x -= 1
                else:
                    if is_elbow(r, x):
                        heading = "W"
                        x -= 1
                    else:
                        r -= 1
            if heading == "N":
                g_vals[step] = label_at(x)
            else:
                g_vals[step] = pivots[r - 1] + n
        window = tuple(g_vals[i] - k for i in range(1, n + 1))
        return AffinePermutation(n, window)

    def face_count(self) -> int:
        d = self.diagram
        rows = {i: sorted((j for (i2, j) in d.plus_boxes if i2 == i), reverse=True)
                for i in d.pivots}
        cols = {j: sorted(i for (i, j2) in d.plus_boxes if j2 == j)
                for j in d.nonpivots}
        P = len(d.plus_boxes)
        V = 2 * P + d.n
        E = P + d.n  # white-black pairs plus boundary arcs
        components = 0
        for i in d.pivots:
            if rows[i]:
                E += len(rows[i])  # source -> first white -> ... chains
        for j in d.nonpivots:
            if cols[j]:
                E += len(cols[j])
        # lollipops at boundary vertices not touching any box
        for i in d.pivots:
            if not rows[i]:
                V += 1
                E += 1
        for j in d.nonpivots:
            if not cols[j]:
                V += 1
                E += 1
        # count connected components of the (boxes + boundary-circle) graph:
        # the boundary arcs glue all boundary vertices into one cycle, so the
        # whole complex is connected
        components = 1
        return E - V + 1 + (components - 1)


# ---------------------------------------------------------------------------
# stackability


def is_stackable(f: AffinePermutation, k: int, g: AffinePermutation, ell: int) -> bool:
    """True iff every circular window [j−ℓ, j+k) splits as I ∪ J with
    I a basis of the positroid of f and J a basis of the positroid of g."""
    n = f.n
    if g.n != n:
        raise ValueError("period mismatch")
    mf = set(positroid_of(f, k))
    mg = set(positroid_of(g, ell))
    for j in range(1, n + 1):
        window = [(t - 1) % n + 1 for t in range(j - ell, j + k)]
        if len(set(window)) != k + ell:
            raise ValueError("window wraps onto itself; need k+ℓ ≤ n")
        ok = False
        for I in combinations(sorted(window), k):
            if I in mf and tuple(sorted(set(window) - set(I))) in mg:
                ok = True
                break
        if not ok:
            return False
    return True
