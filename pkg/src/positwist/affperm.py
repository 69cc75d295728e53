"""Affine permutations of period n in window notation.

f: ℤ → ℤ is a bijection with f(i+n) = f(i) + n and Σ (f(i) − i) ≡ 0 mod n;
window notation stores f(1..n).  The class S̃_n(−a, b) consists of the f with
i − a ≤ f(i) ≤ i + b for all i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class AffinePermutation:
    n: int
    window: tuple[int, ...]

    def __post_init__(self):
        if len(self.window) != self.n:
            raise ValueError("window length must equal n")
        if len({v % self.n for v in self.window}) != self.n:
            raise ValueError("window residues must be distinct mod n")
        if sum(v - i - 1 for i, v in enumerate(self.window)) % self.n:
            raise ValueError("sum of displacements must be a multiple of n")

    @staticmethod
    def identity(n: int) -> "AffinePermutation":
        return AffinePermutation(n, tuple(range(1, n + 1)))

    @staticmethod
    def from_string(s: str) -> "AffinePermutation":
        vals = tuple(int(t) for t in s.strip().strip("[]").split(","))
        return AffinePermutation(len(vals), vals)

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.window) + "]"

    def __call__(self, i: int) -> int:
        q, r = divmod(i - 1, self.n)
        return self.window[r] + q * self.n

    @cached_property
    def sum_shift(self) -> int:
        return sum(v - i - 1 for i, v in enumerate(self.window)) // self.n

    @cached_property
    def displacement_bounds(self) -> tuple[int, int]:
        """Minimal (a, b) with i−a ≤ f(i) ≤ i+b."""
        downs = [i + 1 - v for i, v in enumerate(self.window)]
        ups = [v - i - 1 for i, v in enumerate(self.window)]
        return max(0, max(downs)), max(0, max(ups))

    def in_class(self, a: int, b: int) -> bool:
        lo, hi = self.displacement_bounds
        return lo <= a and hi <= b

    @cached_property
    def inversions(self) -> int:
        a, b = self.displacement_bounds
        count = 0
        for i in range(1, self.n + 1):
            fi = self(i)
            for j in range(i + 1, i + a + b):
                if fi > self(j):
                    count += 1
        return count

    def inverse(self) -> "AffinePermutation":
        vals = {}
        a, b = self.displacement_bounds
        for i in range(1 - b, self.n + a + 1):
            v = self(i)
            if 1 <= v <= self.n:
                vals[v] = i
        return AffinePermutation(self.n, tuple(vals[v] for v in range(1, self.n + 1)))

    def compose(self, other: "AffinePermutation") -> "AffinePermutation":
        """(self ∘ other)(i) = self(other(i))."""
        if self.n != other.n:
            raise ValueError("period mismatch")
        return AffinePermutation(self.n,
                                 tuple(self(other(i)) for i in range(1, self.n + 1)))

    def rotate(self, s: int) -> "AffinePermutation":
        """g with g(i) = f(i+s) − s; rotation by n is the identity operation."""
        return AffinePermutation(self.n,
                                 tuple(self(i + s) - s for i in range(1, self.n + 1)))

    def apply_transposition(self, a: int, b: int) -> "AffinePermutation":
        """self ∘ t where t swaps a+jn ↔ b+jn for all j (requires a ≢ b mod n)."""
        n = self.n
        if (b - a) % n == 0 or a >= b:
            raise ValueError("need a < b with distinct residues")
        window = []
        for i in range(1, n + 1):
            if (i - a) % n == 0:
                window.append(self(b + (i - a)))
            elif (i - b) % n == 0:
                window.append(self(a + (i - b)))
            else:
                window.append(self(i))
        return AffinePermutation(n, tuple(window))

    def covers_down(self) -> list["AffinePermutation"]:
        """All g = f∘t with inversions(g) = inversions(f) − 1 (Bruhat cocovers)."""
        a0, b0 = self.displacement_bounds
        # an inversion f(a) > f(b) forces b − a < a0 + b0
        out = []
        target = self.inversions - 1
        for a in range(1, self.n + 1):
            for b in range(a + 1, a + a0 + b0):
                if (b - a) % self.n == 0:
                    continue
                if self(a) <= self(b):
                    continue
                g = self.apply_transposition(a, b)
                if g.inversions == target:
                    out.append(g)
        return sorted(set(out), key=lambda h: h.window)


def enumerate_bounded(n: int, a: int, b: int, inv: int | None = None) -> list[AffinePermutation]:
    """All f ∈ S̃_n(−a, b), optionally filtered by inversion count,
    in lexicographic window order."""
    if a < 0 or b < 0:
        raise ValueError("window bounds must be nonnegative")
    results: list[AffinePermutation] = []
    window: list[int] = []
    used: set[int] = set()

    def backtrack(i: int, disp_sum: int):
        if i > n:
            if disp_sum == 0:
                f = AffinePermutation(n, tuple(window))
                if inv is None or f.inversions == inv:
                    results.append(f)
            return
        remaining = n - i
        for v in range(i - a, i + b + 1):
            if v % n in used:
                continue
            s = disp_sum + (v - i)
            # each later slot can still move the sum by at most b up or a down
            if s + remaining * b < 0 or s - remaining * a > 0:
                continue
            used.add(v % n)
            window.append(v)
            backtrack(i + 1, s)
            window.pop()
            used.discard(v % n)

    backtrack(1, 0)
    return results


def rotation_classes(perms) -> list[list[AffinePermutation]]:
    """Partition into orbits under f ↦ rotate(f, s)."""
    remaining = set(perms)
    classes = []
    while remaining:
        f = min(remaining, key=lambda h: h.window)
        orbit = {f.rotate(s) for s in range(f.n)}
        classes.append(sorted(orbit & remaining, key=lambda h: h.window))
        remaining -= orbit
    return classes
