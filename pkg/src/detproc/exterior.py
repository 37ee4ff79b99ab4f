"""Dense exterior-algebra kernel.

Wedge products and inner products of multivectors over R^n, second compound
matrices, Plucker coordinates of a pair of vectors, and Gram-determinant
formulas for wedge norms.  Index sets are 1-based and strictly increasing;
multivector coefficients are stored on lexicographically ordered combos.

Two routes exist for every wedge norm: the coefficient expansion (KVector)
and the Gram determinant (`gram_norm_sq`, `gram_cross_inner`).  The Gram
route is the production path, O(k^3); the expansion is kept as an
independent cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "validate_combo",
    "combo_array",
    "lex_pairs",
    "pair_rank",
    "subset_rank",
    "KVector",
    "wedge",
    "inner",
    "wedge_columns",
    "compound2",
    "PluckerVector",
    "plucker_coords",
    "gram_norm_sq",
    "gram_cross_inner",
]


def validate_combo(indices: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Return ``indices`` as a tuple, checking it is a strictly increasing
    1-based combo, bounded by ``n`` when given."""
    combo = tuple(int(i) for i in indices)
    for a, b in zip(combo, combo[1:]):
        if a >= b:
            raise ValueError(f"index combo must be strictly increasing, got {combo}")
    if combo and combo[0] < 1:
        raise ValueError(f"indices are 1-based, got {combo}")
    if n is not None and combo and combo[-1] > n:
        raise ValueError(f"index {combo[-1]} out of range 1..{n}")
    return combo


@lru_cache(maxsize=256)
def combo_array(n: int, k: int) -> np.ndarray:
    """All k-subsets of {0..n-1} as a (C(n,k), k) int array, lexicographic."""
    if k < 0 or k > n:
        return np.empty((0, max(k, 0)), dtype=np.intp)
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.intp,
        count=math.comb(n, k) * k,
    )
    return combos.reshape(-1, k) if k else np.empty((1, 0), dtype=np.intp)


def lex_pairs(m: int) -> list[tuple[int, int]]:
    """All 1-based pairs (i, j), i < j <= m, in lexicographic order."""
    return [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]


def pair_rank(i: int, j: int, m: int) -> int:
    """0-based lexicographic position of the 1-based pair (i, j) among pairs of 1..m."""
    if not (1 <= i < j <= m):
        raise ValueError(f"need 1 <= i < j <= {m}, got ({i}, {j})")
    return (i - 1) * (2 * m - i) // 2 + (j - i - 1)


def subset_rank(combo: Sequence[int], n: int) -> int:
    """0-based lexicographic rank of a 1-based k-combo among all k-combos of 1..n."""
    k = len(combo)
    rank = 0
    prev = 0
    for pos, c in enumerate(combo):
        for skipped in range(prev + 1, c):
            rank += math.comb(n - skipped, k - pos - 1)
        prev = c
    return rank


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted union of two disjoint increasing combos; None on overlap."""
    merged = []
    inversions = 0
    ia = ib = 0
    while ia < len(a) and ib < len(b):
        if a[ia] == b[ib]:
            return None
        if a[ia] < b[ib]:
            merged.append(a[ia])
            ia += 1
        else:
            merged.append(b[ib])
            ib += 1
            inversions += len(a) - ia
    merged.extend(a[ia:])
    merged.extend(b[ib:])
    return (-1 if inversions % 2 else 1), tuple(merged)


@dataclass(frozen=True)
class KVector:
    """Grade-k multivector over R^dim with coefficients on increasing combos.

    Zero coefficients may be omitted from ``coeffs``.
    """

    grade: int
    dim: int
    coeffs: dict[tuple[int, ...], float]

    def __post_init__(self) -> None:
        if self.grade < 0:
            raise ValueError("grade must be >= 0")
        for combo in self.coeffs:
            validate_combo(combo, self.dim)
            if len(combo) != self.grade:
                raise ValueError(f"combo {combo} has size != grade {self.grade}")

    @classmethod
    def scalar(cls, dim: int, value: float = 1.0) -> "KVector":
        return cls(0, dim, {(): float(value)} if value else {})

    @classmethod
    def basis(cls, dim: int, combo: Iterable[int], value: float = 1.0) -> "KVector":
        c = validate_combo(combo, dim)
        return cls(len(c), dim, {c: float(value)})

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "KVector":
        v = np.asarray(vec, dtype=float)
        return cls(1, v.size, {(i + 1,): float(x) for i, x in enumerate(v) if x != 0.0})

    def wedge(self, other: "KVector") -> "KVector":
        return wedge(self, other)

    def inner(self, other: "KVector") -> float:
        return inner(self, other)

    def norm_sq(self) -> float:
        return sum(c * c for c in self.coeffs.values())

    def coefficient(self, combo: Iterable[int]) -> float:
        return self.coeffs.get(validate_combo(combo, self.dim), 0.0)


def wedge(a: KVector, b: KVector) -> KVector:
    """Antisymmetric bilinear product; overlapping combos contribute zero.

    When grade(a) + grade(b) exceeds the ambient dimension the result is the
    zero multivector of that grade.
    """
    if a.dim != b.dim:
        raise ValueError(f"ambient dimension mismatch: {a.dim} != {b.dim}")
    grade = a.grade + b.grade
    out: dict[tuple[int, ...], float] = {}
    if grade <= a.dim:
        for ca, va in a.coeffs.items():
            for cb, vb in b.coeffs.items():
                hit = _merge_sign(ca, cb)
                if hit is None:
                    continue
                sign, merged = hit
                out[merged] = out.get(merged, 0.0) + sign * va * vb
    return KVector(grade, a.dim, {c: v for c, v in out.items() if v != 0.0})


def inner(a: KVector, b: KVector) -> float:
    """Euclidean inner product of two multivectors of equal grade."""
    if a.grade != b.grade:
        raise ValueError(f"grade mismatch: {a.grade} != {b.grade}")
    if a.dim != b.dim:
        raise ValueError(f"ambient dimension mismatch: {a.dim} != {b.dim}")
    if len(b.coeffs) < len(a.coeffs):
        a, b = b, a
    return sum(v * b.coeffs.get(c, 0.0) for c, v in a.coeffs.items())


def wedge_columns(frame_columns: Sequence[Sequence[float]], S: Iterable[int]) -> KVector:
    """Left-to-right wedge of the columns selected by the 1-based combo ``S``.

    ``S = ()`` gives the grade-0 unit.
    """
    cols = [np.asarray(c, dtype=float) for c in frame_columns]
    if not cols:
        raise ValueError("need at least one column to fix the ambient dimension")
    dim = cols[0].size
    combo = validate_combo(S, len(cols))
    out = KVector.scalar(dim)
    for idx in combo:
        out = wedge(out, KVector.from_vector(cols[idx - 1]))
    return out


def compound2(M: np.ndarray) -> np.ndarray:
    """Second compound: all 2x2 minors, rows/cols indexed by lexicographic pairs.

    Multiplicative: compound2(M @ N) == compound2(M) @ compound2(N).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] < 2 or M.shape[1] < 2:
        raise ValueError(f"need a matrix with >= 2 rows and columns, got shape {M.shape}")
    r, c = M.shape
    rp = combo_array(r, 2)
    cp = combo_array(c, 2)
    ri, rj = rp[:, 0], rp[:, 1]
    ck, cl = cp[:, 0], cp[:, 1]
    return M[np.ix_(ri, ck)] * M[np.ix_(rj, cl)] - M[np.ix_(ri, cl)] * M[np.ix_(rj, ck)]


@dataclass(frozen=True)
class PluckerVector:
    """Coefficients t(i, j) = x_i y_j - x_j y_i of a wedge of two vectors,
    stored in lexicographic pair order."""

    dim: int
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = self.dim * (self.dim - 1) // 2
        if self.values.shape != (expected,):
            raise ValueError(f"expected {expected} components for dim {self.dim}")
        self.values.setflags(write=False)

    def t(self, i: int, j: int) -> float:
        """t(i, j) for any i != j (1-based); antisymmetric in (i, j)."""
        if i == j:
            return 0.0
        if i < j:
            return float(self.values[pair_rank(i, j, self.dim)])
        return -float(self.values[pair_rank(j, i, self.dim)])

    def norm_sq(self) -> float:
        return float(self.values @ self.values)

    def as_kvector(self) -> KVector:
        pairs = lex_pairs(self.dim)
        return KVector(2, self.dim, {p: float(v) for p, v in zip(pairs, self.values) if v != 0.0})


def plucker_coords(x: Sequence[float], y: Sequence[float]) -> PluckerVector:
    """Plucker coordinates of the oriented plane spanned by x and y."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ValueError(f"need two equal-length vectors, got {xv.shape} and {yv.shape}")
    if xv.size < 2:
        raise ValueError("vectors must have length >= 2")
    pairs = combo_array(xv.size, 2)
    i, j = pairs[:, 0], pairs[:, 1]
    return PluckerVector(xv.size, xv[i] * yv[j] - xv[j] * yv[i])


def gram_norm_sq(cols: np.ndarray) -> float:
    """||wedge of the columns||^2 as the Gram determinant det(cols^T cols).

    Empty selection gives 1; more columns than rows gives 0.
    """
    cols = np.asarray(cols, dtype=float)
    if cols.ndim != 2:
        raise ValueError("expected a 2-d array of column vectors")
    if cols.shape[1] == 0:
        return 1.0
    if cols.shape[1] > cols.shape[0]:
        return 0.0
    return float(np.linalg.det(cols.T @ cols))


def gram_cross_inner(a_cols: np.ndarray, b_cols: np.ndarray) -> float:
    """<wedge of a-columns, wedge of b-columns> = det(a^T b) for equal counts."""
    a = np.asarray(a_cols, dtype=float)
    b = np.asarray(b_cols, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"column blocks must have equal shape, got {a.shape} and {b.shape}")
    if a.shape[1] == 0:
        return 1.0
    if a.shape[1] > a.shape[0]:
        return 0.0
    return float(np.linalg.det(a.T @ b))
