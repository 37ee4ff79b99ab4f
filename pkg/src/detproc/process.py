"""Fixed-cardinality determinantal processes on {1..N} and their exact laws.

A process is defined by a frame: a p x N matrix with orthonormal rows.  The
probability that a p-subset S is the sample equals the squared p x p minor at
the columns S; the probability that S is contained in the sample equals the
squared wedge norm (Gram determinant) of the columns S.

The module provides closed-form event probabilities (inclusion-exclusion over
forbidden blocks, with excluded points handled by frame surgery), a brute-force
enumeration oracle used as the law of record in all verification, conditional
processes, a non-determinantality certificate for cardinality-2 laws, and an
exact inverse-CDF sampler.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exterior import combo_array, gram_norm_sq, subset_rank, validate_combo

__all__ = [
    "ORTHO_TOL",
    "NEG_CLAMP",
    "NULL_EVENT_TOL",
    "ENUM_CAP_DEFAULT",
    "ConditioningError",
    "EnumerationCapError",
    "Frame",
    "SubsetEventSpec",
    "ProcessDistribution",
    "Rank2Verdict",
    "inclusion_prob",
    "elementary_prob",
    "enumerate_distribution",
    "prob_event",
    "condition_not_superset",
    "condition_on_point",
    "condition_off_point",
    "is_rank2_determinantal_certificate",
    "sample",
    "sample_many",
    "counterexample_frame",
    "shift_after_removal",
]

ORTHO_TOL = 1e-10          # max row-Gram deviation tolerated before re-orthonormalizing
NEG_CLAMP = 1e-14          # negatives above this magnitude are bugs, not rounding
NULL_EVENT_TOL = 1e-12     # conditioning events below this probability are rejected
ENUM_CAP_DEFAULT = 5_000_000


class ConditioningError(ValueError):
    """Conditioning event has (numerically) zero probability."""


class EnumerationCapError(RuntimeError):
    """C(N, p) exceeds the configured enumeration cap."""


def _clamp_prob(value: float, what: str) -> float:
    if value < -NEG_CLAMP:
        raise ValueError(f"{what} is {value}, below the -{NEG_CLAMP} rounding allowance")
    return max(value, 0.0)


def shift_after_removal(S: Iterable[int], y: int) -> tuple[int, ...]:
    """Re-index a combo after ground point y is removed (indices above y drop by 1)."""
    out = []
    for i in S:
        if i == y:
            raise ValueError(f"index {y} was removed from the ground set")
        out.append(i - 1 if i > y else i)
    return tuple(out)


@dataclass(frozen=True)
class Frame:
    """p x N matrix with orthonormal rows; rows are frozen after construction.

    ``reorthonormalized`` records that the input failed the orthonormality
    check by more than ORTHO_TOL and was repaired by modified Gram-Schmidt.
    """

    rows: np.ndarray
    reorthonormalized: bool = False

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError("frame rows must form a 2-d array")
        if not np.all(np.isfinite(rows)):
            raise ValueError("frame entries must be finite")
        p, n = rows.shape
        if not 1 <= p <= n:
            raise ValueError(f"need 1 <= p <= N, got p={p}, N={n}")
        object.__setattr__(self, "rows", rows)
        rows.setflags(write=False)

    @property
    def p(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], fix: bool = True) -> "Frame":
        """Build a frame, re-orthonormalizing (and flagging) if the rows are off
        by more than ORTHO_TOL.  With ``fix=False`` a bad input raises."""
        arr = np.array(rows, dtype=float)
        frame = cls(arr)
        defect = np.abs(arr @ arr.T - np.eye(frame.p)).max()
        if defect <= ORTHO_TOL:
            return frame
        if not fix:
            raise ValueError(f"rows are not orthonormal (defect {defect:.3g})")
        fixed = _modified_gram_schmidt(arr)
        return cls(fixed, reorthonormalized=True)

    @classmethod
    def from_json(cls, text: str) -> "Frame":
        data = json.loads(text)
        frame = cls.from_rows(data["rows"])
        if frame.p != int(data["p"]) or frame.n != int(data["n"]):
            raise ValueError("declared p/n do not match the row data")
        if not 1 < frame.p < frame.n:
            raise ValueError(f"input frames require 1 < p < N, got p={frame.p}, N={frame.n}")
        return frame

    @classmethod
    def from_json_file(cls, path: str) -> "Frame":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    @classmethod
    def from_csv_file(cls, path: str) -> "Frame":
        with open(path, "r", encoding="utf-8") as fh:
            rows = [[float(x) for x in line] for line in csv.reader(fh) if line]
        frame = cls.from_rows(rows)
        if not 1 < frame.p < frame.n:
            raise ValueError(f"input frames require 1 < p < N, got p={frame.p}, N={frame.n}")
        return frame

    @classmethod
    def load(cls, path: str) -> "Frame":
        return cls.from_json_file(path) if path.endswith(".json") else cls.from_csv_file(path)

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "n": self.n, "rows": self.rows.tolist()})

    def column(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.n:
            raise ValueError(f"column index {i} out of range 1..{self.n}")
        return self.rows[:, i - 1]

    def columns(self, S: Iterable[int]) -> np.ndarray:
        combo = validate_combo(S, self.n)
        return self.rows[:, [i - 1 for i in combo]]


def _modified_gram_schmidt(rows: np.ndarray) -> np.ndarray:
    out = rows.astype(float).copy()
    for i in range(out.shape[0]):
        for j in range(i):
            out[i] -= (out[j] @ out[i]) * out[j]
        norm = np.linalg.norm(out[i])
        if norm < 1e-12:
            raise ValueError(f"row {i + 1} is linearly dependent; cannot orthonormalize")
        out[i] /= norm
    return out


@dataclass(frozen=True)
class SubsetEventSpec:
    """Event {include ⊆ φ, exclude ∩ φ = ∅, A ⊄ φ for every A in not_supersets}.

    The include set, exclude set and all not-superset blocks must be pairwise
    disjoint.
    """

    include: tuple[int, ...] = ()
    exclude: tuple[int, ...] = ()
    not_supersets: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "include", validate_combo(self.include))
        object.__setattr__(self, "exclude", validate_combo(self.exclude))
        object.__setattr__(
            self, "not_supersets", tuple(validate_combo(a) for a in self.not_supersets)
        )

    def validate(self, n: int) -> None:
        groups = [("include", self.include), ("exclude", self.exclude)] + [
            (f"not_superset[{i}]", a) for i, a in enumerate(self.not_supersets)
        ]
        seen: dict[int, str] = {}
        for name, combo in groups:
            validate_combo(combo, n)
            for idx in combo:
                if idx in seen:
                    raise ValueError(
                        f"constraint sets overlap: index {idx} appears in {seen[idx]} and {name}"
                    )
                seen[idx] = name


@dataclass(frozen=True)
class ProcessDistribution:
    """Exact law of a cardinality-p process: one probability per p-subset of
    1..N, in lexicographic subset order."""

    n: int
    p: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (math.comb(self.n, self.p),):
            raise ValueError(f"expected {math.comb(self.n, self.p)} probabilities")
        low = probs.min() if probs.size else 0.0
        if low < -NEG_CLAMP:
            raise ValueError(f"probability {low} below the -{NEG_CLAMP} rounding allowance")
        probs = np.maximum(probs, 0.0)
        total = probs.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", probs)
        probs.setflags(write=False)

    @cached_property
    def _combos(self) -> np.ndarray:
        return combo_array(self.n, self.p)

    @cached_property
    def _masks(self) -> np.ndarray:
        if self.n <= 63:
            return (np.uint64(1) << self._combos.astype(np.uint64)).sum(axis=1)
        # wide ground sets fall back to arbitrary-precision masks
        out = np.empty(self._combos.shape[0], dtype=object)
        for r, row in enumerate(self._combos):
            m = 0
            for i in row:
                m |= 1 << int(i)
            out[r] = m
        return out

    def subsets(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) + 1 for i in row) for row in self._combos]

    def items(self):
        for row, pr in zip(self._combos, self.probs):
            yield tuple(int(i) + 1 for i in row), float(pr)

    def prob_of(self, S: Iterable[int]) -> float:
        combo = validate_combo(S, self.n)
        if len(combo) != self.p:
            raise ValueError(f"subset size {len(combo)} != cardinality {self.p}")
        return float(self.probs[subset_rank(combo, self.n)])

    def _mask(self, S: Iterable[int]):
        combo = validate_combo(S, self.n)
        mask = 0
        for i in combo:
            mask |= 1 << (i - 1)
        return np.uint64(mask) if self.n <= 63 else mask

    def marginal(self, S: Iterable[int]) -> float:
        """P(S ⊆ φ) as a sum over the table."""
        m = self._mask(S)
        keep = (self._masks & m) == m
        return float(self.probs[keep].sum())

    def event_prob(self, event: SubsetEventSpec) -> float:
        event.validate(self.n)
        return self.event_prob_sets(event.include, event.exclude, event.not_supersets)

    def event_prob_sets(
        self,
        include: Iterable[int] = (),
        exclude: Iterable[int] = (),
        not_supersets: Sequence[Iterable[int]] = (),
    ) -> float:
        """Event probability from raw sets, without the pairwise-disjointness
        requirement of SubsetEventSpec (overlapping constraints are legal
        here; contradictory ones simply select nothing)."""
        inc = self._mask(include)
        exc = self._mask(exclude)
        zero = np.uint64(0) if self.n <= 63 else 0
        keep = (self._masks & inc) == inc
        keep &= (self._masks & exc) == zero
        for block in not_supersets:
            bm = self._mask(block)
            keep &= (self._masks & bm) != bm
        return float(self.probs[keep].sum())

    def restrict_not_superset(self, As: Sequence[Iterable[int]]) -> "ProcessDistribution":
        """Renormalized restriction to samples containing none of the blocks."""
        keep = np.ones(self.probs.shape, dtype=bool)
        for block in As:
            bm = self._mask(block)
            keep &= (self._masks & bm) != bm
        kept = self.probs * keep
        total = kept.sum()
        if total <= NULL_EVENT_TOL:
            raise ConditioningError(f"conditioning event has probability {total}")
        return ProcessDistribution(self.n, self.p, kept / total)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["subset", "prob"])
        for combo, pr in self.items():
            writer.writerow(["-".join(str(i) for i in combo), repr(pr)])
        return buf.getvalue()


def inclusion_prob(f: Frame, S: Iterable[int]) -> float:
    """P(S ⊆ φ): squared wedge norm of the selected columns.

    1 for the empty set, 0 whenever |S| exceeds the cardinality p.
    """
    combo = validate_combo(S, f.n)
    if len(combo) > f.p:
        return 0.0
    return _clamp_prob(gram_norm_sq(f.columns(combo)), f"P({set(combo)} in sample)")


def elementary_prob(f: Frame, S: Iterable[int]) -> float:
    """P(φ = S): squared p x p minor of the frame at the columns S."""
    combo = validate_combo(S, f.n)
    if len(combo) != f.p:
        raise ValueError(f"elementary events need |S| = p = {f.p}, got {len(combo)}")
    return float(np.linalg.det(f.columns(combo)) ** 2)


def enumerate_distribution(f: Frame, cap: int = ENUM_CAP_DEFAULT) -> ProcessDistribution:
    """Brute-force oracle: the squared minor at every p-subset, in lex order."""
    count = math.comb(f.n, f.p)
    if count > cap:
        raise EnumerationCapError(f"C({f.n}, {f.p}) = {count} exceeds cap {cap}")
    combos = combo_array(f.n, f.p)
    minors = np.linalg.det(f.rows.T[combos])
    return ProcessDistribution(f.n, f.p, minors * minors)


def condition_off_point(f: Frame, y: int) -> tuple[Frame, float]:
    """Condition on y ∉ φ.

    Returns the frame of the conditional process on the ground set without y
    (indices above y shift down by one) together with P(y ∉ φ).  A zero
    column is a sure event: the point is dropped with factor 1.
    """
    z = f.column(y)
    r2 = float(z @ z)
    if r2 >= 1.0 - NULL_EVENT_TOL:
        raise ConditioningError(f"point {y} lies in the sample almost surely")
    keep = [i for i in range(f.n) if i != y - 1]
    if r2 <= 1e-30:
        return Frame(f.rows[:, keep]), 1.0
    rot = _rotation_to_e1(z)
    rows = rot @ f.rows
    rows = rows[:, keep]
    rows[0] /= math.sqrt(1.0 - r2)
    return Frame(rows), 1.0 - r2


def condition_on_point(f: Frame, y: int) -> Frame:
    """Condition on y ∈ φ and drop y: a determinantal process of cardinality
    p - 1 on the ground set without y (indices above y shift down by one)."""
    z = f.column(y)
    r2 = float(z @ z)
    if r2 <= NULL_EVENT_TOL:
        raise ConditioningError(f"P({y} in sample) = {r2}; cannot condition on it")
    if f.p < 2:
        raise ValueError("conditioning on a point needs cardinality p >= 2")
    rot = _rotation_to_e1(z)
    rows = rot @ f.rows
    keep = [i for i in range(f.n) if i != y - 1]
    return Frame(rows[1:, keep])


def _rotation_to_e1(z: np.ndarray) -> np.ndarray:
    """Orthogonal map sending z to +||z|| e_1 (a Householder reflection)."""
    p = z.size
    norm = np.linalg.norm(z)
    v = z.astype(float).copy()
    v[0] -= norm
    vn = np.linalg.norm(v)
    if vn < 1e-15:
        return np.eye(p)
    v /= vn
    return np.eye(p) - 2.0 * np.outer(v, v)


def prob_event(
    f: Frame,
    event: SubsetEventSpec,
    method: str = "auto",
    cap: int = ENUM_CAP_DEFAULT,
) -> float:
    """Probability of a subset event.

    The closed-form path expands the not-superset constraints by
    inclusion-exclusion over inclusion probabilities, evaluated on the
    exclusion-conditioned frame; it is limited to two forbidden blocks.
    The oracle path sums the enumerated table.
    """
    event.validate(f.n)
    if method not in ("auto", "closed", "oracle"):
        raise ValueError(f"unknown method {method!r}")
    if method == "oracle" or (method == "auto" and len(event.not_supersets) > 2):
        return enumerate_distribution(f, cap).event_prob(event)
    if len(event.not_supersets) > 2:
        raise ValueError("closed-form path supports at most 2 not-superset blocks")
    g, factor = f, 1.0
    index_map = {i: i for i in range(1, f.n + 1)}
    for y in sorted(event.exclude, reverse=True):
        norm2 = float(g.column(index_map[y]) @ g.column(index_map[y]))
        if norm2 >= 1.0 - NULL_EVENT_TOL:
            return 0.0
        g, step = condition_off_point(g, index_map[y])
        factor *= step
        removed = index_map[y]
        index_map = {k: (v - 1 if v > removed else v) for k, v in index_map.items() if k != y}
    total = 0.0
    blocks = list(event.not_supersets)
    for r in range(len(blocks) + 1):
        for chosen in itertools.combinations(blocks, r):
            union = set(event.include)
            for block in chosen:
                union.update(block)
            term = inclusion_prob(g, tuple(sorted(index_map[i] for i in union)))
            total += (-1.0) ** r * term
    return _clamp_prob(factor * total, "event probability")


def condition_not_superset(
    f: Frame, As: Sequence[Iterable[int]], cap: int = ENUM_CAP_DEFAULT
) -> ProcessDistribution:
    """Law of (φ | A ⊄ φ for every A in As); generally not determinantal."""
    combos = [validate_combo(a, f.n) for a in As]
    return enumerate_distribution(f, cap).restrict_not_superset(combos)


@dataclass(frozen=True)
class Rank2Verdict:
    """Outcome of the cardinality-2 proportionality test.

    A determinantal law with a zero pair {i, j} but positive marginals at i
    and j forces column proportionality, hence a single ratio
    d({i,k}) : d({j,k}) across every other point k.  Ratios are reported in
    the normalized form r = d({i,k}) / (d({i,k}) + d({j,k})) in [0, 1] so a
    vanishing denominator is representable (r = 1).
    """

    status: str  # "not determinantal" | "inconclusive" | "inapplicable"
    pair: tuple[int, int] | None = None
    witness: tuple[tuple[int, float], tuple[int, float]] | None = None
    detail: str = ""


def is_rank2_determinantal_certificate(d: ProcessDistribution, tol: float = 1e-9) -> Rank2Verdict:
    """Necessary-condition test: can a cardinality-2 law be determinantal?

    Looks for a pair {i, j} with d({i,j}) = 0 and positive marginals, then
    checks the ratio d({i,k}) : d({j,k}) is the same for all k.  Conflicting
    ratios certify the law is not determinantal; agreement is inconclusive.
    """
    if d.p != 2:
        return Rank2Verdict("inapplicable", detail=f"cardinality {d.p} != 2")
    marg = {i: d.marginal((i,)) for i in range(1, d.n + 1)}
    saw_candidate = False
    for i in range(1, d.n + 1):
        for j in range(i + 1, d.n + 1):
            if d.prob_of((i, j)) > tol or marg[i] <= tol or marg[j] <= tol:
                continue
            saw_candidate = True
            ratios = []
            for k in range(1, d.n + 1):
                if k in (i, j):
                    continue
                di = d.prob_of(tuple(sorted((i, k))))
                dj = d.prob_of(tuple(sorted((j, k))))
                if di + dj > tol:
                    ratios.append((k, di / (di + dj)))
            if len(ratios) >= 2:
                lo = min(ratios, key=lambda kr: kr[1])
                hi = max(ratios, key=lambda kr: kr[1])
                if hi[1] - lo[1] > tol:
                    return Rank2Verdict(
                        "not determinantal",
                        pair=(i, j),
                        witness=(lo, hi),
                        detail=(
                            f"zero pair {{{i},{j}}} with positive marginals forces one "
                            f"ratio, but k={lo[0]} gives {lo[1]:.12g} and "
                            f"k={hi[0]} gives {hi[1]:.12g}"
                        ),
                    )
    if saw_candidate:
        return Rank2Verdict("inconclusive", detail="all proportionality ratios agree")
    return Rank2Verdict("inapplicable", detail="no zero pair with positive marginals")


def _sampler_rng(seed: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(0x5D7A9F4B)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_many(f: Frame, seed: int, count: int, cap: int = ENUM_CAP_DEFAULT) -> list[tuple[int, ...]]:
    """Exact draws via inverse CDF over the lexicographic table; deterministic per seed."""
    dist = enumerate_distribution(f, cap)
    cum = np.cumsum(dist.probs)
    cum[-1] = max(cum[-1], 1.0)  # guard the top edge against rounding
    rng = _sampler_rng(seed)
    picks = np.searchsorted(cum, rng.random(count), side="right")
    combos = dist._combos
    return [tuple(int(i) + 1 for i in combos[idx]) for idx in picks]


def sample(f: Frame, seed: int, cap: int = ENUM_CAP_DEFAULT) -> tuple[int, ...]:
    """One exact draw from the process law; deterministic given the seed."""
    return sample_many(f, seed, 1, cap)[0]


def counterexample_frame() -> Frame:
    """The 2 x 4 frame whose not-superset conditioning is provably not
    determinantal: rows (1,0,1,0)/sqrt(2) and (0,1,0,1)/sqrt(2)."""
    s = 1.0 / math.sqrt(2.0)
    return Frame(np.array([[s, 0.0, s, 0.0], [0.0, s, 0.0, s]]))
