"""Verifiers for the negative-correlation identities of conditioned processes.

Every verifier computes the two sides of an identity (or the margin of an
inequality) by routes that share no intermediate values: probabilities come
from the enumeration oracle or closed-form inclusion-exclusion, geometric
sides from principal angles and wedge coordinates.  Each returns a structured
report listing every sub-check with both values and the gap.

Identity catalog (ids used by the CLI and the campaign runner):

  theorem1       conditional product gap is nonnegative for one or two
                 forbidden blocks
  reduction      the point-augmentation step: joint-probability and
                 conditioned-process formulations agree
  remark1        full-size forbidden block: the gap has an explicit
                 nonnegative closed form
  n1-identity    one forbidden block: gap equals the canonical-split formula
  chain-2/3/4    alternating wedge sum squared equals the gap of the
                 endpoint pair conditioned on interior points being absent
  n2-equal       two equal blocks covering all of R^p: gap = V^2 + Lambda
  n2-unequal     two unequal blocks covering all of R^p
  restricted     blocks spanning less than R^p: reduction to the leading-
                 block process
  degenerate     blocks whose union cannot be contained: intersection
                 accounting plus the oracle inequality
  appendix-M     the coupling matrix M(k) is positive (semi)definite, with
                 determinant and monotonicity cross-checks
  compound       second-compound multiplicativity and the squared-norm
                 transfer identity
  block-diagonal reordered second compound of the two-block Gram is block
                 diagonal with explicit 4x4 blocks
  plucker        quadratic relations among the coordinates of a 2-vector
  lemma3         angle-route containment statistics match the oracle
  oracle-marginals  every inclusion probability matches the enumerated law
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exterior import (
    PluckerVector,
    combo_array,
    compound2,
    gram_cross_inner,
    gram_norm_sq,
    pair_rank,
    plucker_coords,
    validate_combo,
)
from .process import (
    ConditioningError,
    Frame,
    ProcessDistribution,
    SubsetEventSpec,
    condition_not_superset,
    condition_on_point,
    enumerate_distribution,
    inclusion_prob,
    prob_event,
    shift_after_removal,
)
from .subspaces import (
    CaseClassification,
    align_leading_coordinates,
    classify_case,
    jordan_angles,
)

__all__ = [
    "SkipInstance",
    "CheckRecord",
    "VerificationReport",
    "N2MatrixFamily",
    "N2Certificate",
    "verify_theorem1",
    "verify_reduction_step",
    "verify_remark1",
    "verify_n1_identity",
    "verify_chain_formula",
    "build_matrices",
    "verify_n2_equal",
    "verify_n2_unequal",
    "verify_degenerate",
    "verify_restricted",
    "build_M",
    "verify_appendix",
    "verify_compound_identity",
    "verify_block_diagonal",
    "verify_plucker",
    "verify_lemma3",
    "verify_oracle_marginals",
]

ABS_TOL = 1e-10         # floor of the mixed equality tolerance
REL_TOL = 1e-8          # relative part of the mixed equality tolerance
INEQ_SLACK = 1e-10      # inequalities may undershoot by this much
SIN_MIN = 1e-6          # smallest usable principal-angle sine
TAU_MIN = 1e-10         # smallest usable two-block conditioning probability


class SkipInstance(Exception):
    """Instance fails a verifier precondition (degenerate or ill-conditioned)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def mixed_tol(*values: float) -> float:
    scale = max((abs(v) for v in values), default=0.0)
    return max(ABS_TOL, REL_TOL * scale)


@dataclass(frozen=True)
class CheckRecord:
    """One verified equality or inequality inside a report."""

    name: str
    lhs: float
    rhs: float
    tol: float
    kind: str  # "eq" or "ge"
    ok: bool

    @property
    def abs_gap(self) -> float:
        return abs(self.lhs - self.rhs) if self.kind == "eq" else max(self.rhs - self.lhs, 0.0)

    @property
    def severity(self) -> float:
        """Gap in units of the tolerance; > 1 means the check failed."""
        gap = abs(self.lhs - self.rhs) if self.kind == "eq" else self.rhs - self.lhs
        if self.tol > 0:
            return gap / self.tol
        return math.inf if gap > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name, "kind": self.kind, "lhs": self.lhs, "rhs": self.rhs,
            "tol": self.tol, "gap": self.abs_gap, "ok": self.ok,
        }


@dataclass
class VerificationReport:
    """Outcome of one identity verification on one instance."""

    identity_id: str
    instance: dict
    lhs: float
    rhs: float
    abs_gap: float
    rel_gap: float
    verdict: str  # "pass" | "fail" | "skip"
    checks: list[CheckRecord] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def adverse(self) -> float:
        """Worst severity across checks (dimensionless; > 1 means failure)."""
        return max((c.severity for c in self.checks), default=0.0)

    @property
    def worst_check(self) -> str:
        if not self.checks:
            return ""
        return max(self.checks, key=lambda c: c.severity).name

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "instance": self.instance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_gap": self.abs_gap,
            "rel_gap": self.rel_gap,
            "verdict": self.verdict,
            "checks": [c.to_dict() for c in self.checks],
            "diagnostics": self.diagnostics,
        }


class Checker:
    """Accumulates equality / inequality checks and assembles the report."""

    def __init__(self, identity_id: str, instance: dict):
        self.identity_id = identity_id
        self.instance = instance
        self.records: list[CheckRecord] = []
        self.diagnostics: dict = {}

    def eq(self, name: str, lhs: float, rhs: float, tol: float | None = None) -> None:
        lhs, rhs = float(lhs), float(rhs)
        tol = mixed_tol(lhs, rhs) if tol is None else tol
        self.records.append(CheckRecord(name, lhs, rhs, tol, "eq", abs(lhs - rhs) <= tol))

    def ge(self, name: str, value: float, bound: float = 0.0, slack: float = INEQ_SLACK) -> None:
        value, bound = float(value), float(bound)
        self.records.append(CheckRecord(name, value, bound, slack, "ge", value >= bound - slack))

    def report(self, primary: str | None = None) -> VerificationReport:
        if not self.records:
            raise ValueError("no checks recorded")
        head = self.records[0]
        if primary is not None:
            head = next(c for c in self.records if c.name == primary)
        worst = max(self.records, key=lambda c: c.severity)
        if not worst.ok:
            head = worst
        scale = max(abs(head.lhs), abs(head.rhs), 1e-300)
        return VerificationReport(
            identity_id=self.identity_id,
            instance=self.instance,
            lhs=head.lhs,
            rhs=head.rhs,
            abs_gap=head.abs_gap,
            rel_gap=head.abs_gap / scale,
            verdict="pass" if all(c.ok for c in self.records) else "fail",
            checks=self.records,
            diagnostics=self.diagnostics,
        )


def _disjoint(*groups: Iterable[int]) -> None:
    seen: set[int] = set()
    for g in groups:
        for i in g:
            if i in seen:
                raise ValueError(f"constraint sets overlap at index {i}")
            seen.add(i)


def _oracle(f: Frame, dist: ProcessDistribution | None) -> ProcessDistribution:
    return enumerate_distribution(f) if dist is None else dist


# ---------------------------------------------------------------------------
# conditional product gap, reduction step, full-block closed form
# ---------------------------------------------------------------------------

def verify_theorem1(
    f: Frame,
    B1: Sequence[int],
    B2: Sequence[int],
    As: Sequence[Sequence[int]],
    dist: ProcessDistribution | None = None,
    slack: float = INEQ_SLACK,
) -> VerificationReport:
    """Conditional product gap of two disjoint target sets is nonnegative.

    Computes P(B1 in psi) P(B2 in psi) - P(B1 and B2 in psi) from the oracle
    law of psi = (process | no forbidden block fully present) and checks it
    against -slack.  With at most two forbidden blocks the oracle event
    probabilities are also cross-checked against the closed-form path.

    B1 and B2 must be disjoint from each other and the forbidden blocks
    pairwise disjoint; a target set may meet a forbidden block (the gap is
    still well defined, and nonnegativity extends to that case).
    """
    B1 = validate_combo(B1, f.n)
    B2 = validate_combo(B2, f.n)
    As = [validate_combo(a, f.n) for a in As]
    _disjoint(B1, B2)
    _disjoint(*As)
    dist = _oracle(f, dist)
    blocks = tuple(As)
    tau = dist.event_prob_sets(not_supersets=blocks)
    if tau <= 1e-12:
        raise SkipInstance(f"conditioning probability {tau} is numerically zero")
    p1 = dist.event_prob_sets(include=B1, not_supersets=blocks) / tau
    p2 = dist.event_prob_sets(include=B2, not_supersets=blocks) / tau
    joint = dist.event_prob_sets(
        include=tuple(sorted(set(B1 + B2))), not_supersets=blocks
    ) / tau
    chk = Checker("theorem1", {"n": f.n, "p": f.p, "B1": B1, "B2": B2, "As": blocks})
    chk.ge("product gap", p1 * p2 - joint, 0.0, slack)
    all_disjoint = len(set(B1) | set(B2) | {i for a in blocks for i in a}) == (
        len(B1) + len(B2) + sum(len(a) for a in blocks)
    )
    if len(blocks) <= 2 and all_disjoint:
        for name, include, oracle_val in (
            ("tau", (), tau), ("P(B1,cond)", B1, p1 * tau),
            ("P(B2,cond)", B2, p2 * tau),
            ("P(B1B2,cond)", tuple(sorted(B1 + B2)), joint * tau),
        ):
            closed = prob_event(
                f, SubsetEventSpec(include=include, not_supersets=blocks), method="closed"
            )
            chk.eq(f"oracle vs closed {name}", oracle_val, closed, 1e-10)
    chk.diagnostics.update({"tau": tau, "p1": p1, "p2": p2, "joint": joint})
    return chk.report(primary="product gap")


def verify_reduction_step(
    f: Frame,
    y: int,
    B1: Sequence[int],
    B2: Sequence[int],
    As: Sequence[Sequence[int]],
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """The point-augmentation step behind the reduction to single points.

    The four joint probabilities P(y and B in the sample, no forbidden block)
    are computed (a) directly from the oracle law and (b) through the process
    conditioned to contain y; the two routes must agree.  Dividing by the
    no-block probability must reproduce the conditional-process quantities,
    and both formulations must rank their product inequalities identically.
    """
    B1 = validate_combo(B1, f.n)
    B2 = validate_combo(B2, f.n)
    As = [validate_combo(a, f.n) for a in As]
    _disjoint((y,), B1, B2, *As)
    dist = _oracle(f, dist)
    blocks = tuple(As)
    py = inclusion_prob(f, (y,))
    q4 = dist.event_prob(SubsetEventSpec(include=(y,), not_supersets=blocks))
    if q4 <= 1e-12 or py <= 1e-12:
        raise SkipInstance("conditioning on the extra point is numerically degenerate")
    q1 = dist.event_prob(
        SubsetEventSpec(include=tuple(sorted((y,) + B1 + B2)), not_supersets=blocks)
    )
    q2 = dist.event_prob(SubsetEventSpec(include=tuple(sorted((y,) + B1)), not_supersets=blocks))
    q3 = dist.event_prob(SubsetEventSpec(include=tuple(sorted((y,) + B2)), not_supersets=blocks))

    chk = Checker(
        "reduction", {"n": f.n, "p": f.p, "y": y, "B1": B1, "B2": B2, "As": blocks}
    )
    # route via the y-conditioned process
    fy = condition_on_point(f, y)
    dy = enumerate_distribution(fy)
    shift = lambda S: shift_after_removal(S, y)
    blocks_y = tuple(shift(a) for a in blocks)
    for name, q, S in (("q1", q1, B1 + B2), ("q2", q2, B1), ("q3", q3, B2), ("q4", q4, ())):
        via_y = py * dy.event_prob(
            SubsetEventSpec(include=shift(tuple(sorted(S))), not_supersets=blocks_y)
        )
        chk.eq(f"joint vs point-conditioned {name}", q, via_y, 1e-10)
    # route via the block-conditioned process
    tau = dist.event_prob(SubsetEventSpec(not_supersets=blocks))
    if tau <= 1e-12:
        raise SkipInstance(f"conditioning probability {tau} is numerically zero")
    psi = condition_not_superset(f, blocks)
    for name, q, S in (("u1", q1, B1 + B2), ("u2", q2, B1), ("u3", q3, B2), ("u4", q4, ())):
        u = psi.event_prob(SubsetEventSpec(include=tuple(sorted((y,) + tuple(S)))))
        chk.eq(f"conditioned vs scaled joint {name}", u, q / tau, 1e-10)
    # the two inequality formulations are scalar multiples of each other
    lhs_joint, rhs_joint = q1, q2 * q3 / q4
    lhs_cond, rhs_cond = q1 / tau, (q2 / tau) * (q3 / tau) / (q4 / tau)
    chk.eq("scaled lhs", lhs_cond, lhs_joint / tau, 1e-10)
    chk.eq("scaled rhs", rhs_cond, rhs_joint / tau, 1e-10)
    chk.diagnostics["inequality agreement"] = (lhs_joint <= rhs_joint + 1e-12) == (
        lhs_cond <= rhs_cond + 1e-12
    )
    return chk.report()


def verify_remark1(
    f: Frame,
    A1: Sequence[int],
    i: int,
    j: int,
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """Forbidden block of full cardinality: the conditional product gap of two
    points i, j equals

        [ P(block absent) <z_i, z_j>^2 + ||z_i||^2 ||z_j||^2 P(block present) ]
          / P(block absent)^2

    with the left side from the oracle and the right side purely geometric.
    """
    A1 = validate_combo(A1, f.n)
    if len(A1) != f.p:
        raise ValueError(f"the block must have full cardinality {f.p}, got {len(A1)}")
    _disjoint(A1, (i,), (j,))
    dist = _oracle(f, dist)
    tau = dist.event_prob(SubsetEventSpec(not_supersets=(A1,)))
    if tau <= 1e-12:
        raise SkipInstance("block is almost surely present")
    pi = dist.event_prob(SubsetEventSpec(include=(i,), not_supersets=(A1,))) / tau
    pj = dist.event_prob(SubsetEventSpec(include=(j,), not_supersets=(A1,))) / tau
    pij = dist.event_prob(
        SubsetEventSpec(include=tuple(sorted((i, j))), not_supersets=(A1,))
    ) / tau
    lhs = pi * pj - pij
    zi, zj = f.column(i), f.column(j)
    kappa = gram_norm_sq(f.columns(A1))
    tau_geo = 1.0 - kappa
    rhs = (tau_geo * float(zi @ zj) ** 2 + float(zi @ zi) * float(zj @ zj) * kappa) / tau_geo**2
    chk = Checker("remark1", {"n": f.n, "p": f.p, "A1": A1, "i": i, "j": j})
    chk.eq("gap vs closed form", lhs, rhs, 1e-10)
    chk.ge("gap nonnegative", lhs, 0.0)
    return chk.report(primary="gap vs closed form")


# ---------------------------------------------------------------------------
# one forbidden block: canonical-split formula
# ---------------------------------------------------------------------------

def verify_n1_identity(
    f: Frame,
    A1: Sequence[int],
    x: int,
    x2: int,
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """One forbidden block A1 of size k < p: the conditional product gap of
    two points equals

        (1-kappa)^{-2} [ (<v1,v2> + (1-kappa) <w1,w2>)^2 + kappa ||v1 ^ v2||^2 ]

    where (v, w) splits each point's column into the A1 column span and its
    complement after orthogonal alignment, and kappa = P(A1 in sample).
    """
    A1 = validate_combo(A1, f.n)
    if len(A1) >= f.p:
        raise ValueError(f"block size must be < p = {f.p}")
    _disjoint(A1, (x,), (x2,))
    kappa = inclusion_prob(f, A1)
    if not 1e-12 < kappa < 1.0 - 1e-12:
        raise SkipInstance(f"containment probability {kappa} is degenerate")
    dist = _oracle(f, dist)
    tau = dist.event_prob(SubsetEventSpec(not_supersets=(A1,)))
    px = dist.event_prob(SubsetEventSpec(include=(x,), not_supersets=(A1,))) / tau
    px2 = dist.event_prob(SubsetEventSpec(include=(x2,), not_supersets=(A1,))) / tau
    pj = dist.event_prob(
        SubsetEventSpec(include=tuple(sorted((x, x2))), not_supersets=(A1,))
    ) / tau
    lhs = px * px2 - pj

    k = len(A1)
    aligned = align_leading_coordinates(f, A1)
    v1, w1 = aligned.column(x)[:k], aligned.column(x)[k:]
    v2, w2 = aligned.column(x2)[:k], aligned.column(x2)[k:]
    kappa_geo = gram_norm_sq(aligned.columns(A1))
    sq = (float(v1 @ v2) + (1.0 - kappa_geo) * float(w1 @ w2)) ** 2
    wedge = kappa_geo * (float(v1 @ v1) * float(v2 @ v2) - float(v1 @ v2) ** 2)
    rhs = (sq + wedge) / (1.0 - kappa_geo) ** 2

    chk = Checker("n1-identity", {"n": f.n, "p": f.p, "A1": A1, "x": x, "x2": x2})
    chk.eq("gap vs canonical split", lhs, rhs)
    chk.ge("square component", sq, 0.0, 0.0)
    chk.ge("wedge component", wedge, 0.0, 1e-12)
    chk.diagnostics.update({"kappa": kappa_geo, "aligned_tail_residual": float(
        np.abs(aligned.columns(A1)[k:]).max() if k < f.p else 0.0)})
    return chk.report(primary="gap vs canonical split")


def verify_chain_formula(
    f: Frame, n: int, dist: ProcessDistribution | None = None
) -> VerificationReport:
    """Alternating wedge-sum identity for a chain of points 1..n.

    With psi the process conditioned on the interior points 2..n-1 being
    absent, the square of

        <z_1, z_n> + sum over nonempty T in {2..n-1} of (-1)^{|T|}
                     <z_1 ^ z_T, z_n ^ z_T>

    equals [P(1 in psi) P(n in psi) - P(1 and n in psi)] * P(interior absent)^2.
    """
    if not 2 <= n <= f.p:
        raise ValueError(f"need 2 <= n <= p = {f.p}")
    interior = tuple(range(2, n))
    dist = _oracle(f, dist)
    p_absent = dist.event_prob(SubsetEventSpec(exclude=interior))
    if p_absent <= 1e-12:
        raise SkipInstance("interior points are almost surely present")
    p1 = dist.event_prob(SubsetEventSpec(include=(1,), exclude=interior)) / p_absent
    pn = dist.event_prob(SubsetEventSpec(include=(n,), exclude=interior)) / p_absent
    pj = dist.event_prob(SubsetEventSpec(include=(1, n), exclude=interior)) / p_absent
    inner = 0.0
    for r in range(len(interior) + 1):
        for T in itertools.combinations(interior, r):
            left = np.column_stack([f.column(1), f.columns(T)])
            right = np.column_stack([f.column(n), f.columns(T)])
            inner += (-1.0) ** r * gram_cross_inner(left, right)
    chk = Checker("chain", {"n": f.n, "p": f.p, "points": n})
    chk.eq("squared sides", inner**2, (p1 * pn - pj) * p_absent**2, 1e-9)
    chk.diagnostics.update({"inner_sum": inner, "p_absent": p_absent})
    return chk.report()


# ---------------------------------------------------------------------------
# two-block matrix families
# ---------------------------------------------------------------------------

def _delta(kappa: float, sines: np.ndarray) -> np.ndarray:
    return 1.0 - kappa * sines**2


def _block_A(ai: float, aj: float) -> np.ndarray:
    ci, cj = math.cos(ai), math.cos(aj)
    return np.array([
        [1.0, cj, -ci, ci * cj],
        [cj, 1.0, -ci * cj, ci],
        [-ci, -ci * cj, 1.0, -cj],
        [ci * cj, ci, -cj, 1.0],
    ])


def _block_B(ai: float, aj: float, kappa1: float, kappa2: float) -> np.ndarray:
    out = _block_A(ai, aj)
    s2 = (math.sin(ai) * math.sin(aj)) ** 2
    out[0, 0] = 1.0 - kappa2 * s2
    out[3, 3] = 1.0 - kappa1 * s2
    return out


def _block_A_prime(ai: float, aj: float, kappa1: float, kappa2: float) -> np.ndarray:
    ci, cj = math.cos(ai), math.cos(aj)
    d1i = 1.0 - kappa1 * math.sin(ai) ** 2
    d1j = 1.0 - kappa1 * math.sin(aj) ** 2
    d2i = 1.0 - kappa2 * math.sin(ai) ** 2
    d2j = 1.0 - kappa2 * math.sin(aj) ** 2
    return np.array([
        [d2i * d2j, d2i * cj, -d2j * ci, ci * cj],
        [d2i * cj, d2i * d1j, -ci * cj, d1j * ci],
        [-d2j * ci, -ci * cj, d2j * d1i, -d1i * cj],
        [ci * cj, d1j * ci, -d1i * cj, d1i * d1j],
    ])


def _block_C(ai: float, aj: float, kappa1: float, kappa2: float) -> np.ndarray:
    ci, cj = math.cos(ai), math.cos(aj)
    s2 = (math.sin(ai) * math.sin(aj)) ** 2
    k1, k2 = kappa1, kappa2
    c11 = k2 * (ci * cj) ** 2 + k1 * (1 - k2 * s2) ** 2
    c12 = cj * (k2 * ci**2 + k1 * (1 - k2 * s2))
    c13 = -ci * (k2 * cj**2 + k1 * (1 - k2 * s2))
    c14 = ci * cj * (k2 + k1 * (1 - k2 * s2))
    c22 = k1 * cj**2 + k2 * ci**2
    c23 = -ci * cj * (k2 + k1 * (1 - k2 * s2))
    c24 = ci * (k1 * cj**2 + k2 * (1 - k1 * s2))
    c33 = k1 * ci**2 + k2 * cj**2
    c34 = -cj * (k1 * ci**2 + k2 * (1 - k1 * s2))
    c44 = k1 * (ci * cj) ** 2 + k2 * (1 - k1 * s2) ** 2
    return np.array([
        [c11, c12, c13, c14],
        [c12, c22, c23, c24],
        [c13, c23, c33, c34],
        [c14, c24, c34, c44],
    ])


@dataclass(frozen=True)
class N2MatrixFamily:
    """The 4x4 blocks attached to an angle pair (i, j) in the two-block
    decomposition, acting on (t(i,j), t(i,k+j), t(j,k+i), t(k+i,k+j))."""

    A: np.ndarray
    B: np.ndarray
    A_prime: np.ndarray
    C: np.ndarray


def build_matrices(
    i: int, j: int, angles: Sequence[float], kappa1: float, kappa2: float
) -> N2MatrixFamily:
    """Construct A, B, A', C for the 1-based angle pair (i, j).

    C is built from its closed-form entries and asserted entrywise against
    the subtraction route A' - (1 - k1 - k2 + k1 k2 sin^2 a_i sin^2 a_j) B
    within 1e-12.
    """
    angles = np.asarray(angles, dtype=float)
    if not (1 <= i < j <= angles.size):
        raise ValueError(f"need 1 <= i < j <= {angles.size}")
    ai, aj = float(angles[i - 1]), float(angles[j - 1])
    A = _block_A(ai, aj)
    B = _block_B(ai, aj, kappa1, kappa2)
    Ap = _block_A_prime(ai, aj, kappa1, kappa2)
    C = _block_C(ai, aj, kappa1, kappa2)
    tau_ij = 1.0 - kappa1 - kappa2 + kappa1 * kappa2 * (math.sin(ai) * math.sin(aj)) ** 2
    defect = np.abs(C - (Ap - tau_ij * B)).max()
    if defect > 1e-12:
        raise AssertionError(f"closed-form C disagrees with the subtraction route by {defect}")
    return N2MatrixFamily(A=A, B=B, A_prime=Ap, C=C)


def build_M(angles: Sequence[float]) -> np.ndarray:
    """Coupling matrix of the diagonal coordinates: off-diagonal entries
    cos(a_i) cos(a_j), diagonal 1 - prod of the other sin^2."""
    angles = np.asarray(angles, dtype=float)
    k = angles.size
    if k < 2:
        raise ValueError("need at least two angles")
    sin2 = np.sin(angles) ** 2
    cos = np.cos(angles)
    M = np.outer(cos, cos)
    total = np.prod(sin2)
    for i in range(k):
        others = total / sin2[i] if sin2[i] > 0 else np.prod(np.delete(sin2, i))
        M[i, i] = 1.0 - others
    return M


# ---------------------------------------------------------------------------
# the two-block pipeline (equal and unequal block sizes, full span)
# ---------------------------------------------------------------------------

@dataclass
class N2Certificate:
    """All intermediate quantities of the two-block gap decomposition.

    lhs_product_gap is the probability-route value
    P(x, no blocks) P(x', no blocks) - tau P(x, x', no blocks);
    the geometric route asserts it equals V^2 + lambda_total with
    lambda_total >= 0.  lambda_part2 includes the kappa1*kappa2 prefactor of
    the coupling-matrix quadratic form, so that
    lambda_total = lambda_part1 + lambda_part2 + lambda_coupling + s_extra.
    """

    kappa1: float
    kappa2: float
    tau: float
    V: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    c2: np.ndarray
    t_tilde: PluckerVector
    delta1: np.ndarray
    delta2: np.ndarray
    lambda_total: float
    lambda_part1: float
    lambda_part2: float
    lambda_coupling: float
    s_extra: float
    lhs_product_gap: float
    report: VerificationReport


def _quad(v: np.ndarray, M: np.ndarray) -> float:
    return float(v @ M @ v)


def _tbar(t: PluckerVector, i: int, j: int, k: int) -> np.ndarray:
    return np.array([t.t(i, j), t.t(i, k + j), t.t(j, k + i), t.t(k + i, k + j)])


def _sos_part1(t: PluckerVector, k: int, cos, sin, kappa1, kappa2) -> float:
    total = 0.0
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            s2 = (sin[i - 1] * sin[j - 1]) ** 2
            b1 = (
                t.t(i, j) * cos[i - 1] * cos[j - 1]
                + t.t(i, j + k) * cos[i - 1]
                - t.t(j, i + k) * cos[j - 1]
                + t.t(i + k, j + k) * (1.0 - kappa1 * s2)
            )
            b2 = (
                t.t(i, j) * (1.0 - kappa2 * s2)
                + t.t(i, j + k) * cos[j - 1]
                - t.t(j, i + k) * cos[i - 1]
                + t.t(i + k, j + k) * cos[i - 1] * cos[j - 1]
            )
            total += kappa2 * b1**2 + kappa1 * b2**2
    return total


def _n2_core(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    x: int,
    x2: int,
    expect_tag: str,
    dist: ProcessDistribution | None,
) -> N2Certificate:
    A1 = validate_combo(A1, f.n)
    A2 = validate_combo(A2, f.n)
    if len(A1) > len(A2):
        A1, A2 = A2, A1
    _disjoint(A1, A2, (x,), (x2,))
    cls = classify_case(f, A1, A2)
    if cls.case_tag != expect_tag:
        raise SkipInstance(f"case tag {cls.case_tag}, verifier handles {expect_tag}")
    k1, k2 = cls.k1, cls.k2
    dec = jordan_angles(f.columns(A1), f.columns(A2))
    if dec.intersection.shape[1] or dec.e1_only.shape[1]:
        raise SkipInstance("blocks share directions; full-span route does not apply")
    angles = dec.angles
    sin, cos = np.sin(angles), np.cos(angles)
    if sin.min() < SIN_MIN:
        raise SkipInstance("principal angle too small; expansion is ill-conditioned")
    kappa1, kappa2 = cls.kappa1, cls.kappa2
    tau_geo = 1.0 - kappa1 - kappa2 + kappa1 * kappa2 * float(np.prod(sin**2))
    if tau_geo < TAU_MIN:
        raise SkipInstance(f"no-block probability {tau_geo} is too small")

    ident = "n2-equal" if expect_tag == "EQUAL_FULL" else "n2-unequal"
    chk = Checker(ident, {
        "n": f.n, "p": f.p, "A1": A1, "A2": A2, "x": x, "x2": x2, "tag": cls.case_tag,
    })

    z, z2 = f.column(x), f.column(x2)
    basis = np.concatenate([dec.u, dec.v, dec.e2_only], axis=1)
    coef = np.linalg.solve(basis, z)
    coef2 = np.linalg.solve(basis, z2)
    k, ell = k1, k2 - k1
    a, b, c = coef[:k], coef[k : 2 * k], coef[2 * k :]
    a2, b2, c2 = coef2[:k], coef2[k : 2 * k], coef2[2 * k :]
    t = plucker_coords(np.concatenate([a, b]), np.concatenate([a2, b2]))
    delta1, delta2 = _delta(kappa1, sin), _delta(kappa2, sin)

    colsA1, colsA2 = f.columns(A1), f.columns(A2)
    dist = _oracle(f, dist)
    tau = dist.event_prob(SubsetEventSpec(not_supersets=(A1, A2)))
    px = dist.event_prob(SubsetEventSpec(include=(x,), not_supersets=(A1, A2)))
    px2 = dist.event_prob(SubsetEventSpec(include=(x2,), not_supersets=(A1, A2)))
    pxx = dist.event_prob(
        SubsetEventSpec(include=tuple(sorted((x, x2))), not_supersets=(A1, A2))
    )
    chk.eq("tau angles vs oracle", tau_geo, tau, 1e-10)

    # scalar-coupling value V by the wedge route and the coordinate route
    V_wedge = (
        float(z @ z2)
        - gram_cross_inner(np.column_stack([z, colsA1]), np.column_stack([z2, colsA1]))
        - gram_cross_inner(np.column_stack([z, colsA2]), np.column_stack([z2, colsA2]))
    )
    cosp = cos / np.sqrt(delta1 * delta2)
    sinp = sin * np.sqrt(tau_geo + kappa1 * kappa2 * (sin**2 - np.prod(sin**2))) \
        / np.sqrt(delta1 * delta2)
    zt0 = np.concatenate([a * np.sqrt(delta2) + b * np.sqrt(delta1) * cosp,
                          b * np.sqrt(delta1) * sinp])
    zt02 = np.concatenate([a2 * np.sqrt(delta2) + b2 * np.sqrt(delta1) * cosp,
                           b2 * np.sqrt(delta1) * sinp])
    zt = np.concatenate([zt0, math.sqrt(1.0 - kappa1) * c])
    zt2 = np.concatenate([zt02, math.sqrt(1.0 - kappa1) * c2])
    V = float(zt @ zt2)
    chk.eq("V wedge route vs coordinates", V_wedge, V)
    chk.eq("||zt||^2 = P(x, no blocks)", float(zt @ zt), px, 1e-10)
    chk.eq("||zt'||^2 = P(x', no blocks)", float(zt2 @ zt2), px2, 1e-10)

    # bracket: the no-block pair probability by the raw wedge route
    bracket = (
        gram_norm_sq(np.column_stack([z, z2]))
        - gram_norm_sq(np.column_stack([z, z2, colsA1]))
        - gram_norm_sq(np.column_stack([z, z2, colsA2]))
    )
    chk.eq("bracket = P(x, x', no blocks)", bracket, pxx, 1e-10)

    mats = {
        (i, j): build_matrices(i, j, angles, kappa1, kappa2)
        for i in range(1, k + 1) for j in range(i + 1, k + 1)
    }
    pair_iter = list(mats)
    tail = np.array([t.t(i, k + i) for i in range(1, k + 1)])
    sprime = (1.0 - kappa1 - kappa2 + kappa1 * kappa2 * sin**2) * sin**2
    w_b = sum(_quad(_tbar(t, i, j, k), mats[(i, j)].B) for (i, j) in pair_iter)
    w_b += float(tail**2 @ sin**2)
    w_ap = sum(_quad(_tbar(t, i, j, k), mats[(i, j)].A_prime) for (i, j) in pair_iter)
    w_ap += float(tail**2 @ sprime)

    # component of the points inside the paired directions
    z0 = dec.u @ a + dec.v @ b
    z02 = dec.u @ a2 + dec.v @ b2
    chk.eq(
        "pair norm matches the block route",
        gram_norm_sq(np.column_stack([z0, z02])),
        _quad_sum_A(t, k, mats, tail, sin),
    )
    chk.eq(
        "block drop matches coordinates (first block)",
        gram_cross_inner(np.column_stack([z, colsA1]), np.column_stack([z2, colsA1])),
        kappa1 * (float(np.sum(b * b2 * sin**2)) + float(c @ c2)),
    )
    chk.eq(
        "block drop matches coordinates (second block)",
        gram_cross_inner(np.column_stack([z, colsA2]), np.column_stack([z2, colsA2])),
        kappa2 * float(np.sum(a * a2 * sin**2)),
    )
    chk.eq(
        "inner-product drop matches coordinates",
        V_wedge,
        float(np.sum(a * a2 * delta2 + b * b2 * delta1 + (a * b2 + b * a2) * cos))
        + (1.0 - kappa1) * float(c @ c2),
    )

    xa = np.outer(a, c2) - np.outer(a2, c)
    xb = np.outer(b, c2) - np.outer(b2, c)
    ncc = gram_norm_sq(np.column_stack([c, c2])) if ell >= 2 else 0.0
    cross_terms = float(np.sum(
        np.sum(xa * xa, axis=1)
        + delta1 * np.sum(xb * xb, axis=1)
        + 2.0 * cos * np.sum(xa * xb, axis=1)
    )) if ell else 0.0
    chk.eq(
        "no-block pair splits over the extra directions",
        bracket,
        w_b + (1.0 - kappa1) * ncc + cross_terms,
    )

    nzt = gram_norm_sq(np.column_stack([zt, zt2]))
    nzt0 = gram_norm_sq(np.column_stack([zt0, zt02]))
    chk.eq("reduced pair norm matches the weighted route", nzt0, w_ap)
    if ell:
        scaled_cross = float(np.sum(
            delta2 * np.sum(xa * xa, axis=1)
            + delta1 * np.sum(xb * xb, axis=1)
            + 2.0 * cos * np.sum(xa * xb, axis=1)
        ))
        chk.eq(
            "reduced pair splits over the extra directions",
            nzt,
            nzt0 + (1.0 - kappa1) * ((1.0 - kappa1) * ncc + scaled_cross),
        )

    lam_total = nzt - tau_geo * bracket
    lam_k1 = nzt0 - tau_geo * w_b

    lam_part1 = _sos_part1(t, k, cos, sin, kappa1, kappa2)
    xq = tail * sin**2
    lam_part2 = kappa1 * kappa2 * _quad(xq, build_M(angles)) if k >= 2 else 0.0
    lam_coupling = 0.0
    for (i, j) in pair_iter:
        s2 = (sin[i - 1] * sin[j - 1]) ** 2
        rest = float(np.prod(np.delete(sin, [i - 1, j - 1]) ** 2)) if k > 2 else 1.0
        lam_coupling += kappa1 * kappa2 * s2 * (1.0 - rest) * _quad(
            _tbar(t, i, j, k), mats[(i, j)].B
        )
    if k == 1:
        # a single angle has no pair blocks and its reduced gap cancels exactly
        chk.eq("single-angle gap vanishes", lam_k1, 0.0, 1e-12)
    else:
        chk.eq(
            "gap decomposition into squares",
            lam_k1,
            lam_part1 + lam_part2 + lam_coupling,
        )
    s_extra = lam_total - lam_k1 if ell else 0.0
    if ell:
        prod_sin = float(np.prod(sin**2))
        s_closed = kappa2 * (1.0 - kappa1) * (1.0 - kappa1 * prod_sin) * ncc
        for i in range(k):
            rest = float(np.prod(np.delete(sin, i) ** 2)) if k > 1 else 1.0
            s_closed += kappa2 * (
                (cos[i] ** 2 + kappa1 * sin[i] ** 2 * (1.0 - rest)) * float(xa[i] @ xa[i])
                + delta1[i] * (1.0 - kappa1 * prod_sin) * float(xb[i] @ xb[i])
                + 2.0 * (1.0 - kappa1 * prod_sin) * cos[i] * float(xa[i] @ xb[i])
            )
        chk.eq("extra-direction surplus matches closed form", s_extra, s_closed)
        chk.ge("extra-direction surplus nonnegative", s_closed, 0.0)
    if k == 2:
        b3 = (t.t(1, 3) * sin[0] ** 2 * cos[1] + t.t(2, 4) * sin[1] ** 2 * cos[0])
        lam_sos = (
            _sos_part1(t, 2, cos, sin, kappa1, kappa2) + kappa1 * kappa2 * b3**2
        )
        chk.eq("sum-of-squares route vs quadratic-form route", lam_sos, lam_k1, 1e-9)

    chk.ge("gap term nonnegative", lam_total, 0.0)
    lhs_product_gap = px * px2 - tau * pxx
    chk.eq("product gap = V^2 + gap term", lhs_product_gap, V**2 + lam_total)
    chk.diagnostics.update({"angles": angles.tolist(), "kappa1": kappa1, "kappa2": kappa2})
    report = chk.report(primary="product gap = V^2 + gap term")
    return N2Certificate(
        kappa1=kappa1, kappa2=kappa2, tau=tau, V=V,
        a=a, b=b, c=c, a2=a2, b2=b2, c2=c2,
        t_tilde=t, delta1=delta1, delta2=delta2,
        lambda_total=lam_total, lambda_part1=lam_part1, lambda_part2=lam_part2,
        lambda_coupling=lam_coupling, s_extra=s_extra,
        lhs_product_gap=lhs_product_gap, report=report,
    )


def _quad_sum_A(t: PluckerVector, k: int, mats, tail: np.ndarray, sin: np.ndarray) -> float:
    total = sum(_quad(_tbar(t, i, j, k), mats[(i, j)].A) for (i, j) in mats)
    return total + float(tail**2 @ sin**2)


def verify_n2_equal(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    x: int,
    x2: int,
    dist: ProcessDistribution | None = None,
) -> N2Certificate:
    """Two equal-size blocks spanning all of R^p: full certificate for the
    decomposition  product gap = V^2 + Lambda,  Lambda >= 0."""
    return _n2_core(f, A1, A2, x, x2, "EQUAL_FULL", dist)


def verify_n2_unequal(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    x: int,
    x2: int,
    dist: ProcessDistribution | None = None,
) -> N2Certificate:
    """Two blocks of different sizes spanning all of R^p: the equal-size
    certificate plus the extra-direction surplus term."""
    return _n2_core(f, A1, A2, x, x2, "UNEQUAL_FULL", dist)


def verify_degenerate(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    x: int,
    x2: int,
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """Blocks whose union cannot be contained in the sample: the subspaces
    must share a direction, and the conditional product inequality holds."""
    A1 = validate_combo(A1, f.n)
    A2 = validate_combo(A2, f.n)
    if len(A1) > len(A2):
        A1, A2 = A2, A1
    _disjoint(A1, A2, (x,), (x2,))
    cls = classify_case(f, A1, A2)
    if cls.case_tag != "DEGENERATE":
        raise SkipInstance(f"case tag {cls.case_tag}, verifier handles DEGENERATE")
    dec = jordan_angles(f.columns(A1), f.columns(A2))
    chk = Checker("degenerate", {
        "n": f.n, "p": f.p, "A1": A1, "A2": A2, "x": x, "x2": x2,
    })
    chk.ge("shared directions", float(dec.intersection.shape[1]), 1.0, 0.0)
    inner = verify_theorem1(f, (x,), (x2,), [A1, A2], dist=dist)
    for rec in inner.checks:
        chk.records.append(rec)
    chk.diagnostics["intersection_dim"] = dec.intersection.shape[1]
    return chk.report()


def verify_restricted(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    x: int,
    x2: int,
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """Blocks spanning fewer than p directions: probabilities reduce to the
    leading-block process plus tail corrections, and the conditional product
    gap dominates (V + tau <w1,w2>)^2 / tau^2."""
    A1 = validate_combo(A1, f.n)
    A2 = validate_combo(A2, f.n)
    if len(A1) > len(A2):
        A1, A2 = A2, A1
    _disjoint(A1, A2, (x,), (x2,))
    cls = classify_case(f, A1, A2)
    if cls.case_tag != "RESTRICTED":
        raise SkipInstance(f"case tag {cls.case_tag}, verifier handles RESTRICTED")
    chi = cls.chi
    union = tuple(sorted(A1 + A2))
    aligned = align_leading_coordinates(f, union)
    tail_res = float(np.abs(aligned.columns(union)[chi:]).max())
    sub = Frame(aligned.rows[:chi])
    w1 = aligned.column(x)[chi:]
    w2 = aligned.column(x2)[chi:]

    dist = enumerate_distribution(aligned) if dist is None else dist
    dist0 = enumerate_distribution(sub)
    ev = lambda d, inc: d.event_prob(
        SubsetEventSpec(include=tuple(sorted(inc)), not_supersets=(A1, A2))
    )
    tau, tau0 = ev(dist, ()), ev(dist0, ())
    if tau <= TAU_MIN:
        raise SkipInstance(f"no-block probability {tau} is too small")
    px, px0 = ev(dist, (x,)), ev(dist0, (x,))
    px2, px20 = ev(dist, (x2,)), ev(dist0, (x2,))
    pxx, pxx0 = ev(dist, (x, x2)), ev(dist0, (x, x2))

    v1, v2 = sub.column(x), sub.column(x2)
    V = (
        float(v1 @ v2)
        - gram_cross_inner(np.column_stack([v1, sub.columns(A1)]),
                           np.column_stack([v2, sub.columns(A1)]))
        - gram_cross_inner(np.column_stack([v1, sub.columns(A2)]),
                           np.column_stack([v2, sub.columns(A2)]))
    )
    ww = float(w1 @ w2)
    nw = float(w1 @ w1) * float(w2 @ w2) - ww**2

    chk = Checker("restricted", {
        "n": f.n, "p": f.p, "A1": A1, "A2": A2, "x": x, "x2": x2, "chi": chi,
    })
    chk.eq("aligned block tail vanishes", tail_res, 0.0, 1e-10)
    chk.eq("no-block probability restricts", tau, tau0, 1e-10)
    chk.eq("point x restricts", px, px0 + tau0 * float(w1 @ w1), 1e-9)
    chk.eq("point x' restricts", px2, px20 + tau0 * float(w2 @ w2), 1e-9)
    chk.eq(
        "pair restricts",
        pxx,
        pxx0 + float(w2 @ w2) * px0 + float(w1 @ w1) * px20 + tau0 * nw - 2.0 * V * ww,
        1e-9,
    )
    lhs = (px / tau) * (px2 / tau) - pxx / tau
    rhs = (px0 * px20 - tau0 * pxx0 + tau0**2 * ww**2 + 2.0 * tau0 * ww * V) / tau0**2
    chk.eq("conditional gap reduces", lhs, rhs, 1e-9)
    chk.eq(
        "bound regroups as a square",
        V**2 + tau0**2 * ww**2 + 2.0 * tau0 * ww * V,
        (V + tau0 * ww) ** 2,
        1e-10,
    )
    chk.ge("leading-block gap dominates V^2", px0 * px20 - tau0 * pxx0 - V**2, 0.0)
    chk.ge("conditional gap nonnegative", lhs, 0.0)
    chk.diagnostics.update({"V": V, "w_inner": ww, "tau": tau})
    return chk.report(primary="conditional gap reduces")


# ---------------------------------------------------------------------------
# coupling matrix positivity (appendix material)
# ---------------------------------------------------------------------------

def closed_form_det_m3(angles: Sequence[float]) -> float:
    """Closed form of det M(3):
    (prod sin^2 + pairwise products of sin^2) * prod cos^2."""
    angles = np.asarray(angles, dtype=float)
    if angles.size != 3:
        raise ValueError("closed form is for three angles")
    s = np.sin(angles) ** 2
    pairs = s[0] * s[1] + s[0] * s[2] + s[1] * s[2]
    return float((np.prod(s) + pairs) * np.prod(np.cos(angles) ** 2))


def _sherman_morrison_det(b: np.ndarray, a: np.ndarray) -> float:
    """Determinant of the reduced matrix diag(n_ii - 1) + ones, times prod(a),
    by the rank-one update formula det = prod(d) + sum_i prod_{j != i} d_j
    (expanded so a vanishing pivot cannot divide).  b sorted descending."""
    k = b.size
    prods = np.array([np.prod(np.delete(b, i)) for i in range(k)])
    d = (1.0 - prods) / a - 1.0
    det0 = np.prod(d) + sum(np.prod(np.delete(d, i)) for i in range(k))
    return float(np.prod(a) * det0)


def _f_profile(b_head: np.ndarray, bk: float) -> float:
    """The final-pivot profile whose positivity closes the induction:
    f(bk) = 1 - prod(b_head) + (bk - prod(b_head)) * sum (1-b_i)/(b_i - prod_others)."""
    P = float(np.prod(b_head))
    total = 0.0
    for i in range(b_head.size):
        others = P / b_head[i] * bk
        total += (1.0 - b_head[i]) / (b_head[i] - others)
    return 1.0 - P + (bk - P) * total


def verify_appendix(angles: Sequence[float]) -> VerificationReport:
    """Positivity suite for the coupling matrix M(k).

    Checks the smallest eigenvalue (semidefinite at k = 2, definite beyond),
    the rank-one-update determinant route against the direct determinant, the
    k = 3 closed form, the perfect-square quadratic form at k = 2, and the
    monotone final-pivot profile with positive value at zero for k >= 3.
    """
    angles = np.asarray(angles, dtype=float)
    k = angles.size
    if k < 2:
        raise ValueError("need at least two angles")
    if angles.min() <= 1e-9 or angles.max() >= math.pi / 2 - 1e-9:
        raise ValueError("angles must lie strictly inside (0, pi/2)")
    M = build_M(angles)
    eigmin = float(np.linalg.eigvalsh(M).min())
    chk = Checker("appendix-M", {"k": k, "angles": angles.tolist()})
    chk.ge("smallest eigenvalue (semidefinite)", eigmin, 0.0, 1e-12)
    if k >= 3:
        chk.ge("smallest eigenvalue (definite)", eigmin, 1e-14, 1e-15)
    direct = float(np.linalg.det(M))
    order = np.argsort(-(np.sin(angles) ** 2), kind="stable")
    b = np.sin(angles[order]) ** 2
    a = np.cos(angles[order]) ** 2
    sm = _sherman_morrison_det(b, a)
    chk.eq("rank-one-update determinant", sm, direct,
           max(1e-14, 1e-10 * max(abs(sm), abs(direct))))
    if k == 3:
        chk.eq("k=3 determinant closed form", direct, closed_form_det_m3(angles), 1e-12)
    if k == 2:
        for t1, t2 in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (0.3, 0.7)):
            tvec = np.array([t1, t2])
            chk.eq(
                f"k=2 quadratic form is a perfect square at t=({t1},{t2})",
                _quad(tvec, M),
                (t1 * math.cos(angles[1]) + t2 * math.cos(angles[0])) ** 2,
                1e-12,
            )
    if k >= 3:
        grid = np.linspace(0.0, b[-2], 100)
        vals = np.array([_f_profile(b[:-1], bk) for bk in grid])
        chk.ge("final-pivot profile nondecreasing", float(np.diff(vals).min()), 0.0, 1e-12)
        chk.ge("final-pivot profile positive at zero", float(vals[0]), 0.0, -1e-15)
    chk.diagnostics.update({"eigmin": eigmin, "det": direct})
    return chk.report()


# ---------------------------------------------------------------------------
# structural checks: compound transfer, block reordering, quadratic relations
# ---------------------------------------------------------------------------

def verify_compound_identity(
    M: np.ndarray, N: np.ndarray, t: np.ndarray
) -> VerificationReport:
    """Second-compound multiplicativity and the squared-norm transfer
    ||t compound2(H)||^2 = <t, t compound2(H H^T)> for H = M N."""
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    t = np.asarray(t, dtype=float)
    H = M @ N
    comp_prod = compound2(H)
    chk = Checker("compound", {"shape_M": M.shape, "shape_N": N.shape})
    mult_gap = float(np.abs(comp_prod - compound2(M) @ compound2(N)).max())
    chk.eq("multiplicativity residual", mult_gap, 0.0, 1e-12)
    lhs = float(np.linalg.norm(t @ comp_prod) ** 2)
    rhs = float(t @ (compound2(H @ H.T) @ t))
    chk.eq("squared-norm transfer", lhs, rhs, max(1e-12, 1e-12 * max(abs(lhs), abs(rhs))))
    return chk.report(primary="squared-norm transfer")


def reorder_permutation(k: int) -> list[int]:
    """Positions (0-based, lexicographic pairs of 1..2k) realizing the order
    (i,j) (i,j+k) (j,i+k) (i+k,j+k) over i<j, then the diagonal pairs (i,i+k)."""
    m = 2 * k
    order: list[tuple[int, int]] = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            order += [(i, j), (i, j + k), (j, i + k), (i + k, j + k)]
    order += [(i, i + k) for i in range(1, k + 1)]
    return [pair_rank(i, j, m) for (i, j) in order]


def verify_block_diagonal(
    angles: Sequence[float],
    kappa1: float | None = None,
    kappa2: float | None = None,
) -> VerificationReport:
    """The reordered second compound of the two-block Gram matrix is exactly
    block diagonal: 4x4 blocks per angle pair plus a sin^2 tail.

    With containment probabilities supplied, the same is checked for the
    rescaled system, whose blocks are the A' family.
    """
    angles = np.asarray(angles, dtype=float)
    k = angles.size
    if k < 2:
        raise ValueError("need at least two angles")
    sin, cos = np.sin(angles), np.cos(angles)
    m = 2 * k
    H = np.zeros((m, m))
    H[:k, :k] = np.eye(k)
    H[k:, :k] = np.diag(cos)
    H[k:, k:] = np.diag(sin)
    perm = reorder_permutation(k)
    chk = Checker("block-diagonal", {"k": k, "angles": angles.tolist(),
                                     "scaled": kappa1 is not None})

    def check_system(tagname: str, big: np.ndarray, blocks, tail_expected: np.ndarray) -> None:
        G = big[np.ix_(perm, perm)]
        nb = 4 * (k * (k - 1) // 2)
        expected = np.zeros_like(G)
        pos = 0
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                expected[pos : pos + 4, pos : pos + 4] = blocks(i, j)
                pos += 4
        expected[nb:, nb:] = np.diag(tail_expected)
        chk.eq(f"{tagname}: residual off the blocks", float(np.abs(G - expected).max()),
               0.0, 1e-12)

    check_system(
        "plain system",
        compound2(H @ H.T),
        lambda i, j: _block_A(angles[i - 1], angles[j - 1]),
        sin**2,
    )
    if kappa1 is not None and kappa2 is not None:
        delta1, delta2 = _delta(kappa1, sin), _delta(kappa2, sin)
        tau_i = 1.0 - kappa1 - kappa2 + kappa1 * kappa2 * sin**2
        cosp = cos / np.sqrt(delta1 * delta2)
        sinp = sin * np.sqrt(tau_i) / np.sqrt(delta1 * delta2)
        H1 = np.zeros((m, m))
        H1[:k, :k] = np.eye(k)
        H1[k:, :k] = np.diag(cosp)
        H1[k:, k:] = np.diag(sinp)
        D = np.diag(np.concatenate([np.sqrt(delta2), np.sqrt(delta1)]))
        big = compound2(D) @ compound2(H1 @ H1.T) @ compound2(D)
        check_system(
            "rescaled system",
            big,
            lambda i, j: _block_A_prime(angles[i - 1], angles[j - 1], kappa1, kappa2),
            tau_i * sin**2,
        )
    return chk.report()


def verify_plucker(x: Sequence[float], y: Sequence[float]) -> VerificationReport:
    """Quadratic relations among the coordinates of a wedge of two vectors:
    the four-index relation on every quadruple, and for even dimension 2k the
    shifted-pair form t(i,j)t(i+k,j+k) + t(i,j+k)t(j,i+k) = t(i,i+k)t(j,j+k)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = plucker_coords(x, y)
    m = x.size
    chk = Checker("plucker", {"dim": m})
    worst = 0.0
    for (i, j, k_, l) in itertools.combinations(range(1, m + 1), 4):
        worst = max(worst, abs(t.t(i, j) * t.t(k_, l) - t.t(i, k_) * t.t(j, l)
                               + t.t(i, l) * t.t(j, k_)))
    chk.eq("four-index relation residual", worst, 0.0, 1e-12)
    if m % 2 == 0 and m >= 4:
        k = m // 2
        worst = 0.0
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                worst = max(worst, abs(
                    t.t(i, j) * t.t(i + k, j + k) + t.t(i, j + k) * t.t(j, i + k)
                    - t.t(i, i + k) * t.t(j, j + k)))
        chk.eq("shifted-pair relation residual", worst, 0.0, 1e-12)
    return chk.report()


def verify_lemma3(
    f: Frame,
    A1: Sequence[int],
    A2: Sequence[int],
    dist: ProcessDistribution | None = None,
) -> VerificationReport:
    """Angle-route containment statistics of a block pair match the oracle:
    both containments, the union probability, the no-block probability, and
    (for equal sizes) the squared inner product of the block wedges, together
    with the product-minus-union upper bound."""
    from .subspaces import pair_containment_stats

    A1 = validate_combo(A1, f.n)
    A2 = validate_combo(A2, f.n)
    _disjoint(A1, A2)
    try:
        stats = pair_containment_stats(f, A1, A2)
    except ConditioningError as exc:
        raise SkipInstance(str(exc)) from exc
    dist = _oracle(f, dist)
    chk = Checker("lemma3", {"n": f.n, "p": f.p, "A1": A1, "A2": A2})
    chk.eq("first containment vs oracle", stats.kappa1, dist.marginal(A1), 1e-10)
    chk.eq("second containment vs oracle", stats.kappa2, dist.marginal(A2), 1e-10)
    chk.eq("union vs oracle", stats.union_prob, dist.marginal(tuple(sorted(A1 + A2))), 1e-10)
    chk.eq(
        "no-block probability vs oracle",
        stats.not_superset_prob,
        dist.event_prob(SubsetEventSpec(not_supersets=(A1, A2))),
        1e-10,
    )
    if len(A1) == len(A2):
        cross = gram_cross_inner(f.columns(A1), f.columns(A2)) ** 2
        chk.eq("block-wedge inner product vs angles", cross, stats.cross_inner_sq, 1e-10)
    chk.ge(
        "product bound",
        stats.kappa1 * stats.kappa2 - stats.union_prob - stats.cross_inner_sq,
        0.0,
        1e-12,
    )
    return chk.report()


def verify_oracle_marginals(f: Frame, max_order: int | None = None) -> VerificationReport:
    """Every inclusion probability of order <= p equals the corresponding
    marginal of the enumerated law within 1e-10."""
    if f.n > 63:
        raise ValueError("marginal sweep is meant for desk-scale ground sets (N <= 63)")
    dist = enumerate_distribution(f)
    masks = dist._masks
    probs = dist.probs
    worst = 0.0
    top = min(f.p, max_order) if max_order else f.p
    for k in range(top + 1):
        combos = combo_array(f.n, k)
        if k == 0:
            worst = max(worst, abs(1.0 - float(probs.sum())))
            continue
        sel = f.rows.T[combos]                      # (C, k, p)
        grams = sel @ sel.transpose(0, 2, 1)        # (C, k, k)
        incl = np.linalg.det(grams)
        smasks = (np.uint64(1) << combos.astype(np.uint64)).sum(axis=1)
        contains = (masks[None, :] & smasks[:, None]) == smasks[:, None]
        marg = contains @ probs
        worst = max(worst, float(np.abs(incl - marg).max()))
    chk = Checker("oracle-marginals", {"n": f.n, "p": f.p})
    chk.eq("worst marginal deviation", worst, 0.0, 1e-10)
    return chk.report()
