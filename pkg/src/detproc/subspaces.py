"""Principal angles between column subspaces and the paired canonical bases.

Angles come from the singular values of the cross-Gram matrix of
orthonormalized bases.  Each generic singular value sigma in (0, 1) yields a
triple (u_i, v_i, w_i) with v_i = u_i cos(a_i) + w_i sin(a_i); singular values
at 1 are intersection directions, and leftover directions of either subspace
are reported separately.  Also provides the containment statistics of a pair
of index blocks, orthogonal re-alignment of a frame onto leading coordinates,
and the case classification used by the two-block verifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .process import ConditioningError, Frame, inclusion_prob

__all__ = [
    "INTERSECTION_SV",
    "W_SIN_MIN",
    "JordanDecomposition",
    "jordan_angles",
    "PairContainmentStats",
    "pair_containment_stats",
    "align_leading_coordinates",
    "CaseClassification",
    "classify_case",
    "CASE_TAGS",
]

INTERSECTION_SV = 1.0 - 1e-9   # singular values at least this are zero angles
W_SIN_MIN = 1e-6               # below this sine the w-direction is not recoverable

CASE_TAGS = ("EQUAL_FULL", "UNEQUAL_FULL", "DEGENERATE", "RESTRICTED", "N1_FALLBACK")


def _as_columns(vectors) -> np.ndarray:
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    elif arr.ndim == 2 and not isinstance(vectors, np.ndarray):
        # a list of vectors arrives row-wise; store them as columns
        arr = arr.T
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValueError("expected one or more vectors")
    return arr


def _orthonormalize(cols: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(cols)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0):
        raise ValueError("input vectors are linearly dependent")
    return q * np.sign(np.diag(r))


@dataclass(frozen=True)
class JordanDecomposition:
    """Canonical pairing of two subspaces of R^p.

    ``angles`` are the k generic principal angles in (0, pi/2], ascending.
    Columns of ``u`` span the paired part of the first subspace, ``v`` the
    paired part of the second, ``w`` the orthogonal complements, with
    v_i = u_i cos(a_i) + w_i sin(a_i).  ``intersection`` spans the common
    subspace (zero angles); ``e1_only``/``e2_only`` hold directions of either
    subspace left unpaired because the dimensions differ.
    """

    angles: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    intersection: np.ndarray
    e1_only: np.ndarray
    e2_only: np.ndarray

    @property
    def k(self) -> int:
        return self.angles.size

    @property
    def dim1(self) -> int:
        return self.k + self.intersection.shape[1] + self.e1_only.shape[1]

    @property
    def dim2(self) -> int:
        return self.k + self.intersection.shape[1] + self.e2_only.shape[1]


def jordan_angles(E1, E2) -> JordanDecomposition:
    """Principal angles and canonical bases between two spanned subspaces.

    Accepts either lists of vectors or arrays whose columns span each
    subspace; the inputs must be linearly independent within each list.
    """
    c1 = _as_columns(E1)
    c2 = _as_columns(E2)
    if c1.shape[0] != c2.shape[0]:
        raise ValueError("subspaces live in different ambient dimensions")
    q1 = _orthonormalize(c1)
    q2 = _orthonormalize(c2)
    gram = q1.T @ q2
    left, sv, right_t = np.linalg.svd(gram, full_matrices=True)
    sv = np.clip(sv, 0.0, 1.0)
    npairs = sv.size
    u_all = q1 @ left[:, :npairs]
    v_all = q2 @ right_t.T[:, :npairs]
    e1_only = q1 @ left[:, npairs:]
    e2_only = q2 @ right_t.T[:, npairs:]

    generic = sv < INTERSECTION_SV
    angles = np.arccos(sv[generic])
    u = u_all[:, generic]
    v = v_all[:, generic]
    intersection = u_all[:, ~generic]

    sines = np.sin(angles)
    if angles.size and sines.min() < W_SIN_MIN:
        raise ValueError("angle too small to split off its orthogonal direction")
    w = (v - u * np.cos(angles)) / sines if angles.size else np.zeros_like(u)

    order = np.argsort(angles, kind="stable")
    return JordanDecomposition(
        angles=angles[order],
        u=u[:, order],
        v=v[:, order],
        w=w[:, order],
        intersection=intersection,
        e1_only=e1_only,
        e2_only=e2_only,
    )


@dataclass(frozen=True)
class PairContainmentStats:
    """Containment probabilities of two disjoint blocks and their geometry.

    union_prob = kappa1 * kappa2 * prod sin^2(a_i) over the generic angles;
    not_superset_prob = 1 - kappa1 - kappa2 + union_prob;
    cross_inner_sq = kappa1 * kappa2 * prod cos^2(a_i) (the squared inner
    product of the two block wedges when the blocks have equal size).
    """

    kappa1: float
    kappa2: float
    union_prob: float
    not_superset_prob: float
    cross_inner_sq: float
    angles: np.ndarray
    intersection_dim: int


def pair_containment_stats(f: Frame, A1: Iterable[int], A2: Iterable[int]) -> PairContainmentStats:
    """Angle-route evaluation of the joint containment quantities of two
    disjoint blocks.  Requires both containment probabilities in (0, 1)."""
    A1 = tuple(A1)
    A2 = tuple(A2)
    if set(A1) & set(A2):
        raise ValueError("blocks must be disjoint")
    kappa1 = inclusion_prob(f, A1)
    kappa2 = inclusion_prob(f, A2)
    for name, kappa in (("first", kappa1), ("second", kappa2)):
        if not 1e-12 < kappa < 1.0 - 1e-12:
            raise ConditioningError(
                f"containment probability of the {name} block is {kappa}; "
                "this instance belongs to a degenerate case"
            )
    dec = jordan_angles(f.columns(A1), f.columns(A2))
    sin2 = np.sin(dec.angles) ** 2
    cos2 = np.cos(dec.angles) ** 2
    has_intersection = dec.intersection.shape[1] > 0
    union = 0.0 if has_intersection else kappa1 * kappa2 * float(np.prod(sin2))
    cross = kappa1 * kappa2 * float(np.prod(cos2))
    return PairContainmentStats(
        kappa1=kappa1,
        kappa2=kappa2,
        union_prob=union,
        not_superset_prob=1.0 - kappa1 - kappa2 + union,
        cross_inner_sq=cross,
        angles=dec.angles,
        intersection_dim=dec.intersection.shape[1],
    )


def align_leading_coordinates(f: Frame, cols: Iterable[int]) -> Frame:
    """Compose the frame with an orthogonal map of R^p so the selected columns
    are supported on the leading coordinates 1..d, d = rank of the selection.

    The row space, and hence every subset probability, is unchanged.
    """
    selected = f.columns(tuple(cols))
    left, sv, _ = np.linalg.svd(selected, full_matrices=True)
    return Frame(left.T @ f.rows)


@dataclass(frozen=True)
class CaseClassification:
    """Which two-block verification route an instance belongs to."""

    k1: int
    k2: int
    p: int
    chi: int
    case_tag: str
    kappa1: float
    kappa2: float
    union_prob: float


def classify_case(f: Frame, A1: Iterable[int], A2: Iterable[int]) -> CaseClassification:
    """Classify a disjoint block pair (A1, A2) for the two-block identities.

    Blocks are ordered so k1 <= k2.  Tags: N1_FALLBACK when the larger block
    has full cardinality p (the second constraint is vacuous next to a point);
    RESTRICTED when chi = k1 + k2 < p; DEGENERATE when the union cannot be
    contained in the sample; otherwise EQUAL_FULL / UNEQUAL_FULL by |A1| vs
    |A2|.
    """
    A1 = tuple(A1)
    A2 = tuple(A2)
    if set(A1) & set(A2):
        raise ValueError("blocks must be disjoint")
    if len(A1) > len(A2):
        A1, A2 = A2, A1
    k1, k2 = len(A1), len(A2)
    kappa1 = inclusion_prob(f, A1)
    kappa2 = inclusion_prob(f, A2)
    for name, kappa in (("smaller", kappa1), ("larger", kappa2)):
        if not 1e-12 < kappa < 1.0 - 1e-12:
            raise ConditioningError(
                f"containment probability of the {name} block is {kappa}; "
                "use the single-block or unconditional route"
            )
    chi = k1 + k2
    union = inclusion_prob(f, tuple(sorted(A1 + A2)))
    if k2 == f.p:
        tag = "N1_FALLBACK"
    elif chi < f.p:
        tag = "RESTRICTED"
    elif union <= 1e-12:
        tag = "DEGENERATE"
    elif k1 == k2:
        tag = "EQUAL_FULL"
    else:
        tag = "UNEQUAL_FULL"
    return CaseClassification(
        k1=k1, k2=k2, p=f.p, chi=chi, case_tag=tag,
        kappa1=kappa1, kappa2=kappa2, union_prob=union,
    )
