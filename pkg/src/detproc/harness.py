"""Seeded instance generation and verification campaigns.

Every instance is generated from a counter-based generator keyed by
(campaign seed, instance index), so campaign results are independent of
worker count and scheduling; the canonical JSON report is byte-identical
across reruns.  Failures carry their (seed, index) pair and replay exactly.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import identities as ident_mod
from .identities import N2Certificate, SkipInstance, VerificationReport
from .process import Frame

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "IdentityOutcome",
    "CampaignSkipRatioError",
    "instance_rng",
    "random_frame",
    "canonical_n1_frame",
    "complete_frame",
    "run_campaign",
    "replay_instance",
    "identity_ids",
    "canonical_json",
]


class CampaignSkipRatioError(RuntimeError):
    """Too many instances were skipped; the generator is suspect."""


def instance_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Counter-based splittable generator for one (campaign, instance) cell."""
    key = np.array(
        [
            np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
            (np.uint64(index & 0xFFFFFFFFFFFF) << np.uint64(8)) | np.uint64(stream & 0xFF),
        ],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def _frame_from_rng(rng: np.random.Generator, N: int, p: int) -> Frame:
    for _ in range(4):
        g = rng.standard_normal((N, p))
        q, r = np.linalg.qr(g)
        diag = np.diag(r)
        if np.abs(diag).min() > 1e-10:
            return Frame((q * np.sign(diag)).T)
    raise RuntimeError("repeatedly drew a rank-deficient Gaussian matrix")


def random_frame(seed: int, N: int, p: int) -> Frame:
    """Orthonormalized rows of a seeded standard-Gaussian p x N matrix."""
    if not 1 < p < N:
        raise ValueError(f"need 1 < p < N, got p={p}, N={N}")
    return _frame_from_rng(instance_rng(seed, 0, stream=7), N, p)


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def canonical_n1_frame(seed: int, N: int, p: int, k: int) -> Frame:
    """Frame built directly in the aligned single-block form.

    The first k columns are supported on the leading k coordinates with row j
    scaled by cos(theta_j), so the block {1..k} has containment probability
    prod cos^2(theta_j) in (0, 1); the remaining columns carry the sine parts
    and an orthonormal tail block.  Requires N >= p + k.
    """
    if not 0 < k < p < N:
        raise ValueError(f"need 0 < k < p < N, got k={k}, p={p}, N={N}")
    if N < p + k:
        raise ValueError(f"canonical construction needs N >= p + k = {p + k}")
    rng = instance_rng(seed, 0, stream=11)
    theta = rng.uniform(0.2, math.pi / 2 - 0.2, size=k)
    U = _random_orthogonal(rng, k)
    O = _random_orthogonal(rng, N - k)
    rows = np.zeros((p, N))
    rows[:k, :k] = np.diag(np.cos(theta)) @ U.T
    rows[:k, k:] = np.diag(np.sin(theta)) @ O[:k]
    rows[k:, k:] = O[k:p]
    return Frame(rows)


def complete_frame(partial_columns: np.ndarray, N: int) -> Frame:
    """Extend prescribed leading columns to a full frame with orthonormal rows.

    The completion spreads the residual projector I - sum c c^T over the
    remaining ground points; it requires that residual to be positive
    semidefinite and to fit in N - m columns.
    """
    cols = np.asarray(partial_columns, dtype=float)
    p, m = cols.shape
    if m > N:
        raise ValueError("more prescribed columns than ground points")
    residual = np.eye(p) - cols @ cols.T
    vals, vecs = np.linalg.eigh(residual)
    if vals.min() < -1e-10:
        raise ValueError("prescribed columns overfill the frame (residual not PSD)")
    vals = np.clip(vals, 0.0, None)
    live = vals > 1e-14
    extra = vecs[:, live] * np.sqrt(vals[live])
    if extra.shape[1] > N - m:
        raise ValueError(f"need at least {m + extra.shape[1]} ground points")
    rows = np.zeros((p, N))
    rows[:, :m] = cols
    rows[:, m : m + extra.shape[1]] = extra
    return Frame(rows)


# ---------------------------------------------------------------------------
# campaign configuration and result
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CampaignConfig:
    """Deterministic description of a verification campaign.

    ``parallelism`` is an execution detail: it is excluded from the canonical
    report so worker count cannot change the bytes.
    """

    seed: int
    n_instances: int
    identities: tuple[str, ...] = ()
    n_range: tuple[int, int] = (6, 10)
    p_range: tuple[int, int] = (2, 5)
    k1_range: tuple[int, int] = (1, 3)
    k2_range: tuple[int, int] = (1, 3)
    slack: float = 1e-10
    max_skip_ratio: float = 0.2
    parallelism: int = 0

    def __post_init__(self) -> None:
        if self.n_instances < 0:
            raise ValueError("n_instances must be >= 0")
        if not self.identities:
            object.__setattr__(self, "identities", tuple(identity_ids()))
        unknown = [i for i in self.identities if i not in CATALOG]
        if unknown:
            raise KeyError(f"unknown identity ids: {unknown}")
        if self.n_range[0] < 3 or self.n_range[0] > self.n_range[1]:
            raise ValueError(f"bad ground-set range {self.n_range}")
        if self.p_range[0] < 2 or self.p_range[0] > self.p_range[1]:
            raise ValueError(f"bad cardinality range {self.p_range}")

    @classmethod
    def parse(cls, text: str, identities: tuple[str, ...] = ()) -> "CampaignConfig":
        """Parse 'seed=7,n=10000[,workers=4][,nmin=..][,nmax=..][,pmin=..][,pmax=..]
        [,skipmax=0.2][,slack=1e-10][,ids=a+b+c]'."""
        fields = {"seed": 0, "n": 100}
        extras: dict = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise ValueError(f"bad campaign option {part!r}; expected key=value")
            key, _, val = part.partition("=")
            key = key.strip()
            val = val.strip()
            if key in ("seed", "n", "workers", "nmin", "nmax", "pmin", "pmax"):
                fields[key] = int(val)
            elif key in ("skipmax", "slack"):
                fields[key] = float(val)
            elif key == "ids":
                extras["identities"] = tuple(val.split("+"))
            else:
                raise ValueError(f"unknown campaign option {key!r}")
        n_range = (fields.get("nmin", 6), fields.get("nmax", 10))
        p_range = (fields.get("pmin", 2), fields.get("pmax", 5))
        return cls(
            seed=fields["seed"],
            n_instances=fields["n"],
            identities=identities or extras.get("identities", ()),
            n_range=n_range,
            p_range=p_range,
            slack=fields.get("slack", 1e-10),
            max_skip_ratio=fields.get("skipmax", 0.2),
            parallelism=fields.get("workers", 0),
        )


@dataclass
class IdentityOutcome:
    """Aggregated pass/fail/skip counts for one identity."""

    passes: int = 0
    fails: int = 0
    skips: int = 0
    worst_gap: float | None = None     # worst severity (gap / tolerance)
    worst_abs_gap: float | None = None
    worst_check: str = ""
    worst_instance: dict | None = None
    fail_indices: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pass": self.passes,
            "fail": self.fails,
            "skip": self.skips,
            "worst_gap": self.worst_gap,
            "worst_abs_gap": self.worst_abs_gap,
            "worst_check": self.worst_check,
            "worst_instance": self.worst_instance,
            "fail_indices": self.fail_indices,
        }


@dataclass
class CampaignResult:
    config: CampaignConfig
    outcomes: dict[str, IdentityOutcome]
    wall_clock_s: float

    def all_passed(self) -> bool:
        return all(o.fails == 0 for o in self.outcomes.values())

    def to_json(self) -> str:
        """Canonical report: deterministic bytes for a given config and seed.

        Wall-clock time and worker count are execution details and excluded.
        """
        cfg = self.config
        payload = {
            "campaign": {
                "seed": cfg.seed,
                "n_instances": cfg.n_instances,
                "identities": list(cfg.identities),
                "n_range": list(cfg.n_range),
                "p_range": list(cfg.p_range),
                "k1_range": list(cfg.k1_range),
                "k2_range": list(cfg.k2_range),
                "slack": cfg.slack,
                "max_skip_ratio": cfg.max_skip_ratio,
            },
            "results": {k: v.to_dict() for k, v in self.outcomes.items()},
        }
        return canonical_json(payload)


def canonical_json(obj) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    pieces: list[str] = []
    _dump_canonical(obj, pieces)
    return "".join(pieces)


def _dump_canonical(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            out.append('"nan"')
        elif math.isinf(x):
            out.append('"inf"' if x > 0 else '"-inf"')
        else:
            out.append(format(x, ".17g"))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, Mapping):
        out.append("{")
        for pos, key in enumerate(sorted(obj)):
            if pos:
                out.append(",")
            _dump_canonical(str(key), out)
            out.append(":")
            _dump_canonical(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for pos, item in enumerate(obj):
            if pos:
                out.append(",")
            _dump_canonical(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------

def _pick_disjoint(rng: np.random.Generator, N: int, sizes: list[int]) -> list[tuple[int, ...]]:
    if sum(sizes) > N:
        raise ValueError(f"cannot place disjoint sets of sizes {sizes} in 1..{N}")
    perm = rng.permutation(N) + 1
    out = []
    start = 0
    for s in sizes:
        out.append(tuple(sorted(int(i) for i in perm[start : start + s])))
        start += s
    return out


def _dims(rng: np.random.Generator, cfg: CampaignConfig, p_min: int = 2,
          need: int = 0) -> tuple[int, int]:
    lo = max(cfg.n_range[0], need, p_min + 1)
    hi = max(cfg.n_range[1], lo)
    N = int(rng.integers(lo, hi + 1))
    p_hi = max(min(cfg.p_range[1], N - 1), p_min)
    p = int(rng.integers(p_min, p_hi + 1))
    return N, p


def _gen_theorem1_n1(rng, cfg, index):
    return _gen_theorem1(rng, cfg, 8 * index + (7 if index % 2 else 0))


def _gen_theorem1_n2(rng, cfg, index):
    return _gen_theorem1(rng, cfg, 8 * index + 1 + index % 6)


def _gen_theorem1(rng, cfg, index):
    pattern = index % 8
    if pattern in (0, 7):
        N, p = _dims(rng, cfg, p_min=2, need=6)
        amax = min(3, p) if pattern == 7 else min(2, p)
        sizes = [int(rng.integers(1, amax + 1)), 1, int(rng.integers(1, 3))]
        a1, b1, b2 = _pick_disjoint(rng, N, sizes)
        return {"f": _frame_from_rng(rng, N, p), "B1": b1, "B2": b2, "As": [a1]}
    if pattern == 1:
        N, p = _dims(rng, cfg, p_min=2, need=7)
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [1, 1, 1, 1])
    elif pattern == 2:                      # both blocks of size k, spanning R^p
        k = 2
        p, N = 2 * k, max(cfg.n_range[0], 2 * k + 4)
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [k, k, 1, 1])
    elif pattern == 3:                      # blocks span less than R^p
        p, N = 5, max(cfg.n_range[0], 9)
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [2, 2, 1, 1])
    elif pattern == 4:                      # union can never be contained
        p, N = 3, max(cfg.n_range[0], 8)
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [2, 2, 1, 1])
    elif pattern == 5:                      # larger block has full cardinality
        p, N = 3, max(cfg.n_range[0], 8)
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [1, 3, 1, 1])
    else:
        N, p = _dims(rng, cfg, p_min=3, need=8)
        s1, s2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a1, a2, b1, b2 = _pick_disjoint(rng, N, [s1, s2, int(rng.integers(1, 3)), 1])
    return {"f": _frame_from_rng(rng, N, p), "B1": b1, "B2": b2, "As": [a1, a2]}


def _gen_theorem1_n3(rng, cfg, index):
    N, p = _dims(rng, cfg, p_min=3, need=9)
    sizes = [int(rng.integers(1, 3)) for _ in range(3)] + [1, 1]
    a1, a2, a3, b1, b2 = _pick_disjoint(rng, N, sizes)
    return {"f": _frame_from_rng(rng, N, p), "B1": b1, "B2": b2, "As": [a1, a2, a3]}


def _gen_reduction(rng, cfg, index):
    N, p = _dims(rng, cfg, p_min=3, need=8)
    nblocks = 1 + index % 2
    sizes = [1, int(rng.integers(0, 2)), int(rng.integers(1, 3))] + [
        int(rng.integers(1, 3)) for _ in range(nblocks)
    ]
    picked = _pick_disjoint(rng, N, sizes)
    y, b1, b2 = picked[0][0], picked[1], picked[2]
    return {"f": _frame_from_rng(rng, N, p), "y": y, "B1": b1, "B2": b2,
            "As": picked[3:]}


def _gen_remark1(rng, cfg, index):
    p = 2 + index % 2
    N = max(cfg.n_range[0], p + 3)
    a1, ij = _pick_disjoint(rng, N, [p, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "i": ij[0], "j": ij[1]}


def _gen_n1_identity(rng, cfg, index):
    if index % 2 == 0:
        p = 3 + (index // 2) % 2
        k = 1 + (index % 3) % (p - 1)
        N = p + k + 2
        f = canonical_n1_frame(int(rng.integers(0, 2**32)), N, p, k)
        rest = [i for i in range(k + 1, N + 1)]
        x, x2 = rest[0], rest[1]
        return {"f": f, "A1": tuple(range(1, k + 1)), "x": x, "x2": x2}
    N, p = _dims(rng, cfg, p_min=3, need=7)
    k = int(rng.integers(1, p))
    a1, xs = _pick_disjoint(rng, N, [k, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "x": xs[0], "x2": xs[1]}


def _make_gen_chain(points: int):
    def gen(rng, cfg, index):
        N, p = _dims(rng, cfg, p_min=points, need=points + 2)
        return {"f": _frame_from_rng(rng, N, p), "n": points}
    return gen


def _gen_n2_equal(rng, cfg, index):
    k = 2 + index % 2
    p = 2 * k
    N = p + 2 + index % 3
    a1, a2, xs = _pick_disjoint(rng, N, [k, k, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "A2": a2, "x": xs[0], "x2": xs[1]}


def _gen_n2_unequal(rng, cfg, index):
    k1, k2 = ((2, 3), (2, 4), (3, 4))[index % 3]
    p = k1 + k2
    N = p + 2 + index % 2
    a1, a2, xs = _pick_disjoint(rng, N, [k1, k2, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "A2": a2, "x": xs[0], "x2": xs[1]}


def _gen_restricted(rng, cfg, index):
    k1, k2, p = ((2, 2, 5), (2, 2, 6), (2, 3, 6), (2, 3, 7))[index % 4]
    N = p + 3
    a1, a2, xs = _pick_disjoint(rng, N, [k1, k2, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "A2": a2, "x": xs[0], "x2": xs[1]}


def _gen_degenerate(rng, cfg, index):
    k1, k2, p = ((2, 2, 3), (2, 3, 4))[index % 2]
    N = p + 5
    a1, a2, xs = _pick_disjoint(rng, N, [k1, k2, 2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "A2": a2, "x": xs[0], "x2": xs[1]}


def _interior_angles(rng, k):
    return rng.uniform(0.05, math.pi / 2 - 0.05, size=k)


def _gen_appendix(rng, cfg, index):
    return {"angles": _interior_angles(rng, 2 + index % 7)}


def _gen_compound(rng, cfg, index):
    a, b, c = (int(rng.integers(2, 6)) for _ in range(3))
    M = rng.standard_normal((a, b))
    N = rng.standard_normal((b, c))
    M /= max(1.0, np.linalg.norm(M))
    N /= max(1.0, np.linalg.norm(N))
    t = rng.standard_normal(a * (a - 1) // 2)
    t /= max(1.0, np.linalg.norm(t))
    return {"M": M, "N": N, "t": t}


def _gen_block_diagonal(rng, cfg, index):
    k = 2 + index % 3
    kappa1 = float(rng.uniform(0.05, 0.6))
    kappa2 = float(rng.uniform(0.05, min(0.9 - kappa1, 0.6)))
    return {"angles": _interior_angles(rng, k), "kappa1": kappa1, "kappa2": kappa2}


def _gen_plucker(rng, cfg, index):
    m = (4, 6, 8)[index % 3]
    x = rng.standard_normal(m)
    y = rng.standard_normal(m)
    return {"x": x / np.linalg.norm(x), "y": y / np.linalg.norm(y)}


def _gen_lemma3(rng, cfg, index):
    N, p = _dims(rng, cfg, p_min=2, need=7)
    s1 = int(rng.integers(1, min(3, p) + 1))
    s2 = int(rng.integers(1, min(3, p) + 1))
    a1, a2 = _pick_disjoint(rng, N, [s1, s2])
    return {"f": _frame_from_rng(rng, N, p), "A1": a1, "A2": a2}


def _gen_oracle_marginals(rng, cfg, index):
    N, p = _dims(rng, cfg, p_min=2)
    return {"f": _frame_from_rng(rng, N, p)}


@dataclass(frozen=True)
class IdentityTask:
    ident: str
    generate: Callable
    verify: Callable
    asserting: bool = True


SLACK_AWARE = {"theorem1", "theorem1-n1", "theorem1-n2", "theorem1-n3-scan"}

CATALOG: dict[str, IdentityTask] = {
    t.ident: t
    for t in [
        IdentityTask("theorem1", _gen_theorem1, ident_mod.verify_theorem1),
        IdentityTask("theorem1-n1", _gen_theorem1_n1, ident_mod.verify_theorem1),
        IdentityTask("theorem1-n2", _gen_theorem1_n2, ident_mod.verify_theorem1),
        IdentityTask("reduction", _gen_reduction, ident_mod.verify_reduction_step),
        IdentityTask("remark1", _gen_remark1, ident_mod.verify_remark1),
        IdentityTask("n1-identity", _gen_n1_identity, ident_mod.verify_n1_identity),
        IdentityTask("chain-2", _make_gen_chain(2), ident_mod.verify_chain_formula),
        IdentityTask("chain-3", _make_gen_chain(3), ident_mod.verify_chain_formula),
        IdentityTask("chain-4", _make_gen_chain(4), ident_mod.verify_chain_formula),
        IdentityTask("n2-equal", _gen_n2_equal, ident_mod.verify_n2_equal),
        IdentityTask("n2-unequal", _gen_n2_unequal, ident_mod.verify_n2_unequal),
        IdentityTask("restricted", _gen_restricted, ident_mod.verify_restricted),
        IdentityTask("degenerate", _gen_degenerate, ident_mod.verify_degenerate),
        IdentityTask("appendix-M", _gen_appendix, ident_mod.verify_appendix),
        IdentityTask("compound", _gen_compound, ident_mod.verify_compound_identity),
        IdentityTask("block-diagonal", _gen_block_diagonal, ident_mod.verify_block_diagonal),
        IdentityTask("plucker", _gen_plucker, ident_mod.verify_plucker),
        IdentityTask("lemma3", _gen_lemma3, ident_mod.verify_lemma3),
        IdentityTask("oracle-marginals", _gen_oracle_marginals, ident_mod.verify_oracle_marginals),
        IdentityTask("theorem1-n3-scan", _gen_theorem1_n3, ident_mod.verify_theorem1,
                     asserting=False),
    ]
}


def identity_ids(include_scans: bool = False) -> list[str]:
    return [k for k, t in CATALOG.items() if t.asserting or include_scans]


def _as_report(result) -> VerificationReport:
    return result.report if isinstance(result, N2Certificate) else result


def _run_cell(task: IdentityTask, cfg: CampaignConfig, index: int) -> dict:
    rng = instance_rng(cfg.seed, index)
    kwargs = task.generate(rng, cfg, index)
    if task.ident in SLACK_AWARE:
        kwargs["slack"] = cfg.slack
    try:
        report = _as_report(task.verify(**kwargs))
    except SkipInstance as exc:
        return {"index": index, "verdict": "skip", "reason": exc.reason}
    verdict = report.verdict if task.asserting else "pass"
    return {
        "index": index,
        "verdict": verdict,
        "adverse": report.adverse,
        "abs_gap": max((c.abs_gap for c in report.checks), default=0.0),
        "worst_check": report.worst_check,
        "instance": _jsonable(report.instance),
    }


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _worker_count(cfg: CampaignConfig) -> int:
    if cfg.parallelism > 0:
        return cfg.parallelism
    env = os.environ.get("DPP_VERIFY_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


def run_campaign(cfg: CampaignConfig) -> CampaignResult:
    """Run the configured verifiers over seeded instances.

    Results depend only on (seed, n_instances, identity list, dims,
    tolerances); worker count affects wall-clock only.  An identity whose
    skip fraction exceeds ``max_skip_ratio`` aborts the campaign.
    """
    started = time.perf_counter()
    workers = _worker_count(cfg)
    outcomes: dict[str, IdentityOutcome] = {}
    for ident in cfg.identities:
        task = CATALOG[ident]
        runner = lambda idx: _run_cell(task, cfg, idx)
        if workers > 1 and cfg.n_instances > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(runner, range(cfg.n_instances)))
        else:
            rows = [runner(i) for i in range(cfg.n_instances)]
        out = IdentityOutcome()
        for row in rows:
            if row["verdict"] == "skip":
                out.skips += 1
                continue
            if row["verdict"] == "pass":
                out.passes += 1
            else:
                out.fails += 1
                out.fail_indices.append(row["index"])
            if out.worst_gap is None or row["adverse"] > out.worst_gap:
                out.worst_gap = row["adverse"]
                out.worst_abs_gap = row["abs_gap"]
                out.worst_check = row["worst_check"]
                out.worst_instance = {"seed": cfg.seed, "index": row["index"],
                                      **row["instance"]}
        outcomes[ident] = out
        if cfg.n_instances and out.skips > cfg.max_skip_ratio * cfg.n_instances:
            raise CampaignSkipRatioError(
                f"{ident}: {out.skips}/{cfg.n_instances} instances skipped "
                f"(limit {cfg.max_skip_ratio:.0%}); the generator is suspect"
            )
    return CampaignResult(cfg, outcomes, time.perf_counter() - started)


def replay_instance(cfg: CampaignConfig, ident: str, index: int) -> VerificationReport:
    """Re-run a single campaign cell; reproduces the reported gaps exactly."""
    task = CATALOG[ident]
    rng = instance_rng(cfg.seed, index)
    kwargs = task.generate(rng, cfg, index)
    return _as_report(task.verify(**kwargs))
