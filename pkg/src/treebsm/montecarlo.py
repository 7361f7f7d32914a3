"""Sampling oracle for the logical BSM protocols.

Draws complete worlds (per-photon loss flags, per-photon Pauli faults, one
completeness coin per photon pair) and runs the protocol decision
procedures directly on the tree, independently of the closed-form
recursions.  A world is drawn once per sample and every branch of the
decision procedure reads the same world; distinct recovery attempts use
disjoint photons, which is what makes the product/independence structure
of the exact recursions hold sample-by-sample.

Error tallies follow the same conventions as the analytic engine: an
available indirect result is preferred to the direct one, repeated chains
combine by majority vote, and an even vote drops one member at random.
A two-photon BSM's Z-parity readout flips when the pair's combined fault
has an odd number of X/Y letters; the X-parity readout is corrupted
whenever either parity flips, since the X readout is decoded assuming the
Z parity.

Streams come from counter-based Philox generators keyed by
``(seed, worker_index)``; totals are order-independent sums, so results
are bit-identical for a fixed (seed, config, worker count).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytic import Protocol
from .trees import BranchingVectorLike, ChannelParams, as_branching_vector

_CHUNK = 8192  # samples per draw; fixed so streams do not depend on memory


class UnsupportedConfigurationError(ValueError):
    """Configuration outside a protocol's supported envelope."""


# ---------------------------------------------------------------------------
# Config and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleConfig:
    b: tuple[int, ...]
    eta: float
    eps: float
    protocol: Protocol
    n_samples: int
    seed: int
    n_workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(as_branching_vector(self.b)))
        if self.n_samples < 1:
            raise ValueError("need at least one sample")
        if self.n_workers < 1:
            raise ValueError("need at least one worker")

    @property
    def params(self) -> ChannelParams:
        return ChannelParams(eta=self.eta, eps=self.eps)


@dataclass
class McEstimate:
    """Sampled rates; the logical error is composed from its two parities.

    The headline ``error_rate`` combines the Z-parity and X-parity error
    rates as ``e_zz + (1 - e_zz) * e_xx``, the same functional the exact
    engine reports, so the two are directly comparable.  The per-sample
    joint rate P(either parity wrong) is kept in the counters: it runs
    slightly below the composition on small trees because one physical
    pair can corrupt both parities at once.
    """

    config: SampleConfig
    n_samples: int
    n_success: int
    n_zz_error: int
    n_xx_error: int
    n_joint_error: int
    wall_time_s: float

    @property
    def success(self) -> float:
        return self.n_success / self.n_samples

    @property
    def success_stderr(self) -> float:
        p = self.success
        return math.sqrt(p * (1.0 - p) / self.n_samples)

    @property
    def zz_error_rate(self) -> float:
        return self.n_zz_error / self.n_success if self.n_success else 0.0

    @property
    def xx_error_rate(self) -> float:
        return self.n_xx_error / self.n_success if self.n_success else 0.0

    @property
    def error_rate(self) -> float:
        ezz, exx = self.zz_error_rate, self.xx_error_rate
        return ezz + (1.0 - ezz) * exx

    @property
    def error_stderr(self) -> float:
        """Delta-method standard error of the composed error rate."""
        n = self.n_success
        if not n:
            return 0.0
        u, v = self.zz_error_rate, self.xx_error_rate
        var_u = u * (1.0 - u) / n
        var_v = v * (1.0 - v) / n
        joint = self.n_joint_error / n
        both = u + v - joint  # P(zz wrong and xx wrong)
        cov = (both - u * v) / n
        var = (1 - v) ** 2 * var_u + (1 - u) ** 2 * var_v + 2 * (1 - v) * (1 - u) * cov
        return math.sqrt(max(var, 0.0))

    def to_dict(self) -> dict:
        return {
            "config": {
                "b": ",".join(map(str, self.config.b)),
                "eta": self.config.eta,
                "eps": self.config.eps,
                "protocol": self.config.protocol.value,
                "n_samples": self.config.n_samples,
                "seed": self.config.seed,
                "n_workers": self.config.n_workers,
            },
            "success": self.success,
            "success_stderr": self.success_stderr,
            "error_rate": self.error_rate,
            "error_stderr": self.error_stderr,
            "zz_error_rate": self.zz_error_rate,
            "xx_error_rate": self.xx_error_rate,
            "counters": {
                "n": self.n_samples,
                "success": self.n_success,
                "zz_error": self.n_zz_error,
                "xx_error": self.n_xx_error,
                "joint_error": self.n_joint_error,
            },
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def z_score(estimate: float, reference: float, n: int) -> float:
    """Deviation of a sampled rate from its reference, in reference sigmas.

    The null-hypothesis sigma ``sqrt(p (1 - p) / n)`` stays well defined
    when the sample saw no events at all.
    """
    sigma = math.sqrt(reference * (1.0 - reference) / n) if n else 0.0
    if sigma == 0.0:
        return 0.0 if estimate == reference else math.inf
    return (estimate - reference) / sigma


# ---------------------------------------------------------------------------
# Tree layout and world container
# ---------------------------------------------------------------------------

class TreeLayout:
    """Per-level array geometry of one tree (levels 1..d, root excluded)."""

    def __init__(self, b: BranchingVectorLike):
        self.b = tuple(as_branching_vector(b))
        self.depth = len(self.b)
        self.sizes = [0] * (self.depth + 1)
        s = 1
        for k, bk in enumerate(self.b):
            s *= bk
            self.sizes[k + 1] = s
        self.n_per_side = sum(self.sizes[1:])

    def group(self, arr: np.ndarray, k: int) -> np.ndarray:
        """View a level-(k+1) array as (samples, level-k nodes, b_k)."""
        n = arr.shape[0]
        return arr.reshape(n, self.sizes[k], self.b[k])


@dataclass
class World:
    """One batch of sampled worlds, as per-level arrays of shape (N, s_k)."""

    det_a: list[np.ndarray]
    det_b: list[np.ndarray]
    coin: list[np.ndarray]
    fault_a: list[np.ndarray] | None = None
    fault_b: list[np.ndarray] | None = None
    tie_pair: list[np.ndarray] | None = None
    tie_side_a: list[np.ndarray] | None = None
    tie_side_b: list[np.ndarray] | None = None
    tie_top: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.det_a[1].shape[0]


def draw_world(
    layout: TreeLayout, params: ChannelParams, n: int, rng: np.random.Generator
) -> World:
    """Sample a world batch; the draw order here is part of the stream contract."""
    d = layout.depth

    def per_level(draw: Callable[[int], np.ndarray]) -> list[np.ndarray]:
        return [None] + [draw(layout.sizes[k]) for k in range(1, d + 1)]

    det_a = per_level(lambda s: rng.random((n, s)) < params.eta)
    det_b = per_level(lambda s: rng.random((n, s)) < params.eta)
    coin = per_level(lambda s: rng.random((n, s)) < 0.5)
    world = World(det_a=det_a, det_b=det_b, coin=coin)

    if params.eps > 0.0:
        def faults(s: int) -> np.ndarray:
            u = rng.random((n, s))
            f = np.zeros((n, s), dtype=np.uint8)
            hit = u < params.eps_d
            # Uniform over X, Y, Z given a fault.
            f[hit] = 1 + np.minimum((3.0 * u[hit] / params.eps_d).astype(np.uint8), 2)
            return f

        world.fault_a = per_level(faults)
        world.fault_b = per_level(faults)
        world.tie_pair = per_level(lambda s: rng.random((n, s)))
        world.tie_side_a = per_level(lambda s: rng.random((n, s)))
        world.tie_side_b = per_level(lambda s: rng.random((n, s)))
        world.tie_top = rng.random(n)
    return world


def _majority_wrong(wrong: np.ndarray, total: np.ndarray, tie: np.ndarray) -> np.ndarray:
    """Vote failure with random drop on even ties; False where total == 0."""
    strict = 2 * wrong > total
    tied = (total > 0) & (total % 2 == 0) & (2 * wrong == total)
    return strict | (tied & (tie < 0.5))


def _xor_children(layout: TreeLayout, arr: np.ndarray, k: int) -> np.ndarray:
    return layout.group(arr.astype(np.uint8), k).sum(axis=2) % 2 == 1


# ---------------------------------------------------------------------------
# Static protocol
# ---------------------------------------------------------------------------

def eval_static(layout: TreeLayout, world: World, want_errors: bool):
    """Success and (optionally) logical-error flags for the static rules.

    Every pair gets a BSM.  The logical Z-parity needs every first-level
    pair readable (directly for complete/partial, through a chain of a
    complete child and its readable grandchildren for failed); the logical
    X-parity needs one complete first-level pair with all children
    readable.
    """
    d = layout.depth
    cls_c = [None] * (d + 1)
    cls_p = [None] * (d + 1)
    for k in range(1, d + 1):
        both = world.det_a[k] & world.det_b[k]
        cls_c[k] = both & world.coin[k]
        cls_p[k] = both & ~world.coin[k]

    can = [None] * (d + 2)
    chain = [None] * (d + 2)
    for k in range(d, 0, -1):
        if k == d:
            all_kids = True
            ind = np.zeros_like(cls_c[k])
        else:
            all_kids = layout.group(can[k + 1], k).all(axis=2)
            ind = layout.group(chain[k + 1], k).any(axis=2)
        chain[k] = cls_c[k] & all_kids
        can[k] = cls_c[k] | cls_p[k] | ind

    zz_ok = can[1].all(axis=1)
    xx_ok = chain[1].any(axis=1)
    success = zz_ok & xx_ok
    if not want_errors:
        zero = np.zeros_like(success)
        return success, zero, zero

    zzflip = [None] * (d + 1)
    xxerr = [None] * (d + 1)
    for k in range(1, d + 1):
        fa, fb = world.fault_a[k], world.fault_b[k]
        zf = ((fa == 1) | (fa == 2)) ^ ((fb == 1) | (fb == 2))
        xf = ((fa == 2) | (fa == 3)) ^ ((fb == 2) | (fb == 3))
        zzflip[k] = zf
        xxerr[k] = zf | xf  # X readout decodes against the Z parity

    verr = [None] * (d + 2)
    cherr = [None] * (d + 2)
    for k in range(d, 0, -1):
        if k == d:
            cherr[k] = xxerr[k]
            voted = np.zeros_like(zzflip[k])
            ind = np.zeros_like(cls_c[k])
        else:
            cherr[k] = xxerr[k] ^ _xor_children(layout, verr[k + 1], k)
            votes_ok = layout.group(chain[k + 1], k)
            wrong = (votes_ok & layout.group(cherr[k + 1], k)).sum(axis=2)
            total = votes_ok.sum(axis=2)
            voted = _majority_wrong(wrong, total, world.tie_pair[k])
            ind = layout.group(chain[k + 1], k).any(axis=2)
        verr[k] = np.where(ind, voted, zzflip[k]) & can[k]

    zz_err = verr[1].astype(np.uint8).sum(axis=1) % 2 == 1
    if d == 1:
        top_cherr = xxerr[1]
    else:
        top_cherr = xxerr[1] ^ _xor_children(layout, verr[2], 1)
    wrong0 = (chain[1] & top_cherr).sum(axis=1)
    total0 = chain[1].sum(axis=1)
    xx_err = _majority_wrong(wrong0, total0, world.tie_top)
    return success, success & zz_err, success & xx_err


# ---------------------------------------------------------------------------
# Dynamic protocol
# ---------------------------------------------------------------------------

def _side_z_recovery(layout: TreeLayout, det: list, fault, tie) -> tuple[list, list, list, list]:
    """Single-qubit Z readout per node: availability and value errors.

    Returns (mz, iz, e_iz, e_mz): readable flag, indirect-available flag,
    voted indirect value error, and the preferred value error (indirect
    when available, else the direct flip).
    """
    d = layout.depth
    mz = [None] * (d + 2)
    iz = [None] * (d + 2)
    chain_ok = [None] * (d + 2)
    for k in range(d, 0, -1):
        if k == d:
            kids_ok = True
            iz[k] = np.zeros_like(det[k])
        else:
            kids_ok = layout.group(mz[k + 1], k).all(axis=2)
            iz[k] = layout.group(chain_ok[k + 1], k).any(axis=2)
        chain_ok[k] = det[k] & kids_ok
        mz[k] = det[k] | iz[k]

    if fault is None:
        return mz, iz, None, None

    e_iz = [None] * (d + 2)
    e_mz = [None] * (d + 2)
    cherr = [None] * (d + 2)
    for k in range(d, 0, -1):
        zdir = (fault[k] == 1) | (fault[k] == 2)
        xdir = (fault[k] == 2) | (fault[k] == 3)
        if k == d:
            cherr[k] = xdir
            e_iz[k] = np.zeros_like(zdir)
        else:
            cherr[k] = xdir ^ _xor_children(layout, e_mz[k + 1], k)
            votes_ok = layout.group(chain_ok[k + 1], k)
            wrong = (votes_ok & layout.group(cherr[k + 1], k)).sum(axis=2)
            total = votes_ok.sum(axis=2)
            e_iz[k] = _majority_wrong(wrong, total, tie[k]) & iz[k]
        e_mz[k] = np.where(iz[k], e_iz[k], zdir) & mz[k]
    return mz, iz, e_iz, e_mz


def eval_dynamic(layout: TreeLayout, world: World, want_errors: bool):
    """Success and logical-error flags for the adaptive rules.

    First-level pairs get BSMs; the children of a complete pair get BSMs,
    the children of a partial or failed pair get single-qubit
    measurements.  A failed (or partial) pair's Z-parity is recovered as
    the product of the two sides' single-qubit indirect readouts.
    """
    d = layout.depth
    cls_c = [None] * (d + 1)
    cls_p = [None] * (d + 1)
    for k in range(1, d + 1):
        both = world.det_a[k] & world.det_b[k]
        cls_c[k] = both & world.coin[k]
        cls_p[k] = both & ~world.coin[k]

    mza, iza, e_iza, e_mza = _side_z_recovery(
        layout, world.det_a, world.fault_a, world.tie_side_a
    )
    mzb, izb, e_izb, e_mzb = _side_z_recovery(
        layout, world.det_b, world.fault_b, world.tie_side_b
    )

    zz_ok = [None] * (d + 2)
    chain_c = [None] * (d + 2)
    ind_c = [None] * (d + 2)
    for k in range(d, 0, -1):
        upgrade = iza[k] & izb[k]
        zz_ok[k] = cls_c[k] | cls_p[k] | (~(world.det_a[k] & world.det_b[k]) & upgrade)
        if k == d:
            kids_ok = True
            ind_c[k] = np.zeros_like(cls_c[k])
        else:
            kids_ok = layout.group(zz_ok[k + 1], k).all(axis=2)
            ind_c[k] = layout.group(chain_c[k + 1], k).any(axis=2)
        chain_c[k] = cls_c[k] & kids_ok

    success = zz_ok[1].all(axis=1) & chain_c[1].any(axis=1)
    if not want_errors:
        zero = np.zeros_like(success)
        return success, zero, zero

    zzflip = [None] * (d + 1)
    xxerr = [None] * (d + 1)
    for k in range(1, d + 1):
        fa, fb = world.fault_a[k], world.fault_b[k]
        zf = ((fa == 1) | (fa == 2)) ^ ((fb == 1) | (fb == 2))
        xf = ((fa == 2) | (fa == 3)) ^ ((fb == 2) | (fb == 3))
        zzflip[k] = zf
        xxerr[k] = zf | xf

    sval = [None] * (d + 2)
    cherr = [None] * (d + 2)
    for k in range(d, 0, -1):
        up_err = e_iza[k] ^ e_izb[k]
        if k == d:
            cherr[k] = xxerr[k]
            voted_c = np.zeros_like(zzflip[k])
        else:
            cherr[k] = xxerr[k] ^ _xor_children(layout, sval[k + 1], k)
            votes_ok = layout.group(chain_c[k + 1], k)
            wrong = (votes_ok & layout.group(cherr[k + 1], k)).sum(axis=2)
            total = votes_ok.sum(axis=2)
            voted_c = _majority_wrong(wrong, total, world.tie_pair[k])
        upgrade = iza[k] & izb[k]
        err_c = np.where(ind_c[k], voted_c, zzflip[k])
        err_p = np.where(upgrade, up_err, zzflip[k])
        sval[k] = np.where(cls_c[k], err_c, np.where(cls_p[k], err_p, up_err)) & zz_ok[k]

    zz_err = sval[1].astype(np.uint8).sum(axis=1) % 2 == 1
    if d == 1:
        top_cherr = xxerr[1]
    else:
        top_cherr = xxerr[1] ^ _xor_children(layout, sval[2], 1)
    wrong0 = (chain_c[1] & top_cherr).sum(axis=1)
    total0 = chain_c[1].sum(axis=1)
    xx_err = _majority_wrong(wrong0, total0, world.tie_top)
    return success, success & zz_err, success & xx_err


# ---------------------------------------------------------------------------
# Loss-only protocol
# ---------------------------------------------------------------------------

def eval_loss_only(layout: TreeLayout, world: World, want_errors: bool = False):
    """Success flags when everything below level 1 is single-qubit measured.

    The children of complete (and partial) first-level pairs are
    Z-measured, so the logical X-parity needs every such child readable on
    both sides individually; failed first-level pairs recover through the
    two sides' indirect chains, exactly as in the adaptive protocol.
    """
    d = layout.depth
    both = world.det_a[1] & world.det_b[1]
    c1 = both & world.coin[1]
    p1 = both & ~world.coin[1]

    mza, iza, _, _ = _side_z_recovery(layout, world.det_a, None, None)
    mzb, izb, _, _ = _side_z_recovery(layout, world.det_b, None, None)

    zz_ok = c1 | p1 | (~both & iza[1] & izb[1])
    if d == 1:
        kids_ok = np.ones_like(c1)
    else:
        kids_ok = layout.group(mza[2], 1).all(axis=2) & layout.group(mzb[2], 1).all(axis=2)
    success = zz_ok.all(axis=1) & (c1 & kids_ok).any(axis=1)
    zero = np.zeros_like(success)
    return success, zero, zero


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

_EVALUATORS = {
    Protocol.STATIC: eval_static,
    Protocol.DYNAMIC: eval_dynamic,
    Protocol.LOSS_ONLY: eval_loss_only,
}


def run(cfg: SampleConfig) -> McEstimate:
    """Sample the configured protocol and estimate success and error rates."""
    if cfg.protocol is Protocol.LOSS_ONLY and cfg.eps > 0.0:
        raise UnsupportedConfigurationError(
            "the loss-only strategy cannot correct measurement errors; set eps=0"
        )
    layout = TreeLayout(cfg.b)
    params = cfg.params
    evaluator = _EVALUATORS[cfg.protocol]
    want_errors = cfg.eps > 0.0

    t0 = time.perf_counter()
    n_success = 0
    n_zz = 0
    n_xx = 0
    n_joint = 0
    base, rem = divmod(cfg.n_samples, cfg.n_workers)
    for w in range(cfg.n_workers):
        quota = base + (1 if w < rem else 0)
        rng = np.random.Generator(np.random.Philox(key=[cfg.seed, w]))
        done = 0
        while done < quota:
            n = min(_CHUNK, quota - done)
            world = draw_world(layout, params, n, rng)
            success, zz_err, xx_err = evaluator(layout, world, want_errors)
            n_success += int(success.sum())
            n_zz += int(zz_err.sum())
            n_xx += int(xx_err.sum())
            n_joint += int((zz_err | xx_err).sum())
            done += n
    return McEstimate(
        config=cfg,
        n_samples=cfg.n_samples,
        n_success=n_success,
        n_zz_error=n_zz,
        n_xx_error=n_xx,
        n_joint_error=n_joint,
        wall_time_s=time.perf_counter() - t0,
    )


def run_static(cfg: SampleConfig) -> McEstimate:
    if cfg.protocol is not Protocol.STATIC:
        raise ValueError("config protocol must be STATIC")
    return run(cfg)


def run_dynamic(cfg: SampleConfig) -> McEstimate:
    if cfg.protocol is not Protocol.DYNAMIC:
        raise ValueError("config protocol must be DYNAMIC")
    return run(cfg)


def run_loss_only(cfg: SampleConfig) -> McEstimate:
    if cfg.protocol is not Protocol.LOSS_ONLY:
        raise ValueError("config protocol must be LOSS_ONLY")
    return run(cfg)


# ---------------------------------------------------------------------------
# Exhaustive enumeration (loss patterns x coins), exact probabilities
# ---------------------------------------------------------------------------

def _levels_from_flat(layout: TreeLayout, flat: np.ndarray) -> list[np.ndarray]:
    out = [None]
    pos = 0
    for k in range(1, layout.depth + 1):
        s = layout.sizes[k]
        out.append(flat[:, pos:pos + s])
        pos += s
    return out


def exhaustive_static(b: BranchingVectorLike, params: ChannelParams) -> float:
    """Exact static success probability by enumerating per-pair outcomes.

    A pair is complete, partial or failed with weights eta^2/2, eta^2/2
    and 1 - eta^2; the success predicate depends on nothing finer.
    """
    layout = TreeLayout(b)
    n_pairs = layout.n_per_side
    if 3**n_pairs > 4_000_000:
        raise ValueError(f"{n_pairs} pairs is too many for enumeration")
    digits = np.array(
        np.meshgrid(*([np.arange(3)] * n_pairs), indexing="ij")
    ).reshape(n_pairs, -1).T  # (3^P, P)
    probs = np.array([0.5 * params.eta**2, 0.5 * params.eta**2, 1.0 - params.eta**2])
    weights = probs[digits].prod(axis=1)

    cls = _levels_from_flat(layout, digits)
    world = World(
        det_a=[None] + [c != 2 for c in cls[1:]],
        det_b=[None] + [np.ones_like(c, dtype=bool) for c in cls[1:]],
        coin=[None] + [c == 0 for c in cls[1:]],
    )
    success, _, _ = eval_static(layout, world, want_errors=False)
    return float(weights[success].sum())


def exhaustive_dynamic(b: BranchingVectorLike, params: ChannelParams) -> float:
    """Exact adaptive success probability by enumerating per-pair atoms.

    Five atoms per pair: complete, partial, only side A lost, only side B
    lost, both lost; the single-qubit recovery predicates need per-side
    loss detail, the rest only the class.
    """
    layout = TreeLayout(b)
    n_pairs = layout.n_per_side
    if 5**n_pairs > 4_000_000:
        raise ValueError(f"{n_pairs} pairs is too many for enumeration")
    eta = params.eta
    digits = np.array(
        np.meshgrid(*([np.arange(5)] * n_pairs), indexing="ij")
    ).reshape(n_pairs, -1).T
    probs = np.array([
        0.5 * eta**2, 0.5 * eta**2, (1 - eta) * eta, eta * (1 - eta), (1 - eta) ** 2
    ])
    weights = probs[digits].prod(axis=1)

    cls = _levels_from_flat(layout, digits)
    det_a = [None] + [(c == 0) | (c == 1) | (c == 3) for c in cls[1:]]
    det_b = [None] + [(c == 0) | (c == 1) | (c == 2) for c in cls[1:]]
    coin = [None] + [c == 0 for c in cls[1:]]
    world = World(det_a=det_a, det_b=det_b, coin=coin)
    success, _, _ = eval_dynamic(layout, world, want_errors=False)
    return float(weights[success].sum())


# ---------------------------------------------------------------------------
# Reference per-sample evaluator (slow; documents the procedures and audits
# that no photon is ever wanted in two different bases within one sample)
# ---------------------------------------------------------------------------

class _BasisAudit:
    def __init__(self) -> None:
        self.assigned: dict[tuple[str, int, int], str] = {}

    def want(self, side: str, level: int, idx: int, basis: str) -> None:
        key = (side, level, idx)
        prev = self.assigned.setdefault(key, basis)
        if prev != basis:
            raise AssertionError(
                f"photon {key} wanted in both {prev} and {basis} bases"
            )


def reference_dynamic_sample(
    layout: TreeLayout, world: World, i: int
) -> tuple[bool, bool, bool]:
    """One adaptive sample, evaluated recursively with the basis audit.

    Returns (success, zz parity wrong, xx estimate wrong); the vectorized
    evaluator must reproduce all three bit-for-bit on the same world.
    """
    audit = _BasisAudit()
    d = layout.depth

    def det(side: str, k: int, j: int) -> bool:
        arr = world.det_a if side == "A" else world.det_b
        return bool(arr[k][i, j])

    def fault(side: str, k: int, j: int) -> int:
        arr = world.fault_a if side == "A" else world.fault_b
        return int(arr[k][i, j]) if arr is not None else 0

    def children(k: int, j: int) -> range:
        if k >= d:
            return range(0)
        return range(j * layout.b[k], (j + 1) * layout.b[k])

    def side_mz(side: str, k: int, j: int) -> tuple[bool, bool]:
        """Readable flag and value error of a single-qubit Z readout."""
        audit.want(side, k, j, "Z")
        chains = []
        if k < d:
            for w in children(k, j):
                audit.want(side, k + 1, w, "X")
                ok = det(side, k + 1, w)
                err = fault(side, k + 1, w) in (2, 3)
                for u in children(k + 1, w):
                    sub_ok, sub_err = side_mz(side, k + 2, u)
                    ok &= sub_ok
                    err ^= sub_err
                if ok:
                    chains.append(err)
        if chains:
            return True, _vote(chains, world.tie_side_a if side == "A" else world.tie_side_b, k, j, i)
        if det(side, k, j):
            return True, fault(side, k, j) in (1, 2)
        return False, False

    def side_iz(side: str, k: int, j: int) -> tuple[bool, bool]:
        """Indirect-only Z readout (the node's own photon is unavailable)."""
        chains = []
        if k < d:
            for w in children(k, j):
                audit.want(side, k + 1, w, "X")
                ok = det(side, k + 1, w)
                err = fault(side, k + 1, w) in (2, 3)
                for u in children(k + 1, w):
                    sub_ok, sub_err = side_mz(side, k + 2, u)
                    ok &= sub_ok
                    err ^= sub_err
                if ok:
                    chains.append(err)
        if chains:
            return True, _vote(chains, world.tie_side_a if side == "A" else world.tie_side_b, k, j, i)
        return False, False

    def pair_class(k: int, j: int) -> str:
        audit.want("A", k, j, "BSM")
        audit.want("B", k, j, "BSM")
        if not (det("A", k, j) and det("B", k, j)):
            return "f"
        return "c" if bool(world.coin[k][i, j]) else "p"

    def zz_flip(k: int, j: int) -> bool:
        return (fault("A", k, j) in (1, 2)) ^ (fault("B", k, j) in (1, 2))

    def xx_err(k: int, j: int) -> bool:
        raw = (fault("A", k, j) in (2, 3)) ^ (fault("B", k, j) in (2, 3))
        return raw | zz_flip(k, j)

    def pair_zz(k: int, j: int) -> tuple[bool, bool]:
        """Z-parity readability and value error for a BSM-mode pair."""
        cls = pair_class(k, j)
        if cls == "c":
            chains = []
            if k < d:
                for w in children(k, j):
                    sub = pair_zz_chain(k + 1, w)
                    if sub is not None:
                        chains.append(sub)
            if chains:
                return True, _vote(chains, world.tie_pair, k, j, i)
            return True, zz_flip(k, j)
        if cls == "p":
            oka, ea = side_iz("A", k, j)
            okb, eb = side_iz("B", k, j)
            if oka and okb:
                return True, ea ^ eb
            return True, zz_flip(k, j)
        oka, ea = side_iz("A", k, j)
        okb, eb = side_iz("B", k, j)
        if oka and okb:
            return True, ea ^ eb
        return False, False

    def pair_zz_chain(k: int, j: int) -> bool | None:
        """Chain through pair (k, j): needs it complete and kids readable."""
        if pair_class(k, j) != "c":
            return None
        err = xx_err(k, j)
        for u in children(k, j) if k < d else ():
            ok, e = pair_zz(k + 1, u)
            if not ok:
                return None
            err ^= e
        return err

    zz_total_err = False
    all_ok = True
    for j in range(layout.sizes[1]):
        ok, e = pair_zz(1, j)
        all_ok &= ok
        zz_total_err ^= e
    top_chains = [
        c for j in range(layout.sizes[1]) if (c := pair_zz_chain(1, j)) is not None
    ]
    success = all_ok and bool(top_chains)
    if not success:
        return False, False, False
    xx_total_err = _vote_top(top_chains, world.tie_top, i)
    return True, bool(zz_total_err), bool(xx_total_err)


def _vote(chains: list[bool], tie_arr, k: int, j: int, i: int) -> bool:
    wrong = sum(chains)
    m = len(chains)
    if m % 2 == 1:
        return 2 * wrong > m
    if 2 * wrong == m:
        return bool(tie_arr[k][i, j] < 0.5)
    return 2 * wrong > m


def _vote_top(chains: list[bool], tie_top, i: int) -> bool:
    wrong = sum(chains)
    m = len(chains)
    if m % 2 == 1:
        return 2 * wrong > m
    if 2 * wrong == m:
        return bool(tie_top[i] < 0.5)
    return 2 * wrong > m


# ---------------------------------------------------------------------------
# Two-photon fault model check
# ---------------------------------------------------------------------------

def sample_bsm_error_rates(
    eps: float, n_samples: int, seed: int
) -> dict[str, float]:
    """Monte-Carlo readout error rates of a single two-photon BSM.

    Each photon suffers a uniform Pauli fault with total probability
    ``3*eps/2``.  Returns the Z-parity flip rate and the X-readout error
    rate with their standard errors.
    """
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    params = ChannelParams(eta=1.0, eps=eps)

    def faults(n: int) -> np.ndarray:
        u = rng.random(n)
        f = np.zeros(n, dtype=np.uint8)
        hit = u < params.eps_d
        f[hit] = 1 + np.minimum((3.0 * u[hit] / params.eps_d).astype(np.uint8), 2)
        return f

    fa, fb = faults(n_samples), faults(n_samples)
    zz = ((fa == 1) | (fa == 2)) ^ ((fb == 1) | (fb == 2))
    xx = zz | (((fa == 2) | (fa == 3)) ^ ((fb == 2) | (fb == 3)))
    pz = float(zz.mean())
    px = float(xx.mean())
    return {
        "zz_flip_rate": pz,
        "zz_stderr": math.sqrt(pz * (1 - pz) / n_samples),
        "xx_error_rate": px,
        "xx_stderr": math.sqrt(px * (1 - px) / n_samples),
        "n": n_samples,
    }
