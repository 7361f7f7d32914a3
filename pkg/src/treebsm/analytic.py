"""Exact success and error rates of logical Bell measurements on tree codes.

Two protocols are evaluated in closed (recursive) form:

* **static** -- every photon pair (one photon from each tree, matched by
  position) receives a two-photon BSM.  Lost Z-parities are recovered
  through stabilizer chains built from deeper BSM outcomes, and repeated
  recoveries are combined by majority vote.
* **dynamic** -- measurements adapt to outcomes: the children of a complete
  BSM receive BSMs, while the children of a partial or failed BSM receive
  single-qubit measurements, which upgrade a failed pair to a known
  Z-parity through two independent single-qubit indirect measurements.

The recursions walk the tree from the leaves (level ``d``) to the virtual
level 0; level-``d`` photons can only be measured directly.  An exponent
over the children of a leaf is an empty product (1), and any indirect
probability at level ``d`` is 0.

Error rates are conditional on success.  Whenever an indirect result is
available it is preferred over the direct one (the indirect side carries
the majority vote, so correction only helps if it is trusted); even-sized
votes drop one result at random, which is equivalent to voting over one
fewer sample.  Conditional errors whose conditioning probability is zero
are defined as zero: those branches carry no weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .trees import (
    BranchingVector,
    BranchingVectorLike,
    ChannelParams,
    as_branching_vector,
)


class Protocol(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    LOSS_ONLY = "loss-only"


class Basis(Enum):
    """Measurement flavour threaded through the level recursions.

    Z:  single-qubit Z on one tree (direct succeeds with eta, errs with eps).
    ZZ: joint Z-parity of a photon pair (direct succeeds with eta^2; the
        matching indirect chains open with an X-parity, which a complete
        BSM supplies with probability eta^2/2).
    """

    Z = "Z"
    ZZ = "ZZ"


# ---------------------------------------------------------------------------
# Elementary combinators
# ---------------------------------------------------------------------------

def parity_error(per_slot: Sequence[float], counts: Sequence[int]) -> float:
    """P(odd number of errors) over independent slots.

    ``per_slot[i]`` is the error rate of each of ``counts[i]`` independent
    results whose product forms the measured parity.
    """
    prod = 1.0
    for e, n in zip(per_slot, counts):
        prod *= (1.0 - 2.0 * e) ** n
    return 0.5 * (1.0 - prod)


def vote_error(m: int, e: float) -> float:
    """Failure probability of a majority vote over ``m`` iid results.

    Even votes drop one result at random, which is distributionally the
    same as voting over ``m - 1``; so vote_error(2, e) == vote_error(1, e).
    """
    if m <= 0:
        return 0.0
    m_eff = m if m % 2 == 1 else m - 1
    k0 = (m_eff + 1) // 2
    # P(Binom(m_eff, e) >= k0) via the regularized incomplete beta function.
    return float(special.betainc(k0, m_eff - k0 + 1, e))


def _vote_error_mix(n_chains: int, p_chain: float, e_chain: float) -> float:
    """Majority-vote error averaged over how many of ``n_chains`` succeeded.

    Conditional on at least one success; returns 0 when that event has no
    probability.
    """
    if n_chains <= 0 or p_chain <= 0.0:
        return 0.0
    pmf = [
        math.comb(n_chains, m) * p_chain**m * (1.0 - p_chain) ** (n_chains - m)
        for m in range(n_chains + 1)
    ]
    p_any = 1.0 - pmf[0]
    if p_any <= 0.0:
        return 0.0
    total = sum(pmf[m] * vote_error(m, e_chain) for m in range(1, n_chains + 1))
    return total / p_any


# ---------------------------------------------------------------------------
# Static recursions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LayerStats:
    """Per-level success and conditional-error rates for one basis.

    Arrays are indexed by level ``k = 0..d``; level 0 is the virtual root
    slot whose indirect entry feeds the logical X-parity.  ``pr_d``/``err_d``
    are the level-independent direct rates.  Events:

    * ``pr_s[k]``: one specific chain through one child succeeds,
    * ``pr_i[k]``: at least one chain succeeds (indirect),
    * ``pr_m[k]``: the level-k value is obtained directly or indirectly.
    """

    basis: Basis
    pr_d: float
    err_d: float
    pr_s: np.ndarray
    pr_i: np.ndarray
    pr_m: np.ndarray
    err_s: np.ndarray
    err_i: np.ndarray
    err_m: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.pr_m) - 1


def static_layer_recursion(
    b: BranchingVectorLike, params: ChannelParams, basis: Basis
) -> LayerStats:
    """Fill the level-by-level success and error rates for the static rules.

    Success, from level ``d`` down to 0::

        pr_m[k] = pr_d + (1 - pr_d) * pr_i[k]
        pr_i[k] = 1 - (1 - pr_s[k])**b[k]          (0 at level d)
        pr_s[k] = pr_opener * pr_m[k+2]**b[k+1]    (empty product if k+1 == d)

    where the chain opener is the direct conjugate-basis rate on one child
    (``eta`` for Z, ``eta**2 / 2`` for ZZ).  Errors follow the same shape:
    a chain errs on odd parity of its opener and its grandchild results,
    chains combine by majority vote, and the vote is preferred to the
    direct result whenever it is available.
    """
    vec = as_branching_vector(b)
    d = vec.depth
    eta = params.eta

    if basis is Basis.Z:
        pr_d, err_d = eta, params.eps
        pr_opener, err_opener = eta, params.eps
    else:
        pr_d, err_d = eta**2, params.err_dzz
        pr_opener, err_opener = 0.5 * eta**2, params.err_dxx

    pr_s = np.zeros(d + 1)
    pr_i = np.zeros(d + 1)
    pr_m = np.zeros(d + 1)
    err_s = np.zeros(d + 1)
    err_i = np.zeros(d + 1)
    err_m = np.zeros(d + 1)

    pr_m[d] = pr_d
    err_m[d] = err_d

    for k in range(d - 1, -1, -1):
        if k + 1 == d:
            grand_pr, grand_err, n_grand = 1.0, 0.0, 0
        else:
            grand_pr, grand_err, n_grand = pr_m[k + 2], err_m[k + 2], vec[k + 1]
        pr_s[k] = pr_opener * grand_pr**n_grand
        err_s[k] = parity_error([err_opener, grand_err], [1, n_grand])

        pr_i[k] = 1.0 - (1.0 - pr_s[k]) ** vec[k]
        err_i[k] = _vote_error_mix(vec[k], pr_s[k], err_s[k])

        pr_m[k] = pr_d + (1.0 - pr_d) * pr_i[k]
        if pr_m[k] > 0.0:
            w_ind = pr_i[k] / pr_m[k]
            err_m[k] = w_ind * err_i[k] + (1.0 - w_ind) * err_d
        else:
            err_m[k] = 0.0

    return LayerStats(
        basis=basis, pr_d=pr_d, err_d=err_d,
        pr_s=pr_s, pr_i=pr_i, pr_m=pr_m,
        err_s=err_s, err_i=err_i, err_m=err_m,
    )


@dataclass(frozen=True)
class LogicalBsmResult:
    """Logical-level rates of one protocol on one tree shape."""

    protocol: Protocol
    b: BranchingVector
    params: ChannelParams
    pr_xx: float
    pr_zz: float
    pr_complete: float
    err_xx: float
    err_zz: float
    err_complete: float


def _complete_bsm_sum(b0: int, eta: float, i1: float, x: float) -> float:
    """Probability of a complete logical BSM from the first-level mixture.

    Sums over the (complete, partial, failed) outcome counts of the ``b0``
    first-level pairs: every failed pair must be recovered indirectly
    (probability ``i1`` each) and at least one complete pair must see all
    of its child pairs measured (probability ``x`` per complete pair).
    """
    pc = 0.5 * eta**2
    pf = 1.0 - eta**2
    total = 0.0
    for m_f in range(b0 + 1):
        w_f = math.comb(b0, m_f) * pf**m_f * (i1**m_f if m_f else 1.0)
        if w_f == 0.0:
            continue
        rest = b0 - m_f  # pairs that came out complete or partial
        inner = 0.0
        for m_c in range(1, rest + 1):
            inner += math.comb(rest, m_c) * (1.0 - (1.0 - x) ** m_c)
        total += w_f * pc**rest * inner
    return total


def _complete_bsm_closed(b0: int, eta: float, i1: float, x: float) -> float:
    """Closed form of :func:`_complete_bsm_sum` via the multinomial theorem.

    With ``m1 = eta^2 + (1 - eta^2) * i1`` the sum collapses to
    ``m1**b0 - (m1 - (eta^2/2) * x)**b0``.
    """
    m1 = eta**2 + (1.0 - eta**2) * i1
    return m1**b0 - (m1 - 0.5 * eta**2 * x) ** b0


def static_logical_bsm(b: BranchingVectorLike, params: ChannelParams) -> LogicalBsmResult:
    """Evaluate the static protocol exactly on tree shape ``b``."""
    vec = as_branching_vector(b)
    d = vec.depth
    zz = static_layer_recursion(vec, params, Basis.ZZ)

    pr_xx = float(zz.pr_i[0])
    err_xx = float(zz.err_i[0])
    pr_zz = float(zz.pr_m[1] ** vec[0])
    err_zz = parity_error([float(zz.err_m[1])], [vec[0]])

    i1 = float(zz.pr_i[1])
    x = float(zz.pr_m[2] ** vec[1]) if d >= 2 else 1.0
    pr_complete = _complete_bsm_sum(vec[0], params.eta, i1, x)
    err_complete = err_zz + (1.0 - err_zz) * err_xx

    return LogicalBsmResult(
        protocol=Protocol.STATIC, b=vec, params=params,
        pr_xx=pr_xx, pr_zz=pr_zz, pr_complete=pr_complete,
        err_xx=err_xx, err_zz=err_zz, err_complete=err_complete,
    )


# ---------------------------------------------------------------------------
# Dynamic recursions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DynamicLayerStats:
    """Per-level quantities of the adaptive protocol.

    ``pr_i_f``/``err_i_f`` hold the recovery rate of a failed (or partial)
    pair through two independent single-qubit indirect measurements, one
    per tree; ``pr_s_c``/``err_s_c`` the chain rate below a complete pair;
    ``pr_i_c``/``err_i_c`` the majority-voted recovery below a complete
    pair; ``pr_m`` the per-pair Z-parity rate; ``err_m_c/p/f`` the value
    error by outcome class and ``err_m_bar`` the class mixture conditioned
    on the parity being obtained.
    """

    pr_i_z: np.ndarray
    err_i_z: np.ndarray
    pr_i_f: np.ndarray
    err_i_f: np.ndarray
    pr_m: np.ndarray
    pr_s_c: np.ndarray
    err_s_c: np.ndarray
    pr_i_c: np.ndarray
    err_i_c: np.ndarray
    err_m_c: np.ndarray
    err_m_p: np.ndarray
    err_m_bar: np.ndarray


def dynamic_layer_recursion(
    b: BranchingVectorLike, params: ChannelParams
) -> DynamicLayerStats:
    """Level recursion of the adaptive protocol.

    Per-pair Z-parity: ``pr_m[k] = eta^2 + (1 - eta^2) * pr_i_f[k]`` -- a
    complete or partial BSM reads it directly, a failed one is upgraded by
    the two single-qubit chains.  Below a complete pair, one recovery chain
    needs a complete child BSM (eta^2/2) and the Z-parity of every
    grandchild pair; conditional on chain success the grandchild outcome
    classes are iid, so the chain error is an odd-parity combination of the
    opener error with the class-mixture error ``err_m_bar[k+2]``.
    """
    vec = as_branching_vector(b)
    d = vec.depth
    eta = params.eta
    eta2 = eta**2

    z_side = static_layer_recursion(vec, params, Basis.Z)
    pr_i_z = z_side.pr_i.copy()
    err_i_z = z_side.err_i.copy()

    pr_i_f = pr_i_z**2
    err_i_f = 2.0 * err_i_z - 2.0 * err_i_z**2
    pr_m = eta2 + (1.0 - eta2) * pr_i_f

    pr_s_c = np.zeros(d + 1)
    err_s_c = np.zeros(d + 1)
    pr_i_c = np.zeros(d + 1)
    err_i_c = np.zeros(d + 1)
    err_m_c = np.zeros(d + 1)
    err_m_p = np.zeros(d + 1)
    err_m_bar = np.zeros(d + 1)

    for k in range(d, -1, -1):
        if k == d:
            # Leaves: no chains below, value error is the direct rate.
            err_m_c[k] = params.err_dzz
            err_m_p[k] = params.err_dzz
        else:
            if k + 1 == d:
                grand_pr, grand_err, n_grand = 1.0, 0.0, 0
            else:
                grand_pr, grand_err, n_grand = pr_m[k + 2], err_m_bar[k + 2], vec[k + 1]
            pr_s_c[k] = 0.5 * eta2 * grand_pr**n_grand
            err_s_c[k] = parity_error([params.err_dxx, grand_err], [1, n_grand])
            pr_i_c[k] = 1.0 - (1.0 - pr_s_c[k]) ** vec[k]
            err_i_c[k] = _vote_error_mix(vec[k], pr_s_c[k], err_s_c[k])
            err_m_c[k] = pr_i_c[k] * err_i_c[k] + (1.0 - pr_i_c[k]) * params.err_dzz
            err_m_p[k] = pr_i_f[k] * err_i_f[k] + (1.0 - pr_i_f[k]) * params.err_dzz

        if pr_m[k] > 0.0:
            err_m_bar[k] = (
                0.5 * eta2 * (err_m_c[k] + err_m_p[k])
                + (1.0 - eta2) * pr_i_f[k] * err_i_f[k]
            ) / pr_m[k]
        else:
            err_m_bar[k] = 0.0

    return DynamicLayerStats(
        pr_i_z=pr_i_z, err_i_z=err_i_z,
        pr_i_f=pr_i_f, err_i_f=err_i_f, pr_m=pr_m,
        pr_s_c=pr_s_c, err_s_c=err_s_c,
        pr_i_c=pr_i_c, err_i_c=err_i_c,
        err_m_c=err_m_c, err_m_p=err_m_p, err_m_bar=err_m_bar,
    )


def dynamic_logical_bsm(b: BranchingVectorLike, params: ChannelParams) -> LogicalBsmResult:
    """Evaluate the adaptive protocol exactly on tree shape ``b``."""
    vec = as_branching_vector(b)
    d = vec.depth
    dyn = dynamic_layer_recursion(vec, params)

    pr_xx = float(dyn.pr_i_c[0])
    err_xx = float(dyn.err_i_c[0])
    pr_zz = float(dyn.pr_m[1] ** vec[0])
    err_zz = parity_error([float(dyn.err_m_bar[1])], [vec[0]])

    i1 = float(dyn.pr_i_f[1])
    x = float(dyn.pr_m[2] ** vec[1]) if d >= 2 else 1.0
    pr_complete = _complete_bsm_sum(vec[0], params.eta, i1, x)
    err_complete = err_zz + (1.0 - err_zz) * err_xx

    return LogicalBsmResult(
        protocol=Protocol.DYNAMIC, b=vec, params=params,
        pr_xx=pr_xx, pr_zz=pr_zz, pr_complete=pr_complete,
        err_xx=err_xx, err_zz=err_zz, err_complete=err_complete,
    )


def logical_bsm(
    b: BranchingVectorLike, params: ChannelParams, protocol: Protocol
) -> LogicalBsmResult:
    if protocol is Protocol.STATIC:
        return static_logical_bsm(b, params)
    if protocol is Protocol.DYNAMIC:
        return dynamic_logical_bsm(b, params)
    raise ValueError(f"no closed-form evaluation for protocol {protocol}")


# ---------------------------------------------------------------------------
# Threshold finding
# ---------------------------------------------------------------------------

class UnreachableTargetError(RuntimeError):
    """The target success probability is not reached even at eta = 1."""


class ConfigurationError(ValueError):
    """The search family is empty or otherwise unusable."""


@dataclass(frozen=True)
class ThresholdResult:
    protocol: Protocol
    target: float
    eta_star: float
    bracket_low: float
    bracket_high: float
    iterations: int
    family_size: int
    witness: BranchingVector   # tree that reaches the target at bracket_high


def find_threshold(
    protocol: Protocol,
    family: Iterable[BranchingVectorLike],
    target: float = 0.99,
    tol: float = 1e-3,
    max_iter: int = 60,
) -> ThresholdResult:
    """Bisect the smallest eta at which some family member reaches ``target``.

    The predicate "max over the family of pr_complete(eta) >= target" is
    monotone in eta (success rates only improve with detection), so plain
    bisection brackets the family threshold.  Family thresholds decrease
    toward the asymptotic protocol thresholds as the family grows.
    """
    vectors = [as_branching_vector(v) for v in family]
    if not vectors:
        raise ConfigurationError("threshold family is empty")
    if target <= 0.0:
        raise ConfigurationError(f"target must be positive, got {target}")
    if target >= 1.0:
        # No finite tree is fully deterministic, so certainty is never reached.
        raise UnreachableTargetError(
            f"target {target} can never be reached by a finite tree"
        )

    def best_witness(eta: float) -> BranchingVector | None:
        params = ChannelParams(eta=eta, eps=0.0)
        for vec in vectors:
            if logical_bsm(vec, params, protocol).pr_complete >= target:
                return vec
        return None

    witness = best_witness(1.0)
    if witness is None:
        raise UnreachableTargetError(
            f"no tree in the family of {len(vectors)} reaches {target} even at eta=1"
        )

    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo > tol and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        w = best_witness(mid)
        if w is not None:
            hi, witness = mid, w
        else:
            lo = mid
        iterations += 1

    return ThresholdResult(
        protocol=protocol, target=target,
        eta_star=0.5 * (lo + hi), bracket_low=lo, bracket_high=hi,
        iterations=iterations, family_size=len(vectors), witness=witness,
    )
