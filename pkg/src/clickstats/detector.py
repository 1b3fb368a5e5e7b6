"""Multiplexed click-detector model.

A multiplexed detector splits an incoming pulse over N bins (spatial or
temporal), each read out by an on/off detector.  It reports the number of
clicking bins, not the number of photons.  This module computes the exact
conditional click law P(i clicks | n photons), maps photon-number
distributions to click distributions, handles joint two-detector statistics
and conditioning, and samples count records.

Conventions:

- Photons are distributed over bins independently (multinomial statistics,
  bin b with probability ``bin_weights[b]``), which is exact for the
  phase-insensitive diagonal POVM of an on/off counter array.
- Per-photon efficiency eta is folded directly into the inclusion-exclusion
  survival terms: for a bin subset S, P(a given photon produces no click in
  S) = 1 - eta * sum(w_b, b in S).
- Dark clicks flip each silent bin independently with ``dark_click_prob``
  after photon assignment.

The inclusion-exclusion sum has alternating terms with large binomial
weights and is numerically fragile in floating point (entries that are
exactly zero come out at ~1e-9 for N=32).  It is therefore evaluated in
exact integer arithmetic over a common denominator and rounded to float
once, at the end; columns then sum to 1 to machine precision and no entry
is ever negative.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateConditioningError, InvalidArgumentError

_WEIGHT_SUM_ATOL = 1e-12
_CLICK_NORM_ATOL = 1e-9

#: Exact subset enumeration for non-uniform weights is limited to this many bins.
MAX_NONUNIFORM_BINS = 16

#: Conditioning below this probability cannot be normalized meaningfully.
DEGENERATE_PROB = 1e-15


@dataclass(frozen=True)
class DetectorModel:
    """A multiplexed on/off detector with N bins.

    Args:
        n_bins: number of bins N >= 1.
        bin_weights: splitting probabilities, length N, summing to 1.
            ``None`` means uniform 1/N (balanced splitter cascade).
        efficiency: per-photon survival probability, applied uniformly.
        dark_click_prob: per-bin probability that a silent bin clicks anyway.
    """

    n_bins: int
    bin_weights: tuple[float, ...] | None = None
    efficiency: float = 1.0
    dark_click_prob: float = 0.0

    def __post_init__(self):
        if int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise InvalidArgumentError("n_bins must be an integer >= 1")
        object.__setattr__(self, "n_bins", int(self.n_bins))
        if self.bin_weights is not None:
            w = tuple(float(x) for x in self.bin_weights)
            if len(w) != self.n_bins:
                raise InvalidArgumentError("bin_weights length must equal n_bins")
            if any(x < 0 for x in w):
                raise InvalidArgumentError("bin_weights must be >= 0")
            if abs(sum(w) - 1.0) > _WEIGHT_SUM_ATOL:
                raise InvalidArgumentError(
                    f"bin_weights sum to {sum(w)!r}, expected 1 within {_WEIGHT_SUM_ATOL}"
                )
            object.__setattr__(self, "bin_weights", w)
        if not 0.0 <= self.efficiency <= 1.0:
            raise InvalidArgumentError("efficiency must lie in [0, 1]")
        if not 0.0 <= self.dark_click_prob < 1.0:
            raise InvalidArgumentError("dark_click_prob must lie in [0, 1)")

    @classmethod
    def ideal(cls, n_bins: int) -> "DetectorModel":
        """Lossless, dark-count-free detector with uniform bins."""
        return cls(n_bins=n_bins)

    @property
    def is_uniform(self) -> bool:
        return self.bin_weights is None or len(set(self.bin_weights)) == 1

    def with_efficiency(self, efficiency: float) -> "DetectorModel":
        return DetectorModel(self.n_bins, self.bin_weights, efficiency, self.dark_click_prob)


@dataclass(frozen=True, eq=False)
class ClickDistribution:
    """Probability vector over the number of clicks i = 0..N."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if probs.ndim != 1 or probs.size < 2:
            raise InvalidArgumentError("click probs must cover i = 0..N with N >= 1")
        if np.any(probs < -1e-12):
            raise InvalidArgumentError("click probabilities must be >= 0")
        probs = np.clip(probs, 0.0, None)
        if abs(probs.sum() - 1.0) > _CLICK_NORM_ATOL:
            raise InvalidArgumentError(
                f"click probabilities sum to {probs.sum()!r}, expected 1"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def n_bins(self) -> int:
        return self.probs.size - 1


@dataclass(frozen=True, eq=False)
class JointClickDistribution:
    """Joint click probabilities probs[i, j] for two detectors."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 2:
            raise InvalidArgumentError("joint click probs must be a 2-d grid")
        if np.any(probs < -1e-12):
            raise InvalidArgumentError("joint click probabilities must be >= 0")
        probs = np.clip(probs, 0.0, None)
        if abs(probs.sum() - 1.0) > _CLICK_NORM_ATOL:
            raise InvalidArgumentError(
                f"joint click probabilities sum to {probs.sum()!r}, expected 1"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class CountRecord:
    """Raw event counts per click number, as collected in an experiment."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 2:
            raise InvalidArgumentError("counts must cover i = 0..N with N >= 1")
        if any(c < 0 for c in counts):
            raise InvalidArgumentError("counts must be >= 0")
        object.__setattr__(self, "counts", counts)

    @property
    def total_events(self) -> int:
        return sum(self.counts)

    @property
    def n_bins(self) -> int:
        return len(self.counts) - 1


def _survival_bases(det: DetectorModel):
    """Integer survival terms for the inclusion-exclusion sum.

    Returns (groups, D) where groups[j] is a list of (A, multiplicity) pairs
    such that, for each bin subset C with |C| = j, the probability that a
    single photon causes no click outside C is A / D.
    """
    N = det.n_bins
    eta = Fraction(det.efficiency)
    a, b = eta.numerator, eta.denominator
    if det.is_uniform:
        # All subsets of size j share the survival term (1-eta) + eta*j/N.
        D = b * N
        groups = [[((b - a) * N + a * j, math.comb(N, j))] for j in range(N + 1)]
        return groups, D
    if N > MAX_NONUNIFORM_BINS:
        raise InvalidArgumentError(
            f"exact click matrix with non-uniform weights is limited to "
            f"{MAX_NONUNIFORM_BINS} bins (got {N})"
        )
    weights = [Fraction(w) for w in det.bin_weights]
    V = math.lcm(*[w.denominator for w in weights])
    U = [int(w * V) for w in weights]
    D = b * V
    base0 = (b - a) * V
    groups = []
    for j in range(N + 1):
        acc = defaultdict(int)
        for combo in itertools.combinations(range(N), j):
            acc[base0 + a * sum(U[x] for x in combo)] += 1
        groups.append(sorted(acc.items()))
    return groups, D


def _photon_click_numerators(det: DetectorModel, n_max: int):
    """Exact numerators M[i][n] with P(i clicks | n photons) = M[i][n] / D**n.

    Dark counts are not included here.  Inclusion-exclusion over the bins
    that stay silent:  P(exactly i click | n) =
    sum_j (-1)^(i-j) C(N-j, i-j) sum_{|C|=j} ((1-eta) + eta*W_C)^n.
    """
    N = det.n_bins
    groups, D = _survival_bases(det)
    # T[j][n] = sum over subsets C of size j of (A_C)^n, via iterative powers.
    T = [[0] * (n_max + 1) for _ in range(N + 1)]
    for j, members in enumerate(groups):
        for A, mult in members:
            power = 1
            for n in range(n_max + 1):
                T[j][n] += mult * power
                power *= A
    M = [[0] * (n_max + 1) for _ in range(N + 1)]
    for i in range(N + 1):
        for n in range(n_max + 1):
            s = 0
            for j in range(i + 1):
                term = math.comb(N - j, i - j) * T[j][n]
                s += term if (i - j) % 2 == 0 else -term
            M[i][n] = s
    return M, D


@lru_cache(maxsize=64)
def click_matrix(det: DetectorModel, n_max: int) -> np.ndarray:
    """Exact conditional click law L[i, n] = P(i clicks | n photons enter).

    The returned (N+1) x (n_max+1) array is read-only and cached; every
    column sums to 1 to within accumulated rounding of the final float
    conversion (< 1e-13).
    """
    if n_max < 0:
        raise InvalidArgumentError("n_max must be >= 0")
    N = det.n_bins
    M, D = _photon_click_numerators(det, n_max)
    d = Fraction(det.dark_click_prob)
    e, g = d.numerator, d.denominator
    L = np.empty((N + 1, n_max + 1))
    if e == 0:
        for n in range(n_max + 1):
            Dn = D**n
            for i in range(N + 1):
                L[i, n] = M[i][n] / Dn  # big-int division rounds correctly
        L.flags.writeable = False
        return L
    # Mix in dark clicks: silent bins flip independently with probability d.
    # Common denominator D^n * g^N;  d^(i-s) (1-d)^(N-i) = e^(i-s)(g-e)^(N-i)/g^(N-s).
    for n in range(n_max + 1):
        Dn_gN = D**n * g**N
        for i in range(N + 1):
            s_total = 0
            for s in range(i + 1):
                s_total += (
                    M[s][n]
                    * math.comb(N - s, i - s)
                    * e ** (i - s)
                    * (g - e) ** (N - i)
                    * g**s
                )
            L[i, n] = s_total / Dn_gN
    L.flags.writeable = False
    return L


def forward_clicks(p, det: DetectorModel) -> ClickDistribution:
    """Map a photon-number distribution through the detector: c = L @ p."""
    L = click_matrix(det, p.n_max)
    return ClickDistribution(L @ p.probs)


def joint_forward_clicks(p_joint: np.ndarray, det1: DetectorModel, det2: DetectorModel) -> JointClickDistribution:
    """Joint click law for a two-mode photon-number grid measured by two detectors."""
    p_joint = np.asarray(p_joint, dtype=float)
    if p_joint.ndim != 2:
        raise InvalidArgumentError("p_joint must be a 2-d photon-number grid")
    if np.any(p_joint < 0) or abs(p_joint.sum() - 1.0) > _CLICK_NORM_ATOL:
        raise InvalidArgumentError("p_joint must be a normalized probability grid")
    L1 = click_matrix(det1, p_joint.shape[0] - 1)
    L2 = click_matrix(det2, p_joint.shape[1] - 1)
    return JointClickDistribution(L1 @ p_joint @ L2.T)


def condition_on_clicks(joint: JointClickDistribution, which_arm: int, k: int | None):
    """Condition the joint click statistics on k clicks in one arm.

    Args:
        joint: joint click distribution, probs[i, j] with i for arm 1.
        which_arm: 1 or 2, the arm whose click count is the condition.
        k: click count to condition on, or ``None`` for no condition
            (returns the other arm's marginal with probability 1).

    Returns:
        (ClickDistribution over the other arm, probability of the condition).
    """
    if which_arm not in (1, 2):
        raise InvalidArgumentError("which_arm must be 1 or 2")
    grid = joint.probs if which_arm == 1 else joint.probs.T
    if k is None:
        marginal = grid.sum(axis=0)
        return ClickDistribution(marginal / marginal.sum()), 1.0
    if not 0 <= k < grid.shape[0]:
        raise InvalidArgumentError(f"k={k} outside 0..{grid.shape[0] - 1}")
    slice_ = grid[k]
    prob = float(slice_.sum())
    if prob < DEGENERATE_PROB:
        raise DegenerateConditioningError(
            f"conditioning on {k} clicks in arm {which_arm} has probability {prob!r}"
        )
    return ClickDistribution(slice_ / prob), prob


def sample_counts(c: ClickDistribution, expected_total: float, seed) -> CountRecord:
    """Draw a count record with independent Poissonian noise per click number.

    Each counts[i] is Poisson with mean expected_total * c.probs[i];
    a fixed seed gives a reproducible record.
    """
    if expected_total <= 0:
        raise InvalidArgumentError("expected_total must be > 0")
    rng = np.random.default_rng(seed)
    counts = rng.poisson(expected_total * c.probs)
    return CountRecord(tuple(int(x) for x in counts))
