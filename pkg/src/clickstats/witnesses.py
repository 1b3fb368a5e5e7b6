"""Nonclassicality witnesses for photon-number and click statistics.

Three normalized dispersion measures:

- ``q_mandel``: variance-to-mean departure from Poisson, on photon numbers.
  Negative values certify nonclassical (sub-Poissonian) light.
- ``q_binomial``: departure from binomial statistics, on click numbers from
  an N-bin multiplexed detector.  Negative values certify nonclassicality
  directly in the click record, with no detector inversion.
- ``q_fake``: the Mandel formula applied naively to click numbers.  Kept as
  a counterexample: it goes negative even for coherent light, because
  clipping at N bins suppresses the variance.

``mc_witness`` propagates counting noise through either click witness by
parametric bootstrap: replica records are drawn with each entry Poisson
around the observed count, mirroring how raw coincidence counters
accumulate events.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import ClickDistribution, CountRecord
from .distributions import PhotonDistribution
from .errors import InvalidArgumentError, UndefinedWitnessError

_WITNESSES = ("Q_B", "Q_F")

#: Relative floor under which a mean click number makes the witnesses 0/0.
_MEAN_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class WitnessEstimate:
    """A witness value with a Monte Carlo standard error.

    Attributes:
        value: the witness evaluated on the observed record.
        std_error: sample standard deviation of the replica values.
        n_replicas: number of replicas that produced a defined value.
        dropped_fraction: fraction of replicas discarded as undefined
            (zero total, or mean clicks pinned at 0 or N).
        samples: the replica witness values, for histogramming.
    """

    value: float
    std_error: float
    n_replicas: int
    dropped_fraction: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)


def _moments(probs: np.ndarray) -> tuple[float, float]:
    idx = np.arange(probs.size)
    mean = float(idx @ probs)
    var = float((idx * idx) @ probs) - mean * mean
    return mean, var


def q_mandel(p: PhotonDistribution) -> float:
    """Variance-to-mean witness on photon numbers: Var(n)/E(n) - 1."""
    mean, var = _moments(p.probs)
    if mean <= _MEAN_FLOOR:
        raise UndefinedWitnessError("mean photon number is 0")
    return var / mean - 1.0


def _q_binomial_raw(probs: np.ndarray) -> float:
    n_bins = probs.size - 1
    mean, var = _moments(probs)
    if mean <= _MEAN_FLOOR or mean >= n_bins - 1e-15:
        raise UndefinedWitnessError(
            f"mean click number {mean!r} leaves no binomial spread over {n_bins} bins"
        )
    return n_bins * var / (mean * (n_bins - mean)) - 1.0


def _q_fake_raw(probs: np.ndarray) -> float:
    mean, var = _moments(probs)
    if mean <= _MEAN_FLOOR:
        raise UndefinedWitnessError("mean click number is 0")
    return var / mean - 1.0


def q_binomial(c: ClickDistribution) -> float:
    """Binomial witness on clicks: N Var(c) / (E(c) (N - E(c))) - 1.

    Zero for binomial click statistics (coherent light through an ideal
    multiplexed detector); negative only for nonclassical light.
    """
    return _q_binomial_raw(c.probs)


def q_fake(c: ClickDistribution) -> float:
    """Mandel formula evaluated on click numbers: Var(c)/E(c) - 1.

    Not a witness.  For coherent light on an ideal N-bin detector the
    clicks are Binomial(N, q) and this returns -q < 0.
    """
    return _q_fake_raw(c.probs)


def witness_from_counts(record: CountRecord, witness: str) -> float:
    """Evaluate a click witness on raw counts (relative frequencies)."""
    if witness not in _WITNESSES:
        raise InvalidArgumentError(f"witness must be one of {_WITNESSES}, got {witness!r}")
    counts = np.asarray(record.counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise UndefinedWitnessError("count record is empty")
    probs = counts / total
    return _q_binomial_raw(probs) if witness == "Q_B" else _q_fake_raw(probs)


def mc_witness(
    record: CountRecord,
    witness: str,
    n_replicas: int = 10_000,
    seed=None,
) -> WitnessEstimate:
    """Bootstrap a click witness under Poissonian counting noise.

    Each replica redraws every counts[i] as Poisson(counts[i]) and
    re-evaluates the witness on the replica frequencies.  The reported
    value is the witness of the observed record; the standard error is the
    sample standard deviation over defined replicas.  Replicas with an
    undefined witness (empty record, or mean clicks pinned at 0 or N) are
    dropped and reported via ``dropped_fraction``.
    """
    if witness not in _WITNESSES:
        raise InvalidArgumentError(f"witness must be one of {_WITNESSES}, got {witness!r}")
    if n_replicas < 2:
        raise InvalidArgumentError("n_replicas must be >= 2")
    value = witness_from_counts(record, witness)

    rng = np.random.default_rng(seed)
    counts = np.asarray(record.counts, dtype=float)
    n_bins = counts.size - 1
    replicas = rng.poisson(lam=counts, size=(n_replicas, counts.size)).astype(float)

    totals = replicas.sum(axis=1)
    idx = np.arange(counts.size, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        means = (replicas @ idx) / totals
        second = (replicas @ (idx * idx)) / totals
        variances = second - means * means
        if witness == "Q_B":
            defined = (totals > 0) & (means > 0) & (means < n_bins)
            values = n_bins * variances / (means * (n_bins - means)) - 1.0
        else:
            defined = (totals > 0) & (means > 0)
            values = variances / means - 1.0
    samples = values[defined]
    if samples.size < 2:
        raise UndefinedWitnessError(
            f"only {samples.size} of {n_replicas} replicas gave a defined witness"
        )
    return WitnessEstimate(
        value=value,
        std_error=float(samples.std(ddof=1)),
        n_replicas=int(samples.size),
        dropped_fraction=1.0 - samples.size / n_replicas,
        samples=samples,
    )
