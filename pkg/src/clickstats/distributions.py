"""Single-mode photon-number distributions.

A photon-number distribution is a truncated probability vector ``p[n]``,
n = 0..n_max.  Constructors guarantee that the untruncated tail beyond the
cutoff is below ``TAIL_TOLERANCE`` (extending the cutoff automatically when
necessary, up to ``HARD_CUTOFF_LIMIT``) and renormalize after truncation, so
silent truncation never biases the moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import CutoffOverflowError, InvalidArgumentError

#: Untruncated probability mass allowed to fall beyond the cutoff.
TAIL_TOLERANCE = 1e-10

#: Constructors refuse to extend a cutoff past this photon number.
HARD_CUTOFF_LIMIT = 512

_NORM_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Probability vector over photon number n = 0..n_max."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidArgumentError("probs must be a non-empty 1-d vector")
        if np.any(probs < 0) or np.any(probs > 1 + _NORM_ATOL):
            raise InvalidArgumentError("probabilities must lie in [0, 1]")
        total = probs.sum()
        if abs(total - 1.0) > _NORM_ATOL:
            raise InvalidArgumentError(
                f"probabilities sum to {total!r}, expected 1 within {_NORM_ATOL}"
            )
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def mean(self) -> float:
        return moments(self)[0]

    @property
    def variance(self) -> float:
        return moments(self)[1]


def moments(p: PhotonDistribution) -> tuple[float, float]:
    """Return (mean, variance) of a photon-number distribution."""
    n = np.arange(p.probs.size, dtype=float)
    mean = float(n @ p.probs)
    variance = float(((n - mean) ** 2) @ p.probs)
    return mean, variance


def _resolve_cutoff(requested, tail_beyond, label):
    """Smallest cutoff >= requested whose tail mass is below TAIL_TOLERANCE.

    ``tail_beyond(n)`` must return the untruncated mass at photon numbers > n.
    Raises CutoffOverflowError if no cutoff up to HARD_CUTOFF_LIMIT suffices.
    """
    n = 0 if requested is None else int(requested)
    if n < 0:
        raise InvalidArgumentError("n_max must be >= 0")
    if n > HARD_CUTOFF_LIMIT:
        raise CutoffOverflowError(
            f"requested cutoff {n} exceeds hard limit {HARD_CUTOFF_LIMIT}"
        )
    while tail_beyond(n) >= TAIL_TOLERANCE:
        n += 1
        if n > HARD_CUTOFF_LIMIT:
            raise CutoffOverflowError(
                f"{label}: tail mass cannot be brought below {TAIL_TOLERANCE} "
                f"with cutoff <= {HARD_CUTOFF_LIMIT}"
            )
    return n


def coherent_pn(mean_photons: float, n_max: int | None = None) -> PhotonDistribution:
    """Poissonian photon statistics of a coherent state with the given mean.

    The cutoff is extended beyond ``n_max`` if needed to keep the truncated
    tail below TAIL_TOLERANCE; the result is renormalized.
    """
    mu = float(mean_photons)
    if mu < 0:
        raise InvalidArgumentError("mean_photons must be >= 0")
    n_max = _resolve_cutoff(n_max, lambda n: stats.poisson.sf(n, mu), "coherent_pn")
    probs = stats.poisson.pmf(np.arange(n_max + 1), mu)
    return PhotonDistribution(probs / probs.sum())


def thermal_pn(mean_photons: float, n_max: int | None = None) -> PhotonDistribution:
    """Thermal (geometric) photon statistics: p_n \\propto mu^n / (1+mu)^(n+1)."""
    mu = float(mean_photons)
    if mu < 0:
        raise InvalidArgumentError("mean_photons must be >= 0")
    if mu == 0:
        n_max = 0 if n_max is None else int(n_max)
        probs = np.zeros(n_max + 1)
        probs[0] = 1.0
        return PhotonDistribution(probs)
    r = mu / (1.0 + mu)
    # tail beyond n is r^(n+1)
    n_max = _resolve_cutoff(n_max, lambda n: r ** (n + 1), "thermal_pn")
    n = np.arange(n_max + 1)
    log_probs = n * math.log(r) + math.log(1.0 - r)
    probs = np.exp(log_probs)
    return PhotonDistribution(probs / probs.sum())


def fock_pn(n: int, n_max: int | None = None) -> PhotonDistribution:
    """Photon-number eigenstate: all mass at n."""
    n = int(n)
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    n_max = n if n_max is None else int(n_max)
    if n > n_max:
        raise InvalidArgumentError(f"n={n} exceeds n_max={n_max}")
    if n_max > HARD_CUTOFF_LIMIT:
        raise CutoffOverflowError(
            f"requested cutoff {n_max} exceeds hard limit {HARD_CUTOFF_LIMIT}"
        )
    probs = np.zeros(n_max + 1)
    probs[n] = 1.0
    return PhotonDistribution(probs)
