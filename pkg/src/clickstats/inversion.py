"""Recovering photon-number statistics from click statistics.

The click law c = L p is linear, so in principle inversion is a pseudo-inverse.
In practice L is ill-conditioned as soon as the photon support is rich
compared to the number of bins, and the unconstrained solution picks up
negative entries.  Two methods are offered side by side:

- ``pseudo_inverse``: plain Moore-Penrose solve, reported raw so the
  negativity artifacts stay visible.
- ``constrained``: least squares restricted to the probability simplex
  (p >= 0, sum p = 1), solved with a small active-set iteration.

``q_mandel_from_clicks`` inverts with the detector's efficiency stripped
(dark counts kept), so the recovered statistics, and the witness computed
from them, refer to the photons that actually reached the detector.  That
matches how the witness is used: detection loss is part of the optical
state under test, not something to be divided out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import ClickDistribution, CountRecord, DetectorModel, click_matrix
from .distributions import PhotonDistribution
from .errors import (
    IllConditionedInversionError,
    InvalidArgumentError,
    UndefinedWitnessError,
)
from .witnesses import WitnessEstimate, q_mandel

_METHODS = ("constrained", "pseudo_inverse")

#: Condition numbers beyond this make the linear solve meaningless.
CONDITION_LIMIT = 1e12


def lstsq_simplex(A: np.ndarray, b: np.ndarray, grad_tol: float = 1e-12, max_iter: int | None = None) -> np.ndarray:
    """Minimize ||A p - b||_2 over the probability simplex.

    Active-set iteration on the quadratic program: pinned coordinates sit
    at 0, the free ones solve the equality-constrained normal equations,
    and coordinates enter or leave the active set one at a time until the
    KKT conditions hold to within ``grad_tol``.  A pinned coordinate whose
    release makes no progress (its unpinned solution heads straight back
    below zero) is barred from release until the objective next improves,
    which rules out cycling on degenerate data.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.size:
        raise InvalidArgumentError("A must be 2-d with rows matching b")
    dim = A.shape[1]
    G = A.T @ A
    h = A.T @ b
    if max_iter is None:
        max_iter = 100 * dim + 100

    def objective(v):
        r = A @ v - b
        return 0.5 * float(r @ r)

    p = np.full(dim, 1.0 / dim)
    active = np.zeros(dim, dtype=bool)
    tabu: set[int] = set()
    best = np.inf
    for _ in range(max_iter):
        free = np.flatnonzero(~active)
        k = free.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = G[np.ix_(free, free)]
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.append(h[free], 1.0)
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        x = np.zeros(dim)
        x[free] = sol[:k]
        nu = sol[k]

        if np.all(x[free] >= -grad_tol):
            x[free] = np.clip(x[free], 0.0, None)
            p = x
            value = objective(p)
            if value < best - grad_tol:
                best = value
                tabu.clear()
            grad = G @ p - h
            candidates = [
                i for i in np.flatnonzero(active) if i not in tabu and grad[i] - nu < -grad_tol
            ]
            if not candidates:
                return p
            release = min(candidates, key=lambda i: grad[i] - nu)
            active[release] = False
            tabu.add(release)
            continue

        # Step toward x until the first free coordinate hits zero.
        step = x - p
        shrinking = np.flatnonzero((~active) & (step < 0) & (x < 0))
        ratios = p[shrinking] / -step[shrinking]
        alpha = min(1.0, float(ratios.min()))
        if alpha > 0.0:
            p = np.clip(p + alpha * step, 0.0, None)
            tabu.clear()
        block = shrinking[np.argmin(ratios)]
        active[block] = True
        p[block] = 0.0
    raise RuntimeError("simplex least-squares did not converge")


@dataclass(frozen=True, eq=False)
class InversionResult:
    """Outcome of a click-to-photon inversion.

    ``probs`` is the raw solution: the pseudo-inverse method can produce
    negative entries (their total shows up in ``negative_mass``), the
    constrained method cannot.  Call :meth:`distribution` to get a
    validated photon-number distribution.
    """

    probs: np.ndarray
    residual_norm: float
    condition_number: float
    method: str

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def negative_mass(self) -> float:
        return float(-np.clip(self.probs, None, 0.0).sum())

    def distribution(self, atol: float = 1e-9) -> PhotonDistribution:
        """The solution as a normalized distribution.

        Raises:
            InvalidArgumentError: the raw solution has negative mass beyond
                ``atol`` and cannot honestly be read as probabilities.
        """
        if self.negative_mass > atol:
            raise InvalidArgumentError(
                f"inverted probabilities carry negative mass {self.negative_mass:.3g}; "
                "use the constrained method"
            )
        probs = np.clip(self.probs, 0.0, None)
        return PhotonDistribution(probs / probs.sum())


def invert_clicks(
    c: ClickDistribution,
    det: DetectorModel,
    n_max: int,
    method: str = "constrained",
) -> InversionResult:
    """Solve c = L p for the photon-number distribution p on 0..n_max.

    Raises:
        IllConditionedInversionError: more photon-number unknowns than
            click outcomes (n_max > n_bins), or cond(L) beyond 1e12.
    """
    if method not in _METHODS:
        raise InvalidArgumentError(f"method must be one of {_METHODS}, got {method!r}")
    if c.n_bins != det.n_bins:
        raise InvalidArgumentError(
            f"click distribution has {c.n_bins} bins, detector has {det.n_bins}"
        )
    if n_max < 0:
        raise InvalidArgumentError("n_max must be >= 0")
    if n_max > det.n_bins:
        raise IllConditionedInversionError(
            f"{n_max + 1} photon-number unknowns from {det.n_bins + 1} click "
            "outcomes is underdetermined; lower n_max or add bins"
        )
    L = click_matrix(det, n_max)
    cond = float(np.linalg.cond(L))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedInversionError(
            f"click matrix condition number {cond:.3g} exceeds {CONDITION_LIMIT:.0e}",
            condition_number=cond,
        )
    if method == "pseudo_inverse":
        probs = np.linalg.pinv(L) @ c.probs
    else:
        probs = lstsq_simplex(L, c.probs)
    residual = float(np.linalg.norm(L @ probs - c.probs))
    return InversionResult(probs=probs, residual_norm=residual, condition_number=cond, method=method)


def q_mandel_from_clicks(
    c: ClickDistribution,
    det: DetectorModel,
    n_max: int,
    method: str = "constrained",
) -> float:
    """Mandel witness of the detected photons behind a click record.

    The inversion uses the detector with its efficiency set to 1 (dark
    counts kept), so loss is not divided out: a pure single photon seen
    through 60% efficiency comes back as Q = -0.6, the witness of the
    surviving photon flux.
    """
    stripped = det.with_efficiency(1.0)
    result = invert_clicks(c, stripped, n_max, method=method)
    return q_mandel(result.distribution())


def mc_q_mandel_from_clicks(
    record: CountRecord,
    det: DetectorModel,
    n_max: int,
    method: str = "constrained",
    n_replicas: int = 10_000,
    seed=None,
) -> WitnessEstimate:
    """Bootstrap ``q_mandel_from_clicks`` under Poissonian counting noise.

    Mirrors :func:`clickstats.witnesses.mc_witness`: each replica redraws
    every count as Poisson around the observed value, is inverted, and its
    recovered photon statistics are scored with the Mandel witness.
    Replicas whose inversion or witness is undefined are dropped.
    """
    if n_replicas < 2:
        raise InvalidArgumentError("n_replicas must be >= 2")
    counts = np.asarray(record.counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise UndefinedWitnessError("count record is empty")
    value = q_mandel_from_clicks(ClickDistribution(counts / total), det, n_max, method=method)

    rng = np.random.default_rng(seed)
    replicas = rng.poisson(lam=counts, size=(n_replicas, counts.size)).astype(float)
    samples = []
    for row in replicas:
        row_total = row.sum()
        if row_total <= 0:
            continue
        try:
            q = q_mandel_from_clicks(ClickDistribution(row / row_total), det, n_max, method=method)
        except (UndefinedWitnessError, InvalidArgumentError):
            continue
        samples.append(q)
    if len(samples) < 2:
        raise UndefinedWitnessError(
            f"only {len(samples)} of {n_replicas} replicas gave a defined witness"
        )
    samples = np.asarray(samples)
    return WitnessEstimate(
        value=value,
        std_error=float(samples.std(ddof=1)),
        n_replicas=int(samples.size),
        dropped_fraction=1.0 - samples.size / n_replicas,
        samples=samples,
    )
