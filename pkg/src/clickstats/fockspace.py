"""Two-mode Fock-space states, beam splitters, loss, and heralded conditioning.

States live on a truncated photon-number grid with real amplitudes, which
covers every input this package needs (Fock and coherent states with a real
amplitude, and anything they evolve into under a real beam splitter).

The beam splitter follows the convention
    a -> sqrt(T) a + sqrt(R) b,      b -> sqrt(T) b - sqrt(R) a,
generated by exp[theta (a^dag b - b^dag a)] with cos(theta) = sqrt(T).  It
conserves total photon number, so it is applied sector by sector: within
the n_a + n_b = t subspace the matrix elements are binomial convolutions,
evaluated exactly per column with ``np.convolve`` and exact factorial
ratios.  No global matrix exponential, no renormalization tricks: the
output grid is enlarged to hold every sector completely, so each amplitude
is the exact <p, t-p| U |psi>.

``catalysis_conditional_pn`` implements single-photon catalysis: |1> meets
a coherent beam on the splitter, one output arm is measured (an ideal
photon-number-resolving detector or a multiplexed click detector) and the
other arm is kept conditioned on the measured outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .detector import DetectorModel, click_matrix
from .distributions import PhotonDistribution, coherent_pn
from .errors import DegenerateConditioningError, InvalidArgumentError

_NORM_ATOL = 1e-9

#: Herald outcomes below this probability cannot be conditioned on.
DEGENERATE_PROB = 1e-15


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure two-mode state with real amplitudes amps[n_a, n_b]."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=float)
        if amps.ndim != 2 or amps.size == 0:
            raise InvalidArgumentError("amps must be a 2-d amplitude grid")
        norm = float(np.sum(amps * amps))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise InvalidArgumentError(f"state norm is {norm!r}, expected 1")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def cutoffs(self) -> tuple[int, int]:
        """Maximum photon number representable in each mode."""
        return self.amps.shape[0] - 1, self.amps.shape[1] - 1

    def joint_pn(self) -> np.ndarray:
        """Joint photon-number probabilities |amps|^2 (read-only)."""
        grid = self.amps * self.amps
        grid.flags.writeable = False
        return grid

    def marginal_pn(self, mode: int) -> PhotonDistribution:
        """Photon-number distribution of one mode (0 for a, 1 for b)."""
        if mode not in (0, 1):
            raise InvalidArgumentError("mode must be 0 or 1")
        grid = self.joint_pn()
        marg = grid.sum(axis=1 - mode)
        return PhotonDistribution(marg / marg.sum())


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless real beam splitter, parameterized by transmittance T."""

    transmittance: float

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0:
            raise InvalidArgumentError("transmittance must lie in [0, 1]")

    @property
    def reflectivity(self) -> float:
        return 1.0 - self.transmittance

    @classmethod
    def from_reflectivity(cls, reflectivity: float) -> "BeamSplitter":
        if not 0.0 <= reflectivity <= 1.0:
            raise InvalidArgumentError("reflectivity must lie in [0, 1]")
        return cls(transmittance=1.0 - reflectivity)

    @classmethod
    def from_angle(cls, theta: float) -> "BeamSplitter":
        """Splitter with reflectivity cos(theta)^2 (theta = 0 swaps the modes)."""
        return cls.from_reflectivity(math.cos(theta) ** 2)


def product_input(fock_n: int, alpha: float, cutoff: int | None = None) -> TwoModeState:
    """|fock_n> in mode a times a real coherent state |alpha> in mode b.

    The coherent amplitudes are sqrt of the (renormalized) truncated Poisson
    weights; ``cutoff`` bounds mode b and defaults to a tail-resolved value.
    """
    if int(fock_n) != fock_n or fock_n < 0:
        raise InvalidArgumentError("fock_n must be an integer >= 0")
    if alpha < 0:
        raise InvalidArgumentError("alpha must be >= 0 (real amplitude convention)")
    coh = coherent_pn(alpha * alpha, n_max=cutoff)
    amps = np.zeros((int(fock_n) + 1, coh.n_max + 1))
    amps[int(fock_n), :] = np.sqrt(coh.probs)
    return TwoModeState(amps)


def _sector_matrix(t: int, ct: float, st: float) -> np.ndarray:
    """Beam splitter restricted to the total-photon sector n_a + n_b = t.

    Returns U with U[p, n] = <p, t-p| U |n, t-n>.  Column n is the
    convolution of the binomial expansions of (ct a^dag - st b^dag)^n and
    (st a^dag + ct b^dag)^(t-n), rescaled by exact factorial ratios.
    """
    U = np.empty((t + 1, t + 1))
    fact = [math.factorial(i) for i in range(t + 1)]
    for n in range(t + 1):
        m = t - n
        b1 = np.array([math.comb(n, j) * ct**j * (-st) ** (n - j) for j in range(n + 1)])
        b2 = np.array([math.comb(m, k) * st**k * ct ** (m - k) for k in range(m + 1)])
        conv = np.convolve(b1, b2)
        denom = fact[n] * fact[m]
        scale = np.array(
            [math.sqrt(fact[p] * fact[t - p] / denom) for p in range(t + 1)]
        )
        U[:, n] = conv * scale
    return U


def apply_beamsplitter(state: TwoModeState, bs: BeamSplitter, inverse: bool = False) -> TwoModeState:
    """Evolve a two-mode state through the splitter, exactly per sector.

    The output grid is square with side c_a + c_b + 1, large enough that no
    sector is clipped; amplitudes outside the reachable triangle stay 0.
    """
    ct = math.sqrt(bs.transmittance)
    st = math.sqrt(bs.reflectivity)
    if inverse:
        st = -st
    amps = state.amps
    c_a, c_b = state.cutoffs
    t_max = c_a + c_b
    out = np.zeros((t_max + 1, t_max + 1))
    for t in range(t_max + 1):
        v = np.zeros(t + 1)
        lo, hi = max(0, t - c_b), min(t, c_a)
        for n in range(lo, hi + 1):
            v[n] = amps[n, t - n]
        if not np.any(v):
            continue
        w = _sector_matrix(t, ct, st) @ v
        for p in range(t + 1):
            out[p, t - p] = w[p]
    return TwoModeState(out)


def apply_loss(p: PhotonDistribution, efficiency: float) -> PhotonDistribution:
    """Binomial loss channel: each photon independently survives with
    probability ``efficiency``."""
    if not 0.0 <= efficiency <= 1.0:
        raise InvalidArgumentError("efficiency must lie in [0, 1]")
    n = np.arange(p.n_max + 1)
    loss = stats.binom.pmf(n[:, None], n[None, :], efficiency)
    return PhotonDistribution(loss @ p.probs)


def catalysis_conditional_pn(
    alpha: float,
    reflectivity: float,
    herald_k: int,
    herald_detector: DetectorModel | None = None,
    cutoff: int | None = None,
) -> tuple[PhotonDistribution, float]:
    """Signal photon statistics of single-photon catalysis.

    A single photon (mode a) and a coherent state |alpha> (mode b) meet on
    a splitter with the given reflectivity; mode a is then measured and the
    signal (mode b) is kept when the measurement reports ``herald_k``.

    Args:
        alpha: real coherent amplitude (mean photon number alpha**2).
        reflectivity: splitter reflectivity; 0 leaves both modes untouched.
        herald_k: required herald outcome (photon count, or click count
            when a click detector is given).
        herald_detector: ``None`` for an ideal photon-number-resolving
            herald; otherwise the click detector watching mode a.
        cutoff: optional photon-number cutoff for the coherent mode.

    Returns:
        (conditional signal distribution, herald outcome probability).

    Raises:
        DegenerateConditioningError: the herald outcome has probability
            below 1e-15, so there is nothing to condition on.
    """
    if herald_k < 0 or int(herald_k) != herald_k:
        raise InvalidArgumentError("herald_k must be an integer >= 0")
    state = product_input(1, alpha, cutoff=cutoff)
    out = apply_beamsplitter(state, BeamSplitter.from_reflectivity(reflectivity))
    joint = out.joint_pn()
    n_a = joint.shape[0] - 1
    if herald_detector is None:
        if herald_k > n_a:
            weights = np.zeros(n_a + 1)
        else:
            weights = np.zeros(n_a + 1)
            weights[herald_k] = 1.0
    else:
        L = click_matrix(herald_detector, n_a)
        if herald_k > herald_detector.n_bins:
            raise InvalidArgumentError(
                f"herald_k={herald_k} exceeds the detector's {herald_detector.n_bins} bins"
            )
        weights = L[herald_k]
    unnorm = weights @ joint
    prob = float(unnorm.sum())
    if prob < DEGENERATE_PROB:
        raise DegenerateConditioningError(
            f"herald outcome {herald_k} has probability {prob!r}"
        )
    return PhotonDistribution(unnorm / prob), prob
