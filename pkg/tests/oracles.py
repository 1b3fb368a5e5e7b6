"""Independent reference implementations used to cross-check the package.

Everything here is written from first principles with a different method
than the library code: the click law by brute-force enumeration of photon
placements, the beam splitter by matrix exponential of its generator, the
constrained least squares by exhaustive support enumeration.  Slow and
simple on purpose.
"""

import itertools
import math

import numpy as np
from scipy.linalg import expm


def _compositions(total, parts):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def click_probs_by_enumeration(n_photons, n_bins, bin_weights, efficiency, dark_click_prob):
    """P(i clicks | n photons) by summing over every photon placement.

    Each photon is independently lost (prob 1-eta) or lands in bin b (prob
    eta*w_b); placements are enumerated as counts per (lost, bin_1..bin_N)
    with multinomial weights, then every silent bin flips to a click with
    the dark probability.
    """
    if bin_weights is None:
        bin_weights = [1.0 / n_bins] * n_bins
    probs_photon_only = np.zeros(n_bins + 1)
    outcomes = [1.0 - efficiency] + [efficiency * w for w in bin_weights]
    for counts in _compositions(n_photons, n_bins + 1):
        weight = math.factorial(n_photons)
        for c, q in zip(counts, outcomes):
            weight = weight / math.factorial(c) * q**c
        fired = sum(1 for c in counts[1:] if c > 0)
        probs_photon_only[fired] += weight
    if dark_click_prob == 0.0:
        return probs_photon_only
    d = dark_click_prob
    probs = np.zeros(n_bins + 1)
    for fired, p in enumerate(probs_photon_only):
        silent = n_bins - fired
        for extra in range(silent + 1):
            probs[fired + extra] += (
                p * math.comb(silent, extra) * d**extra * (1 - d) ** (silent - extra)
            )
    return probs


def beamsplitter_sector_by_expm(t, transmittance):
    """Sector matrix of exp[theta (a^dag b - b^dag a)], cos(theta)=sqrt(T).

    Basis index n is the mode-a photon number within the n_a + n_b = t
    sector; the generator's only nonzero elements come from the ladder
    algebra, and the exponential is taken numerically.
    """
    theta = math.atan2(math.sqrt(1.0 - transmittance), math.sqrt(transmittance))
    raising = np.zeros((t + 1, t + 1))
    for n in range(t):
        # a^dag b maps |n, t-n> to sqrt((n+1)(t-n)) |n+1, t-n-1>
        raising[n + 1, n] = math.sqrt((n + 1) * (t - n))
    return expm(theta * (raising - raising.T))


def two_photon_amplitudes(transmittance):
    """Hand-expanded two-photon beam splitter amplitudes.

    Returns a dict mapping (input, output) kets |n_a, n_b> to amplitudes,
    from expanding (sqrt(T) a^dag - sqrt(R) b^dag) and
    (sqrt(R) a^dag + sqrt(T) b^dag) monomials directly.
    """
    T = transmittance
    R = 1.0 - T
    st, ct = math.sqrt(R), math.sqrt(T)
    return {
        ((2, 0), (2, 0)): T,
        ((2, 0), (1, 1)): -math.sqrt(2 * T * R),
        ((2, 0), (0, 2)): R,
        ((1, 1), (2, 0)): math.sqrt(2 * T * R),
        ((1, 1), (1, 1)): T - R,
        ((1, 1), (0, 2)): -math.sqrt(2 * T * R),
        ((0, 2), (2, 0)): R,
        ((0, 2), (1, 1)): math.sqrt(2 * T * R),
        ((0, 2), (0, 2)): T,
        ((1, 0), (1, 0)): ct,
        ((1, 0), (0, 1)): -st,
        ((0, 1), (1, 0)): st,
        ((0, 1), (0, 1)): ct,
    }


def lstsq_simplex_by_enumeration(A, b):
    """Simplex-constrained least squares by trying every support set.

    For each nonempty subset of coordinates, solve the equality-constrained
    problem on that support; keep the best feasible candidate.  Exponential
    in the dimension, valid for small test problems.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    dim = A.shape[1]
    G = A.T @ A
    h = A.T @ b
    best = None
    best_val = np.inf
    for r in range(1, dim + 1):
        for support in itertools.combinations(range(dim), r):
            idx = list(support)
            k = len(idx)
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = G[np.ix_(idx, idx)]
            kkt[:k, k] = 1.0
            kkt[k, :k] = 1.0
            rhs = np.append(h[idx], 1.0)
            try:
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            except np.linalg.LinAlgError:
                continue
            x = np.zeros(dim)
            x[idx] = sol[:k]
            if np.any(x < -1e-9):
                continue
            x = np.clip(x, 0.0, None)
            x /= x.sum()
            val = float(np.sum((A @ x - b) ** 2))
            if val < best_val - 1e-15:
                best_val = val
                best = x
    return best
