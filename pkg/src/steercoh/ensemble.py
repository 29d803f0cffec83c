"""Haar-ensemble averages of C1, C2, C3: exact closed forms and Monte Carlo.

For a state drawn uniformly on A (x) B (x) E with dim A = a and dim E = K,

    <C1> = (-1)^K pi^{3/2} / (2 K! Gamma(1/2 - K))
    <C2> = (-1)^K pi^{3/2} (13 - 22K) / (32 K! Gamma(3/2 - K))
    <C3> = (-1)^K pi^{3/2} (433 - 936K + 428K^2) / (512 K! Gamma(5/2 - K))

Every Gamma argument is a half-integer, Gamma(1/2 - n) = sqrt(pi) * q_n with
q_n rational, so each average is an exact rational multiple of pi. The
rational is computed with :class:`fractions.Fraction` and only the final
product is rounded.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import measures, states
from .errors import OutOfRange

K_MAX = 30
MIN_SAMPLES = 100
CHUNK = 5000

_NUMERATOR = {
    1: (lambda K: 1, 2, 0),
    2: (lambda K: 13 - 22 * K, 32, 1),
    3: (lambda K: 433 - 936 * K + 428 * K * K, 512, 2),
}


def gamma_half_ratio(n: int) -> Fraction:
    """``Gamma(1/2 - n) / sqrt(pi)`` as an exact fraction (any integer n)."""
    if n >= 0:
        return Fraction((-4) ** n * math.factorial(n), math.factorial(2 * n))
    m = -n
    return Fraction(math.factorial(2 * m), 4 ** m * math.factorial(m))


def closed_form_coefficient(a: int, K: int) -> Fraction:
    """The rational ``r`` with ``<C_a> = r * pi`` for environment dimension K."""
    if a not in _NUMERATOR:
        raise OutOfRange(f"closed forms exist for a in (1, 2, 3), got {a}")
    if not 1 <= K <= K_MAX:
        raise OutOfRange(f"K must lie in [1, {K_MAX}], got {K}")
    numer, denom, shift = _NUMERATOR[a]
    # Gamma(1/2 + shift - K) = Gamma(1/2 - (K - shift))
    g = gamma_half_ratio(K - shift)
    return Fraction((-1) ** K * numer(K), denom * math.factorial(K)) / g


def closed_form_mean(a: int, K: int) -> float:
    return float(closed_form_coefficient(a, K)) * math.pi


def _chunk_values(a: int, K: int, seed: int, start: int, count: int) -> np.ndarray:
    batch = states.haar_batch((a, 2, K), seed, count, start=start)
    return measures.ca_trace_norm_batch(batch)


def sample_values(a: int, K: int, samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """C_a of ``samples`` Haar states of dims ``(a, 2, K)``.

    Sample ``i`` is ``haar_sample((a, 2, K), sample_seed(seed, i))``, so the
    output does not depend on ``workers``.
    """
    starts = list(range(0, samples, CHUNK))
    jobs = [(s, min(CHUNK, samples - s)) for s in starts]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _chunk_values(a, K, seed, *j), jobs))
    else:
        parts = [_chunk_values(a, K, seed, *j) for j in jobs]
    return np.concatenate(parts) if parts else np.empty(0)


def monte_carlo_mean(a: int, K: int, samples: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Sample mean of C_a and its standard error."""
    if samples < MIN_SAMPLES:
        raise OutOfRange(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if a < 1 or K < 1:
        raise OutOfRange(f"a and K must be positive, got a={a}, K={K}")
    v = sample_values(a, K, samples, seed, workers=workers)
    return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(samples))


@dataclass
class EnsembleReport:
    a: int
    K: int
    samples: int
    seed: int
    mc_mean: float
    mc_stderr: float
    closed_form: float
    z_score: float
    alice_dim: int
    effective_K: int

    def to_dict(self) -> dict:
        return asdict(self)


def compare(a: int, K: int, samples: int, seed: int, alice_dim: int | None = None,
            workers: int = 1) -> EnsembleReport:
    """Monte Carlo estimate next to the closed form, with its z-score.

    By default the sampled states have dims ``(a, 2, K)``. For ``a == 1``,
    ``alice_dim`` may be set to sample a tripartite state with a spectator
    A; C1 then sees the joint environment A (x) E and the closed form is
    read at ``alice_dim * K``.
    """
    dA = a if alice_dim is None else alice_dim
    if dA != a and a != 1:
        raise OutOfRange("alice_dim may differ from a only for a = 1")
    eff_K = K * dA if a == 1 else K
    closed = closed_form_mean(a, eff_K)
    if samples < MIN_SAMPLES:
        raise OutOfRange(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if dA == a:
        mean, err = monte_carlo_mean(a, K, samples, seed, workers=workers)
    else:
        v = np.array([measures.c1(states.haar_sample((dA, 2, K), states.sample_seed(seed, i)))
                      for i in range(samples)])
        mean, err = float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(samples))
    z = (mean - closed) / err if err > 0 else math.inf
    return EnsembleReport(a, K, samples, seed, mean, err, closed, z, dA, eff_K)
