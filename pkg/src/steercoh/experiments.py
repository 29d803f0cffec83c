"""Exploratory numerics with no pass/fail contract."""

from __future__ import annotations

import math

import numpy as np

from . import measures, states, steering


def repurify_branches(psi: states.PureState, rng: np.random.Generator) -> states.PureState:
    """Apply an independent random unitary on A to each branch of B.

    The result has the same ``p0, p1`` and the same conditional states of
    E as ``psi``; only the correlations carried by A change.
    """
    t = psi.tensor.copy()
    for b in (0, 1):
        v = steering.haar_unitaries(rng, 1, psi.dims.dA)[0]
        t[:, b, :] = v @ t[:, b, :]
    return states.from_tensor(t)


def c3_function_probe(K: int, samples: int, seed: int) -> dict:
    """Look for pairs of dims (3, 2, K) states that share ``(p0, p1, rho0, rho1)``
    but differ in C3, and compare C3 with fidelity-type candidates.

    Returns the worst deviations found:
      * ``max_c3_spread``: |C3(psi) - C3(psi')| over branch re-purifications;
      * ``max_dev_uhlmann``: |C3 - 2 sqrt(p0 p1 F)| with F the Uhlmann fidelity;
      * ``max_dev_subfid``: |C3 - 2 sqrt(p0 p1 E)| with E the sub-fidelity.
    """
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 99])
    spread = dev_f = dev_e = 0.0
    for i in range(samples):
        psi = states.haar_sample((3, 2, K), states.sample_seed(seed, i))
        c3 = measures.ca_trace_norm(psi)
        other = repurify_branches(psi, rng)
        spread = max(spread, abs(c3 - measures.ca_trace_norm(other)))
        pair = states.conditional_env_states(psi)
        if pair.degenerate:
            continue
        pp = pair.p0 * pair.p1
        f = measures.uhlmann_fidelity(pair.rho0, pair.rho1)
        e = measures.sub_fidelity(pair.rho0, pair.rho1)
        dev_f = max(dev_f, abs(c3 - 2.0 * math.sqrt(pp * f)))
        dev_e = max(dev_e, abs(c3 - 2.0 * math.sqrt(pp * e)))
    return {
        "K": K,
        "samples": samples,
        "seed": seed,
        "max_c3_spread": spread,
        "max_dev_uhlmann": dev_f,
        "max_dev_subfid": dev_e,
    }
