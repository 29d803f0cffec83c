"""Brute-force search over Alice's projective measurements.

Given outcome ``k`` of a rank-1 projective measurement ``{|u_k>}`` on A,
Bob's unnormalized conditional state has off-diagonal element
``<u_k| chi |u_k>`` where ``chi = <0_B|rho_AB|1_B>``, so the outcome-averaged
coherence is ``sum_k 2 |<u_k|chi|u_k>|``. Its supremum is ``2 Tr|chi|``; the
search here only approaches that value from below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures, states
from .errors import NotOrthonormal, ShapeMismatch
from .states import PureState

ORTHO_TOL = 1e-9
NEGLIGIBLE_P = 1e-12
CHUNK = 4096


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal basis of A stored as the columns of a unitary."""

    vectors: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.vectors, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ShapeMismatch(f"basis must be a square array of column vectors, got {u.shape}")
        gram = u.conj().T @ u
        if np.max(np.abs(gram - np.eye(u.shape[0]))) > ORTHO_TOL:
            raise NotOrthonormal("basis vectors are not orthonormal within 1e-9")
        object.__setattr__(self, "vectors", u)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def from_vectors(cls, vecs) -> "MeasurementBasis":
        """Build from a list of vectors (one per outcome)."""
        return cls(np.column_stack([np.asarray(v, dtype=complex) for v in vecs]))


@dataclass(frozen=True, eq=False)
class SteeringResult:
    best_value: float
    best_basis: MeasurementBasis
    evaluations: int
    analytic_bound: float
    max_evaluated: float


def average_coherence(psi: PureState, basis: MeasurementBasis) -> float:
    """Outcome-averaged coherence of Bob after Alice measures ``basis``."""
    dA = psi.dims.dA
    if basis.dim != dA:
        raise ShapeMismatch(f"basis has dimension {basis.dim}, A has {dA}")
    rho = states.reduced_ab(psi).matrix.reshape(dA, 2, dA, 2)
    total = 0.0
    for k in range(dA):
        u = basis.vectors[:, k]
        proj = np.outer(u, u.conj())
        # Tr_A[(P (x) 1) rho]_{b b'} = sum_ij P_ji rho_{ib, jb'}
        bob = np.einsum("ji,ibjc->bc", proj, rho)
        p = bob[0, 0].real + bob[1, 1].real
        if p < NEGLIGIBLE_P:
            continue
        total += 2.0 * abs(bob[0, 1])
    return total


def batch_average_coherence(chi: np.ndarray, unitaries: np.ndarray) -> np.ndarray:
    """Averaged coherence for a stack of bases ``(N, d, d)`` at once."""
    diag = np.einsum("nik,ij,njk->nk", unitaries.conj(), chi, unitaries)
    return 2.0 * np.sum(np.abs(diag), axis=-1)


def _orthonormalize(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * phase[..., None, :]


def haar_unitaries(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    z = rng.standard_normal((count, d, d, 2))
    return _orthonormalize(z[..., 0] + 1j * z[..., 1])


def optimize_steering(psi: PureState, budget: int, seed: int, refine_rounds: int = 12,
                      trials: int = 32) -> SteeringResult:
    """Random search over ``budget`` Haar bases, then local refinement.

    Refinement perturbs the incumbent with Gaussian kicks of size
    ``0.3 / 2**r`` for ``r < refine_rounds`` and keeps improvements. Both
    stages draw from streams derived from ``seed`` only, so the result is
    reproducible, and for a fixed seed the random candidates of a smaller
    budget are a prefix of those of a larger one.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    dA = psi.dims.dA
    chi = states.cross_matrix_from_tensor(psi.tensor)
    bound = measures.ca_trace_norm(psi)

    cand_rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 0])
    best_u, best_v = None, -np.inf
    done = 0
    while done < budget:
        n = min(CHUNK, budget - done)
        us = haar_unitaries(cand_rng, n, dA)
        vals = batch_average_coherence(chi, us)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v, best_u = float(vals[i]), us[i]
        done += n
    max_seen = best_v
    evaluations = budget

    ref_rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 1])
    for r in range(refine_rounds):
        step = 0.3 / 2 ** r
        for _ in range(8):
            kick = ref_rng.standard_normal((trials, dA, dA, 2))
            us = _orthonormalize(best_u + step * (kick[..., 0] + 1j * kick[..., 1]))
            vals = batch_average_coherence(chi, us)
            evaluations += trials
            i = int(np.argmax(vals))
            max_seen = max(max_seen, float(vals[i]))
            if vals[i] <= best_v:
                break
            best_v, best_u = float(vals[i]), us[i]

    basis = MeasurementBasis(best_u)
    return SteeringResult(
        best_value=average_coherence(psi, basis),
        best_basis=basis,
        evaluations=evaluations,
        analytic_bound=bound,
        max_evaluated=max_seen,
    )
