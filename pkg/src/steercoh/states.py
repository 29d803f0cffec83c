"""Tripartite pure states on A (x) B (x) E with B a qubit.

Amplitudes are stored flat with index ``(iA * 2 + iB) * dE + iE``, i.e.
A-major and E-minor, so ``amplitudes.reshape(dA, 2, dE)`` gives the tensor
``psi[iA, iB, iE]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matkernel
from .errors import (
    BadLength,
    BadShape,
    BadSubsystemIndex,
    NotNormalizable,
    OutOfRange,
)

MAX_TOTAL_DIM = 4096
NORM_TOL = 1e-6
DEGENERATE_P = 1e-12


@dataclass(frozen=True)
class TripartiteDims:
    dA: int
    dB: int = 2
    dE: int = 1

    def __post_init__(self):
        if self.dB != 2:
            raise BadShape(f"B must be a qubit, got dB={self.dB}")
        if self.dA < 1 or self.dE < 1:
            raise BadShape(f"dimensions must be positive, got {self.as_tuple()}")
        if self.total > MAX_TOTAL_DIM:
            raise BadShape(f"total dimension {self.total} exceeds {MAX_TOTAL_DIM}")

    @property
    def total(self) -> int:
        return self.dA * self.dB * self.dE

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.dA, self.dB, self.dE)

    @classmethod
    def of(cls, dims) -> "TripartiteDims":
        if isinstance(dims, TripartiteDims):
            return dims
        dA, dB, dE = (int(d) for d in dims)
        return cls(dA, dB, dE)


@dataclass(frozen=True, eq=False)
class PureState:
    dims: TripartiteDims
    amplitudes: np.ndarray

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes as ``psi[iA, iB, iE]``."""
        return self.amplitudes.reshape(self.dims.as_tuple())


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    subsystem_dims: tuple[int, ...]

    def __post_init__(self):
        n = int(np.prod(self.subsystem_dims))
        if self.matrix.shape != (n, n):
            raise BadShape(f"matrix shape {self.matrix.shape} does not match dims {self.subsystem_dims}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_valid(self, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-10) -> bool:
        """Check Hermiticity, unit trace and positivity."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T), initial=0.0) > herm_tol:
            return False
        if abs(np.trace(m) - 1.0) > trace_tol:
            return False
        return bool(matkernel.hermitian_eigenvalues(m)[0] >= -psd_tol)


@dataclass(frozen=True, eq=False)
class ConditionalEnvPair:
    """Probabilities of B's alternatives and the matching states of E.

    ``rho0``/``rho1`` are None when the corresponding probability is below
    1e-12; ``degenerate`` is then True.
    """

    p0: float
    p1: float
    rho0: DensityOperator | None
    rho1: DensityOperator | None

    @property
    def degenerate(self) -> bool:
        return self.rho0 is None or self.rho1 is None


@dataclass(frozen=True, eq=False)
class CrossOperator:
    matrix: np.ndarray


def from_amplitudes(dims, amps) -> PureState:
    """Build a state from a flat amplitude vector, renormalizing exactly.

    Raises:
        BadLength: the vector length is not dA*2*dE.
        NotNormalizable: the norm is below 1e-12, or off from 1 by more
            than 1e-6.
    """
    dims = TripartiteDims.of(dims)
    a = np.asarray(amps, dtype=complex).reshape(-1)
    if a.size != dims.total:
        raise BadLength(f"expected {dims.total} amplitudes for dims {dims.as_tuple()}, got {a.size}")
    norm = np.linalg.norm(a)
    if not np.isfinite(norm) or norm < 1e-12:
        raise NotNormalizable(f"amplitude norm {norm:g}")
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalizable(f"amplitude norm {norm!r} is not within {NORM_TOL:g} of 1")
    return PureState(dims, a / norm)


def from_tensor(psi) -> PureState:
    """Build a state from a ``(dA, 2, dE)`` array."""
    t = np.asarray(psi, dtype=complex)
    if t.ndim != 3:
        raise BadShape(f"expected a rank-3 tensor, got shape {t.shape}")
    return from_amplitudes(t.shape, t.reshape(-1))


def sample_seed(seed: int, index: int) -> int:
    """Per-sample 64-bit seed derived from a run seed and a sample index."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index])
    return int(ss.generate_state(1, np.uint64)[0])


def haar_amplitudes(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def haar_sample(dims, seed: int) -> PureState:
    """Uniformly random pure state, fully determined by ``(dims, seed)``."""
    dims = TripartiteDims.of(dims)
    return PureState(dims, haar_amplitudes(dims.total, seed))


def haar_batch(dims, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Tensors ``(count, dA, 2, dE)`` of the states ``haar_sample(dims, sample_seed(seed, i))``."""
    dims = TripartiteDims.of(dims)
    out = np.empty((count, dims.total), dtype=complex)
    for k in range(count):
        out[k] = haar_amplitudes(dims.total, sample_seed(seed, start + k))
    return out.reshape((count,) + dims.as_tuple())


def random_density(d: int, rank: int, seed: int) -> DensityOperator:
    """State of a d-level system obtained by tracing a ``rank``-level
    ancilla out of a Haar-random pure state."""
    x = haar_amplitudes(d * rank, seed).reshape(d, rank)
    m = x @ x.conj().T
    return DensityOperator(0.5 * (m + m.conj().T), (d,))


def density(psi: PureState) -> DensityOperator:
    a = psi.amplitudes
    return DensityOperator(np.outer(a, a.conj()), psi.dims.as_tuple())


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out every subsystem not listed in ``keep``.

    The kept factors appear in the order given by ``keep``.
    """
    dims = tuple(rho.subsystem_dims)
    keep = [int(k) for k in keep]
    if not keep or len(set(keep)) != len(keep) or any(k < 0 or k >= len(dims) for k in keep):
        raise BadSubsystemIndex(f"invalid keep={keep} for {len(dims)} subsystems")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] for i in range(n)]
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    kd = tuple(dims[i] for i in keep)
    d = int(np.prod(kd))
    return DensityOperator(red.reshape(d, d), kd)


def reduced_ab(psi: PureState) -> DensityOperator:
    """``Tr_E |psi><psi|`` computed from the amplitude tensor."""
    dA, dB, dE = psi.dims.as_tuple()
    x = psi.amplitudes.reshape(dA * dB, dE)
    return DensityOperator(x @ x.conj().T, (dA, dB))


def reduced_b(psi: PureState) -> DensityOperator:
    """State of Bob's qubit alone."""
    x = np.swapaxes(psi.tensor, 0, 1).reshape(2, -1)
    return DensityOperator(x @ x.conj().T, (2,))


def conditional_env_states(psi: PureState) -> ConditionalEnvPair:
    """States of E conditioned on B's alternatives, with A traced out."""
    t = psi.tensor
    dE = psi.dims.dE
    probs, rhos = [], []
    for b in (0, 1):
        block = t[:, b, :]
        p = float(np.sum(np.abs(block) ** 2))
        probs.append(p)
        if p < DEGENERATE_P:
            rhos.append(None)
            continue
        m = block.T @ block.conj() / p
        rhos.append(DensityOperator(0.5 * (m + m.conj().T), (dE,)))
    return ConditionalEnvPair(probs[0], probs[1], rhos[0], rhos[1])


def cross_operator(rho_ab: DensityOperator) -> CrossOperator:
    """The block ``<0_B| rho_AB |1_B>`` as a dA x dA matrix."""
    dims = tuple(rho_ab.subsystem_dims)
    if len(dims) != 2 or dims[1] != 2:
        raise BadShape(f"expected subsystem dims (dA, 2), got {dims}")
    dA = dims[0]
    t = rho_ab.matrix.reshape(dA, 2, dA, 2)
    return CrossOperator(t[:, 0, :, 1].copy())


def cross_matrix_from_tensor(psi_t: np.ndarray) -> np.ndarray:
    """Cross operator straight from amplitude tensors ``(..., dA, 2, dE)``.

    Equivalent to ``cross_operator(partial_trace(density(psi), [0, 1]))``
    without forming the full density matrix; accepts stacks.
    """
    return psi_t[..., :, 0, :] @ np.conj(np.swapaxes(psi_t[..., :, 1, :], -1, -2))


def _marker_pair(overlap: float) -> tuple[np.ndarray, np.ndarray]:
    return np.array([1.0, 0.0]), np.array([overlap, np.sqrt(max(0.0, 1.0 - overlap * overlap))])


def mzi_state(gamma: float, phi: float = 0.0) -> PureState:
    """Interferometer path qubit B with a which-path marker in E.

    Returns the dims (1, 2, 2) state (|0>|m0> + e^{i phi}|1>|m1>)/sqrt(2)
    where <m0|m1> = gamma.
    """
    if not 0.0 <= gamma <= 1.0:
        raise OutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    m0, m1 = _marker_pair(gamma)
    t = np.zeros((1, 2, 2), dtype=complex)
    t[0, 0, :] = m0
    t[0, 1, :] = np.exp(1j * phi) * m1
    return from_tensor(t / np.sqrt(2.0))


def mzi_steering_state(gamma: float, phi: float = 0.0, env_overlap: float = 1.0) -> PureState:
    """Eraser setup where Alice holds the marker and E may hold a second one.

    The marker carried by A has overlap ``gamma`` between the two paths and
    the copy leaked into E has overlap ``env_overlap``. With
    ``env_overlap == 1`` the environment is trivial and dims are (2, 2, 1);
    otherwise E is a qubit and dims are (2, 2, 2).
    """
    for name, v in (("gamma", gamma), ("env_overlap", env_overlap)):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"{name} must lie in [0, 1], got {v}")
    a0, a1 = _marker_pair(gamma)
    if env_overlap == 1.0:
        e0 = e1 = np.array([1.0])
    else:
        e0, e1 = _marker_pair(env_overlap)
    t = np.zeros((2, 2, e0.size), dtype=complex)
    t[:, 0, :] = np.outer(a0, e0)
    t[:, 1, :] = np.exp(1j * phi) * np.outer(a1, e1)
    return from_tensor(t / np.sqrt(2.0))


def load_state(path) -> PureState:
    """Read a state file ``{"dims": [dA, 2, dE], "amplitudes": [[re, im], ...]}``."""
    doc = json.loads(Path(path).read_text())
    return state_from_json(doc)


def state_from_json(doc) -> PureState:
    if not isinstance(doc, dict) or "dims" not in doc or "amplitudes" not in doc:
        raise BadShape("state document needs 'dims' and 'amplitudes'")
    dims = doc["dims"]
    if not isinstance(dims, list) or len(dims) != 3:
        raise BadShape(f"dims must be a list [dA, 2, dE], got {dims!r}")
    amps = []
    for pair in doc["amplitudes"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise BadShape(f"amplitude entries must be [re, im] pairs, got {pair!r}")
        amps.append(complex(float(pair[0]), float(pair[1])))
    return from_amplitudes(dims, amps)


def state_to_json(psi: PureState) -> dict:
    return {
        "dims": list(psi.dims.as_tuple()),
        "amplitudes": [[float(z.real), float(z.imag)] for z in psi.amplitudes],
    }


def save_state(psi: PureState, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(psi)) + "\n")
