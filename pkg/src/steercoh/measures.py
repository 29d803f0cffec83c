"""Coherence measures of Bob's qubit, with and without steering.

``c1`` is the coherence Bob sees when nobody acts. ``ca_trace_norm`` is the
best average coherence Alice can steer Bob to, twice the trace norm of the
cross operator; it is C2 for a qubit A and C3 for a qutrit A.
``c2_subfidelity`` computes C2 from the environment's conditional states
alone, and ``c3_newton`` recovers the trace norm of a 3x3 cross operator
from trace powers by solving a quartic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import matkernel, states
from .errors import (
    BadShape,
    NoRealRoot,
    NotReal,
    NumericalBreakdown,
    ShapeMismatch,
    WrongAliceDimension,
)
from .states import DensityOperator, PureState

RADICAND_CLAMP = 1e-10
# Relative size of rounding noise in a difference of trace polynomials.
NOISE_FLOOR = 64.0 * matkernel.EPS


def _as_operator(x) -> np.ndarray:
    m = x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadShape(f"expected a square matrix, got shape {m.shape}")
    return m


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_operator(x), _as_operator(y)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    return a, b


def coherence(rho_qubit) -> float:
    """Twice the modulus of the off-diagonal element of a qubit state."""
    m = _as_operator(rho_qubit)
    if m.shape != (2, 2):
        raise BadShape(f"coherence needs a 2x2 state, got {m.shape}")
    return 2.0 * abs(m[0, 1])


def _real_trace(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-8:
        raise NotReal(f"{what} has imaginary part {z.imag:.3e}")
    return z.real


def hs_overlap(x, y) -> float:
    """Hilbert-Schmidt overlap ``Tr(x y)`` of two Hermitian operators."""
    a, b = _pair(x, y)
    return _real_trace(complex(np.sum(a.T * b)), "Tr(xy)")


def sub_fidelity(x, y) -> float:
    """``Tr(xy) + sqrt(2) sqrt(Tr(xy)^2 - Tr(xyxy))``.

    Radicands in ``[-1e-10, 0)`` count as zero, as do positive ones under
    the rounding floor of the two trace terms (this is what makes pure
    pairs collapse exactly onto ``Tr(xy)``).

    Raises:
        NumericalBreakdown: the radicand is below -1e-10, which PSD inputs
            cannot produce.
    """
    a, b = _pair(x, y)
    xy, yx = a @ b, b @ a
    # Averaging both operand orders makes E(x, y) == E(y, x) bit for bit.
    t = _real_trace(0.5 * (complex(np.trace(xy)) + complex(np.trace(yx))), "Tr(xy)")
    t2 = _real_trace(0.5 * (complex(np.sum(xy.T * xy)) + complex(np.sum(yx.T * yx))), "Tr(xyxy)")
    rad = t * t - t2
    if rad < -RADICAND_CLAMP:
        raise NumericalBreakdown(f"sub-fidelity radicand {rad:.3e} < -{RADICAND_CLAMP:g}")
    # Rounding in Tr(xy) and Tr(xyxy) leaves ~eps*|Tr(xy)|*|x|*|y| behind.
    if rad <= NOISE_FLOOR * a.shape[0] * abs(t) * (np.linalg.norm(a) * np.linalg.norm(b)):
        rad = 0.0
    return t + math.sqrt(2.0) * math.sqrt(rad)


def uhlmann_fidelity(x, y) -> float:
    """``(Tr sqrt(sqrt(x) y sqrt(x)))^2``."""
    a, b = _pair(x, y)
    sa = matkernel.psd_sqrt(a)
    m = sa @ b @ sa
    w = matkernel.psd_eigenvalues(0.5 * (m + m.conj().T))
    return float(np.sum(np.sqrt(w))) ** 2


def c1(psi: PureState) -> float:
    """Coherence of Bob's qubit with no steering."""
    return coherence(states.reduced_b(psi))


def ca_trace_norm(psi: PureState) -> float:
    """Twice the trace norm of the cross operator ``<0_B|rho_AB|1_B>``."""
    chi = states.cross_operator(states.reduced_ab(psi)).matrix
    return 2.0 * matkernel.trace_norm(chi)


def ca_trace_norm_batch(tensors: np.ndarray) -> np.ndarray:
    """:func:`ca_trace_norm` for a stack of amplitude tensors ``(N, dA, 2, dE)``."""
    chi = states.cross_matrix_from_tensor(np.asarray(tensors, dtype=complex))
    return 2.0 * np.atleast_1d(matkernel.trace_norm(chi))


def c2_subfidelity(psi: PureState) -> float:
    """``2 sqrt(p0 p1 E(rho0, rho1))`` from the states of E given B.

    Raises:
        WrongAliceDimension: A is not a qubit.
    """
    if psi.dims.dA != 2:
        raise WrongAliceDimension(f"C2 needs dA = 2, got dA = {psi.dims.dA}")
    pair = states.conditional_env_states(psi)
    if pair.degenerate:
        return 0.0
    e = sub_fidelity(pair.rho0, pair.rho1)
    return 2.0 * math.sqrt(pair.p0 * pair.p1 * max(e, 0.0))


def elementary_symmetric_from_power_sums(t) -> list[float]:
    """Newton's identities: power sums ``t_1..t_n`` to ``s_1..s_n``.

    Uses ``i s_i = sum_{j=1..i} (-1)^(j-1) s_{i-j} t_j`` with ``s_0 = 1``.
    """
    t = list(t)
    s = [1.0]
    for i in range(1, len(t) + 1):
        acc = 0.0
        for j in range(1, i + 1):
            acc += (-1) ** (j - 1) * s[i - j] * t[j - 1]
        s.append(acc / i)
    return s[1:]


def trace_norm_from_symmetric(s1: float, s2: float, s3: float) -> float:
    """``sqrt(a) + sqrt(b) + sqrt(c)`` given the elementary symmetric
    polynomials of the nonnegative numbers ``a, b, c``.

    With ``T`` the wanted sum, ``T = sqrt(s1 + 2 sqrt(s2 + 2 sqrt(s3) T))``;
    squaring twice gives ``T^4 - 2 s1 T^2 - 8 sqrt(s3) T + s1^2 - 4 s2 = 0``
    whose roots are the sign patterns of the three square roots with an
    even number of minus signs, so ``T`` is the largest one.
    """
    if s1 <= 0.0:
        return 0.0
    r3 = math.sqrt(max(s3, 0.0))
    if r3 == 0.0:
        # Biquadratic: (T^2 - s1)^2 = 4 s2.
        return math.sqrt(s1 + 2.0 * math.sqrt(max(s2, 0.0)))
    roots = matkernel.real_quartic_roots(1.0, 0.0, -2.0 * s1, -8.0 * r3, s1 * s1 - 4.0 * s2)
    if not roots:
        raise NoRealRoot(f"no real root for s = ({s1}, {s2}, {s3})")
    return max(roots[-1], 0.0)


def c3_newton(chi) -> float:
    """Trace norm of a 3x3 matrix from ``Tr(y), Tr(y^2), Tr(y^3)``, ``y = chi^dagger chi``.

    C3 is twice this value.
    """
    m = np.asarray(chi, dtype=complex)
    if m.shape != (3, 3):
        raise BadShape(f"c3_newton needs a 3x3 matrix, got {m.shape}")
    y = m.conj().T @ m
    t = matkernel.power_sums(0.5 * (y + y.conj().T), 3)
    scale = max(abs(t[0].real), 1e-300)
    for k, tk in enumerate(t, start=1):
        if abs(tk.imag) > 1e-10 * scale ** k:
            raise NumericalBreakdown(f"Tr(y^{k}) not real: {tk}")
    s1, s2, s3 = elementary_symmetric_from_power_sums([tk.real for tk in t])
    # s2 and s3 are sums/products of eigenvalues of a PSD matrix; anything
    # below the cancellation noise of Newton's identities is zero.
    if s2 < -1e-8 * scale ** 2 or s3 < -1e-8 * scale ** 3:
        raise NumericalBreakdown(f"negative symmetric polynomial: s = ({s1}, {s2}, {s3})")
    if s2 <= NOISE_FLOOR * scale ** 2:
        s2 = 0.0
    if s3 <= NOISE_FLOOR * scale ** 3:
        s3 = 0.0
    return trace_norm_from_symmetric(s1, s2, s3)


@dataclass
class MeasureReport:
    p0: float
    p1: float
    c1: float
    ca_tracenorm: float
    hs: float
    subfid: float
    c2_subfid: float | None = None
    c3_newton: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def measure_report(psi: PureState) -> MeasureReport:
    """Every measure that applies to ``psi``.

    ``hs`` and ``subfid`` compare the two conditional states of E; both are
    0 when one alternative of B has vanishing probability.
    """
    pair = states.conditional_env_states(psi)
    if pair.degenerate:
        hs = subfid = 0.0
    else:
        hs = hs_overlap(pair.rho0, pair.rho1)
        subfid = sub_fidelity(pair.rho0, pair.rho1)
    report = MeasureReport(
        p0=pair.p0,
        p1=pair.p1,
        c1=c1(psi),
        ca_tracenorm=ca_trace_norm(psi),
        hs=hs,
        subfid=subfid,
    )
    if psi.dims.dA == 2:
        report.c2_subfid = c2_subfidelity(psi)
    if psi.dims.dA == 3:
        chi = states.cross_operator(states.reduced_ab(psi)).matrix
        report.c3_newton = 2.0 * c3_newton(chi)
    return report


def mzi_sweep(gammas, phi: float = 0.0, marker: str = "steering",
              env_overlap: float = 1.0) -> list[tuple[float, float, float]]:
    """Rows ``(gamma, c1, c2)`` for the quantum-eraser interferometer.

    With ``marker="steering"`` the which-path marker of overlap ``gamma``
    sits in Alice's qubit (and E holds an extra copy of overlap
    ``env_overlap``). With ``marker="environment"`` Alice's qubit carries no
    path information and the marker of overlap ``gamma`` sits in E.
    """
    rows = []
    for g in gammas:
        g = float(g)
        if marker == "steering":
            psi = states.mzi_steering_state(g, phi, env_overlap)
        elif marker == "environment":
            psi = states.mzi_steering_state(1.0, phi, g)
        else:
            raise ValueError(f"unknown marker placement {marker!r}")
        rows.append((g, c1(psi), c2_subfidelity(psi)))
    return rows
