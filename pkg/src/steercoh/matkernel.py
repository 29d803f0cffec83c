"""Small dense complex linear algebra.

Everything here is written for matrices of dimension at most a few dozen.
The Hermitian eigensolver is a cyclic complex Jacobi scheme that also
accepts stacks of matrices with shape ``(..., n, n)``; the rotations are
applied to the whole stack at once, which is what makes Monte-Carlo runs
over 10^5 states affordable.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateLeadingCoefficient,
    NonFinite,
    NonSquare,
    NotHermitian,
    NotPSD,
    NumericalBreakdown,
)

EPS = np.finfo(float).eps

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
TRACE_NORM_CLAMP = 1e-12
PSD_CLAMP = 1e-10
QUARTIC_RESIDUAL = 1e-8
NEAR_REAL = 1e-3

# Eigenvalues below RANK_FLOOR * n * eps * max|lambda| are rounding noise.
RANK_FLOOR = 64.0


def as_matrix(m, square: bool = True) -> np.ndarray:
    """Coerce ``m`` to a complex array with at least two dimensions."""
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2:
        raise NonSquare(f"expected a matrix, got shape {a.shape}")
    if square and a.shape[-1] != a.shape[-2]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or infinite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if h.size and np.max(np.abs(h - dagger(h))) > tol:
        raise NotHermitian(f"max |H - H^dagger| exceeds {tol:g}")


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def jacobi_eigh(h, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS,
                vectors: bool = True):
    """Diagonalize Hermitian matrices by cyclic complex Jacobi rotations.

    Args:
        h: Hermitian matrix or stack of them, shape ``(..., n, n)``.
        tol: sweeps stop once the off-diagonal Frobenius norm of every
            matrix is below ``tol`` times its full Frobenius norm. One extra
            sweep is then performed, which quadratic convergence turns into
            a round-off limited result.
        max_sweeps: hard cap on the number of sweeps.
        vectors: also accumulate the eigenvectors.

    Returns:
        ``(w, v)`` with eigenvalues ascending along the last axis and the
        matching eigenvectors as columns of ``v`` (``v`` is None when
        ``vectors`` is False).
    """
    a = as_matrix(h)
    _check_hermitian(a)
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = 0.5 * (a + dagger(a))
    a = a.reshape((-1, n, n)).copy()
    m = a.shape[0]
    v = np.broadcast_to(np.eye(n, dtype=complex), (m, n, n)).copy() if vectors else None

    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2)))
    extra = 1
    for _ in range(max_sweeps):
        if n < 2:
            break
        if np.all(_offdiag_norm(a) <= tol * scale):
            if extra == 0:
                break
            extra -= 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                live = mag > 1e-30 * scale
                if not np.any(live):
                    continue
                safe = np.where(live, mag, 1.0)
                w = np.where(live, np.conj(apq) / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.empty((m, 2, 2), dtype=complex)
                rot[:, 0, 0] = c
                rot[:, 0, 1] = s
                rot[:, 1, 0] = -s * w
                rot[:, 1, 1] = c * w
                idx = [p, q]
                a[:, :, idx] = a[:, :, idx] @ rot
                a[:, idx, :] = dagger(rot) @ a[:, idx, :]
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                if vectors:
                    v[:, :, idx] = v[:, :, idx] @ rot

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch_shape + (n,))
    if vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(batch_shape + (n, n))
    return w, v


def hermitian_eigenvalues(h) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix (or stack), ascending.

    Raises:
        NonSquare: ``h`` is not square.
        NotHermitian: ``h`` deviates from its adjoint by more than 1e-10.
    """
    w, _ = jacobi_eigh(h, vectors=False)
    return w


def rank_floor(w: np.ndarray) -> np.ndarray:
    """Noise threshold below which an eigenvalue of ``w``'s matrix is zero."""
    n = w.shape[-1]
    return RANK_FLOOR * n * EPS * np.max(np.abs(w), axis=-1, initial=0.0)


def singular_values(m) -> np.ndarray:
    """Singular values of ``m``, descending, via the Hermitian dilation.

    The eigenvalues of ``[[0, M], [M^dagger, 0]]`` are the singular values
    of ``M`` with both signs. Working on the dilation instead of
    ``M^dagger M`` keeps small singular values at absolute accuracy eps*|M|
    rather than sqrt(eps)*|M|.
    """
    a = as_matrix(m, square=False)
    r, c = a.shape[-2:]
    dil = np.zeros(a.shape[:-2] + (r + c, r + c), dtype=complex)
    dil[..., :r, r:] = a
    dil[..., r:, :r] = dagger(a)
    w = hermitian_eigenvalues(dil)
    k = min(r, c)
    return np.maximum(w[..., ::-1][..., :k], 0.0)


def trace_norm(m) -> float | np.ndarray:
    """Sum of the singular values of ``m`` (works on stacks too)."""
    a = as_matrix(m, square=False)
    if a.size == 0:
        return 0.0
    r, c = a.shape[-2:]
    dil = np.zeros(a.shape[:-2] + (r + c, r + c), dtype=complex)
    dil[..., :r, r:] = a
    dil[..., r:, :r] = dagger(a)
    w = hermitian_eigenvalues(dil)
    # The spectrum is symmetric about zero; a lopsided one means breakdown.
    skew = np.abs(np.sum(w, axis=-1))
    if np.any(skew > 1e-8 * np.maximum(1.0, np.sum(np.abs(w), axis=-1))):
        raise NumericalBreakdown("dilation spectrum is not symmetric")
    out = 0.5 * np.sum(np.abs(w), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def trace_norm_gram(m) -> float:
    """Trace norm as the sum of square roots of eigenvalues of ``M^dagger M``.

    Less accurate than :func:`trace_norm` for rank-deficient ``M`` (small
    singular values carry sqrt(eps) error); kept as an independent route for
    cross-checks.
    """
    a = as_matrix(m, square=False)
    gram = dagger(a) @ a
    w = hermitian_eigenvalues(0.5 * (gram + dagger(gram)))
    if np.any(w < -TRACE_NORM_CLAMP):
        raise NumericalBreakdown(f"M^dagger M has eigenvalue {w.min():.3e}")
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def _clean_psd_spectrum(w: np.ndarray) -> np.ndarray:
    if np.any(w < -PSD_CLAMP):
        raise NotPSD(f"eigenvalue {w.min():.3e} below -{PSD_CLAMP:g}")
    return np.where(w <= rank_floor(w)[..., None], 0.0, w)


def psd_eigenvalues(p) -> np.ndarray:
    """Eigenvalues of a PSD matrix with clamping as in :func:`psd_sqrt`."""
    return _clean_psd_spectrum(hermitian_eigenvalues(p))


def psd_sqrt(p) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero, and so are positive
    ones lying under the rounding floor of the decomposition, so that a
    projector maps to itself instead of picking up sqrt(eps) debris.

    Raises:
        NotPSD: an eigenvalue is below -1e-10.
    """
    a = as_matrix(p)
    w, v = jacobi_eigh(a)
    root = np.sqrt(_clean_psd_spectrum(w))
    s = (v * root[..., None, :]) @ dagger(v)
    return 0.5 * (s + dagger(s))


def power_sums(m, n: int) -> list[complex]:
    """``[Tr M, Tr M^2, ..., Tr M^n]`` by repeated multiplication."""
    a = as_matrix(m)
    if a.ndim != 2:
        raise NonSquare("power_sums takes a single matrix")
    if n < 1:
        raise ValueError("n must be at least 1")
    out = []
    power = a.copy()
    for k in range(n):
        if k:
            power = power @ a
        out.append(complex(np.trace(power)))
    return out


def _complex_hessenberg_eigvals(h: np.ndarray, max_iter: int = 200) -> list[complex]:
    """Eigenvalues of an upper Hessenberg matrix by shifted QR with Givens steps."""
    h = np.array(h, dtype=complex)
    n = h.shape[0]
    found: list[complex] = []
    iters = 0
    while n > 0:
        if n == 1:
            found.append(h[0, 0])
            break
        # Zero negligible subdiagonal entries; deflate at the bottom.
        for k in range(1, n):
            if abs(h[k, k - 1]) <= EPS * (abs(h[k, k]) + abs(h[k - 1, k - 1])):
                h[k, k - 1] = 0.0
        if h[n - 1, n - 2] == 0.0:
            found.append(h[n - 1, n - 1])
            n -= 1
            iters = 0
            continue
        iters += 1
        if iters > max_iter:
            raise NumericalBreakdown("QR iteration did not converge")
        a, b = h[n - 2, n - 2], h[n - 2, n - 1]
        c, d = h[n - 1, n - 2], h[n - 1, n - 1]
        if iters % 11 == 0:
            mu = d + 0.75 * abs(c)
        else:
            tr, det = a + d, a * d - b * c
            disc = np.sqrt(tr * tr / 4.0 - det)
            l1, l2 = tr / 2.0 + disc, tr / 2.0 - disc
            mu = l1 if abs(l1 - d) < abs(l2 - d) else l2
        blk = h[:n, :n]
        for k in range(n):
            blk[k, k] -= mu
        rots = []
        for k in range(n - 1):
            x, y = blk[k, k], blk[k + 1, k]
            r = np.hypot(abs(x), abs(y))
            if r == 0.0:
                g = np.eye(2, dtype=complex)
            else:
                cs, sn = x / r, y / r
                g = np.array([[np.conj(cs), np.conj(sn)], [-sn, cs]])
            blk[k:k + 2, k:] = g @ blk[k:k + 2, k:]
            rots.append(g)
        for k, g in enumerate(rots):
            blk[:k + 2, k:k + 2] = blk[:k + 2, k:k + 2] @ np.conj(g.T)
        for k in range(n):
            blk[k, k] += mu
    return found


def _polyval(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def real_quartic_roots(c4: float, c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of ``c4 t^4 + c3 t^3 + c2 t^2 + c1 t + c0``, ascending.

    Candidates are the eigenvalues of the (scaled) companion matrix. Each
    candidate's real part is Newton-polished and kept only if the monic
    residual satisfies ``|p(r)| <= 1e-8 * max(1, |r|^4)``. Candidates whose
    imaginary part is below 1e-3 (relative) are eligible, which is how the
    split-off members of a multiple real root are recovered with their
    multiplicity; polishing may not move a candidate further than that.

    Raises:
        DegenerateLeadingCoefficient: ``|c4| < 1e-14``.
    """
    if abs(c4) < 1e-14:
        raise DegenerateLeadingCoefficient(f"leading coefficient {c4!r}")
    b = [c3 / c4, c2 / c4, c1 / c4, c0 / c4]
    if not all(np.isfinite(b)):
        raise NonFinite("non-finite quartic coefficient")
    monic = [1.0] + b
    deriv = [4.0, 3.0 * b[0], 2.0 * b[1], b[2]]

    # Substitute t = sigma*u so the coefficients of u are O(1).
    sigma = max(abs(bk) ** (1.0 / (k + 1)) for k, bk in enumerate(b))
    if sigma == 0.0:
        return [0.0, 0.0, 0.0, 0.0]
    comp = np.zeros((4, 4), dtype=complex)
    comp[0, :] = [-b[k] / sigma ** (k + 1) for k in range(4)]
    comp[1, 0] = comp[2, 1] = comp[3, 2] = 1.0
    candidates = [sigma * z for z in _complex_hessenberg_eigvals(comp)]

    roots = []
    for z in candidates:
        # A root of multiplicity m is perturbed by ~eps**(1/m), at most 1e-4.
        reach = NEAR_REAL * max(1.0, abs(z))
        if abs(z.imag) > reach:
            continue
        x0 = x = float(z.real)
        best = abs(_polyval(monic, x))
        for _ in range(8):
            dp = _polyval(deriv, x)
            if dp == 0.0:
                break
            x_new = x - _polyval(monic, x) / dp
            res = abs(_polyval(monic, x_new))
            if res >= best or abs(x_new - x0) > reach:
                break
            x, best = x_new, res
        if best <= QUARTIC_RESIDUAL * max(1.0, abs(x) ** 4):
            roots.append(x)
    return sorted(roots)
