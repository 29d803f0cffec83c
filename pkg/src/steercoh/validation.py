"""Self-validation suites, shared by ``steercoh selftest`` and the test suite.

Each suite returns a :class:`SuiteResult` with its worst deviations. The
``full`` scale runs the published sample counts; ``quick`` shrinks them
for a fast smoke run but keeps every tolerance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import ensemble, matkernel, measures, states, steering

THEOREM_TOL = 1e-9
C3_TOL = 1e-8
DEGENERATE_TOL = 1e-9
STEER_UPPER_TOL = 1e-9
STEER_GAP_TOL = 5e-3
Z_MAX = 4.0
FID_BOUND_TOL = 1e-9
PURE_COLLAPSE_TOL = 1e-10
STRUCT_TOL = 1e-9
MZI_TOL = 1e-12

THEOREM_KS = (1, 2, 3, 4, 6, 8)
ENSEMBLE_CASES = ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1))
STRUCT_DIMS = ((1, 2, 1), (1, 2, 3), (2, 2, 1), (2, 2, 2), (2, 2, 5),
               (3, 2, 1), (3, 2, 2), (3, 2, 4), (4, 2, 3), (5, 2, 2))

SCALES = {
    "full": dict(theorem=1000, c3=1000, steer_states=100, steer_budget=20000,
                 mc_samples=100000, fid_pairs=10000, pure_pairs=2000, struct=10000),
    "quick": dict(theorem=100, c3=200, steer_states=10, steer_budget=20000,
                  mc_samples=20000, fid_pairs=1000, pure_pairs=300, struct=1000),
}


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.name} ({self.seconds:.1f}s): {shown}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def derive_seed(*parts: int) -> int:
    ss = np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])
    return int(ss.generate_state(1, np.uint64)[0])


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def theorem_suite(seed: int, count: int = 1000, Ks=THEOREM_KS) -> SuiteResult:
    """Sub-fidelity form of C2 against twice the trace norm of the cross operator."""
    worst = 0.0
    per_K = {}
    for K in Ks:
        wk = 0.0
        for i in range(count):
            psi = states.haar_sample((2, 2, K), derive_seed(seed, 1, K, i))
            wk = max(wk, abs(measures.c2_subfidelity(psi) - measures.ca_trace_norm(psi)))
        per_K[f"max_dev_K{K}"] = wk
        worst = max(worst, wk)
    return SuiteResult("1 theorem: c2_subfidelity == ca_trace_norm", worst <= THEOREM_TOL,
                       {"max_dev": worst, "tol": THEOREM_TOL, **per_K})


@_timed
def dim3_newton_suite(seed: int, count: int = 1000) -> SuiteResult:
    """Newton/quartic route for 3x3 cross operators, and its s3 = 0 degeneration."""
    rng = np.random.default_rng(derive_seed(seed, 2))
    worst = 0.0
    for _ in range(count):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        worst = max(worst, abs(measures.c3_newton(m) - matkernel.trace_norm(m)))
    worst_deg = 0.0
    for i in range(count):
        rank = 1 + i % 2
        left = rng.standard_normal((3, rank)) + 1j * rng.standard_normal((3, rank))
        right = rng.standard_normal((rank, 3)) + 1j * rng.standard_normal((rank, 3))
        m = left @ right
        y = m.conj().T @ m
        t = [z.real for z in matkernel.power_sums(y, 2)]
        s1, s2 = measures.elementary_symmetric_from_power_sums(t)
        # Rank one makes s2 exactly zero; its computed value is pure rounding
        # noise that the inner square root would amplify to ~1e-7.
        if rank == 1:
            s2 = 0.0
        key = np.sqrt(s1 + 2.0 * np.sqrt(max(s2, 0.0)))
        worst_deg = max(worst_deg, abs(measures.c3_newton(m) - key))
    ok = worst <= C3_TOL and worst_deg <= DEGENERATE_TOL
    return SuiteResult("2 dim-3 Newton route: c3_newton == trace_norm", ok,
                       {"max_dev": worst, "tol": C3_TOL,
                        "max_dev_s3_zero": worst_deg, "tol_s3_zero": DEGENERATE_TOL})


@_timed
def steering_suite(seed: int, count: int = 100, budget: int = 20000) -> SuiteResult:
    """Brute-force measurement search stays below, and gets close to, 2 Tr|chi|."""
    worst_excess = -np.inf
    worst_gap = 0.0
    for i in range(count):
        psi = states.haar_sample((2, 2, 2), derive_seed(seed, 3, i))
        res = steering.optimize_steering(psi, budget, derive_seed(seed, 3, i, 1))
        worst_excess = max(worst_excess, res.max_evaluated - res.analytic_bound,
                           res.best_value - res.analytic_bound)
        worst_gap = max(worst_gap, res.analytic_bound - res.best_value)
    ok = worst_excess <= STEER_UPPER_TOL and worst_gap <= STEER_GAP_TOL
    return SuiteResult("3 steering sandwich", ok,
                       {"max_excess": float(worst_excess), "tol_excess": STEER_UPPER_TOL,
                        "max_gap": worst_gap, "tol_gap": STEER_GAP_TOL})


@_timed
def ensemble_suite(seed: int, samples: int = 100000, cases=ENSEMBLE_CASES) -> SuiteResult:
    """Monte-Carlo means of C_a against the closed-form ensemble averages."""
    metrics = {}
    worst = 0.0
    for a, K in cases:
        rep = ensemble.compare(a, K, samples, seed)
        metrics[f"z_a{a}_K{K}"] = rep.z_score
        worst = max(worst, abs(rep.z_score))
    return SuiteResult("4 ensemble averages", worst <= Z_MAX,
                       {"max_abs_z": worst, "z_max": Z_MAX, **metrics})


@_timed
def fidelity_suite(seed: int, pairs: int = 10000, pure_pairs: int = 2000) -> SuiteResult:
    """Sub-fidelity never exceeds Uhlmann fidelity; both agree on pure states."""
    rng = np.random.default_rng(derive_seed(seed, 5))
    worst = -np.inf
    for i in range(pairs):
        d = 2 + i % 2
        rx, ry = rng.integers(1, d + 2, size=2)
        x = states.random_density(d, int(rx), derive_seed(seed, 5, i, 0))
        y = states.random_density(d, int(ry), derive_seed(seed, 5, i, 1))
        worst = max(worst, measures.sub_fidelity(x, y) - measures.uhlmann_fidelity(x, y))
    worst_pure = 0.0
    for i in range(pure_pairs):
        d = 2 + i % 2
        x = states.random_density(d, 1, derive_seed(seed, 5, pairs + i, 0))
        y = states.random_density(d, 1, derive_seed(seed, 5, pairs + i, 1))
        worst_pure = max(worst_pure, abs(measures.sub_fidelity(x, y) - measures.uhlmann_fidelity(x, y)))
    ok = worst <= FID_BOUND_TOL and worst_pure <= PURE_COLLAPSE_TOL
    return SuiteResult("5 fidelity bound", ok,
                       {"max_excess": float(worst), "tol": FID_BOUND_TOL,
                        "max_pure_dev": worst_pure, "tol_pure": PURE_COLLAPSE_TOL})


@_timed
def structural_suite(seed: int, count: int = 10000, dims_list=STRUCT_DIMS) -> SuiteResult:
    """c1 <= C_a, 2|Tr chi| == c1, and p0 rho0 + p1 rho1 == rho_E."""
    order_excess = -np.inf
    trace_dev = 0.0
    mix_dev = 0.0
    for i in range(count):
        dims = dims_list[i % len(dims_list)]
        psi = states.haar_sample(dims, derive_seed(seed, 6, i))
        c1 = measures.c1(psi)
        order_excess = max(order_excess, c1 - measures.ca_trace_norm(psi))
        chi = states.cross_operator(states.reduced_ab(psi)).matrix
        trace_dev = max(trace_dev, abs(2.0 * abs(np.trace(chi)) - c1))
        pair = states.conditional_env_states(psi)
        rho_e = states.partial_trace(states.density(psi), [2]).matrix
        mix = sum(p * r.matrix for p, r in ((pair.p0, pair.rho0), (pair.p1, pair.rho1)) if r is not None)
        mix_dev = max(mix_dev, float(np.max(np.abs(mix - rho_e))))
    ok = order_excess <= STRUCT_TOL and trace_dev <= STRUCT_TOL and mix_dev <= STRUCT_TOL
    return SuiteResult("6 structural invariants", ok,
                       {"max_c1_minus_ca": float(order_excess), "max_trace_dev": trace_dev,
                        "max_mixture_dev": mix_dev, "tol": STRUCT_TOL})


def gamma_grid(start: float, end: float, step: float) -> np.ndarray:
    if step <= 0 or start > end:
        raise ValueError(f"bad grid: start={start}, end={end}, step={step}")
    n = int(np.floor((end - start) / step + 1e-9))
    g = start + step * np.arange(n + 1)
    return np.clip(g, start, end)


@_timed
def mzi_suite(seed: int, step: float = 0.01) -> SuiteResult:
    """Eraser sweep: visibility is the marker overlap, and erasure restores it."""
    del seed
    grid = gamma_grid(0.0, 1.0, step)
    rows = measures.mzi_sweep(grid, phi=0.37)
    lin = max(abs(c1 - g) for g, c1, _ in rows)
    g0 = dict(zip(grid, rows))[0.0]
    g1 = dict(zip(grid, rows))[1.0]
    erased = max(abs(g0[1]), abs(g0[2] - 1.0), abs(g1[1] - 1.0), abs(g1[2] - 1.0))
    env0 = measures.mzi_sweep([0.0], marker="environment")[0]
    lost = max(abs(env0[1]), abs(env0[2]))
    ok = lin <= MZI_TOL and erased <= MZI_TOL and lost <= MZI_TOL
    return SuiteResult("7 MZI eraser", ok,
                       {"max_linear_dev": lin, "max_endpoint_dev": erased,
                        "env_marker_dev": lost, "tol": MZI_TOL})


def run_all(seed: int, scale: str = "quick", echo=None, budget: int | None = None) -> list[SuiteResult]:
    """Run every suite at ``scale``; ``echo`` receives each result line.

    ``budget`` overrides the steering search budget of the scale.
    """
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {sorted(SCALES)}")
    n = dict(SCALES[scale])
    if budget is not None:
        if budget < 1:
            raise ValueError("budget must be at least 1")
        n["steer_budget"] = budget
    runs = [
        lambda: theorem_suite(seed, n["theorem"]),
        lambda: dim3_newton_suite(seed, n["c3"]),
        lambda: steering_suite(seed, n["steer_states"], n["steer_budget"]),
        lambda: ensemble_suite(seed, n["mc_samples"]),
        lambda: fidelity_suite(seed, n["fid_pairs"], n["pure_pairs"]),
        lambda: structural_suite(seed, n["struct"]),
        lambda: mzi_suite(seed),
    ]
    results = []
    for run in runs:
        res = run()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
