"""
Property suites behind the ``verify`` task.

Each suite checks invariants of one layer (coefficients, flow, resolvent,
asymptotics, expansion, discrete spectrum) against the operator bound in
a SturmLiouville facade and returns named pass/fail records. Randomized
samples are drawn from ``np.random.default_rng(seed)`` so a fixed seed
reproduces every record.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .asymptotics import s_profile
from .coeffs import EVENTUALLY_CONSTANT, EXPONENTIAL, make_builtin_potential, q_matrix
from .green import decay_point, green_kernel, resolvent_norm_check
from .grids import SampledFunction, apply_operator, smooth_nodes, uniform_grid
from .odeflow import decaying_eigenfunction, exp_xC, regular_eigenfunction, solve_system, wronskian
from .quadrature import matched_tolerance
from .spectral import BumpWindow, parseval_check
from .sturmliouville import SturmLiouville

SUITES = (
    "coefficients",
    "flow",
    "wronskian",
    "green",
    "resolvent",
    "asymptotics",
    "density",
    "methods",
    "additivity",
    "projection",
    "parseval",
    "time_average",
    "bound_states",
    "zero_energy",
)

GAP_WIDTH = 1e-4


@dataclass(frozen=True)
class PropertyRecord:
    """One checked invariant: measured value against its threshold."""

    suite: str
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def to_row(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def _record(suite, name, value, threshold, detail="", passed=None) -> PropertyRecord:
    value = float(value)
    if passed is None:
        passed = bool(np.isfinite(value) and value <= threshold)
    return PropertyRecord(suite, name, bool(passed), value, float(threshold), detail)


def _relative(a, b) -> float:
    scale = max(abs(a), abs(b))
    return float(abs(a - b) / scale) if scale > 0 else 0.0


def _random_nu(rng, n: int) -> np.ndarray:
    re = rng.uniform(-10.0, 10.0, n)
    im = rng.uniform(0.1, 5.0, n) * rng.choice([-1.0, 1.0], n)
    return re + 1j * im


# ---------------------------------------------------------------------- #
#  Coefficients and flow
# ---------------------------------------------------------------------- #


def check_coefficients(op: SturmLiouville, rng, **_) -> List[PropertyRecord]:
    pot = op.potential
    out = []
    x = np.sort(rng.uniform(0.0, 100.0, 1000))
    p = np.asarray(pot.p(x), dtype=float)
    out.append(_record("coefficients", "p_positive", -float(p.min()), 0.0,
                       passed=bool(np.all(p > 0))))

    h = 1e-5
    fd = (np.asarray(pot.p(x + h)) - np.asarray(pot.p(np.maximum(x - h, 0.0)))) / (
        x + h - np.maximum(x - h, 0.0))
    dp = np.asarray(pot.p_prime(x), dtype=float)
    out.append(_record("coefficients", "p_prime_consistent",
                       float(np.max(np.abs(fd - dp) / (1.0 + np.abs(dp)))), 1e-6))

    xt = rng.uniform(1.0, 100.0, 1000)
    gap = np.abs(1.0 - 1.0 / np.asarray(pot.p(xt))) + np.abs(np.asarray(pot.q(xt)))
    excess = gap - np.asarray(pot.tail_majorant(xt))
    out.append(_record("coefficients", "tail_majorant_bounds", float(max(excess.max(), 0.0)), 1e-12))

    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        beyond = pot.decay_class.x_cut + rng.uniform(0.0, 50.0, 200)
        out.append(_record("coefficients", "q_matrix_vanishes",
                           float(np.abs(q_matrix(pot, beyond)).max()), 0.0))
    return out


def check_flow(op: SturmLiouville, rng, **_) -> List[PropertyRecord]:
    out = []
    lam = rng.uniform(-10.0, 10.0, 1000)
    x = rng.uniform(0.0, 20.0, 1000)
    worst = 0.0
    for l, t in zip(lam, x):
        fwd, back = exp_xC(l, t), exp_xC(l, -t)
        scale = np.linalg.norm(fwd) * np.linalg.norm(back)
        worst = max(worst, float(np.linalg.norm(fwd @ back - np.eye(2)) / scale))
    out.append(_record("flow", "exp_xC_inverse", worst, 1e-12))

    free = make_builtin_potential("free")
    grid = np.linspace(0.0, 10.0, 41)
    worst = 0.0
    for l in rng.uniform(-4.0, 10.0, 10):
        u0 = np.array([rng.normal(), rng.normal()])
        traj = solve_system(free, l, u0, 0.0, 10.0, op.tol)
        exact = exp_xC(l, grid) @ u0
        err = np.abs(traj(grid) - exact) / (1.0 + np.abs(exact))
        worst = max(worst, float(err.max()))
    out.append(_record("flow", "free_flow_matches_exp_xC", worst, 1e3 * op.tol))

    lam = rng.uniform(0.5, 10.0, 5)
    im = max(float(np.max(np.abs(np.imag(regular_eigenfunction(op.potential, l, grid, op.tol).value))))
             for l in lam)
    out.append(_record("flow", "real_lambda_real_solution", im, 1e-12))
    return out


def check_wronskian(op: SturmLiouville, rng, n_nu: int = 100, n_x: int = 10, **_) -> List[PropertyRecord]:
    """w(ν) = -p (F G' - F' G) sampled at n_x points for n_nu random ν."""
    pot = op.potential
    worst = 0.0
    for nu in _random_nu(rng, n_nu):
        xs = np.sort(rng.uniform(0.0, 10.0, n_x))
        F = regular_eigenfunction(pot, nu, xs, op.tol)
        G = decaying_eigenfunction(pot, nu, xs, decay_point(pot, op.tol, float(xs.max())), op.tol)
        w = wronskian(pot, F, G, xs)
        ref = w[len(w) // 2]
        worst = max(worst, float(np.max(np.abs(w - ref)) / abs(ref)))
    return [_record("wronskian", "wronskian_constant", worst, max(1e2 * op.tol, 1e-8),
                    detail=f"{n_nu} nu x {n_x} x")]


# ---------------------------------------------------------------------- #
#  Resolvent
# ---------------------------------------------------------------------- #


def check_green(op: SturmLiouville, rng, n_samples: int = 1000, **_) -> List[PropertyRecord]:
    pot = op.potential
    sym = conj = edge = 0.0
    for nu in _random_nu(rng, n_samples):
        x, y = rng.uniform(0.0, 10.0, 2)
        k_xy = green_kernel(pot, nu, x, y, op.tol).value
        k_yx = green_kernel(pot, nu, y, x, op.tol).value
        k_bar = green_kernel(pot, np.conj(nu), x, y, op.tol).value
        sym = max(sym, abs(k_xy - k_yx) / max(abs(k_xy), 1e-300))
        conj = max(conj, abs(np.conj(k_xy) - k_bar) / max(abs(k_xy), 1e-300))
        edge = max(edge, abs(green_kernel(pot, nu, 0.0, y, op.tol).value))
    return [
        _record("green", "kernel_symmetric", sym, 1e-8, detail=f"{n_samples} samples"),
        _record("green", "kernel_conjugate_symmetric", conj, 1e-8, detail=f"{n_samples} samples"),
        _record("green", "kernel_vanishes_at_0", edge, 1e-12, detail=f"{n_samples} samples"),
    ]


def check_resolvent(op: SturmLiouville, rng, data: SampledFunction, **_) -> List[PropertyRecord]:
    pot = op.potential
    out = []
    nu = complex(*op.numeric.nu)
    if nu.imag == 0 and nu.real >= 0:
        nu = complex(-1.0, 0.0)
    g = op.apply_resolvent(nu, data)
    defect = apply_operator(pot, nu, g, extrapolate=True) - data.resample(g.x).y[4:-4]
    mask = smooth_nodes(pot, g.x, extrapolate=True)
    scale = float(np.max(np.abs(data.y)))
    out.append(_record("resolvent", "defect_identity",
                       float(np.max(np.abs(defect[mask]))) / scale, 1e-6,
                       detail=f"nu={nu}, {int(mask.sum())} nodes"))

    lo, hi = op.numeric.interval
    nu_im = complex(rng.uniform(lo, hi), rng.uniform(0.1, 1.0))
    report = resolvent_norm_check(pot, nu_im, data, op.tol)
    out.append(_record("resolvent", "norm_bound", report["norm_resolvent_h"], report["bound"],
                       detail=f"nu={nu_im}"))
    return out


# ---------------------------------------------------------------------- #
#  Asymptotics
# ---------------------------------------------------------------------- #


def check_asymptotics(op: SturmLiouville, rng, n_lambda: int = 20, **_) -> List[PropertyRecord]:
    """||s(x_max) - s(2 x_max)|| against the reported certificate."""
    pot = op.potential
    worst = 0.0
    lo = max(op.numeric.lambda_min, 0.25)
    for lam in rng.uniform(lo, min(op.numeric.lambda_max, 20.0), n_lambda):
        limit = op.s_infinity(lam)
        s = s_profile(pot, lam, [limit.x_max, 2.0 * limit.x_max], op.tol)
        norm_s = float(np.hypot(limit.a, limit.b))
        bound = limit.err + 10.0 * op.tol * max(1.0, norm_s)
        worst = max(worst, float(np.linalg.norm(s[0] - s[1])) / bound)
    return [_record("asymptotics", "truncation_certificate", worst, 1.0,
                    detail=f"{n_lambda} random lambda")]


def check_density(op: SturmLiouville, rng, **_) -> List[PropertyRecord]:
    points = op.density_sweep()
    out = [
        _record("density", "density_positive", -min(pt.density for pt in points), 0.0,
                passed=all(pt.density > 0 for pt in points)),
        _record("density", "c_nonvanishing", -min(pt.c_abs_sq for pt in points), 0.0,
                passed=all(pt.c_abs_sq > 0 for pt in points)),
    ]
    if op.potential.name == "free":
        worst = max(_relative(pt.density, np.sqrt(pt.lam) / np.pi) for pt in points)
        out.append(_record("density", "free_closed_form", worst, 1e-8))
    return out


# ---------------------------------------------------------------------- #
#  Expansion
# ---------------------------------------------------------------------- #


def check_methods(op: SturmLiouville, rng, data: SampledFunction, **_) -> List[PropertyRecord]:
    """Weyl against Kodaira over the ε schedule on the configured interval."""
    alpha, beta = op.numeric.interval
    weyl = op.weyl_pairing(alpha, beta, data, data)
    gaps = []
    for eps in sorted(op.numeric.epsilons, reverse=True):
        kod = op.kodaira_pairing(alpha, beta, eps, data, data)
        gaps.append((eps, abs(kod.value - weyl.value)))
    eps_min, gap_min = gaps[-1]
    scale = max(abs(weyl.value), 1e-300)
    ratios = [b / max(a, 1e-300) for (_, a), (_, b) in zip(gaps, gaps[1:])]
    fitted = ", ".join(f"{gap / eps:.4g}" for eps, gap in gaps)
    return [
        _record("methods", "weyl_kodaira_agree", gap_min / scale, 1e-2,
                detail=f"eps={eps_min:g}, weyl={weyl.value:.12g}"),
        _record("methods", "kodaira_converges", max(ratios, default=0.0), 1.0,
                detail=f"|kodaira - weyl| / eps: {fitted}"),
    ]


def check_additivity(op: SturmLiouville, rng, data: SampledFunction, **_) -> List[PropertyRecord]:
    alpha, gamma = op.numeric.interval
    beta = float(rng.uniform(alpha + 0.25 * (gamma - alpha), gamma - 0.25 * (gamma - alpha)))
    left = op.weyl_pairing(alpha, beta, data, data)
    right = op.weyl_pairing(beta, gamma, data, data)
    whole = op.weyl_pairing(alpha, gamma, data, data)
    defect = abs(left.value + right.value - whole.value)
    budget = 10.0 * (left.error + right.error + whole.error) + 1e-9 * abs(whole.value)
    return [_record("additivity", "interval_additive", defect, budget,
                    detail=f"split at {beta:.6g}")]


def check_projection(op: SturmLiouville, rng, data: SampledFunction,
                     reach: float = 400.0, **_) -> List[PropertyRecord]:
    """
    Idempotence and localization of P on a grid reaching `reach` past the
    data and the coefficients; the rest of [0, inf) comes from
    projection_tail.
    """
    alpha, beta = op.numeric.interval
    pot = op.potential
    x_end = max(data.hull[1], decay_point(pot, op.tol, 0.0)) + reach
    x = uniform_grid(0.0, x_end, op.numeric.dx)
    ph = op.project(alpha, beta, data, x, quad_tol=matched_tolerance(op.tol))
    tail = op.projection_tail(alpha, beta, data, float(x[-1]))

    # <h, P(1_[0,X] Ph)> = ||Ph||² on [0, X]
    once = op.weyl_pairing(alpha, beta, data, data).value
    twice = op.weyl_pairing(alpha, beta, data, ph).value + tail.norm_sq
    idem = _relative(once, twice)

    # <f, D f> on [0, X] = int p|f'|^2 + q|f|^2 - p f f' at X, since f(0) = 0
    f = np.real(ph.y)
    d = CubicSpline(x, f)(x, 1)
    norm_sq = ph.norm_sq() + tail.norm_sq
    energy = float(SampledFunction(x, pot.p(x) * d * d + pot.q(x) * f * f).integrate().real)
    energy += tail.energy - float(pot.p(x[-1]) * f[-1] * d[-1])
    low = (alpha * norm_sq - energy) / norm_sq
    high = (energy - beta * norm_sq) / norm_sq
    return [
        _record("projection", "idempotent", idem, 1e-6,
                detail=f"<h,Ph>={once:.12g}, <Ph,Ph>={twice:.12g}, tail={tail.norm_sq:.3g}"),
        _record("projection", "localized", max(low, high, 0.0), 1e-4,
                detail=f"energy/norm={energy / norm_sq:.8g} in [{alpha:g}, {beta:g}]"),
    ]


def check_parseval(op: SturmLiouville, rng, data: SampledFunction, **_) -> List[PropertyRecord]:
    report = op.parseval(data)
    return [_record("parseval", "parseval_defect", report.defect, 1e-3,
                    detail=f"bound share {report.bound_share:.6g}")]


def check_time_average(op: SturmLiouville, rng, data: SampledFunction, **_) -> List[PropertyRecord]:
    """Time-averaged φ(D) on translates of the data against φ(D₀), window on numeric.interval."""
    report = op.time_average(BumpWindow(*op.numeric.interval), data, data)
    detail = ", ".join(f"T={t:g}: {d:.3g}" for t, d in zip(report.t_grid, report.defects))
    return [
        _record("time_average", "defect_non_increasing", 0.0 if report.non_increasing else 1.0, 0.0,
                detail=detail),
        _record("time_average", "defect_at_largest_T", float(report.defects[-1]), 1e-3,
                detail=f"lhs={report.lhs:.10g}"),
    ]


# ---------------------------------------------------------------------- #
#  Discrete spectrum
# ---------------------------------------------------------------------- #


def continuous_share(op: SturmLiouville, state) -> float:
    """Share of ||f_n||² carried by the continuous spectrum, cut to [λ_min, λ_max]."""
    f = SampledFunction(state.x, state.values)
    report = parseval_check(op.potential, f, op.numeric.lambda_max, op.tol, bound_states=[],
                            threads=op.threads, quiet=op.quiet, lambda_min=op.numeric.lambda_min)
    return report.continuous / report.norm_sq


def check_bound_states(op: SturmLiouville, rng, **_) -> List[PropertyRecord]:
    pot = op.potential
    out = []
    if pot.decay_class.kind not in (EVENTUALLY_CONSTANT, EXPONENTIAL):
        return out
    states = op.bound_states()
    eig = [st.eigenvalue for st in states]
    out.append(_record("bound_states", "eigenvalues_negative", max(eig, default=-1.0), 0.0,
                       passed=all(e < 0 for e in eig)))
    out.append(_record("bound_states", "threshold_gap",
                       float(sum(-GAP_WIDTH < e < 0 for e in eig)), 0.0))
    if states:
        out.append(_record("bound_states", "unit_norm",
                           max(abs(st.norm_check - 1.0) for st in states), 1e-6))
    worst = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            x = states[i].x if states[i].x[-1] >= states[j].x[-1] else states[j].x
            fi = SampledFunction(x, states[i].evaluate(x))
            worst = max(worst, abs(fi.inner(states[j].evaluate(x))))
    out.append(_record("bound_states", "orthogonal", worst, 1e-6))

    for st in states:
        share = continuous_share(op, st)
        out.append(_record("bound_states", f"continuum_orthogonal[{st.z:.6g}]", share, 1e-3))

    if pot.name == "free":
        scan = op.m_scan(np.linspace(0.05, 2.0, 32))
        out.append(_record("bound_states", "free_m_identically_one",
                           float(np.max(np.abs(scan.m - 1.0))), 1e-12))
    return out


def check_zero_energy(op: SturmLiouville, rng, **_) -> List[PropertyRecord]:
    if op.potential.decay_class.kind not in (EVENTUALLY_CONSTANT, EXPONENTIAL):
        return []
    report = op.zero_energy()
    return [_record("zero_energy", "zero_not_eigenvalue", -float(np.hypot(report.a, report.b)), 0.0,
                    detail=f"a={report.a:.6g}, b={report.b:.6g}",
                    passed=report.not_square_integrable)]


_CHECKS: Dict[str, Callable[..., List[PropertyRecord]]] = {
    "coefficients": check_coefficients,
    "flow": check_flow,
    "wronskian": check_wronskian,
    "green": check_green,
    "resolvent": check_resolvent,
    "asymptotics": check_asymptotics,
    "density": check_density,
    "methods": check_methods,
    "additivity": check_additivity,
    "projection": check_projection,
    "parseval": check_parseval,
    "time_average": check_time_average,
    "bound_states": check_bound_states,
    "zero_energy": check_zero_energy,
}


def run_suites(
    op: SturmLiouville,
    data: SampledFunction,
    seed: int = 0,
    suites: Optional[Sequence[str]] = None,
) -> List[PropertyRecord]:
    """
    Run the named suites (all by default) in a fixed order.

    Args:
        op: Operator and numeric settings under test.
        data: Test function for the resolvent and expansion suites.
        seed: Seed of the random samples.
        suites: Subset of SUITES.

    Returns:
        PropertyRecord list, suite by suite.
    """
    names = list(SUITES) if suites is None else list(suites)
    unknown = [s for s in names if s not in _CHECKS]
    if unknown:
        raise ValueError(f"Unknown suite(s): {', '.join(unknown)}. Available: {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    records: List[PropertyRecord] = []
    for name in names:
        if not op.quiet:
            print(f"  suite {name}...")
        records.extend(_CHECKS[name](op, rng, data=data))
    return records


def summarize(records: Sequence[PropertyRecord]) -> Dict[str, bool]:
    """{suite.name: passed} for the manifest."""
    return {f"{r.suite}.{r.name}": r.passed for r in records}
