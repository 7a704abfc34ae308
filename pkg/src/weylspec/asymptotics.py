"""
Asymptotics of the regular solution for λ > 0.

Pulling the flow back by the free one, s(x) = exp(-x C_λ) u(x) solves
s' = K(x) s with K(x) = exp(-x C_λ) Q(x) exp(x C_λ), so s has a limit
s(∞) = (a, b) whenever Q is integrable. With k(x) = ∫ₓ^∞ ||K|| the
truncation error obeys ||s(x) - s(∞)|| <= k(x) e^{k(x)} ||s(x)||.

From (a, b) follow the amplitude c(λ) = a/2 - i b / (2√λ) of
F_λ(x) ≈ c e^{i√λx} + conj(c) e^{-i√λx} and the spectral density
ρ(λ) = 1 / (4π √λ |c|²). Norms are Hilbert-Schmidt throughout.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .coeffs import EVENTUALLY_CONSTANT, Potential
from .errors import NumericalError
from .grids import SampledFunction
from .odeflow import Eigenfunction, exp_xC, regular_eigenfunction
from .settings import DEFAULT_LAMBDA_MIN, DEFAULT_TOL, DEFAULT_X_CAP
from .sweep import parallel_map

C_ABS_SQ_FLOOR = 1e-14


def window_bound_sq(window: Tuple[float, float]) -> float:
    """
    M_K² = sup over λ in the window and t >= 0 of ||exp(t C_λ)||²_HS.

    ||exp(t C_λ)||²_HS = 2 + sin²(√λ t) (λ - 1)² / λ, so the supremum over
    t is λ + 1/λ, which is convex in λ and peaks at an endpoint.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo > 0:
        raise ValueError(f"λ window must stay away from 0 (got [{lo}, {hi}])")
    if hi < lo:
        raise ValueError(f"empty λ window [{lo}, {hi}]")
    return max(lo + 1.0 / lo, hi + 1.0 / hi)


def k_tail(pot: Potential, window: Tuple[float, float], x: float) -> float:
    """
    Upper bound for ∫ₓ^∞ ||exp(-t C_λ) Q(t) exp(t C_λ)||_HS dt over a λ window.

    Computed as M_K² times ∫ₓ^∞ ||Q||_HS; the part below x = 1 is
    integrated directly, the rest is bounded by the tail majorant.

    Args:
        pot: Coefficients.
        window: (λ_lo, λ_hi) with 0 < λ_lo <= λ_hi.
        x: Lower limit, x >= 0.

    Raises:
        ValueError: Window touching λ = 0 or x < 0.
    """
    if x < 0:
        raise ValueError(f"k_tail needs x >= 0, got {x}")
    bound_sq = window_bound_sq(window)
    split = max(float(x), 1.0)
    head = 0.0
    if x < split:
        head, _ = quad(lambda t: float(pot.q_norm(t)), float(x), split, limit=200)
    return bound_sq * (head + float(pot.tail_integral(split)))


def truncation_point(pot: Potential, lam: float, tol: float, x_cap: float = DEFAULT_X_CAP) -> float:
    """
    Point x_max beyond which the flow is treated as free.

    x_cut for eventually-constant coefficients; otherwise doubling from the
    effective support until k_tail(x_max) <= tol.

    Raises:
        NumericalError: x_max passes x_cap before the tail test succeeds.
    """
    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        return float(pot.decay_class.x_cut)
    x = max(pot.effective_support(tol, cap=x_cap), 1.0)
    while k_tail(pot, (lam, lam), x) > tol:
        x *= 2.0
        if x > x_cap:
            raise NumericalError(
                f"Tail test k(x) <= {tol:.3g} not met below x_cap = {x_cap:g} "
                f"at λ = {lam:g}. Raise numeric.x_cap or loosen numeric.tol.",
                location=x_cap,
            )
    return x


@dataclass(frozen=True)
class AsymptoticLimit:
    """
    s(∞) = (a, b) with its certificate.

    err bounds ||s(x_max) - s(∞)||; err = growth * k_tail * ||s||.
    """

    lam: float
    a: float
    b: float
    err: float
    x_max: float
    k_tail: float
    growth: float

    def __iter__(self):
        return iter((self.a, self.b, self.err))


@dataclass(frozen=True)
class ScatteringPoint:
    """
    Amplitude and density at one λ > 0.

    Attributes:
        lam: Spectral parameter.
        a, b: Components of s(∞).
        c: Amplitude of e^{i√λx} in F_λ at infinity.
        c_abs_sq: |c|².
        density: ρ(λ) = 1 / (4π √λ |c|²).
        truncation_error_bound: Certified error of (a, b).
    """

    lam: float
    a: float
    b: float
    c: complex
    c_abs_sq: float
    density: float
    truncation_error_bound: float
    x_max: float = 0.0

    def to_row(self) -> dict:
        return {
            "lambda": self.lam,
            "a": self.a,
            "b": self.b,
            "re_c": self.c.real,
            "im_c": self.c.imag,
            "c_abs_sq": self.c_abs_sq,
            "density": self.density,
            "err_bound": self.truncation_error_bound,
        }


def _check_lambda(lam: float, lambda_min: float) -> float:
    lam = float(lam)
    if not lam >= lambda_min or not lam > 0:
        raise ValueError(
            f"λ = {lam:g} is below the threshold λ_min = {lambda_min:g}"
        )
    return lam


def _pull_back(lam: float, x: np.ndarray, states: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nj->ni", exp_xC(lam, -np.asarray(x, dtype=float)), states)


def _limit_from(pot: Potential, lam: float, ef: Eigenfunction, x_max: float) -> AsymptoticLimit:
    s = _pull_back(lam, [x_max], ef.state(x_max))[0]
    norm_s = float(np.linalg.norm(s))
    if x_max > 0 and pot.decay_class.kind != EVENTUALLY_CONSTANT:
        k = k_tail(pot, (lam, lam), x_max)
    else:
        k = 0.0

    growth = float(np.exp(k))
    if k > 0 and ef.trajectory is not None and norm_s > 0:
        traj = ef.trajectory
        late = traj.grid >= 0.5 * x_max
        if late.any():
            run = np.linalg.norm(_pull_back(lam, traj.grid[late], traj.states[late]), axis=1)
            growth *= max(1.0, float(run.max()) / norm_s)

    return AsymptoticLimit(
        lam=lam,
        a=float(s[0]),
        b=float(s[1]),
        err=growth * k * norm_s,
        x_max=float(x_max),
        k_tail=k,
        growth=growth,
    )


def _point_from(limit: AsymptoticLimit) -> ScatteringPoint:
    lam = limit.lam
    root = np.sqrt(lam)
    c = complex(0.5 * limit.a, -0.5 * limit.b / root)
    c_abs_sq = float(abs(c) ** 2)
    if c_abs_sq < C_ABS_SQ_FLOOR:
        raise NumericalError(
            f"|c(λ)|² = {c_abs_sq:.3g} at λ = {lam:g} is below {C_ABS_SQ_FLOOR:g}; "
            "the regular solution was lost to round-off."
        )
    return ScatteringPoint(
        lam=lam,
        a=limit.a,
        b=limit.b,
        c=c,
        c_abs_sq=c_abs_sq,
        density=1.0 / (4.0 * np.pi * root * c_abs_sq),
        truncation_error_bound=limit.err,
        x_max=limit.x_max,
    )


def s_infinity(
    pot: Potential,
    lam: float,
    tol: float = DEFAULT_TOL,
    x_cap: float = DEFAULT_X_CAP,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> AsymptoticLimit:
    """
    Limit s(∞) = (a, b) of the pulled-back regular solution.

    Args:
        pot: Coefficients.
        lam: Spectral parameter, λ >= lambda_min.
        tol: Target for k_tail(x_max) and integrator tolerance.
        x_cap: Largest admissible x_max.
        lambda_min: Threshold below which λ is refused.

    Returns:
        AsymptoticLimit; unpacks as (a, b, err).

    Raises:
        ValueError: λ below the threshold.
        NumericalError: Tail test fails below x_cap.
    """
    lam = _check_lambda(lam, lambda_min)
    x_max = truncation_point(pot, lam, tol, x_cap)
    ef = regular_eigenfunction(pot, lam, [x_max], tol, x_free=x_max)
    return _limit_from(pot, lam, ef, x_max)


def s_profile(pot: Potential, lam: float, xs: Sequence[float], tol: float = DEFAULT_TOL) -> np.ndarray:
    """s(x) = exp(-x C_λ) u(x) at the given points, shape (n, 2)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    x_free = max(float(xs.max()), pot.effective_support(tol))
    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        x_free = float(pot.decay_class.x_cut)
    ef = regular_eigenfunction(pot, lam, xs, tol, x_free=x_free)
    return _pull_back(float(lam), xs, ef.state(xs))


def scattering_samples(
    pot: Potential,
    lam: float,
    grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    x_cap: float = DEFAULT_X_CAP,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> Tuple[ScatteringPoint, Eigenfunction]:
    """
    One integration per λ: the scattering data and F_λ sampled on grid.

    F_λ beyond x_max is the closed-form free continuation, consistent with
    the reported (a, b).
    """
    lam = _check_lambda(lam, lambda_min)
    x_max = truncation_point(pot, lam, tol, x_cap)
    ef = regular_eigenfunction(pot, lam, grid, tol, x_free=x_max)
    return _point_from(_limit_from(pot, lam, ef, x_max)), ef


def c_function(
    pot: Potential,
    lam: float,
    tol: float = DEFAULT_TOL,
    x_cap: float = DEFAULT_X_CAP,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> ScatteringPoint:
    """
    Scattering amplitude c(λ) = a/2 - i b / (2√λ) and the derived density.

    Raises:
        NumericalError: |c|² < 1e-14, or the tail test fails.
    """
    return _point_from(s_infinity(pot, lam, tol, x_cap, lambda_min))


def spectral_density(pot: Potential, lam: float, tol: float = DEFAULT_TOL, **kw) -> float:
    """ρ(λ) = 1 / (4π √λ |c(λ)|²)."""
    return c_function(pot, lam, tol, **kw).density


def comparison_wave(point: ScatteringPoint, x) -> np.ndarray:
    """Free eigenfunction F_{0,λ}(x) = c e^{i√λx} + conj(c) e^{-i√λx} = 2 Re(c e^{i√λx})."""
    x = np.asarray(x, dtype=float)
    return 2.0 * np.real(point.c * np.exp(1j * np.sqrt(point.lam) * x))


def density_sweep(
    pot: Potential,
    lambdas: Sequence[float],
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    quiet: bool = True,
    **kw,
) -> List[ScatteringPoint]:
    """c_function over a λ grid; returned sorted by λ regardless of scheduling."""
    points = parallel_map(
        lambda lam: c_function(pot, lam, tol, **kw),
        sorted(float(v) for v in lambdas),
        threads=threads,
        desc="density",
        quiet=quiet,
    )
    return sorted(points, key=lambda pt: pt.lam)


@dataclass(frozen=True)
class PairingDefect:
    """
    |<F_{0,λ}, h(· - t)> - <F_λ, h(· - t)>| against translations t.

    bound is the certified envelope sup|F_λ - F_{0,λ}| on the shifted
    support times the L¹ norm of h.
    """

    lam: float
    shifts: np.ndarray
    defects: np.ndarray
    bounds: np.ndarray


def asymptotic_pairing_defect(
    pot: Potential,
    lam: float,
    h: SampledFunction,
    shifts: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> PairingDefect:
    """
    Pair F_λ and its comparison wave with translates of h.

    Args:
        pot: Coefficients.
        lam: Spectral parameter.
        h: Test function sampled on [0, L].
        shifts: Translations t >= 0.
        tol: Integrator tolerance.
    """
    shifts = np.asarray(shifts, dtype=float)
    lo = h.hull[0]
    l1 = float(SampledFunction(h.x, np.abs(h.y)).integrate())
    point, ef = scattering_samples(pot, lam, np.concatenate([h.x + t for t in shifts]), tol)
    bound_sq = window_bound_sq((point.lam, point.lam))
    norm_s = float(np.hypot(point.a, point.b))

    defects = np.empty(len(shifts))
    bounds = np.empty(len(shifts))
    n = len(h)
    for i, t in enumerate(shifts):
        moved = h.shifted(t)
        f = ef.value[i * n:(i + 1) * n]
        f0 = comparison_wave(point, moved.x)
        defects[i] = abs(moved.inner(f0) - moved.inner(f))
        k = k_tail(pot, (point.lam, point.lam), lo + t)
        envelope = np.sqrt(bound_sq) * k * np.exp(2.0 * k) * norm_s
        bounds[i] = (envelope + point.truncation_error_bound) * l1
    return PairingDefect(lam=point.lam, shifts=shifts, defects=defects, bounds=bounds)
