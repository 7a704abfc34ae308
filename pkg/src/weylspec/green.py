"""
Green's kernel, resolvent and the Kodaira route to spectral projections.

For ν off [0, inf) the resolvent (D - ν)^{-1} has the kernel

    k_ν(x, y) = F_ν(min(x, y)) G_ν(max(x, y)) / w(ν)

with F_ν regular at 0, G_ν decaying at infinity and w(ν) their Wronskian.
The projection onto [α, β] is the ε -> 0 limit of

    (1 / 2πi) ∫_α^β <g, [(D - λ - iε)^{-1} - (D - λ + iε)^{-1}] h> dλ.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .asymptotics import scattering_samples
from .coeffs import EVENTUALLY_CONSTANT, Potential
from .errors import NumericalError
from .grids import SampledFunction, union_grid
from .odeflow import decaying_eigenfunction, regular_eigenfunction, wronskian
from .quadrature import gauss_legendre, matched_tolerance
from .settings import DEFAULT_TOL
from .sweep import ordered_mapper

WRONSKIAN_FLOOR = 1e-12

WEYL = "weyl"
KODAIRA = "kodaira"


@dataclass(frozen=True)
class GreenKernelSample:
    """k_ν(x, y) with the Wronskian used to normalize it."""

    nu: complex
    x: float
    y: float
    value: complex
    wronskian_w: complex


@dataclass(frozen=True)
class ProjectionReport:
    """
    <g, P h> for the spectral projection P onto [alpha, beta].

    Attributes:
        alpha, beta: Spectral interval.
        method: WEYL or KODAIRA.
        epsilon: Distance to the real axis (Kodaira only).
        value: Real part of the pairing.
        imag_part: Imaginary part (≈ 0 for real g, h).
        error: Quadrature error estimate.
        converged: Whether the quadrature met its tolerance.
        nodes: k = √λ quadrature nodes.
        weights: Matching weights (in k).
        node_values: Integrand in k at the nodes.
        evaluations: Integrand evaluations spent.
    """

    alpha: float
    beta: float
    method: str
    value: float
    error: float
    converged: bool
    epsilon: Optional[float] = None
    imag_part: float = 0.0
    nodes: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    node_values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "method": self.method,
            "epsilon": self.epsilon,
            "value": self.value,
            "imag_part": self.imag_part,
            "error": self.error,
            "converged": self.converged,
            "nodes": int(len(self.nodes)),
            "evaluations": self.evaluations,
        }

    def node_table(self) -> Dict[str, np.ndarray]:
        """Per-node λ, integrand (real / imaginary) and running integral."""
        values = np.asarray(self.node_values, dtype=complex)
        return {
            "lambda": self.nodes ** 2,
            "re_integrand": values.real,
            "im_integrand": values.imag,
            "cumulative": np.cumsum(self.weights * values.real),
        }

    @classmethod
    def zero(cls, alpha, beta, method, epsilon=None) -> "ProjectionReport":
        return cls(alpha=alpha, beta=beta, method=method, value=0.0, error=0.0,
                   converged=True, epsilon=epsilon)


def _check_off_spectrum(nu) -> complex:
    nu = complex(nu)
    if nu.imag == 0 and nu.real >= 0:
        raise ValueError(f"ν = {nu} lies on the continuous spectrum [0, inf)")
    return nu


def decay_point(pot: Potential, tol: float, x_hi: float) -> float:
    """Truncation point for G_ν covering x_hi."""
    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        return max(float(pot.decay_class.x_cut), x_hi)
    return max(pot.effective_support(0.5 * tol), x_hi)


def _solutions(pot: Potential, nu: complex, grid: np.ndarray, tol: float):
    """F_ν, G_ν on grid and w(ν) = -p (F G' - F' G)."""
    F = regular_eigenfunction(pot, nu, grid, tol)
    G = decaying_eigenfunction(pot, nu, grid, decay_point(pot, tol, float(grid.max())), tol)
    w = wronskian(pot, F, G, float(np.median(grid)))
    if abs(w) < WRONSKIAN_FLOOR:
        raise NumericalError(
            f"|w(ν)| = {abs(w):.3g} at ν = {nu}: ν is numerically on the spectrum "
            "or at a bound state."
        )
    return F, G, w


def green_kernel(pot: Potential, nu, x: float, y: float, tol: float = DEFAULT_TOL) -> GreenKernelSample:
    """
    Resolvent kernel k_ν(x, y) = F_ν(min) G_ν(max) / w(ν).

    Raises:
        ValueError: ν on [0, inf) or negative x, y.
        NumericalError: |w(ν)| < 1e-12.
    """
    nu = _check_off_spectrum(nu)
    if x < 0 or y < 0:
        raise ValueError(f"green_kernel needs x, y >= 0 (got {x}, {y})")
    lo, hi = (float(x), float(y)) if x <= y else (float(y), float(x))
    F, G, w = _solutions(pot, nu, np.array([lo, hi]), tol)
    value = F.value[0] * G.value[1] / w
    return GreenKernelSample(nu=nu, x=float(x), y=float(y), value=complex(value), wronskian_w=w)


def _cumulative(values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Running integral from x[0] of the interpolating cubic spline."""
    if np.iscomplexobj(values):
        return _cumulative(values.real, x) + 1j * _cumulative(values.imag, x)
    return CubicSpline(x, values).antiderivative()(x)


def _resolve_on(pot: Potential, nu: complex, x: np.ndarray, h: np.ndarray, tol: float) -> np.ndarray:
    F, G, w = _solutions(pot, nu, x, tol)
    inner = _cumulative(F.value * h, x)
    outer = _cumulative(G.value * h, x)
    outer = outer[-1] - outer
    return (G.value * inner + F.value * outer) / w


def apply_resolvent(
    pot: Potential,
    nu,
    h: SampledFunction,
    tol: float = DEFAULT_TOL,
    grid: Optional[np.ndarray] = None,
) -> SampledFunction:
    """
    g = (D - ν)^{-1} h on the grid of h (or on grid, if given).

    The y-integral is split at the diagonal y = x where the kernel has a
    derivative jump: g(x) = [G(x) ∫_0^x F h + F(x) ∫_x^∞ G h] / w.

    Args:
        pot: Coefficients.
        nu: Point off [0, inf).
        h: Data supported inside its sampled grid.
        tol: Integrator tolerance.
        grid: Optional working grid in [0, inf) covering the support of h.
    """
    nu = _check_off_spectrum(nu)
    h = h.restricted()
    if grid is not None:
        h = h.resample(grid)
    if h.is_zero():
        return SampledFunction(h.x, np.zeros(len(h), dtype=complex))
    return SampledFunction(h.x, _resolve_on(pot, nu, h.x, h.y, tol))


def resolvent_norm_check(pot: Potential, nu, h: SampledFunction, tol: float = DEFAULT_TOL) -> dict:
    """||(D - ν)^{-1} h|| <= ||h|| / |Im ν| on the sampled grid."""
    nu = complex(nu)
    if nu.imag == 0:
        raise ValueError("resolvent_norm_check needs Im ν != 0")
    g = apply_resolvent(pot, nu, h, tol)
    norm_g = float(np.sqrt(g.norm_sq()))
    bound = float(np.sqrt(h.norm_sq()) / abs(nu.imag))
    return {
        "nu": [nu.real, nu.imag],
        "norm_resolvent_h": norm_g,
        "bound": bound,
        "passed": bool(norm_g <= bound * (1.0 + 1e-8)),
    }


def kodaira_pairing(
    pot: Potential,
    alpha: float,
    beta: float,
    epsilon: float,
    g: SampledFunction,
    h: SampledFunction,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    quiet: bool = True,
) -> ProjectionReport:
    """
    <g, P h> from the resolvent difference at distance ε from the axis.

    The λ-integral is taken in k = √λ by adaptive Gauss-Legendre. For real
    g, h one solve per node suffices since (D - λ + iε)^{-1} h is the
    complex conjugate of (D - λ - iε)^{-1} h.

    Args:
        pot: Coefficients.
        alpha, beta: Interval, 0 < alpha < beta.
        epsilon: ε > 0.
        g, h: Sampled data in [0, inf).
        tol: Integrator tolerance.
        threads: Worker pool for the λ nodes.
        quiet: Suppress the progress bar.
    """
    if not 0 < alpha < beta:
        raise ValueError(f"kodaira_pairing needs 0 < alpha < beta (got {alpha}, {beta})")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    g, h = g.restricted(), h.restricted()
    if g.is_zero() or h.is_zero():
        return ProjectionReport.zero(alpha, beta, KODAIRA, epsilon)
    grid = union_grid(g, h)
    g, h = g.resample(grid), h.resample(grid)
    real = np.isrealobj(g.y) and np.isrealobj(h.y)

    def integrand(k):
        nu = complex(k * k, epsilon)
        rh = _resolve_on(pot, nu, grid, h.y, tol)
        upper = g.inner(rh)
        if real:
            value = upper.imag / np.pi
        else:
            rg = _resolve_on(pot, nu, grid, g.y, tol)
            lower = SampledFunction(grid, rg).inner(h.y)
            value = (upper - lower) / (2j * np.pi)
        return 2.0 * k * value

    qt = matched_tolerance(tol)
    result = gauss_legendre(
        integrand,
        np.sqrt(alpha),
        np.sqrt(beta),
        tol=qt,
        rtol=qt,
        mapper=ordered_mapper(threads, desc=f"kodaira ε={epsilon:g}", quiet=quiet),
    )
    if not result.converged:
        print(f"  Warning: Kodaira quadrature on [{alpha:g}, {beta:g}] did not converge "
              f"(error {result.error:.3g})")
    value = complex(result.value)
    return ProjectionReport(
        alpha=float(alpha),
        beta=float(beta),
        method=KODAIRA,
        value=value.real,
        error=result.error,
        converged=result.converged,
        epsilon=float(epsilon),
        imag_part=value.imag,
        nodes=result.nodes,
        weights=result.weights,
        node_values=result.values,
        evaluations=result.evaluations,
    )


def limit_kernel(pot: Potential, lam: float, x: float, y: float, tol: float = DEFAULT_TOL, **kw) -> float:
    """ε -> 0 limit of the Kodaira kernel: F_λ(x) F_λ(y) ρ(λ)."""
    point, ef = scattering_samples(pot, lam, [x, y], tol, **kw)
    return float(ef.value[0] * ef.value[1] * point.density)
