"""
Weyl expansion: projections, transform, reconstruction, Parseval and the
time-average identity.

Every λ-integral is taken in k = √λ, where the spectral measure reads

    ρ(λ) dλ = dk / (2π |c(k²)|²),

so no endpoint singularity survives at λ = 0 and integrands are smooth.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad, simpson
from scipy.signal import correlate

from .asymptotics import scattering_samples
from .boundstates import BoundState, discrete_spectrum
from .coeffs import Potential
from .errors import NumericalError
from .green import WEYL, ProjectionReport, decay_point
from .grids import SampledFunction, union_grid
from .quadrature import gauss_legendre, matched_tolerance
from .settings import (
    DEFAULT_DX,
    DEFAULT_LAMBDA_CAP,
    DEFAULT_LAMBDA_MAX,
    DEFAULT_LAMBDA_MIN,
    DEFAULT_T_GRID,
    DEFAULT_TOL,
)
from .sweep import ordered_mapper, parallel_map

EXPANSION_QUAD_TOL = 1e-7
EXPANSION_ORDER = 20


def _check_window(alpha: float, beta: float, lambda_min: float) -> None:
    if not lambda_min <= alpha < beta:
        raise ValueError(
            f"spectral window needs λ_min = {lambda_min:g} <= alpha < beta "
            f"(got [{alpha:g}, {beta:g}])"
        )


def _root(lam: float) -> float:
    """√λ, nudged up so that its square is not below λ."""
    k = float(np.sqrt(lam))
    return k if k * k >= lam else float(np.nextafter(k, np.inf))


def _measure(point) -> float:
    """Weight of the k-integral: ρ(k²) · 2k = 1 / (2π |c|²)."""
    return 1.0 / (2.0 * np.pi * point.c_abs_sq)


def _report(alpha, beta, result) -> ProjectionReport:
    value = complex(result.value)
    if not result.converged:
        print(f"  Warning: Weyl quadrature on [{alpha:g}, {beta:g}] did not converge "
              f"(error {result.error:.3g})")
    return ProjectionReport(
        alpha=float(alpha),
        beta=float(beta),
        method=WEYL,
        value=value.real,
        error=result.error,
        converged=result.converged,
        imag_part=value.imag,
        nodes=result.nodes,
        weights=result.weights,
        node_values=result.values,
        evaluations=result.evaluations,
    )


# ---------------------------------------------------------------------- #
#  Projections
# ---------------------------------------------------------------------- #


def weyl_pairing(
    pot: Potential,
    alpha: float,
    beta: float,
    g: SampledFunction,
    h: SampledFunction,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> ProjectionReport:
    """
    <g, P h> = (1/4π) ∫_α^β <g, F_λ> <F_λ, h> |c(λ)|^{-2} dλ / √λ.

    Args:
        pot: Coefficients.
        alpha, beta: Interval with λ_min <= alpha < beta.
        g, h: Sampled data in [0, inf).
        tol: Integrator tolerance (the quadrature follows it).
        threads: Worker pool for the k nodes.
        quiet: Suppress the progress bar.
        lambda_min: Threshold of the continuous spectrum.
    """
    _check_window(alpha, beta, lambda_min)
    g, h = g.restricted(), h.restricted()
    if g.is_zero() or h.is_zero():
        return ProjectionReport.zero(alpha, beta, WEYL)
    grid = union_grid(g, h)
    g, h = g.resample(grid), h.resample(grid)

    def integrand(k):
        point, ef = scattering_samples(pot, k * k, grid, tol, lambda_min=lambda_min)
        return g.inner(ef.value) * simpson(ef.value * h.y, x=grid) * _measure(point)

    qt = matched_tolerance(tol)
    result = gauss_legendre(integrand, np.sqrt(alpha), np.sqrt(beta), tol=qt, rtol=qt,
                            mapper=ordered_mapper(threads, desc="weyl", quiet=quiet))
    return _report(alpha, beta, result)


def projection_kernel(
    pot: Potential,
    alpha: float,
    beta: float,
    x: float,
    y: float,
    tol: float = DEFAULT_TOL,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> float:
    """Kernel of P_[α,β]: ∫_α^β F_λ(x) F_λ(y) ρ(λ) dλ."""
    _check_window(alpha, beta, lambda_min)
    if x < 0 or y < 0:
        raise ValueError(f"projection_kernel needs x, y >= 0 (got {x}, {y})")

    def integrand(k):
        point, ef = scattering_samples(pot, k * k, [x, y], tol, lambda_min=lambda_min)
        return ef.value[0] * ef.value[1] * _measure(point)

    qt = matched_tolerance(tol)
    return float(gauss_legendre(integrand, np.sqrt(alpha), np.sqrt(beta), tol=qt, rtol=qt).value)


def project(
    pot: Potential,
    alpha: float,
    beta: float,
    h: SampledFunction,
    x_eval: Sequence[float],
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
    quad_tol: float = EXPANSION_QUAD_TOL,
) -> SampledFunction:
    """(P_[α,β] h)(x) on x_eval, by vector-valued quadrature in k."""
    _check_window(alpha, beta, lambda_min)
    x_eval = np.asarray(x_eval, dtype=float)
    h = h.restricted()
    if h.is_zero():
        return SampledFunction(x_eval, np.zeros(len(x_eval)))
    n = len(h)
    grid = np.concatenate([h.x, x_eval])

    def integrand(k):
        point, ef = scattering_samples(pot, k * k, grid, tol, lambda_min=lambda_min)
        coefficient = simpson(ef.value[:n] * h.y, x=h.x)
        return ef.value[n:] * coefficient * _measure(point)

    result = gauss_legendre(integrand, np.sqrt(alpha), np.sqrt(beta), tol=quad_tol, rtol=quad_tol,
                            order=EXPANSION_ORDER,
                            mapper=ordered_mapper(threads, desc="project", quiet=quiet))
    return SampledFunction(x_eval, np.asarray(result.value))


@dataclass(frozen=True)
class ProjectionTail:
    """
    Part of (P h) on [x_from, inf) from the large-x form of the projection.

    Past the support of the coefficients (P h)(x) = Re ∫ β(k) e^{ikx} dk
    with β = ĥ / (π conj c), which two integrations by parts turn into
    endpoint terms in 1/x and 1/x².

    Attributes:
        norm_sq: ∫ |P h|² over [x_from, inf).
        energy: ∫ (D P h) P h over [x_from, inf).
    """

    x_from: float
    norm_sq: float
    energy: float

    def to_dict(self) -> dict:
        return {"x_from": self.x_from, "norm_sq": self.norm_sq, "energy": self.energy}


def _oscillatory_moment(coef: complex, omega: float, power: int, x_from: float) -> float:
    """Re ∫_X^∞ coef e^{iωx} x^{-power} dx."""
    if omega == 0.0:
        return coef.real * x_from ** (1 - power) / (power - 1)
    cos_part, _ = quad(lambda x: x ** -power, x_from, np.inf, weight="cos", wvar=abs(omega))
    sin_part, _ = quad(lambda x: x ** -power, x_from, np.inf, weight="sin", wvar=abs(omega))
    return coef.real * cos_part - coef.imag * np.sign(omega) * sin_part


def _tail_pairing(first, second, x_from: float) -> float:
    """∫_X^∞ Re B₁ Re B₂ for B = Σ_j e^{i k_j x} (a_j / x + b_j / x²)."""
    total = 0.0
    for k1, a1, b1 in first:
        for k2, a2, b2 in second:
            # Re u Re v = (Re u conj(v) + Re u v) / 2
            for omega, (a, b), (c, d) in (
                (k1 - k2, (a1, b1), (np.conj(a2), np.conj(b2))),
                (k1 + k2, (a1, b1), (a2, b2)),
            ):
                for power, coef in ((2, a * c), (3, a * d + b * c), (4, b * d)):
                    total += 0.5 * _oscillatory_moment(complex(coef), omega, power, x_from)
    return total


def projection_tail(
    pot: Potential,
    alpha: float,
    beta: float,
    h: SampledFunction,
    x_from: float,
    tol: float = DEFAULT_TOL,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> ProjectionTail:
    """
    ||P h||² and <D P h, P h> carried by [x_from, inf).

    Raises:
        ValueError: x_from inside the support of the coefficients.
    """
    _check_window(alpha, beta, lambda_min)
    support = decay_point(pot, tol, 0.0)
    if x_from < support:
        raise ValueError(f"projection_tail needs x_from >= {support:g} (got {x_from:g})")
    h = h.restricted()
    if h.is_zero():
        return ProjectionTail(float(x_from), 0.0, 0.0)

    def amplitude(k):
        point, ef = scattering_samples(pot, k * k, h.x, tol, lambda_min=lambda_min)
        return _coefficient(ef.value, h) / (np.pi * np.conj(point.c))

    plain, energy = [], []
    for k, inward in ((_root(alpha), 1.0), (_root(beta), -1.0)):
        step = 1e-3 * k * inward
        b0, b1, b2 = (amplitude(k + j * step) for j in range(3))
        slope = (-3.0 * b0 + 4.0 * b1 - b2) / (2.0 * step)
        # the upper endpoint enters with +, the lower with -
        sign = -inward
        plain.append((k, -1j * sign * b0, sign * slope))
        # -f'' past the support: β -> k² β
        energy.append((k, -1j * sign * k * k * b0, sign * (2.0 * k * b0 + k * k * slope)))

    return ProjectionTail(
        x_from=float(x_from),
        norm_sq=float(_tail_pairing(plain, plain, x_from)),
        energy=float(_tail_pairing(energy, plain, x_from)),
    )


# ---------------------------------------------------------------------- #
#  Transform, reconstruction, Parseval
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class TransformResult:
    """
    Eigenfunction transform ĥ(λ) = <F_λ, h> with the discrete part.

    Attributes:
        lambdas: λ grid.
        coefficients: ĥ(λ) (real for real h).
        density: ρ(λ) on the grid.
        c_abs_sq: |c(λ)|² on the grid.
        bound_eigenvalues: Eigenvalues of the bound states used.
        bound_coefficients: <f_n, h> for unit-norm f_n.
        bound_norms: ||f_n||.
    """

    lambdas: np.ndarray
    coefficients: np.ndarray
    density: np.ndarray
    c_abs_sq: np.ndarray
    bound_eigenvalues: np.ndarray
    bound_coefficients: np.ndarray
    bound_norms: np.ndarray
    metadata: Dict[str, float] = field(default_factory=dict)

    def table(self) -> Dict[str, np.ndarray]:
        return {
            "lambda": self.lambdas,
            "re_coefficient": np.real(self.coefficients),
            "im_coefficient": np.imag(self.coefficients),
            "density": self.density,
            "c_abs_sq": self.c_abs_sq,
        }


def _coefficient(f_values: np.ndarray, h: SampledFunction):
    return simpson(f_values * h.y, x=h.x)


def _bound_terms(states: Sequence[BoundState], h: SampledFunction):
    eigenvalues = np.array([st.eigenvalue for st in states])
    coefficients = np.array([_coefficient(st.evaluate(h.x), h) for st in states])
    norms = np.array([st.norm_check for st in states])
    return eigenvalues, coefficients, norms


def transform(
    pot: Potential,
    h: SampledFunction,
    lambda_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    bound_states: Optional[List[BoundState]] = None,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> TransformResult:
    """
    ĥ(λ) = ∫ F_λ h on a λ grid, plus bound-state coefficients.

    Args:
        pot: Coefficients.
        h: Compactly supported data.
        lambda_grid: λ values, each >= lambda_min.
        tol: Integrator tolerance.
        bound_states: Precomputed discrete spectrum; searched when None.
        threads: Worker pool for the λ grid.
        quiet: Suppress progress output.
        lambda_min: Threshold of the continuous spectrum.
    """
    h = h.restricted()
    lambdas = np.sort(np.asarray(lambda_grid, dtype=float))
    if bound_states is None:
        bound_states = discrete_spectrum(pot, tol, threads=threads, quiet=quiet)

    def node(lam):
        point, ef = scattering_samples(pot, lam, h.x, tol, lambda_min=lambda_min)
        return point, _coefficient(ef.value, h)

    rows = parallel_map(node, lambdas, threads=threads, desc="transform", quiet=quiet)
    eigenvalues, bound_coeffs, norms = _bound_terms(bound_states, h)
    return TransformResult(
        lambdas=lambdas,
        coefficients=np.array([c for _, c in rows]),
        density=np.array([pt.density for pt, _ in rows]),
        c_abs_sq=np.array([pt.c_abs_sq for pt, _ in rows]),
        bound_eigenvalues=eigenvalues,
        bound_coefficients=bound_coeffs,
        bound_norms=norms,
        metadata={"tol": tol, "lambda_min": lambda_min, "bound_states": len(bound_states)},
    )


@dataclass(frozen=True)
class ReconstructionResult:
    """
    Σ <f_n, h> f_n + ∫ ρ ĥ F_λ dλ on x_eval.

    deviation is the sup-norm distance to h on x_eval. tail_estimate is the
    sup-norm of the last λ-band added before the cut-off lambda_max was
    accepted.
    """

    x: np.ndarray
    values: np.ndarray
    continuous_part: np.ndarray
    discrete_part: np.ndarray
    deviation: float
    tail_estimate: float
    quadrature_error: float
    converged: bool
    bound_states: int
    lambda_max: float = DEFAULT_LAMBDA_MAX
    threshold_correction: float = 0.0

    def to_dict(self) -> dict:
        return {
            "deviation": self.deviation,
            "tail_estimate": self.tail_estimate,
            "quadrature_error": self.quadrature_error,
            "converged": self.converged,
            "bound_states": self.bound_states,
            "lambda_max": self.lambda_max,
            "threshold_correction": self.threshold_correction,
            "points": int(len(self.x)),
        }


def _threshold_share(integrand, k_lo: float):
    """∫_0^k_lo of an integrand vanishing like k² at k = 0."""
    return np.asarray(integrand(k_lo)) * k_lo / 3.0


def reconstruct(
    pot: Potential,
    h: SampledFunction,
    x_eval: Optional[Sequence[float]] = None,
    lambda_max: float = DEFAULT_LAMBDA_MAX,
    tol: float = DEFAULT_TOL,
    bound_states: Optional[List[BoundState]] = None,
    include_bound_states: bool = True,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
    quad_tol: float = EXPANSION_QUAD_TOL,
    tail_tol: float = 1e-4,
    lambda_cap: float = DEFAULT_LAMBDA_CAP,
) -> ReconstructionResult:
    """
    Rebuild h from its spectral data on x_eval (default: the grid of h).

    The continuous part starts on [λ_min, lambda_max] and is extended by
    doubling bands [Λ, 2Λ] until the last band is below tail_tol in
    sup-norm. [0, λ_min] is filled from the k² behaviour at threshold.

    Raises:
        NumericalError: The tail is still above tail_tol at lambda_cap.
    """
    _check_window(lambda_min, lambda_max, lambda_min)
    if not lambda_cap > lambda_max:
        raise ValueError(f"lambda_cap = {lambda_cap:g} must exceed lambda_max = {lambda_max:g}")
    h = h.restricted()
    x_eval = h.x if x_eval is None else np.asarray(x_eval, dtype=float)
    target = h.resample(x_eval).y
    n = len(h)

    if h.is_zero():
        zeros = np.zeros(len(x_eval))
        return ReconstructionResult(x_eval, zeros, zeros, zeros, 0.0, 0.0, 0.0, True, 0,
                                    lambda_max=float(lambda_max))

    if not include_bound_states:
        bound_states = []
    elif bound_states is None:
        bound_states = discrete_spectrum(pot, tol, threads=threads, quiet=quiet)
    discrete = np.zeros(len(x_eval))
    for st in bound_states:
        discrete = discrete + _coefficient(st.evaluate(h.x), h) * st.evaluate(x_eval)

    grid = np.concatenate([h.x, x_eval])

    def integrand(k):
        point, ef = scattering_samples(pot, k * k, grid, tol, lambda_min=lambda_min)
        return ef.value[n:] * _coefficient(ef.value[:n], h) * _measure(point)

    def band(lam_lo, lam_hi, panels):
        return gauss_legendre(integrand, np.sqrt(lam_lo), np.sqrt(lam_hi), tol=quad_tol,
                              rtol=quad_tol, order=EXPANSION_ORDER, initial_panels=panels,
                              mapper=ordered_mapper(threads, desc="reconstruct", quiet=quiet))

    result = band(lambda_min, lambda_max, 8)
    total = np.asarray(result.value)
    error, converged = result.error, result.converged
    threshold = _threshold_share(integrand, _root(lambda_min))
    total = total + threshold

    lam, tail = float(lambda_max), np.inf
    while tail > tail_tol:
        if lam >= lambda_cap:
            raise NumericalError(
                f"reconstruction tail {tail:.3g} above {tail_tol:g} at the λ cap {lambda_cap:g}",
                location=lam,
            )
        upper = min(2.0 * lam, lambda_cap)
        piece = band(lam, upper, 4)
        total = total + np.asarray(piece.value)
        error += piece.error
        converged = converged and piece.converged
        tail = float(np.max(np.abs(piece.value)))
        lam = upper
    if not quiet:
        print(f"  Reconstruction cut at λ = {lam:g} (tail {tail:.3g})")

    continuous = np.real_if_close(total)
    values = continuous + discrete
    return ReconstructionResult(
        x=x_eval,
        values=values,
        continuous_part=continuous,
        discrete_part=discrete,
        deviation=float(np.max(np.abs(values - target))),
        tail_estimate=tail,
        quadrature_error=error,
        converged=converged,
        bound_states=len(bound_states),
        lambda_max=lam,
        threshold_correction=float(np.max(np.abs(threshold))),
    )


@dataclass(frozen=True)
class ParsevalReport:
    """||h||² against its discrete and continuous spectral energies."""

    norm_sq: float
    discrete: float
    continuous: float
    defect: float
    bound_share: float
    quadrature_error: float

    def to_dict(self) -> dict:
        return {
            "norm_sq": self.norm_sq,
            "discrete": self.discrete,
            "continuous": self.continuous,
            "defect": self.defect,
            "bound_share": self.bound_share,
            "quadrature_error": self.quadrature_error,
        }


def parseval_check(
    pot: Potential,
    h: SampledFunction,
    lambda_max: float = DEFAULT_LAMBDA_MAX,
    tol: float = DEFAULT_TOL,
    bound_states: Optional[List[BoundState]] = None,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> ParsevalReport:
    """
    ||h||² = Σ |<f_n, h>|² + ∫ ρ |ĥ|² dλ, cut at λ_max; [0, λ_min] from threshold.

    Always returns a report; defect is relative to ||h||² (0 for h = 0).
    """
    h = h.restricted()
    norm_sq = h.norm_sq()
    if norm_sq == 0.0:
        return ParsevalReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    if bound_states is None:
        bound_states = discrete_spectrum(pot, tol, threads=threads, quiet=quiet)
    _, coefficients, _ = _bound_terms(bound_states, h)
    discrete = float(np.sum(np.abs(coefficients) ** 2))

    def integrand(k):
        point, ef = scattering_samples(pot, k * k, h.x, tol, lambda_min=lambda_min)
        return abs(_coefficient(ef.value, h)) ** 2 * _measure(point)

    qt = matched_tolerance(tol)
    result = gauss_legendre(integrand, np.sqrt(lambda_min), np.sqrt(lambda_max), tol=qt, rtol=qt,
                            order=EXPANSION_ORDER, initial_panels=4,
                            mapper=ordered_mapper(threads, desc="parseval", quiet=quiet))
    continuous = float(result.value) + float(_threshold_share(integrand, _root(lambda_min)))
    return ParsevalReport(
        norm_sq=norm_sq,
        discrete=discrete,
        continuous=continuous,
        defect=abs(norm_sq - discrete - continuous) / norm_sq,
        bound_share=discrete / norm_sq,
        quadrature_error=result.error,
    )


# ---------------------------------------------------------------------- #
#  Time average
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class BumpWindow:
    """Smooth φ(λ) = exp(-1 / (1 - s²)), s = (2λ - lo - hi) / (hi - lo), zero off (lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"BumpWindow needs lo < hi (got {self.lo}, {self.hi})")

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        s = (2.0 * lam - self.lo - self.hi) / (self.hi - self.lo)
        inside = np.abs(s) < 1.0
        out = np.zeros_like(s)
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TimeAverageReport:
    """
    <g, φ(D₀) h> against (1/T) ∫_0^T <W U_t g, φ(D) W U_t h> dt.

    non_increasing allows each step to stay below the quadrature floor;
    flagged marks a T grid that ends above the floor without decreasing.
    """

    t_grid: np.ndarray
    lhs: float
    rhs: np.ndarray
    defects: np.ndarray
    floor: float
    non_increasing: bool
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "t_grid": [float(t) for t in self.t_grid],
            "lhs": self.lhs,
            "rhs": [float(v) for v in self.rhs],
            "defects": [float(v) for v in self.defects],
            "floor": self.floor,
            "non_increasing": self.non_increasing,
            "flagged": self.flagged,
        }


def _aligned(f: SampledFunction, dx: float):
    """f on the lattice dx·m covering its hull; returns (m_lo, values)."""
    m_lo = int(np.floor(f.hull[0] / dx))
    m_hi = int(np.ceil(f.hull[1] / dx))
    x = dx * np.arange(m_lo, m_hi + 1)
    return m_lo, f.resample(x).y


def time_average_check(
    pot: Potential,
    phi: BumpWindow,
    g: SampledFunction,
    h: SampledFunction,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
    tol: float = DEFAULT_TOL,
    dx: float = DEFAULT_DX,
    t_step: float = 0.05,
    threads: int = 1,
    quiet: bool = True,
    lambda_min: float = DEFAULT_LAMBDA_MIN,
) -> TimeAverageReport:
    """
    Compare φ(D₀) on the line with time-averaged φ(D) on translates.

    The left side uses the Fourier transform of g and h; the right side
    uses F_λ, ρ and the translates W U_t f (x) = f(x - t) on x >= 0. Both
    k-integrals run over the part of the support of φ above λ_min.

    Args:
        pot: Coefficients.
        phi: Smooth window on the positive spectrum.
        g, h: Data on the line.
        t_grid: Averaging horizons T, increasing.
        tol: Integrator tolerance.
        dx: Lattice spacing for the translates.
        t_step: Spacing of the t samples (rounded to a multiple of dx).
        threads: Worker pool for the k nodes.
        quiet: Suppress progress output.
        lambda_min: Threshold of the continuous spectrum.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    lo = max(phi.lo, lambda_min)
    if phi.hi <= lo:
        zeros = np.zeros(len(t_grid))
        return TimeAverageReport(t_grid, 0.0, zeros, zeros, 0.0, True, False)

    mg, gv = _aligned(g, dx)
    mh, hv = _aligned(h, dx)
    xg = dx * np.arange(mg, mg + len(gv))
    xh = dx * np.arange(mh, mh + len(hv))
    k_lo, k_hi = np.sqrt(lo), np.sqrt(phi.hi)
    qt = matched_tolerance(tol)

    def fourier(x, values, xi):
        return np.sum(values * np.exp(-1j * xi * x)) * dx

    def free_side(xi):
        return phi(xi * xi) * np.real(np.conj(fourier(xg, gv, xi)) * fourier(xh, hv, xi)) / np.pi

    lhs = float(gauss_legendre(free_side, k_lo, k_hi, tol=qt, rtol=qt).value)

    stride = max(1, int(round(t_step / dx)))
    t_max = float(t_grid.max())
    n_t = int(round(t_max / (stride * dx))) + 1
    shifts = stride * np.arange(n_t)
    t = dx * shifts
    top = max(mg + len(gv), mh + len(hv)) + shifts[-1] + 1
    x = dx * np.arange(max(top, 3))

    def pairings(F, m_lo, values):
        z = correlate(F, np.conj(values), mode="full")
        idx = len(values) - 1 + m_lo + shifts
        valid = (idx >= 0) & (idx < len(z))
        return np.where(valid, z[np.clip(idx, 0, len(z) - 1)], 0.0) * dx

    def translated_side(k):
        point, ef = scattering_samples(pot, k * k, x, tol, lambda_min=lambda_min)
        a_g = pairings(ef.value, mg, gv)
        a_h = pairings(ef.value, mh, hv)
        return phi(k * k) * np.real(np.conj(a_g) * a_h) * _measure(point)

    result = gauss_legendre(translated_side, k_lo, k_hi, tol=qt, rtol=qt,
                            mapper=ordered_mapper(threads, desc="time average", quiet=quiet))
    curve = np.asarray(result.value)

    rhs = np.empty(len(t_grid))
    for i, T in enumerate(t_grid):
        j = max(2, int(round(T / (stride * dx))))
        rhs[i] = simpson(curve[:j + 1], x=t[:j + 1]) / t[j]
    defects = np.abs(lhs - rhs)
    floor = max(10.0 * (result.error + qt), 1e-8)
    steps = [d1 <= max(d0, floor) for d0, d1 in zip(defects, defects[1:])]
    non_increasing = bool(all(steps))
    return TimeAverageReport(
        t_grid=t_grid,
        lhs=lhs,
        rhs=rhs,
        defects=defects,
        floor=floor,
        non_increasing=non_increasing,
        flagged=bool(not non_increasing and defects[-1] > floor),
    )
