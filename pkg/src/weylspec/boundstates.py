"""
Negative eigenvalues λ = -z² and the zero-energy threshold.

At λ = -z² the free flow has eigenvectors [1, ±z] growing / decaying like
e^{±zx}. The regular solution is square integrable iff its growing-mode
coefficient vanishes, i.e. iff

    m(z) = a z + b = e^{-zx} (z F(x) + p F'(x)),   x beyond the support,

is zero, where (a, b) = s(∞) at λ = -z².
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .coeffs import EVENTUALLY_CONSTANT, EXPONENTIAL, POWER_INTEGRABLE, Potential
from .errors import NumericalError, PotentialError
from .odeflow import regular_eigenfunction
from .settings import DEFAULT_DX, DEFAULT_N_SCAN, DEFAULT_TOL, DEFAULT_X_CAP
from .sweep import parallel_map

ROOT_XTOL = 1e-12
TRUNCATION_LEVEL = 1e-14
RESONANCE_TOL = 1e-6
DEFAULT_Z_LO = 0.01


def _check_admissible(pot: Potential, z: float) -> None:
    kind = pot.decay_class.kind
    if kind == POWER_INTEGRABLE:
        raise PotentialError(
            "Bound-state search needs exponential or eventually-constant decay; "
            "power-integrable tails cannot dominate the e^{2zx} growth."
        )
    if kind == EXPONENTIAL and not 2.0 * z < pot.decay_class.rate:
        raise PotentialError(
            f"z = {z:g} is outside the admissible window z < α/2 = "
            f"{0.5 * pot.decay_class.rate:g} for {pot.decay_class.describe()}"
        )


def hyperbolic_cut(pot: Potential, z: float, tol: float, x_cap: float = DEFAULT_X_CAP) -> float:
    """
    Point past which Q is negligible at λ = -z².

    x_cut for eventually-constant coefficients; otherwise the first doubling
    of the effective support with ∫ₓ^∞ M(t) e^{2zt} dt <= tol.
    """
    _check_admissible(pot, z)
    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        return float(pot.decay_class.x_cut)

    def weighted_tail(x):
        value, _ = quad(lambda t: float(pot.tail_majorant(t)) * np.exp(2.0 * z * (t - x)), x, np.inf)
        return value * np.exp(2.0 * z * x)

    x = max(pot.effective_support(tol, cap=x_cap), 1.0)
    while weighted_tail(x) > tol:
        x *= 2.0
        if x > x_cap:
            raise NumericalError(
                f"Weighted tail at z = {z:g} not below {tol:.3g} before x_cap = {x_cap:g}",
                location=x_cap,
            )
    return x


def jost_like(pot: Potential, z: float, tol: float = DEFAULT_TOL, x_cap: float = DEFAULT_X_CAP) -> float:
    """
    Growing-mode coefficient m(z) = a z + b of F at λ = -z².

    Zero exactly when -z² is an eigenvalue. Equals 1 for the free operator.

    Raises:
        ValueError: z <= 0.
        PotentialError: Decay too weak for this z.
    """
    z = float(z)
    if not z > 0:
        raise ValueError(f"jost_like needs z > 0, got {z}")
    x = hyperbolic_cut(pot, z, tol, x_cap)
    ef = regular_eigenfunction(pot, -z * z, [x], tol, x_free=x)
    F, pdF = ef.state(x)[0]
    return float(np.exp(-z * x) * (z * F + pdF))


@dataclass(frozen=True)
class MScan:
    """(z, m(z)) table."""

    z: np.ndarray
    m: np.ndarray

    def sign_changes(self) -> List[int]:
        s = np.sign(self.m)
        return [i for i in range(len(s) - 1) if s[i] == 0 or s[i] * s[i + 1] < 0]


def m_scan(
    pot: Potential,
    z_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    quiet: bool = True,
) -> MScan:
    """m(z) on a grid of z values, in grid order."""
    z = np.asarray(z_grid, dtype=float)
    m = parallel_map(lambda v: jost_like(pot, v, tol), z, threads=threads, desc="m(z)", quiet=quiet)
    return MScan(z=z, m=np.asarray(m, dtype=float))


@dataclass(frozen=True)
class BoundState:
    """
    Normalized square-integrable eigenfunction at λ = -z² < 0.

    Attributes:
        z: Decay rate, z > 0.
        eigenvalue: -z².
        x: Sample grid from 0 to the 1e-14 truncation point.
        values: F with unit L² norm and F'(0) > 0.
        quasi_derivative: p F'.
        decay_rate: Fitted exponential rate of the tail.
        residual: |m(z)| at the refined root.
        norm_check: L² norm of values after normalization.
        double_root_suspected: Neighbouring bracket found in the scan.
    """

    z: float
    eigenvalue: float
    x: np.ndarray
    values: np.ndarray
    quasi_derivative: np.ndarray
    decay_rate: float
    residual: float
    norm_check: float = 1.0
    double_root_suspected: bool = False

    def evaluate(self, x) -> np.ndarray:
        """F at arbitrary x >= 0 (spline inside the grid, exponential tail beyond)."""
        x = np.asarray(x, dtype=float)
        end = self.x[-1]
        inside = CubicSpline(self.x, self.values)(np.clip(x, 0.0, end))
        tail = self.values[-1] * np.exp(-self.z * (x - end))
        return np.where(x <= end, inside, tail)

    def to_dict(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "z": self.z,
            "residual": self.residual,
            "norm_check": self.norm_check,
            "decay_rate": self.decay_rate,
            "double_root_suspected": self.double_root_suspected,
        }


def _bound_state(pot: Potential, z: float, tol: float, dx: float, suspect: bool) -> BoundState:
    lam = -z * z
    x_m = hyperbolic_cut(pot, z, tol)
    x_end = x_m + -np.log(TRUNCATION_LEVEL) / z
    n = int(np.ceil(x_end / dx))
    n += n % 2
    x = np.linspace(0.0, x_end, n + 1)

    inner = x <= x_m
    ef = regular_eigenfunction(pot, lam, x[inner], tol, x_free=x_m)
    F_m, pdF_m = ef.state(x_m)[0] if x_m > 0 else (0.0, float(pot.p(0.0)))

    # decaying continuation only; the growing mode is zero at the root
    values = np.empty_like(x)
    quasi = np.empty_like(x)
    values[inner] = ef.value
    quasi[inner] = ef.quasi_derivative
    outer = ~inner
    anchor = F_m if x_m > 0 else pdF_m / z
    values[outer] = anchor * np.exp(-z * (x[outer] - x_m))
    quasi[outer] = -z * values[outer]

    norm = float(np.sqrt(simpson(values ** 2, x=x)))
    if not norm > 0:
        raise NumericalError(f"Bound state at z = {z:g} has zero norm")
    values /= norm
    quasi /= norm
    norm_check = float(np.sqrt(simpson(values ** 2, x=x)))

    fit = (x > x_m + 1.0) & (x < x_m + 10.0 / z) & (np.abs(values) > 1e-300)
    if fit.sum() >= 2:
        slope = np.polyfit(x[fit], np.log(np.abs(values[fit])), 1)[0]
        decay = float(-slope)
    else:
        decay = float(z)

    return BoundState(
        z=float(z),
        eigenvalue=float(lam),
        x=x,
        values=values,
        quasi_derivative=quasi,
        decay_rate=decay,
        residual=abs(jost_like(pot, z, tol)),
        norm_check=norm_check,
        double_root_suspected=suspect,
    )


def find_bound_states(
    pot: Potential,
    z_range: Tuple[float, float],
    n_scan: int = DEFAULT_N_SCAN,
    tol: float = DEFAULT_TOL,
    dx: float = DEFAULT_DX,
    threads: int = 1,
    quiet: bool = True,
) -> List[BoundState]:
    """
    Locate eigenvalues -z² with z in z_range.

    Scans m(z) on n_scan nodes, brackets sign changes and refines each with
    Brent's method to |Δz| <= 1e-12. Brackets in adjacent scan cells are
    reported as a suspected double root; both are kept.

    Args:
        pot: Coefficients.
        z_range: (z_lo, z_hi), 0 < z_lo < z_hi, inside the admissible window.
        n_scan: Scan nodes, >= 16.
        tol: Integrator tolerance.
        dx: Eigenfunction sample spacing.
        threads: Worker pool for the scan.
        quiet: Suppress progress output.

    Returns:
        Bound states ordered by eigenvalue, ascending.
    """
    z_lo, z_hi = float(z_range[0]), float(z_range[1])
    if not 0 < z_lo < z_hi:
        raise ValueError(f"z_range must satisfy 0 < z_lo < z_hi (got {z_range})")
    if n_scan < 16:
        raise ValueError(f"n_scan must be >= 16, got {n_scan}")
    _check_admissible(pot, z_hi)

    scan = m_scan(pot, np.linspace(z_lo, z_hi, n_scan), tol, threads=threads, quiet=quiet)
    cells = scan.sign_changes()
    suspects = set()
    for i, j in zip(cells, cells[1:]):
        if j - i <= 1:
            suspects.update((i, j))
            if not quiet:
                print(f"  Warning: sign changes near z = {scan.z[i]:.6g} and z = {scan.z[j]:.6g}; "
                      "double root suspected (refine n_scan)")

    roots = []
    for i in cells:
        if scan.m[i] == 0:
            root = float(scan.z[i])
        else:
            root = brentq(lambda v: jost_like(pot, v, tol), scan.z[i], scan.z[i + 1],
                          xtol=ROOT_XTOL, maxiter=200)
        roots.append((root, i in suspects))

    states = parallel_map(
        lambda item: _bound_state(pot, item[0], tol, dx, item[1]),
        roots,
        threads=threads,
        desc="bound states",
        quiet=quiet,
    )
    return sorted(states, key=lambda st: st.eigenvalue)


def admissible_z_range(pot: Potential, z_lo: float, tol: float = DEFAULT_TOL) -> Optional[Tuple[float, float]]:
    """
    z interval that can contain eigenvalues: -z² >= inf q, cut to the decay window.

    Returns None when q >= 0 on the support (no negative spectrum).
    """
    support = max(pot.effective_support(tol), 1.0)
    samples = np.linspace(0.0, support, 4001)
    depth = -float(np.min(pot.q(samples)))
    if depth <= 0:
        return None
    z_hi = 1.001 * np.sqrt(depth) + 1e-3
    if pot.decay_class.kind == EXPONENTIAL:
        z_hi = min(z_hi, 0.499 * pot.decay_class.rate)
    if z_hi <= z_lo:
        return None
    return (float(z_lo), float(z_hi))


@dataclass(frozen=True)
class ZeroEnergyReport:
    """
    Affine fit F(x) ≈ a x + b of the λ = 0 regular solution on the tail.

    not_square_integrable holds whenever (a, b) != (0, 0); a ≈ 0 marks a
    threshold resonance.
    """

    a: float
    b: float
    fit_residual: float
    fit_interval: Tuple[float, float]
    not_square_integrable: bool
    resonance: bool

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "fit_residual": self.fit_residual,
            "fit_interval": list(self.fit_interval),
            "not_square_integrable": self.not_square_integrable,
            "resonance": self.resonance,
        }


def zero_energy_report(pot: Potential, x_max: Optional[float] = None, tol: float = DEFAULT_TOL) -> ZeroEnergyReport:
    """
    Check that λ = 0 is not an eigenvalue.

    Args:
        pot: Coefficients with eventually-constant or exponential decay.
        x_max: End of the fit window; defaults to the support plus 20.
        tol: Integrator tolerance.

    Raises:
        PotentialError: Power-integrable decay (x²-weighted hypothesis unknown).
    """
    if pot.decay_class.kind == POWER_INTEGRABLE:
        raise PotentialError(
            "zero_energy_report needs x² |q| integrability; declare an "
            "eventually-constant or exponential decay class"
        )
    if pot.decay_class.kind == EVENTUALLY_CONSTANT:
        support = float(pot.decay_class.x_cut)
    else:
        support = pot.effective_support(tol)
    if x_max is None:
        x_max = support + 20.0
    lo = support + 2.0 if support + 2.0 < x_max else 0.5 * x_max
    x = np.linspace(lo, x_max, 201)

    ef = regular_eigenfunction(pot, 0.0, x, tol, x_free=min(support, x_max))
    a, b = np.polyfit(x, ef.value, 1)
    residual = float(np.max(np.abs(ef.value - (a * x + b))))
    return ZeroEnergyReport(
        a=float(a),
        b=float(b),
        fit_residual=residual,
        fit_interval=(float(lo), float(x_max)),
        not_square_integrable=bool(abs(a) > tol or abs(b) > tol),
        resonance=bool(abs(a) <= RESONANCE_TOL * (1.0 + abs(b))),
    )


def discrete_spectrum(
    pot: Potential,
    tol: float = DEFAULT_TOL,
    z_lo: float = DEFAULT_Z_LO,
    n_scan: int = DEFAULT_N_SCAN,
    threads: int = 1,
    quiet: bool = True,
) -> List[BoundState]:
    """
    All bound states with z >= z_lo, scanning the admissible z window.

    Power-integrable tails have no admissible window; they are reported
    and skipped.
    """
    if pot.decay_class.kind == POWER_INTEGRABLE:
        if not quiet:
            print("  Warning: bound states skipped for a power-integrable tail")
        return []
    window = admissible_z_range(pot, z_lo, tol)
    if window is None:
        return []
    return find_bound_states(pot, window, n_scan, tol, threads=threads, quiet=quiet)
