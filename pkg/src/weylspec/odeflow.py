"""
First-order flow of the eigenvalue equation D F = λ F.

With u(x) = [F(x), p(x) F'(x)] the equation reads

    u' = (C_λ + Q(x)) u,   C_λ = [[0, 1], [-λ, 0]],

where Q is coeffs.q_matrix. Solutions are integrated with an adaptive
Runge-Kutta 5(4) pair (scipy RK45, dense output) up to the effective
support of Q and continued beyond it with the closed form exp(x C_λ).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .coeffs import Potential
from .errors import NumericalError
from .settings import DEFAULT_TOL

REGULAR_AT_0 = "regular_at_0"
DECAYING_AT_INFINITY = "decaying_at_infinity"

_SERIES_THRESHOLD = 1e-8


def _is_real(value) -> bool:
    return np.isrealobj(value) or np.imag(value) == 0


def _as_spectral(lam):
    """float for real λ, complex otherwise."""
    return float(np.real(lam)) if _is_real(lam) else complex(lam)


def decaying_root(nu) -> complex:
    """Square root of ν on the branch with Im > 0 (principal, flipped if needed)."""
    k = np.sqrt(complex(nu))
    if k.imag < 0:
        k = -k
    return complex(k)


def exp_xC(lam, x) -> np.ndarray:
    """
    Matrix exponential exp(x C_λ) = cosh(x μ) I + sinh(x μ)/μ C_λ, μ^2 = -λ.

    Trigonometric form for λ > 0, hyperbolic for λ < 0, complex otherwise;
    a two-term series is used where |λ| x^2 < 1e-8.

    Args:
        lam: Spectral parameter (real or complex).
        x: Scalar or array of positions.

    Returns:
        Array of shape x.shape + (2, 2); real for real λ.
    """
    lam = _as_spectral(lam)
    x = np.asarray(x, dtype=float)
    small = np.abs(lam) * x * x < _SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)

    if isinstance(lam, float):
        dtype = float
        if lam > 0:
            k = np.sqrt(lam)
            c = np.cos(k * safe)
            s = np.sin(k * safe) / k
        elif lam < 0:
            z = np.sqrt(-lam)
            c = np.cosh(z * safe)
            s = np.sinh(z * safe) / z
        else:
            c = np.ones_like(x)
            s = x.copy()
    else:
        dtype = complex
        mu = np.sqrt(-lam)
        c = np.cosh(mu * safe)
        s = np.sinh(mu * safe) / mu

    c = np.where(small, 1.0 - 0.5 * lam * x * x, c)
    s = np.where(small, x * (1.0 - lam * x * x / 6.0), s)

    out = np.empty(x.shape + (2, 2), dtype=dtype)
    out[..., 0, 0] = c
    out[..., 1, 1] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = -lam * s
    return out


# ---------------------------------------------------------------------- #
#  Integration
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class Trajectory:
    """
    Sampled solution of u' = (C_λ + Q)u.

    Attributes:
        grid: Sample positions (integration order, starting at x0).
        states: Array (n, 2) of [F, pF'] per sample.
        lam: Spectral parameter.
        tol: Local tolerance of the run.
        dense: Dense-output interpolant (scipy OdeSolution).
    """

    grid: np.ndarray
    states: np.ndarray
    lam: complex
    tol: float
    dense: Callable = field(repr=False, compare=False)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.dense(np.asarray(x, dtype=float))).T

    def residual(self, pot: Potential) -> float:
        """
        Relative ODE residual ||u' - (C+Q)u|| / (1 + ||u||) at step midpoints,
        u' taken from central differences of the dense output.
        """
        x = np.sort(self.grid)
        mids = 0.5 * (x[:-1] + x[1:])
        h = 1e-4 * np.diff(x)
        du = (self(mids + h) - self(mids - h)) / (2 * h)[:, None]
        u = self(mids)
        rhs = np.empty_like(du)
        rhs[:, 0] = u[:, 1] / pot.p(mids)
        rhs[:, 1] = (pot.q(mids) - self.lam) * u[:, 0]
        norms = np.linalg.norm(du - rhs, axis=1) / (1.0 + np.linalg.norm(u, axis=1))
        return float(norms.max()) if len(norms) else 0.0


def solve_system(
    pot: Potential,
    lam,
    u0: Sequence,
    x0: float,
    x1: float,
    tol: float = DEFAULT_TOL,
    grid: Optional[Sequence[float]] = None,
) -> Trajectory:
    """
    Integrate u' = (C_λ + Q(x))u from x0 to x1 (x1 < x0 allowed).

    Args:
        pot: Coefficients.
        lam: Spectral parameter.
        u0: Initial state [F(x0), p(x0)F'(x0)].
        x0, x1: Span, x0 != x1.
        tol: Local error per step <= tol * (1 + |u|).
        grid: Optional output positions inside the span (sorted in the
            direction of integration); defaults to the solver steps.

    Returns:
        Trajectory. Real λ with real u0 is integrated in real arithmetic.

    Raises:
        ValueError: tol <= 0 or x0 == x1.
        NumericalError: Step-size underflow or a non-finite state.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if x0 == x1:
        raise ValueError("solve_system needs x0 != x1")

    lam = _as_spectral(lam)
    u0 = np.asarray(u0)
    dtype = float if isinstance(lam, float) and np.isrealobj(u0) else complex
    u0 = u0.astype(dtype)
    p, q = pot.p, pot.q

    def rhs(x, u):
        return np.array([u[1] / float(p(x)), (float(q(x)) - lam) * u[0]], dtype=dtype)

    t_eval = None if grid is None else np.asarray(grid, dtype=float)
    sol = solve_ivp(
        rhs,
        (float(x0), float(x1)),
        u0,
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=True,
        t_eval=t_eval,
    )
    if sol.status < 0:
        where = float(sol.t[-1]) if len(sol.t) else float(x0)
        raise NumericalError(
            f"Integration failed at x = {where:.6g} (λ = {lam}): {sol.message}",
            location=where,
        )
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise NumericalError(f"Non-finite state while integrating at λ = {lam}")
    return Trajectory(grid=sol.t, states=states, lam=lam, tol=tol, dense=sol.sol)


# ---------------------------------------------------------------------- #
#  Eigenfunctions
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class Eigenfunction:
    """
    A λ-eigenfunction of D sampled on a grid.

    Attributes:
        lam: Spectral parameter.
        x: Sample grid.
        value: F at the samples.
        quasi_derivative: p F' at the samples.
        orientation: REGULAR_AT_0 or DECAYING_AT_INFINITY.
        boundary: (F, F') at the left end of the solved range.
    """

    lam: complex
    x: np.ndarray
    value: np.ndarray
    quasi_derivative: np.ndarray
    orientation: str
    boundary: Tuple[complex, complex]
    x_range: Tuple[float, float] = (0.0, np.inf)
    trajectory: Optional[Trajectory] = field(default=None, repr=False, compare=False)
    _state: Callable = field(default=None, repr=False, compare=False)

    def state(self, x) -> np.ndarray:
        """[F, pF'] at arbitrary x in x_range, shape (n, 2)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < self.x_range[0]) or np.any(x > self.x_range[1]):
            raise ValueError(f"x outside the solved range {self.x_range}")
        return self._state(x)

    def __call__(self, x) -> np.ndarray:
        return self.state(x)[:, 0]


def _piecewise_state(dense, x_switch, u_switch, lam, dtype):
    """Numerical dense output up to x_switch, closed-form flow beyond."""

    def state(x):
        out = np.empty((len(x), 2), dtype=dtype)
        inner = x <= x_switch
        if dense is not None and inner.any():
            out[inner] = np.asarray(dense(x[inner])).T
        elif inner.any():
            out[inner] = u_switch
        outer = ~inner
        if outer.any():
            out[outer] = exp_xC(lam, x[outer] - x_switch) @ u_switch
        return out

    return state


def regular_eigenfunction(
    pot: Potential,
    lam,
    grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    x_free: Optional[float] = None,
) -> Eigenfunction:
    """
    The solution F_λ with F(0) = 0, F'(0) = 1, sampled on grid.

    Integrates from u(0) = [0, p(0)] up to x_free and continues with
    exp(x C_λ) beyond, where Q is negligible.

    Args:
        pot: Coefficients.
        lam: Spectral parameter.
        grid: Sample positions, all >= 0.
        tol: Integrator tolerance.
        x_free: Start of the free region; defaults to
            pot.effective_support(tol).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any(grid < 0):
        raise ValueError("regular_eigenfunction grid must lie in [0, inf)")
    lam = _as_spectral(lam)
    dtype = float if isinstance(lam, float) else complex
    if x_free is None:
        x_free = pot.effective_support(tol)
    x_switch = float(x_free)
    u0 = np.array([0.0, float(pot.p(0.0))], dtype=dtype)

    if x_switch > 0:
        traj = solve_system(pot, lam, u0, 0.0, x_switch, tol)
        dense, u_switch = traj.dense, traj.states[-1]
    else:
        traj = None
        x_switch, dense, u_switch = 0.0, None, u0

    state = _piecewise_state(dense, x_switch, u_switch, lam, dtype)
    samples = state(grid)
    return Eigenfunction(
        lam=lam,
        x=grid,
        value=samples[:, 0],
        quasi_derivative=samples[:, 1],
        orientation=REGULAR_AT_0,
        boundary=(0.0, 1.0),
        x_range=(0.0, np.inf),
        trajectory=traj,
        _state=state,
    )


def _decaying_state(pot, dense, x_seed, u_seed, k):
    """Numerical dense output up to x_seed, the pure e^{ikx} mode beyond (quasi-derivative p F')."""

    def state(x):
        out = np.empty((len(x), 2), dtype=complex)
        inner = x <= x_seed
        if dense is not None and inner.any():
            out[inner] = np.asarray(dense(x[inner])).T
        elif inner.any():
            out[inner] = u_seed
        outer = ~inner
        if outer.any():
            wave = u_seed[0] * np.exp(1j * k * (x[outer] - x_seed))
            out[outer, 0] = wave
            out[outer, 1] = 1j * k * np.asarray(pot.p(x[outer]), dtype=float) * wave
        return out

    return state


def decaying_eigenfunction(
    pot: Potential,
    nu,
    grid: Sequence[float],
    x_max: float,
    tol: float = DEFAULT_TOL,
) -> Eigenfunction:
    """
    The solution G_ν proportional to e^{i√ν x} (Im √ν > 0) at infinity.

    Seeded with [e^{i√ν x_s}, i√ν p(x_s) e^{i√ν x_s}] at
    x_s = min(x_max, max(effective support, min(grid))) and integrated
    backward, where G is the dominant solution. Beyond x_s the pure mode
    is used.

    Args:
        pot: Coefficients.
        nu: Spectral parameter off [0, inf).
        grid: Sample positions, all >= 0.
        x_max: Truncation point; the majorant tail past it must be < tol.
        tol: Integrator tolerance.

    Raises:
        ValueError: ν on [0, inf) or a negative grid.
        NumericalError: x_max too small for the tail test.
    """
    nu = complex(nu)
    if nu.imag == 0 and nu.real >= 0:
        raise ValueError(f"decaying solution needs ν off [0, inf), got {nu}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any(grid < 0):
        raise ValueError("decaying_eigenfunction grid must lie in [0, inf)")
    tail = float(pot.tail_integral(x_max))
    if tail >= tol and tail > 0:
        raise NumericalError(
            f"x_max = {x_max} is too small: majorant tail {tail:.3g} >= tol {tol:.3g}",
            location=x_max,
        )

    k = decaying_root(nu)
    x_lo = float(grid.min())
    x_seed = min(float(x_max), max(pot.effective_support(tol), x_lo))
    scale = np.exp(1j * k * x_seed)
    seed = np.array([1.0, 1j * k * float(pot.p(x_seed))], dtype=complex)

    if x_seed > x_lo:
        traj = solve_system(pot, nu, seed, x_seed, x_lo, tol)

        def dense(x):
            return scale * traj.dense(x)
    else:
        dense = None

    state = _decaying_state(pot, dense, x_seed, scale * seed, k)
    samples = state(grid)
    first = state(np.array([x_lo]))[0]
    return Eigenfunction(
        lam=nu,
        x=grid,
        value=samples[:, 0],
        quasi_derivative=samples[:, 1],
        orientation=DECAYING_AT_INFINITY,
        boundary=(first[0], first[1] / float(pot.p(x_lo))),
        x_range=(x_lo, np.inf),
        _state=state,
    )


def wronskian(pot: Potential, f: Eigenfunction, g: Eigenfunction, x):
    """
    w_x(f, g) = -p(x) (f g' - f' g), constant in x for a common λ.

    Raises:
        ValueError: f and g belong to different λ.
    """
    if not np.isclose(f.lam, g.lam, rtol=1e-12, atol=1e-14):
        raise ValueError(f"wronskian needs a common λ (got {f.lam} and {g.lam})")
    scalar = np.ndim(x) == 0
    sf, sg = f.state(x), g.state(x)
    px = pot.p(np.atleast_1d(np.asarray(x, dtype=float)))
    df, dg = sf[:, 1] / px, sg[:, 1] / px
    w = -px * (sf[:, 0] * dg - df * sg[:, 0])
    return complex(w[0]) if scalar else w
