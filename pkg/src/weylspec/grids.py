"""
Sampled functions on uniform grids and the smooth test data used by the
projection, reconstruction and Parseval workflows.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .settings import DEFAULT_DX

GAUSSIAN_CUTOFF = 8.0


@dataclass(frozen=True)
class SampledFunction:
    """
    Function values on a strictly increasing grid; zero outside it.

    Attributes:
        x: Grid.
        y: Values (real or complex).
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("SampledFunction needs 1-d x and y of equal length")
        if len(x) < 3 or np.any(np.diff(x) <= 0):
            raise ValueError("SampledFunction grid must be strictly increasing (>= 3 points)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.x)

    @property
    def hull(self):
        return float(self.x[0]), float(self.x[-1])

    def integrate(self, weights=None) -> complex:
        """Composite Simpson integral of y (times optional weights)."""
        values = self.y if weights is None else self.y * weights
        return simpson(values, x=self.x)

    def inner(self, values) -> complex:
        """<self, f> = integral of conj(self) * f, f sampled on the same grid."""
        return simpson(np.conj(self.y) * values, x=self.x)

    def norm_sq(self) -> float:
        return float(np.real(simpson(np.abs(self.y) ** 2, x=self.x)))

    def is_zero(self) -> bool:
        return not np.any(self.y)

    def scaled(self, factor) -> "SampledFunction":
        return SampledFunction(self.x, factor * self.y)

    def shifted(self, t: float) -> "SampledFunction":
        """Forward translate: (U_t f)(x) = f(x - t)."""
        return SampledFunction(self.x + t, self.y)

    def resample(self, x) -> "SampledFunction":
        """Linear interpolation onto x; zero outside the hull."""
        x = np.asarray(x, dtype=float)
        if len(x) == len(self.x) and np.array_equal(x, self.x):
            return self
        if np.iscomplexobj(self.y):
            y = (np.interp(x, self.x, self.y.real, left=0.0, right=0.0)
                 + 1j * np.interp(x, self.x, self.y.imag, left=0.0, right=0.0))
        else:
            y = np.interp(x, self.x, self.y, left=0.0, right=0.0)
        return SampledFunction(x, y)

    def restricted(self) -> "SampledFunction":
        """Restriction to [0, inf) (the map W)."""
        keep = self.x >= 0.0
        if keep.sum() < 3:
            x = np.linspace(0.0, 1.0, 3)
            return SampledFunction(x, np.zeros(3))
        return SampledFunction(self.x[keep], self.y[keep])


def uniform_grid(lo: float, hi: float, dx: float = DEFAULT_DX) -> np.ndarray:
    """Uniform grid with spacing close to dx and an odd number of points."""
    if hi <= lo:
        raise ValueError(f"empty grid [{lo}, {hi}]")
    n = int(np.ceil((hi - lo) / dx))
    n += n % 2
    return np.linspace(lo, hi, n + 1)


def gaussian(center: float, sigma: float, dx: float = DEFAULT_DX,
             half_line: bool = True) -> SampledFunction:
    """
    Gaussian exp(-(x - center)^2 / (2 sigma^2)) truncated at 8 sigma.

    With half_line=True the grid is clipped to [0, inf).
    """
    lo = center - GAUSSIAN_CUTOFF * sigma
    hi = center + GAUSSIAN_CUTOFF * sigma
    if half_line:
        lo = max(lo, 0.0)
    x = uniform_grid(lo, hi, dx)
    return SampledFunction(x, np.exp(-0.5 * ((x - center) / sigma) ** 2))


def smooth_bump(center: float, radius: float, dx: float = DEFAULT_DX) -> SampledFunction:
    """C-infinity bump exp(-1 / (1 - t^2)), t = (x - center) / radius."""
    x = uniform_grid(center - radius, center + radius, dx)
    t = (x - center) / radius
    y = np.zeros_like(x)
    inside = np.abs(t) < 1.0
    y[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return SampledFunction(x, y)


def union_grid(*functions: SampledFunction, dx: Optional[float] = None) -> np.ndarray:
    """
    Shared grid for several sampled functions.

    Identical grids are returned unchanged; otherwise a uniform grid over
    the union of the hulls with the finest spacing found (or dx).
    """
    first = functions[0].x
    if all(len(f.x) == len(first) and np.array_equal(f.x, first) for f in functions[1:]):
        return first
    lo = min(f.hull[0] for f in functions)
    hi = max(f.hull[1] for f in functions)
    if dx is None:
        dx = min(float(np.min(np.diff(f.x))) for f in functions)
    return uniform_grid(lo, hi, dx)


def zero_like(f: SampledFunction) -> SampledFunction:
    return SampledFunction(f.x, np.zeros_like(f.y))


def _differences(y: np.ndarray, h: float, stride: int):
    """Five-point f' and f'' with node spacing stride * h, on y[2*stride:-2*stride]."""
    n = len(y)
    a, b, c, d, e = (y[j * stride:n - (4 - j) * stride] for j in range(5))
    step = stride * h
    d1 = (a - 8 * b + 8 * d - e) / (12 * step)
    d2 = (-a + 16 * b - 30 * c + 16 * d - e) / (12 * step * step)
    return d1, d2


def apply_operator(pot, lam, f: SampledFunction, extrapolate: bool = False) -> np.ndarray:
    """
    (D - lam) f on interior nodes by fourth-order central differences.

    D f = -(p f')' + q f = -p f'' - p' f' + q f. Returns an array of
    len(f) - 4 values for nodes f.x[2:-2]; the grid must be uniform.

    With extrapolate, the h and 2h stencils are combined as (16 D_h - D_2h) / 15,
    which cancels the h⁴ term; values are then for f.x[4:-4].
    """
    x, y = f.x, f.y
    h = x[1] - x[0]
    d1, d2 = _differences(y, h, 1)
    trim = 2
    if extrapolate:
        c1, c2 = _differences(y, h, 2)
        d1 = (16 * d1[2:-2] - c1) / 15
        d2 = (16 * d2[2:-2] - c2) / 15
        trim = 4
    xi = x[trim:-trim]
    return -pot.p(xi) * d2 - pot.p_prime(xi) * d1 + (pot.q(xi) - lam) * y[trim:-trim]


def sample_data(kind: str, center: float, width: float, dx: float = DEFAULT_DX) -> SampledFunction:
    """Test data for the expansion tasks: "gaussian" (sigma = width) or "bump" (radius = width)."""
    if kind == "gaussian":
        return gaussian(center, width, dx)
    if kind == "bump":
        if center - width < 0:
            raise ValueError(f"bump [{center - width:g}, {center + width:g}] leaves [0, inf)")
        return smooth_bump(center, width, dx)
    raise ValueError(f"Unknown data kind '{kind}'")


def smooth_nodes(pot, x: np.ndarray, rel: float = 1e-6, extrapolate: bool = False) -> np.ndarray:
    """
    Mask over x[2:-2] of nodes whose five-point stencil sees smooth p and q.

    A fourth difference above rel * (1 + max|coefficient|) marks a jump in a
    low derivative (a C1 ramp, a spline knot) inside the stencil. With
    extrapolate the mask is over x[4:-4] and covers the 2h stencil.
    """
    x = np.asarray(x, dtype=float)
    ok = np.ones(len(x) - 4, dtype=bool)
    for fn in (pot.p, pot.q):
        v = np.asarray(fn(x), dtype=float)
        d4 = np.abs(np.diff(v, 4))
        ok &= d4 <= rel * (1.0 + float(np.max(np.abs(v))))
    if extrapolate:
        ok = np.lib.stride_tricks.sliding_window_view(ok, 5).all(axis=1)
    return ok
