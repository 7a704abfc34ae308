"""
Coefficient functions of the Sturm-Liouville operator

    D = -(d/dx) p(x) (d/dx) + q(x)   on [0, inf)

with p -> 1 and q -> 0 at infinity. A Potential bundles p, p', q with the
declared tail behaviour and a majorant M(x) >= |1 - 1/p| + |q| whose tail
integral is known in closed form; the majorant is what every truncation
decision downstream is based on.

Builtins::

    from weylspec.coeffs import make_builtin_potential

    free = make_builtin_potential("free", [])
    well = make_builtin_potential("capped_well", [1.0, 5.0, 0.1])
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import PotentialError
from .settings import DEFAULT_SMOOTHING, DEFAULT_X_CAP

EVENTUALLY_CONSTANT = "eventually_constant"
EXPONENTIAL = "exponential"
POWER_INTEGRABLE = "power_integrable"

BUILTIN_NAMES = ("free", "capped_well", "exp_decay", "exp_metric")


@dataclass(frozen=True)
class DecayClass:
    """
    Declared tail behaviour of (p, q).

    Attributes:
        kind: One of EVENTUALLY_CONSTANT, EXPONENTIAL, POWER_INTEGRABLE.
        x_cut: For EVENTUALLY_CONSTANT, p = 1 and q = 0 on [x_cut, inf).
        rate: For EXPONENTIAL, the rate α of the e^{-αx} envelope.
    """

    kind: str
    x_cut: Optional[float] = None
    rate: Optional[float] = None

    @classmethod
    def eventually_constant(cls, x_cut: float) -> "DecayClass":
        return cls(EVENTUALLY_CONSTANT, x_cut=float(x_cut))

    @classmethod
    def exponential(cls, rate: float) -> "DecayClass":
        return cls(EXPONENTIAL, rate=float(rate))

    @classmethod
    def power_integrable(cls) -> "DecayClass":
        return cls(POWER_INTEGRABLE)

    def describe(self) -> str:
        if self.kind == EVENTUALLY_CONSTANT:
            return f"EventuallyConstant({self.x_cut:g})"
        if self.kind == EXPONENTIAL:
            return f"Exponential({self.rate:g})"
        return "PowerIntegrable"


@dataclass(frozen=True)
class Potential:
    """
    Immutable coefficient data defining D.

    All callables accept scalars or numpy arrays.

    Attributes:
        p: Leading coefficient, p(x) > 0.
        p_prime: Derivative of p.
        q: Potential term.
        decay_class: Declared tail behaviour.
        tail_majorant: M(x) >= |1 - 1/p(x)| + |q(x)| for x >= 1.
        tail_integral: Closed form of the integral of M over [x, inf).
        name: Builtin name or "custom" / "tabulated".
        params: Construction parameters, echoed in manifests.
    """

    p: Callable
    p_prime: Callable
    q: Callable
    decay_class: DecayClass
    tail_majorant: Callable
    tail_integral: Callable
    name: str = "custom"
    params: tuple = ()
    _support_cache: Dict[tuple, float] = field(
        default_factory=dict, repr=False, compare=False
    )

    def q_norm(self, x):
        """Hilbert-Schmidt norm of the perturbation matrix Q(x)."""
        x = np.asarray(x, dtype=float)
        return np.hypot(1.0 / self.p(x) - 1.0, self.q(x))

    def effective_support(self, tol: float, cap: float = DEFAULT_X_CAP) -> float:
        """
        Smallest x (up to bisection accuracy) with tail_integral(x) <= tol.

        Beyond this point the operator is treated as free. For
        eventually-constant coefficients this is exactly x_cut.
        """
        if self.decay_class.kind == EVENTUALLY_CONSTANT:
            return float(self.decay_class.x_cut)
        key = (tol, cap)
        if key in self._support_cache:
            return self._support_cache[key]

        lo, hi = 0.0, 1.0
        if float(self.tail_integral(0.0)) <= tol:
            self._support_cache[key] = 0.0
            return 0.0
        while float(self.tail_integral(hi)) > tol:
            lo, hi = hi, 2.0 * hi
            if hi > cap:
                self._support_cache[key] = float(cap)
                return float(cap)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if float(self.tail_integral(mid)) > tol:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-6 * max(1.0, hi):
                break
        self._support_cache[key] = hi
        return hi

    # ------------------------------------------------------------------ #
    #  Tabulated coefficients
    # ------------------------------------------------------------------ #

    @classmethod
    def tabulated(
        cls,
        x: Sequence[float],
        p: Sequence[float],
        q: Sequence[float],
        end_tol: float = 1e-6,
    ) -> "Potential":
        """
        Build coefficients from samples by cubic-spline interpolation.

        The samples must start at x = 0 and end where p = 1 and q = 0;
        beyond the last node the operator is free. The tail majorant is the
        running supremum of |1 - 1/p| + |q| on a 10x refined grid.

        Raises:
            PotentialError: On non-monotone x, mismatched lengths, p <= 0,
                or samples that do not reach the free values.
        """
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if x.ndim != 1 or x.shape != p.shape or x.shape != q.shape:
            raise PotentialError("tabulated x, p, q must be 1-d and of equal length")
        if len(x) < 4:
            raise PotentialError("tabulated coefficients need at least 4 nodes")
        if np.any(np.diff(x) <= 0):
            raise PotentialError("tabulated x must be strictly increasing")
        if x[0] != 0.0:
            raise PotentialError(f"tabulated x must start at 0, got {x[0]}")
        if np.any(p <= 0):
            bad = x[np.argmax(p <= 0)]
            raise PotentialError(f"tabulated p must be positive (p <= 0 at x={bad})")
        if abs(p[-1] - 1.0) > end_tol or abs(q[-1]) > end_tol:
            raise PotentialError(
                "tabulated coefficients must reach p = 1 and q = 0 at the "
                f"last node (got p={p[-1]}, q={q[-1]} at x={x[-1]})"
            )

        x_last = float(x[-1])
        p_spline = CubicSpline(x, p)
        dp_spline = p_spline.derivative()
        q_spline = CubicSpline(x, q)

        def p_fn(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= x_last, 1.0, p_spline(np.minimum(t, x_last)))

        def dp_fn(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= x_last, 0.0, dp_spline(np.minimum(t, x_last)))

        def q_fn(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= x_last, 0.0, q_spline(np.minimum(t, x_last)))

        fine = np.linspace(0.0, x_last, 10 * (len(x) - 1) + 1)
        vals = np.abs(1.0 - 1.0 / p_spline(fine)) + np.abs(q_spline(fine))
        running_sup = 1.05 * np.maximum.accumulate(vals[::-1])[::-1] + 1e-12
        cell = running_sup[:-1] * np.diff(fine)
        tail_at_node = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])

        def majorant(t):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(fine, t, side="right") - 1, 0, len(fine) - 2)
            return np.where(t >= x_last, 0.0, running_sup[idx])

        def tail(t):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(fine, t, side="right") - 1, 0, len(fine) - 2)
            inside = tail_at_node[idx] - running_sup[idx] * (t - fine[idx])
            return np.where(t >= x_last, 0.0, inside)

        return cls(
            p=p_fn,
            p_prime=dp_fn,
            q=q_fn,
            decay_class=DecayClass.eventually_constant(x_last),
            tail_majorant=majorant,
            tail_integral=tail,
            name="tabulated",
            params=(len(x),),
        )


# ---------------------------------------------------------------------- #
#  Builtins
# ---------------------------------------------------------------------- #


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _free() -> Potential:
    return Potential(
        p=_ones,
        p_prime=_zeros,
        q=_zeros,
        decay_class=DecayClass.eventually_constant(0.0),
        tail_majorant=_zeros,
        tail_integral=_zeros,
        name="free",
        params=(),
    )


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _capped_well(depth: float, width: float, smoothing: float) -> Potential:
    if depth <= 0 or width <= 0 or smoothing <= 0:
        raise PotentialError(
            f"capped_well needs V0 > 0, l > 0, w > 0 (got {depth}, {width}, {smoothing})"
        )
    if smoothing >= 2.0 * width:
        raise PotentialError("capped_well ramp width w must be smaller than 2*l")

    start = width - 0.5 * smoothing
    x_cut = width + 0.5 * smoothing

    def q(x):
        x = np.asarray(x, dtype=float)
        return -depth * (1.0 - _smoothstep((x - start) / smoothing))

    def majorant(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < x_cut, depth, 0.0)

    def tail(x):
        x = np.asarray(x, dtype=float)
        return depth * np.maximum(x_cut - x, 0.0)

    return Potential(
        p=_ones,
        p_prime=_zeros,
        q=q,
        decay_class=DecayClass.eventually_constant(x_cut),
        tail_majorant=majorant,
        tail_integral=tail,
        name="capped_well",
        params=(depth, width, smoothing),
    )


def _exp_decay(strength: float, rate: float) -> Potential:
    if rate <= 0:
        raise PotentialError(f"exp_decay needs rate > 0 (got {rate})")

    def q(x):
        return -strength * np.exp(-rate * np.asarray(x, dtype=float))

    def majorant(x):
        return abs(strength) * np.exp(-rate * np.asarray(x, dtype=float))

    def tail(x):
        return abs(strength) * np.exp(-rate * np.asarray(x, dtype=float)) / rate

    return Potential(
        p=_ones,
        p_prime=_zeros,
        q=q,
        decay_class=DecayClass.exponential(rate),
        tail_majorant=majorant,
        tail_integral=tail,
        name="exp_decay",
        params=(strength, rate),
    )


def _exp_metric(amplitude: float, rate: float) -> Potential:
    if rate <= 0:
        raise PotentialError(f"exp_metric needs rate > 0 (got {rate})")
    if amplitude <= -1.0:
        raise PotentialError(f"exp_metric needs a > -1 so that p > 0 (got {amplitude})")

    scale = abs(amplitude) / min(1.0, 1.0 + amplitude)

    def p(x):
        return 1.0 + amplitude * np.exp(-rate * np.asarray(x, dtype=float))

    def dp(x):
        return -amplitude * rate * np.exp(-rate * np.asarray(x, dtype=float))

    def majorant(x):
        return scale * np.exp(-rate * np.asarray(x, dtype=float))

    def tail(x):
        return scale * np.exp(-rate * np.asarray(x, dtype=float)) / rate

    return Potential(
        p=p,
        p_prime=dp,
        q=_zeros,
        decay_class=DecayClass.exponential(rate),
        tail_majorant=majorant,
        tail_integral=tail,
        name="exp_metric",
        params=(amplitude, rate),
    )


def make_builtin_potential(name: str, params: Sequence[float] = ()) -> Potential:
    """
    Construct one of the builtin test potentials.

    Args:
        name: "free", "capped_well", "exp_decay" or "exp_metric".
        params: free: []; capped_well: [V0, l] or [V0, l, w];
            exp_decay: [g, α] (q = -g e^{-αx});
            exp_metric: [a, α] (p = 1 + a e^{-αx}).

    Returns:
        Potential with mutually consistent p, p', q and tail majorant.

    Raises:
        PotentialError: Unknown name, wrong parameter count or invalid values.
    """
    params = [float(v) for v in params]
    if name == "free":
        if params:
            raise PotentialError("free takes no parameters")
        return _free()
    if name == "capped_well":
        if len(params) == 2:
            params.append(DEFAULT_SMOOTHING)
        if len(params) != 3:
            raise PotentialError("capped_well takes [V0, l] or [V0, l, w]")
        return _capped_well(*params)
    if name == "exp_decay":
        if len(params) != 2:
            raise PotentialError("exp_decay takes [g, alpha]")
        return _exp_decay(*params)
    if name == "exp_metric":
        if len(params) != 2:
            raise PotentialError("exp_metric takes [a, alpha]")
        return _exp_metric(*params)
    raise PotentialError(
        f"Unknown potential '{name}'. Builtins: {', '.join(BUILTIN_NAMES)}"
    )


# ---------------------------------------------------------------------- #
#  Hypotheses
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class DecayReport:
    """
    Numerical check of the asymptotic hypotheses on (p, q).

    Integrals are over [1, inf): sampled part plus the majorant tail.
    """

    x_end: float
    p_limit: float
    q_limit: float
    p_prime_limit: float
    int_one_minus_p_inv: float
    int_q: float
    checks: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "x_end": self.x_end,
            "p_limit": self.p_limit,
            "q_limit": self.q_limit,
            "p_prime_limit": self.p_prime_limit,
            "int_one_minus_p_inv": self.int_one_minus_p_inv,
            "int_q": self.int_q,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def validate_hypotheses(
    pot: Potential,
    x_grid: Sequence[float],
    limit_tol: float = 1e-3,
) -> DecayReport:
    """
    Check positivity of p, the majorant, the limits and the integrability
    of |1 - 1/p| and |q| on a sample grid.

    Args:
        pot: Coefficients to check.
        x_grid: Strictly increasing grid covering [0, X] with X >= 10.
        limit_tol: Allowed distance of p, q, p' from 1, 0, 0 at X.

    Returns:
        DecayReport with per-hypothesis pass flags.

    Raises:
        ValueError: Probe grid not increasing or too short.
        PotentialError: p <= 0 at a sample point, or the majorant is violated.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or len(x) < 3 or np.any(np.diff(x) <= 0):
        raise ValueError("x_grid must be a strictly increasing grid of >= 3 points")
    if x[0] > 0.0 or x[-1] < 10.0:
        raise ValueError(f"x_grid must cover [0, X] with X >= 10 (got [{x[0]}, {x[-1]}])")

    p = np.asarray(pot.p(x), dtype=float)
    if np.any(p <= 0):
        bad = x[np.argmax(p <= 0)]
        raise PotentialError(f"p(x) <= 0 at x = {bad}")
    q = np.asarray(pot.q(x), dtype=float)
    dp = np.asarray(pot.p_prime(x), dtype=float)

    gap_p = np.abs(1.0 - 1.0 / p)
    gap_q = np.abs(q)
    tail_region = x >= 1.0
    bound = np.asarray(pot.tail_majorant(x[tail_region]), dtype=float)
    excess = gap_p[tail_region] + gap_q[tail_region] - bound
    if np.any(excess > 1e-12 * (1.0 + bound)):
        bad = x[tail_region][np.argmax(excess)]
        raise PotentialError(f"tail_majorant is violated at x = {bad}")

    x_end = float(x[-1])
    xt = x[tail_region]
    tail = float(pot.tail_integral(x_end))
    if len(xt) >= 2:
        int_p = float(simpson(gap_p[tail_region], x=xt)) + tail
        int_q = float(simpson(gap_q[tail_region], x=xt)) + tail
    else:
        int_p = int_q = tail

    checks = {
        "p_positive": True,
        "p_limit": bool(abs(p[-1] - 1.0) <= limit_tol),
        "q_limit": bool(abs(q[-1]) <= limit_tol),
        "p_prime_limit": bool(abs(dp[-1]) <= limit_tol),
        "p_integrable": bool(np.isfinite(int_p)),
        "q_integrable": bool(np.isfinite(int_q)),
    }
    return DecayReport(
        x_end=x_end,
        p_limit=float(p[-1]),
        q_limit=float(q[-1]),
        p_prime_limit=float(dp[-1]),
        int_one_minus_p_inv=int_p,
        int_q=int_q,
        checks=checks,
    )


def q_matrix(pot: Potential, x) -> np.ndarray:
    """
    Perturbation matrix Q(x) = [[0, 1/p(x) - 1], [q(x), 0]].

    For array x the result has shape x.shape + (2, 2).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("q_matrix is defined for x >= 0")
    out = np.zeros(x.shape + (2, 2))
    out[..., 0, 1] = 1.0 / pot.p(x) - 1.0
    out[..., 1, 0] = pot.q(x)
    return out
