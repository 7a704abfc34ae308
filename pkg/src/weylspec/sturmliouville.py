"""
SturmLiouville - one operator D = -(d/dx) p (d/dx) + q on [0, inf) with
its numeric settings, exposing every spectral workflow as a method.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import asymptotics, boundstates, green, spectral
from .coeffs import (
    DecayReport,
    Potential,
    make_builtin_potential,
    validate_hypotheses,
)
from .errors import PotentialError
from .grids import SampledFunction
from .settings import NumericConfig, resolve_threads


class SturmLiouville:
    """
    A Sturm-Liouville operator bound to its numeric settings.

    Quick start::

        from weylspec import SturmLiouville

        op = SturmLiouville.from_spec({"name": "capped_well", "params": [1.0, 5.0, 0.1]})
        op.density(4.0)
        op.bound_states()

    For lower-level control, pass a Potential directly::

        op = SturmLiouville(make_builtin_potential("free"), numeric=NumericConfig(tol=1e-9))
    """

    # ------------------------------------------------------------------ #
    #  Construction
    # ------------------------------------------------------------------ #

    def __init__(
        self,
        potential: Potential,
        numeric: Optional[NumericConfig] = None,
        threads: int = 1,
        quiet: bool = True,
    ):
        """
        Args:
            potential: Coefficients of D.
            numeric: Tolerances, λ window and grids; defaults if None.
            threads: Worker pool size for λ / z / t sweeps.
            quiet: Suppress progress bars and warnings.
        """
        self.potential = potential
        self.numeric = numeric or NumericConfig()
        self.threads = max(1, int(threads))
        self.quiet = quiet
        self._bound_states: Optional[List[boundstates.BoundState]] = None

    @classmethod
    def from_spec(
        cls,
        spec: Dict[str, Any],
        numeric: Optional[NumericConfig] = None,
        threads: Optional[int] = None,
        quiet: bool = True,
    ) -> "SturmLiouville":
        """
        Build from a potential spec and check the hypotheses on (p, q).

        Args:
            spec: {"name": ..., "params": [...]} for a builtin, or
                {"tabulated": {"x": [...], "p": [...], "q": [...]}}.
            numeric: Numeric settings.
            threads: Pool size; None reads WEYLSPEC_THREADS, 0 means auto.
            quiet: Suppress status lines.

        Returns:
            SturmLiouville instance.

        Raises:
            PotentialError: Unknown builtin, bad parameters or a failed hypothesis.
        """
        if "tabulated" in spec:
            tab = spec["tabulated"]
            potential = Potential.tabulated(tab["x"], tab["p"], tab["q"])
        else:
            potential = make_builtin_potential(spec["name"], spec.get("params", []))
        op = cls(potential, numeric=numeric, threads=resolve_threads(threads), quiet=quiet)
        report = op.validate()
        if not report.passed:
            failed = [name for name, ok in report.checks.items() if not ok]
            raise PotentialError(
                f"Coefficients fail the decay hypotheses: {', '.join(failed)}\n"
                f"  p -> {report.p_limit:.6g}, q -> {report.q_limit:.6g}, "
                f"p' -> {report.p_prime_limit:.6g} at x = {report.x_end:g}"
            )
        if not quiet:
            label = potential.name if not potential.params else f"{potential.name}{tuple(potential.params)}"
            print(f"Potential: {label}, {potential.decay_class.describe()}")
            print(f"Hypotheses: ok (checked to x = {report.x_end:g})")
            print(f"Threads: {op.threads}")
        return op

    def __repr__(self):
        return f"SturmLiouville({self.potential.name}, {self.potential.decay_class.describe()})"

    @property
    def tol(self) -> float:
        return self.numeric.tol

    @property
    def _kw(self) -> dict:
        return {"threads": self.threads, "quiet": self.quiet}

    def validate(self, x_end: Optional[float] = None) -> DecayReport:
        """Hypothesis check on a uniform grid up to max(20, 2 x support)."""
        if x_end is None:
            x_end = max(20.0, 2.0 * self.potential.effective_support(self.tol, cap=self.numeric.x_cap))
        return validate_hypotheses(self.potential, np.linspace(0.0, x_end, 4001))

    # ------------------------------------------------------------------ #
    #  Asymptotics
    # ------------------------------------------------------------------ #

    def k_tail(self, window: Tuple[float, float], x: float) -> float:
        return asymptotics.k_tail(self.potential, window, x)

    def s_infinity(self, lam: float) -> asymptotics.AsymptoticLimit:
        return asymptotics.s_infinity(self.potential, lam, self.tol, self.numeric.x_cap,
                                      self.numeric.lambda_min)

    def c_function(self, lam: float) -> asymptotics.ScatteringPoint:
        return asymptotics.c_function(self.potential, lam, self.tol, self.numeric.x_cap,
                                      self.numeric.lambda_min)

    def density(self, lam: float) -> float:
        return self.c_function(lam).density

    def density_sweep(self, lambdas: Optional[Sequence[float]] = None) -> List[asymptotics.ScatteringPoint]:
        lambdas = self.numeric.lambda_grid if lambdas is None else lambdas
        return asymptotics.density_sweep(self.potential, lambdas, self.tol,
                                         x_cap=self.numeric.x_cap,
                                         lambda_min=self.numeric.lambda_min, **self._kw)

    # ------------------------------------------------------------------ #
    #  Resolvent
    # ------------------------------------------------------------------ #

    def green_kernel(self, nu, x: float, y: float) -> green.GreenKernelSample:
        return green.green_kernel(self.potential, nu, x, y, self.tol)

    def apply_resolvent(self, nu, h: SampledFunction) -> SampledFunction:
        return green.apply_resolvent(self.potential, nu, h, self.tol)

    def kodaira_pairing(self, alpha, beta, epsilon, g, h) -> green.ProjectionReport:
        return green.kodaira_pairing(self.potential, alpha, beta, epsilon, g, h, self.tol, **self._kw)

    def limit_kernel(self, lam: float, x: float, y: float) -> float:
        return green.limit_kernel(self.potential, lam, x, y, self.tol,
                                  lambda_min=self.numeric.lambda_min)

    # ------------------------------------------------------------------ #
    #  Expansion
    # ------------------------------------------------------------------ #

    def weyl_pairing(self, alpha, beta, g, h) -> green.ProjectionReport:
        return spectral.weyl_pairing(self.potential, alpha, beta, g, h, self.tol,
                                     lambda_min=self.numeric.lambda_min, **self._kw)

    def projection_kernel(self, alpha, beta, x, y) -> float:
        return spectral.projection_kernel(self.potential, alpha, beta, x, y, self.tol,
                                          lambda_min=self.numeric.lambda_min)

    def project(self, alpha, beta, h, x_eval,
                quad_tol: float = spectral.EXPANSION_QUAD_TOL) -> SampledFunction:
        return spectral.project(self.potential, alpha, beta, h, x_eval, self.tol,
                                lambda_min=self.numeric.lambda_min, quad_tol=quad_tol, **self._kw)

    def projection_tail(self, alpha, beta, h, x_from: float) -> spectral.ProjectionTail:
        return spectral.projection_tail(self.potential, alpha, beta, h, x_from, self.tol,
                                        lambda_min=self.numeric.lambda_min)

    def transform(self, h: SampledFunction, lambdas: Optional[Sequence[float]] = None) -> spectral.TransformResult:
        lambdas = self.numeric.lambda_grid if lambdas is None else lambdas
        return spectral.transform(self.potential, h, lambdas, self.tol,
                                  bound_states=self.bound_states(),
                                  lambda_min=self.numeric.lambda_min, **self._kw)

    def reconstruct(self, h: SampledFunction, x_eval=None,
                    include_bound_states: bool = True) -> spectral.ReconstructionResult:
        states = self.bound_states() if include_bound_states else []
        return spectral.reconstruct(self.potential, h, x_eval, self.numeric.lambda_max, self.tol,
                                    bound_states=states,
                                    include_bound_states=include_bound_states,
                                    lambda_min=self.numeric.lambda_min,
                                    lambda_cap=self.numeric.lambda_cap, **self._kw)

    def parseval(self, h: SampledFunction) -> spectral.ParsevalReport:
        return spectral.parseval_check(self.potential, h, self.numeric.lambda_max, self.tol,
                                       bound_states=self.bound_states(),
                                       lambda_min=self.numeric.lambda_min, **self._kw)

    def time_average(self, phi: spectral.BumpWindow, g, h,
                     t_grid: Optional[Sequence[float]] = None) -> spectral.TimeAverageReport:
        t_grid = self.numeric.t_grid if t_grid is None else t_grid
        return spectral.time_average_check(self.potential, phi, g, h, t_grid, self.tol,
                                           dx=self.numeric.dx,
                                           lambda_min=self.numeric.lambda_min, **self._kw)

    # ------------------------------------------------------------------ #
    #  Discrete spectrum
    # ------------------------------------------------------------------ #

    def bound_states(self, z_range: Optional[Tuple[float, float]] = None) -> List[boundstates.BoundState]:
        """
        Bound states, cached for the default search.

        Without z_range the whole admissible window above
        numeric.z_range[0] is scanned.
        """
        if z_range is not None:
            return boundstates.find_bound_states(self.potential, z_range, self.numeric.n_scan,
                                                 self.tol, dx=self.numeric.dx, **self._kw)
        if self._bound_states is None:
            self._bound_states = boundstates.discrete_spectrum(
                self.potential, self.tol, z_lo=self.numeric.z_range[0],
                n_scan=self.numeric.n_scan, **self._kw,
            )
        return self._bound_states

    def m_scan(self, z_grid: Sequence[float]) -> boundstates.MScan:
        return boundstates.m_scan(self.potential, z_grid, self.tol, **self._kw)

    def zero_energy(self) -> boundstates.ZeroEnergyReport:
        return boundstates.zero_energy_report(self.potential, tol=self.tol)
