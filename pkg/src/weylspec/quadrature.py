"""
Adaptive composite Gauss-Legendre quadrature with error estimates.

Each panel is integrated with an n-point Gauss-Legendre rule and compared
with the same rule on its two halves; the panel with the largest
discrepancy is bisected until the summed discrepancy meets the tolerance.
Integrands may be vector valued (numpy arrays); errors use the max norm.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional

import numpy as np
from scipy.special import roots_legendre

DEFAULT_ORDER = 10
DEFAULT_MAX_PANELS = 256


@lru_cache(maxsize=16)
def _rule(order: int):
    nodes, weights = roots_legendre(order)
    return nodes, weights


@dataclass
class QuadratureResult:
    """
    Outcome of an adaptive quadrature.

    Attributes:
        value: Integral estimate (scalar or array).
        error: Summed panel discrepancy.
        nodes: Abscissae of the final composite rule, ascending.
        weights: Matching weights.
        values: Integrand values at nodes (first axis = node).
        panels: Number of final panels.
        evaluations: Total integrand evaluations.
        converged: Whether the tolerance was met.
    """

    value: np.ndarray
    error: float
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    panels: int
    evaluations: int
    converged: bool


class _Panel:
    __slots__ = ("lo", "hi", "whole", "halves", "nodes", "weights", "values", "error")

    def __init__(self, lo, hi, whole):
        self.lo = lo
        self.hi = hi
        self.whole = whole


def _norm(v) -> float:
    return float(np.max(np.abs(v))) if np.ndim(v) else float(abs(v))


def gauss_legendre(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-8,
    rtol: float = 1e-8,
    order: int = DEFAULT_ORDER,
    initial_panels: int = 2,
    max_panels: int = DEFAULT_MAX_PANELS,
    mapper: Optional[Callable] = None,
) -> QuadratureResult:
    """
    Integrate f over [a, b].

    Args:
        f: Integrand of one float; may return an array.
        a, b: Limits, a < b.
        tol, rtol: Stop when error <= max(tol, rtol * |value|).
        order: Points of the Gauss-Legendre rule per panel.
        initial_panels: Uniform panels before adaptation.
        max_panels: Adaptation stops (converged=False) past this count.
        mapper: map-like callable used to evaluate a batch of nodes,
            e.g. sweep.ordered_mapper(threads). Defaults to builtin map.

    Returns:
        QuadratureResult.
    """
    if not b > a:
        raise ValueError(f"quadrature needs a < b (got [{a}, {b}])")
    t, w = _rule(order)
    run = mapper or map
    evaluations = 0

    def evaluate(intervals):
        nonlocal evaluations
        xs = []
        for lo, hi in intervals:
            xs.extend(0.5 * (hi + lo) + 0.5 * (hi - lo) * t)
        vals = list(run(f, xs))
        evaluations += len(xs)
        out = []
        for i, (lo, hi) in enumerate(intervals):
            block = np.asarray(vals[i * order:(i + 1) * order])
            nodes = np.asarray(xs[i * order:(i + 1) * order])
            weights = 0.5 * (hi - lo) * w
            integral = np.tensordot(weights, block, axes=(0, 0))
            out.append((integral, nodes, weights, block))
        return out

    def refine(panels: List[_Panel]):
        mids = [0.5 * (pn.lo + pn.hi) for pn in panels]
        halves = []
        for pn, mid in zip(panels, mids):
            halves.extend([(pn.lo, mid), (mid, pn.hi)])
        results = evaluate(halves)
        for i, pn in enumerate(panels):
            left, right = results[2 * i], results[2 * i + 1]
            pn.halves = (left[0], right[0])
            pn.nodes = np.concatenate([left[1], right[1]])
            pn.weights = np.concatenate([left[2], right[2]])
            pn.values = np.concatenate([left[3], right[3]])
            pn.error = _norm(left[0] + right[0] - pn.whole)

    edges = np.linspace(a, b, initial_panels + 1)
    first = evaluate(list(zip(edges[:-1], edges[1:])))
    panels = [_Panel(lo, hi, r[0]) for (lo, hi), r in zip(zip(edges[:-1], edges[1:]), first)]
    refine(panels)

    converged = False
    while True:
        value = sum(pn.halves[0] + pn.halves[1] for pn in panels)
        error = sum(pn.error for pn in panels)
        if error <= max(tol, rtol * _norm(value)):
            converged = True
            break
        if len(panels) >= max_panels:
            break
        worst = max(range(len(panels)), key=lambda i: panels[i].error)
        pn = panels.pop(worst)
        mid = 0.5 * (pn.lo + pn.hi)
        children = [_Panel(pn.lo, mid, pn.halves[0]), _Panel(mid, pn.hi, pn.halves[1])]
        refine(children)
        panels.extend(children)

    panels.sort(key=lambda pn: pn.lo)
    return QuadratureResult(
        value=value,
        error=float(error),
        nodes=np.concatenate([pn.nodes for pn in panels]),
        weights=np.concatenate([pn.weights for pn in panels]),
        values=np.concatenate([pn.values for pn in panels]),
        panels=len(panels),
        evaluations=evaluations,
        converged=converged,
    )


def matched_tolerance(tol: float) -> float:
    """Quadrature tolerance for integrands computed by ODE solves at tol."""
    return max(100.0 * tol, 1e-9)
