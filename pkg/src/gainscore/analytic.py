"""Exact implied covariances and partial regression coefficients for the
all-linear (non-thresholded) version of a scenario.

The engine implements classical path tracing for standardized variables:
the covariance of two variables is the sum over treks of the product of the
trek's edge coefficients, weighted by the apex variable's variance (1 in
the standardized setting) or, when the trek crosses a bidirected edge, by
that association coefficient.  A trek walks up from the source to an apex
and down to the target, never revisiting a variable, so it has at most one
direction change and never traverses a collider.

Two independent backends compute the same numbers so each validates the
other: explicit trek enumeration, and the matrix identity
Sigma = (I - W)^-1 Omega (I - W)^-T, where W collects the directed
coefficients and Omega the bidirected associations plus the residual
diagonal that standardizes every variable's implied variance to its
declared value.  The calculus is formal: a coefficient set need not be
jointly realizable as correlations (residuals may come out negative, and
the matrix need not be positive semidefinite), which is exactly the
convention under which the closed-form results hold.

This engine is an identification oracle for the linearized scenarios; it
is not expected to match Monte Carlo estimates from the thresholded
generator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .scenarios import Association, Edge, StructuralModel

#: Condition number above which the regressor moment matrix is rejected.
COLLINEARITY_LIMIT = 1e12
#: Condition number above which a near-collinearity warning is emitted.
CONDITION_WARN = 1e8


class CollinearRegressorsError(ValueError):
    """The regressor second-moment matrix is numerically singular."""


@dataclass(frozen=True)
class Trek:
    """One unconditionally open path between ``source`` and ``target``.

    ``left_leg`` holds the directed edges from the (left) apex down to the
    source variable; they are traversed against their direction when walking
    from the source up to the apex.  ``right_leg`` runs from the (right)
    apex down to the target with the edges' direction.  ``bridge`` is the
    bidirected apex edge, if any.  ``product`` multiplies every edge
    coefficient with the apex variance (bridgeless treks) or the bridge
    coefficient.  No variable appears twice, so for source == target the
    only trek is the empty-legged self-trek, whose product is the variance.
    """

    source: str
    target: str
    left_leg: tuple[Edge, ...]
    bridge: Association | None
    right_leg: tuple[Edge, ...]
    product: float

    def describe(self) -> str:
        """Human-readable rendering, e.g. ``C <-> U -> Y1 -> D``."""
        tokens = [self.source]
        node = self.source
        for e in reversed(self.left_leg):
            tokens += ["<-", e.src]
            node = e.src
        if self.bridge is not None:
            node = self.bridge.b if node == self.bridge.a else self.bridge.a
            tokens += ["<->", node]
        for e in self.right_leg:
            tokens += ["->", e.dst]
        return " ".join(tokens)


# Directed path lists depend only on the edge structure, which is shared by
# every coefficient draw of a scenario, so they are cached by topology.
# Entry: source -> destination -> tuple of (edge-name path, vertex set).
_PathTable = dict[str, dict[str, tuple[tuple[tuple[tuple[str, str], ...], frozenset[str]], ...]]]
_PATH_CACHE: dict[tuple, _PathTable] = {}


def _paths_by_source(model: StructuralModel) -> _PathTable:
    key = model.topology_key()
    cached = _PATH_CACHE.get(key)
    if cached is not None:
        return cached
    children: dict[str, list[str]] = {v: [] for v in model.variables}
    for e in model.directed_edges:
        children[e.src].append(e.dst)
    for kids in children.values():
        kids.sort()

    table: _PathTable = {}
    for src in model.variables:
        found: dict[str, list[tuple[tuple[tuple[str, str], ...], frozenset[str]]]] = {
            src: [((), frozenset((src,)))]
        }

        def walk(node: str, trail: tuple, seen: frozenset[str]) -> None:
            for child in children[node]:
                extended = trail + ((node, child),)
                vertices = seen | {child}
                found.setdefault(child, []).append((extended, vertices))
                walk(child, extended, vertices)

        walk(src, (), frozenset((src,)))
        table[src] = {dst: tuple(lst) for dst, lst in found.items()}
    _PATH_CACHE[key] = table
    return table


def _raw_treks(model: StructuralModel, x: str, y: str):
    """Yield (left path, bridge, right path, product) without materializing
    Trek objects; paths are edge-name tuples."""
    if x not in model.variables or y not in model.variables:
        raise KeyError(f"unknown variable in pair ({x}, {y})")
    coef = {(e.src, e.dst): e.coef for e in model.directed_edges}
    paths = _paths_by_source(model)

    def leg_product(path: tuple[tuple[str, str], ...]) -> float:
        out = 1.0
        for pair in path:
            out *= coef[pair]
        return out

    for apex in model.variables:
        to_x = paths[apex].get(x, ())
        to_y = paths[apex].get(y, ())
        if not to_x or not to_y:
            continue
        variance = model.exogenous_variance.get(apex, 1.0)
        only_apex = frozenset((apex,))
        for left, left_vertices in to_x:
            lp = variance * leg_product(left)
            for right, right_vertices in to_y:
                if left_vertices & right_vertices != only_apex:
                    continue
                yield left, None, right, lp * leg_product(right)
    for assoc in model.bidirected_edges:
        for left_apex, right_apex in ((assoc.a, assoc.b), (assoc.b, assoc.a)):
            to_x = paths[left_apex].get(x, ())
            to_y = paths[right_apex].get(y, ())
            if not to_x or not to_y:
                continue
            for left, left_vertices in to_x:
                lp = assoc.coef * leg_product(left)
                for right, right_vertices in to_y:
                    if left_vertices & right_vertices:
                        continue
                    yield left, assoc, right, lp * leg_product(right)


def enumerate_treks(model: StructuralModel, x: str, y: str) -> list[Trek]:
    """All treks between x and y, each with its signed product.

    The list is duplicate-free and sorted lexicographically by the edge
    name sequence (left leg, bridge, right leg).
    """
    coef = {(e.src, e.dst): e.coef for e in model.directed_edges}

    def leg(path: tuple[tuple[str, str], ...]) -> tuple[Edge, ...]:
        return tuple(Edge(s, d, coef[(s, d)]) for s, d in path)

    treks = [
        Trek(x, y, leg(left), bridge, leg(right), product)
        for left, bridge, right, product in _raw_treks(model, x, y)
    ]

    def sort_key(t: Trek):
        return (
            tuple((e.src, e.dst) for e in t.left_leg),
            ("",) if t.bridge is None else (t.bridge.a, t.bridge.b),
            tuple((e.src, e.dst) for e in t.right_leg),
        )

    treks.sort(key=sort_key)
    return treks


def trek_covariance(model: StructuralModel, x: str, y: str) -> float:
    """Model-implied covariance of x and y as the sum of trek products."""
    return math.fsum(product for _, _, _, product in _raw_treks(model, x, y))


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric implied-covariance matrix indexed by variable name.

    Diagonal entries equal the declared variances (1 standardized, 0 for
    the deterministic gain-score node).  Under the formal standardized
    calculus the matrix need not be positive semidefinite.
    """

    variables: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if not np.isfinite(values).all():
            raise ValueError("covariance matrix has non-finite entries")
        if not np.allclose(values, values.T, atol=1e-12, rtol=0.0):
            raise ValueError("covariance matrix is not symmetric")
        if (np.diag(values) < -1e-9).any():
            raise ValueError("covariance matrix has a negative diagonal entry")
        object.__setattr__(self, "values", 0.5 * (values + values.T))

    def loc(self, x: str, y: str) -> float:
        i = self.variables.index(x)
        j = self.variables.index(y)
        return float(self.values[i, j])


def implied_covariance_matrix(model: StructuralModel) -> CovMatrix:
    """Full implied covariance matrix via the matrix identity.

    Omega combines the bidirected associations with the residual diagonal
    that makes each variable's implied variance equal its declared
    exogenous variance; the residuals solve a unit-diagonal triangular
    system, so they exist and are unique for any acyclic model.  The
    computation shares nothing with the trek enumeration, yet every entry
    equals the corresponding trek covariance to near machine precision.
    """
    variables = model.variables
    index = {v: i for i, v in enumerate(variables)}
    k = len(variables)
    W = np.zeros((k, k))
    for e in model.directed_edges:
        W[index[e.dst], index[e.src]] = e.coef
    bridges = np.zeros((k, k))
    for assoc in model.bidirected_edges:
        i, j = index[assoc.a], index[assoc.b]
        bridges[i, j] = assoc.coef
        bridges[j, i] = assoc.coef
    declared = np.array([model.exogenous_variance.get(v, 1.0) for v in variables])
    try:
        M = np.linalg.inv(np.eye(k) - W)
        # Solve for the standardizing residuals: diag(M Omega M^T) = declared.
        residuals = np.linalg.solve(M * M, declared - np.diag(M @ bridges @ M.T))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"matrix identity failed numerically: {exc}") from exc
    omega = bridges + np.diag(residuals)
    sigma = M @ omega @ M.T
    return CovMatrix(variables=variables, values=sigma)


def partial_coefficients(
    model: StructuralModel, regressors: list[str], outcome: str
) -> np.ndarray:
    """Population partial regression coefficients of outcome on regressors.

    Solves Sigma_XX b = sigma_XY with path-tracing covariances (regressor
    variances are the declared ones, 1 in the standardized setting).  Warns
    when the moment matrix's condition number exceeds 1e8 and raises
    CollinearRegressorsError when it is effectively singular.
    """
    if not regressors:
        raise ValueError("regressors must be nonempty")
    k = len(regressors)
    moments = np.empty((k, k))
    for i in range(k):
        moments[i, i] = trek_covariance(model, regressors[i], regressors[i])
        for j in range(i + 1, k):
            cov = trek_covariance(model, regressors[i], regressors[j])
            moments[i, j] = cov
            moments[j, i] = cov
    rhs = np.array([trek_covariance(model, r, outcome) for r in regressors])
    condition = float(np.linalg.cond(moments))
    if not np.isfinite(condition) or condition > COLLINEARITY_LIMIT:
        raise CollinearRegressorsError(
            f"collinear regressors (condition number {condition:g})"
        )
    if condition > CONDITION_WARN:
        warnings.warn(
            f"near-collinear regressors: condition number {condition:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.linalg.solve(moments, rhs)


def closed_form_b1_b2(params: ScenarioConfig, interference: bool) -> tuple[float, float]:
    """Closed-form two-treatment coefficients for the baseline designs.

    Without outcome-to-outcome interference the gain-score regression on
    (T1, T2) identifies (-delta, delta).  With it, the coefficients pick up
    the documented eta terms:

        b1 = -delta + delta*eta + psi*chi*eta*(1 - gamma^2) / (1 - (chi*gamma)^2)
        b2 =  delta + psi*gamma*eta*(1 - chi^2) / (1 - (chi*gamma)^2)

    Raises ValueError when |chi*gamma| == 1 (degenerate denominator).
    """
    if not interference:
        return (-params.delta, params.delta)
    cg = params.chi * params.gamma
    if abs(cg) == 1.0:
        raise ValueError("degenerate denominator: |chi*gamma| = 1")
    denom = 1.0 - cg * cg
    b1 = (-params.delta + params.delta * params.eta
          + params.psi * params.chi * params.eta * (1.0 - params.gamma**2) / denom)
    b2 = (params.delta
          + params.psi * params.gamma * params.eta * (1.0 - params.chi**2) / denom)
    return (b1, b2)
