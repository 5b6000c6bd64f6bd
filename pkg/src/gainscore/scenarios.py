"""Weighted causal graphs for the two-sibling designs and the named scenario
presets used throughout the simulation grids.

Every scenario is a small graph over (U, C, T1, T2, Y1, Y2, D): U is the
unobserved family-level confounder, C the observed family-level covariate,
T1/T2 the siblings' treatments, Y1/Y2 their outcomes, and D = Y2 - Y1 the
gain-score.  D is wired as an ordinary node with fixed edges Y1->D (-1) and
Y2->D (+1) so that path tracing through it needs no special casing.

Dashed C associations (tau, nu, lambda, omega) are stored as directed
C->target edges: the generating equations use them exactly as linear
coefficients on C, which keeps the analytic and generative models identical.
The U-C association (pi) stays bidirected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

from .config import ScenarioConfig

#: Canonical variable order; also the tie-break order for topological sorts.
VARIABLES = ("U", "C", "T1", "T2", "Y1", "Y2", "D")

_BINARY_VARIABLES = frozenset({"C", "T1", "T2"})


class Edge(NamedTuple):
    """Directed edge ``src -> dst`` with a linear coefficient."""

    src: str
    dst: str
    coef: float


class Association(NamedTuple):
    """Bidirected (non-causal) association between two variables."""

    a: str
    b: str
    coef: float


class CycleError(ValueError):
    """A directed cycle was found; carries the offending variables."""

    def __init__(self, cycle: Iterable[str]):
        self.cycle = tuple(cycle)
        super().__init__("directed cycle through " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class StructuralModel:
    """A linear structural model: variables, weighted edges, noise variances.

    Immutable after construction; safe to share across threads.
    """

    variables: tuple[str, ...]
    directed_edges: tuple[Edge, ...]
    bidirected_edges: tuple[Association, ...]
    exogenous_variance: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        variances = dict(self.exogenous_variance)
        for v in self.variables:
            variances.setdefault(v, 0.0 if v == "D" else 1.0)
        object.__setattr__(self, "exogenous_variance", variances)

    def parents(self, var: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.directed_edges if e.dst == var)

    def coefficient(self, src: str, dst: str) -> float:
        """Coefficient of the directed edge src->dst, or 0 if absent."""
        for e in self.directed_edges:
            if e.src == src and e.dst == dst:
                return e.coef
        return 0.0

    def association(self, a: str, b: str) -> float:
        """Bidirected association between a and b (order-free), or 0."""
        for assoc in self.bidirected_edges:
            if {assoc.a, assoc.b} == {a, b}:
                return assoc.coef
        return 0.0

    def topology_key(self) -> tuple:
        """Hashable key identifying the edge structure (not the weights)."""
        return (
            self.variables,
            tuple((e.src, e.dst) for e in self.directed_edges),
            tuple((a.a, a.b) for a in self.bidirected_edges),
        )


class Scenario(str, Enum):
    """The named scenario presets.

    FIG1A/FIG1B are the designs without an observed family covariate
    (FIG1B adds the outcome-to-outcome effect eta).  FIG1C/FIG1D add the
    observed covariate C; the FIG2x variants extend FIG1D with one extra
    mechanism each.  The two POSTHOC presets are FIG2B with only one of
    the treatment associations present.
    """

    FIG1A = "fig1a"
    FIG1B = "fig1b"
    FIG1C = "fig1c"
    FIG1D = "fig1d"
    FIG2A = "fig2a"
    FIG2B = "fig2b"
    FIG2C = "fig2c"
    FIG2D = "fig2d"
    FIG2E = "fig2e"
    FIG2F = "fig2f"
    POSTHOC_NU_ONLY = "posthoc_nu_only"
    POSTHOC_TAU_ONLY = "posthoc_tau_only"

    @property
    def has_observed_fe(self) -> bool:
        """Whether the scenario includes the observed covariate C."""
        return self not in (Scenario.FIG1A, Scenario.FIG1B)


#: Extra directed edges each scenario adds on top of the shared core,
#: written as (src, dst, coefficient attribute of ScenarioConfig).
_EXTRA_EDGES: dict[Scenario, tuple[tuple[str, str, str], ...]] = {
    Scenario.FIG1A: (),
    Scenario.FIG1B: (("Y1", "Y2", "eta"),),
    Scenario.FIG1C: (),
    Scenario.FIG1D: (("Y1", "Y2", "eta"),),
    Scenario.FIG2A: (("Y1", "Y2", "eta"), ("T1", "T2", "phi")),
    Scenario.FIG2B: (("Y1", "Y2", "eta"), ("C", "T1", "tau"), ("C", "T2", "nu")),
    Scenario.FIG2C: (("Y1", "Y2", "eta"), ("C", "Y1", "lambda_"), ("C", "Y2", "lambda_")),
    Scenario.FIG2D: (("Y1", "Y2", "eta"), ("T1", "Y2", "theta"), ("T2", "Y1", "kappa")),
    Scenario.FIG2E: (("Y1", "Y2", "eta"), ("C", "Y1", "lambda_"), ("C", "Y2", "omega")),
    Scenario.FIG2F: (("Y1", "Y2", "eta"), ("Y1", "T2", "mu")),
    Scenario.POSTHOC_NU_ONLY: (("Y1", "Y2", "eta"), ("C", "T2", "nu")),
    Scenario.POSTHOC_TAU_ONLY: (("Y1", "Y2", "eta"), ("C", "T1", "tau")),
}


def build_scenario(scenario: Scenario, config: ScenarioConfig) -> StructuralModel:
    """Construct the structural model for a named scenario.

    Coefficients the scenario does not use are ignored.  Scenarios with C
    carry the bidirected (U, C) association with weight pi; the exogenous
    variance is 1 for every variable except the deterministic D (0).
    """
    scenario = Scenario(scenario)
    edges = [
        Edge("U", "T1", config.chi),
        Edge("U", "T2", config.gamma),
        Edge("U", "Y1", config.psi),
        Edge("U", "Y2", config.psi),
        Edge("T1", "Y1", config.delta),
        Edge("T2", "Y2", config.delta),
    ]
    for src, dst, attr in _EXTRA_EDGES[scenario]:
        edges.append(Edge(src, dst, getattr(config, attr)))
    edges.append(Edge("Y1", "D", -1.0))
    edges.append(Edge("Y2", "D", 1.0))

    if scenario.has_observed_fe:
        variables = VARIABLES
        bidirected: tuple[Association, ...] = (Association("U", "C", config.pi),)
    else:
        variables = tuple(v for v in VARIABLES if v != "C")
        bidirected = ()

    model = StructuralModel(
        variables=variables,
        directed_edges=tuple(edges),
        bidirected_edges=bidirected,
    )
    report = validate(model)
    if not report.ok:
        raise ValueError(f"scenario {scenario.value}: " + "; ".join(report.violations))
    return model


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def validate(model: StructuralModel) -> ValidationReport:
    """Check the structural-model invariants, returning a report.

    Reported violations: directed cycles, dangling edge endpoints,
    malformed D wiring, duplicate bidirected pairs, non-finite
    coefficients, negative exogenous variances.
    """
    violations: list[str] = []
    known = set(model.variables)
    if len(known) != len(model.variables):
        violations.append("duplicate variable names")

    for e in model.directed_edges:
        if e.src not in known or e.dst not in known:
            violations.append(f"dangling edge {e.src}->{e.dst}")
        if not _finite(e.coef):
            violations.append(f"non-finite coefficient on {e.src}->{e.dst}")
    for a in model.bidirected_edges:
        if a.a not in known or a.b not in known:
            violations.append(f"dangling association {a.a}--{a.b}")
        if not _finite(a.coef):
            violations.append(f"non-finite coefficient on {a.a}--{a.b}")
        if a.a == a.b:
            violations.append(f"self association on {a.a}")
    pairs = [frozenset((a.a, a.b)) for a in model.bidirected_edges]
    if len(pairs) != len(set(pairs)):
        violations.append("more than one bidirected edge for a pair")
    for v, var in model.exogenous_variance.items():
        if not _finite(var) or var < 0:
            violations.append(f"invalid exogenous variance for {v}")

    try:
        topological_order(model)
    except CycleError as exc:
        violations.append(f"cycle: {' -> '.join(exc.cycle)}")

    if "D" in known:
        incoming = {(e.src, e.coef) for e in model.directed_edges if e.dst == "D"}
        outgoing = [e for e in model.directed_edges if e.src == "D"]
        if incoming != {("Y1", -1.0), ("Y2", 1.0)} or outgoing:
            violations.append("D wiring: D must have exactly Y1->D (-1) and Y2->D (+1) and no outgoing edges")

    return ValidationReport(ok=not violations, violations=tuple(violations))


def _finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")


def topological_order(model: StructuralModel) -> tuple[str, ...]:
    """Topological order of the directed graph, canonical-order tie-broken.

    Raises CycleError naming the cycle's variables if the graph is cyclic.
    """
    rank = {v: i for i, v in enumerate(VARIABLES)}
    pending = sorted(model.variables, key=lambda v: rank.get(v, len(rank)))
    known = set(model.variables)
    # Dangling edge endpoints are validate()'s concern, not an ordering one.
    remaining_parents = {
        v: {e.src for e in model.directed_edges if e.dst == v and e.src in known}
        for v in model.variables
    }
    order: list[str] = []
    placed: set[str] = set()
    while pending:
        ready = [v for v in pending if remaining_parents[v] <= placed]
        if not ready:
            raise CycleError(_find_cycle(model, set(pending)))
        nxt = ready[0]
        order.append(nxt)
        placed.add(nxt)
        pending.remove(nxt)
    return tuple(order)


def _find_cycle(model: StructuralModel, nodes: set[str]) -> list[str]:
    # Trim nodes with no successors inside the stuck set until only cycle
    # members (and nodes feeding them) remain, then walk forward: a repeat
    # must occur and the slice from its first occurrence is a cycle.
    core = set(nodes)
    while True:
        dead = {v for v in core
                if not any(e.src == v and e.dst in core for e in model.directed_edges)}
        if not dead:
            break
        core -= dead
    if not core:  # unreachable: a stuck Kahn front implies a cycle
        return sorted(nodes)
    children = {v: sorted(e.dst for e in model.directed_edges if e.src == v and e.dst in core)
                for v in core}
    start = sorted(core)[0]
    path = [start]
    seen = {start: 0}
    while True:
        nxt = children[path[-1]][0]
        if nxt in seen:
            return path[seen[nxt]:]
        seen[nxt] = len(path)
        path.append(nxt)
