"""Monte Carlo grids: replication cells, aggregation, coverage, verdicts.

A cell is one (scenario, simulation set) pair run for n_runs replications.
Aggregates are means of the per-run point estimates and CI endpoints, plus
the coverage probability: the percent of runs whose 95% CI overlaps zero.
Replication r always draws from the stream keyed by (master seed, r), so a
cell's output is bit-identical for any worker count, and cells sharing a
seed share the underlying draws (which is why grid rows that differ only in
outcome-equation coefficients produce identical treatment columns).

Workers are processes, not threads: a replication is mostly small-array
numpy work that gains nothing under the GIL.  Each worker handles one
contiguous block of run indices and blocks are reassembled in index order,
so the aggregation order (hence every output bit) is scheduling-invariant.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from threadpoolctl import threadpool_limits

from .config import ScenarioConfig
from .dgp import generate, replication_rng
from .ols import gain_score_regression
from .scenarios import Scenario

#: Grid-wide baseline effects: treatment effect 3, confounder loadings
#: (1, 2) on the treatments and 5 on both outcomes.
BASELINE_PARAMS = {"delta": 3.0, "chi": 1.0, "gamma": 2.0, "psi": 5.0}


@dataclass(frozen=True)
class SimulationSet:
    """One (eta, pi) setting of a simulation grid."""

    label: str
    eta: float
    pi: float


SIM_SETS: dict[str, SimulationSet] = {
    "1.1": SimulationSet("1.1", eta=0.0, pi=0.5),
    "1.2": SimulationSet("1.2", eta=0.3, pi=0.5),
    "2.1": SimulationSet("2.1", eta=0.0, pi=0.0),
    "2.2": SimulationSet("2.2", eta=0.3, pi=0.0),
}

#: Main grid rows: scenario, its extra parameters, and a display label.
TABLE1_ROWS: tuple[tuple[Scenario, dict[str, float], str], ...] = (
    (Scenario.FIG1D, {}, "none"),
    (Scenario.FIG2A, {"phi": 0.9}, "phi=0.9"),
    (Scenario.FIG2B, {"tau": 0.7, "nu": 1.5}, "tau=0.7, nu=1.5"),
    (Scenario.FIG2C, {"lambda_": 2.5}, "lambda=2.5"),
    (Scenario.FIG2D, {"theta": 1.2, "kappa": 0.6}, "theta=1.2, kappa=0.6"),
    (Scenario.FIG2E, {"lambda_": 2.5, "omega": 2.8}, "lambda=2.5, omega=2.8"),
    (Scenario.FIG2F, {"mu": 0.4}, "mu=0.4"),
)

#: Post-hoc grid: the two-treatment-association design with one side zeroed.
POSTHOC_ROWS: tuple[tuple[Scenario, dict[str, float], str], ...] = (
    (Scenario.POSTHOC_NU_ONLY, {"nu": 1.5}, "tau=0, nu=1.5"),
    (Scenario.POSTHOC_TAU_ONLY, {"tau": 0.7}, "tau=0.7, nu=0"),
)

TABLE_NAMES = ("table1", "appendix1", "appendix2")


class HarnessError(RuntimeError):
    """A replication failed; the message carries the run index."""


@dataclass(frozen=True)
class RegressorSummary:
    """Across-replication means and zero-coverage for one regressor."""

    mean_coef: float
    mean_ci_low: float
    mean_ci_high: float
    coverage_pct: float


@dataclass(frozen=True)
class AggregateResult:
    """Aggregated cell: per-regressor summaries plus cell identity."""

    scenario: Scenario
    set_label: str
    eta: float
    pi: float
    n_runs: int
    regressors: dict[str, RegressorSummary]

    @property
    def coverage_pct(self) -> float:
        """Coverage of the robustness-test regressor (c when present)."""
        target = "c" if "c" in self.regressors else list(self.regressors)[-1]
        return self.regressors[target].coverage_pct


@dataclass(frozen=True)
class ValidityVerdict:
    """Whether a scenario's test behaves correctly under one set pair."""

    scenario: Scenario
    set_pair: int
    valid: bool
    rationale: str


def _cell_config(config: ScenarioConfig, sim_set: SimulationSet) -> ScenarioConfig:
    return config.replace(eta=sim_set.eta, pi=sim_set.pi)


def _stats_block(
    scenario_value: str,
    cfg: ScenarioConfig,
    start: int,
    stop: int,
    names: tuple[str, ...],
) -> list[tuple[tuple[float, float, float, float], ...]]:
    """Per-run (coef, se, ci_low, ci_high) tuples for runs [start, stop).

    BLAS pools are pinned to one thread: the replication matrices are far
    too small to gain from threaded kernels, and a fixed thread count keeps
    results bit-identical regardless of the ambient BLAS configuration.
    """
    scenario = Scenario(scenario_value)
    include_c = "c" in names
    block = []
    with threadpool_limits(limits=1):
        for run_index in range(start, stop):
            try:
                sample = generate(cfg, scenario, replication_rng(cfg.seed, run_index))
                fit_result = gain_score_regression(sample, include_c=include_c)
            except Exception as exc:
                raise HarnessError(
                    f"scenario {scenario_value}, run {run_index}: {exc}"
                ) from exc
            block.append(tuple(fit_result[name] for name in names))
    return block


def run_cell(
    scenario: Scenario,
    sim_set: SimulationSet,
    config: ScenarioConfig,
    n_workers: int = 1,
) -> AggregateResult:
    """Run one grid cell: n_runs replications, aggregated.

    The regression includes c exactly when the scenario has the observed
    covariate.  Results are collected by run index and aggregated in run
    order, so the outcome does not depend on n_workers.
    """
    scenario = Scenario(scenario)
    cfg = _cell_config(config, sim_set)
    names = ("t1", "t2", "c") if scenario.has_observed_fe else ("t1", "t2")

    n_runs = cfg.n_runs
    if n_workers <= 1 or n_runs == 1:
        rows = _stats_block(scenario.value, cfg, 0, n_runs, names)
    else:
        workers = min(n_workers, n_runs)
        bounds = [n_runs * i // workers for i in range(workers + 1)]
        rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_stats_block, scenario.value, cfg, lo, hi, names)
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            for future in futures:
                rows.extend(future.result())

    summaries: dict[str, RegressorSummary] = {}
    for i, name in enumerate(names):
        coefs = [row[i][0] for row in rows]
        lows = [row[i][2] for row in rows]
        highs = [row[i][3] for row in rows]
        covered = sum(1 for lo, hi in zip(lows, highs) if lo <= 0.0 <= hi)
        summaries[name] = RegressorSummary(
            mean_coef=sum(coefs) / n_runs,
            mean_ci_low=sum(lows) / n_runs,
            mean_ci_high=sum(highs) / n_runs,
            coverage_pct=100.0 * covered / n_runs,
        )
    return AggregateResult(
        scenario=scenario,
        set_label=sim_set.label,
        eta=cfg.eta,
        pi=cfg.pi,
        n_runs=cfg.n_runs,
        regressors=summaries,
    )


def classify_validity(
    agg_eta0: AggregateResult, agg_eta03: AggregateResult
) -> ValidityVerdict:
    """Decide whether the test behaves correctly for one scenario/set pair.

    The test is valid when the no-interference cell keeps coverage at or
    above 90% and the interference cell drives it to 5% or below.  Both
    aggregates must come from the same scenario and the same pi.
    """
    if agg_eta0.scenario != agg_eta03.scenario:
        raise ValueError(
            f"mismatched scenarios: {agg_eta0.scenario.value} vs {agg_eta03.scenario.value}"
        )
    if agg_eta0.pi != agg_eta03.pi:
        raise ValueError(f"mismatched pi: {agg_eta0.pi} vs {agg_eta03.pi}")
    if agg_eta0.eta != 0.0 or agg_eta03.eta == 0.0:
        raise ValueError("expected one eta=0 aggregate and one eta!=0 aggregate")
    cov0 = agg_eta0.coverage_pct
    cov3 = agg_eta03.coverage_pct
    valid = cov0 >= 90.0 and cov3 <= 5.0
    set_pair = 1 if agg_eta0.pi != 0.0 else 2
    rationale = (
        f"coverage {cov0:.1f}% at eta=0 and {cov3:.1f}% at eta={agg_eta03.eta:g}"
        f" (valid requires >=90% and <=5%)"
    )
    return ValidityVerdict(
        scenario=agg_eta0.scenario, set_pair=set_pair, valid=valid, rationale=rationale
    )


@dataclass(frozen=True)
class CellResult:
    scenario: Scenario
    extra_label: str
    sim_set: SimulationSet
    aggregate: AggregateResult


@dataclass(frozen=True)
class TableResult:
    """A full grid: cells in row-major order plus the per-pair verdicts."""

    name: str
    cells: tuple[CellResult, ...]
    verdicts: tuple[ValidityVerdict, ...]

    def cell(self, scenario: Scenario, set_label: str) -> CellResult:
        for c in self.cells:
            if c.scenario == scenario and c.sim_set.label == set_label:
                return c
        raise KeyError(f"no cell ({scenario}, {set_label}) in {self.name}")

    def verdict(self, scenario: Scenario, set_pair: int) -> ValidityVerdict:
        for v in self.verdicts:
            if v.scenario == scenario and v.set_pair == set_pair:
                return v
        raise KeyError(f"no verdict ({scenario}, {set_pair}) in {self.name}")


def grid_rows(which: str) -> tuple[tuple[Scenario, dict[str, float], str], ...]:
    """Rows of a named grid; table1 and appendix1 share the main grid."""
    if which in ("table1", "appendix1"):
        return TABLE1_ROWS
    if which == "appendix2":
        return POSTHOC_ROWS
    raise ValueError(f"unknown table '{which}' (expected one of {TABLE_NAMES})")


def row_config(config: ScenarioConfig, extras: dict[str, float]) -> ScenarioConfig:
    """Compose a grid row's config: user sizes/seed/thresholds, pinned effects.

    The grid definition owns every path coefficient (baseline values plus
    the row's extras, everything else zero); the caller's config contributes
    only n_obs, n_runs, seed, and the thresholds.
    """
    zeroed = {key: 0.0 for key in (
        "delta", "chi", "gamma", "psi", "eta", "pi", "phi", "tau", "nu",
        "lambda_", "omega", "theta", "kappa", "mu",
    )}
    zeroed.update(BASELINE_PARAMS)
    zeroed.update(extras)
    return config.replace(**zeroed)


def run_table(
    which: str,
    config: ScenarioConfig | None = None,
    n_workers: int = 1,
) -> TableResult:
    """Run a full grid (every row x all four simulation sets) with verdicts.

    ``config`` supplies sizes, seed, and thresholds; grid rows pin their own
    coefficients.  Cells run in row-major order; each is deterministic given
    the seed, so the whole table is too.
    """
    base = config if config is not None else ScenarioConfig()
    rows = grid_rows(which)
    cells: list[CellResult] = []
    by_key: dict[tuple[Scenario, str], AggregateResult] = {}
    for scenario, extras, label in rows:
        cfg = row_config(base, extras)
        for set_label in ("1.1", "1.2", "2.1", "2.2"):
            sim_set = SIM_SETS[set_label]
            agg = run_cell(scenario, sim_set, cfg, n_workers=n_workers)
            cells.append(CellResult(scenario, label, sim_set, agg))
            by_key[(scenario, set_label)] = agg
    verdicts: list[ValidityVerdict] = []
    for scenario, _, _ in rows:
        verdicts.append(classify_validity(by_key[(scenario, "1.1")], by_key[(scenario, "1.2")]))
        verdicts.append(classify_validity(by_key[(scenario, "2.1")], by_key[(scenario, "2.2")]))
    return TableResult(name=which, cells=tuple(cells), verdicts=tuple(verdicts))
