"""Render grid results, trek tables, and samples as CSV, JSON, or Markdown.

CSV uses '.' decimals, comma delimiters, and LF line endings.  Output files
start with provenance comment lines (tool version, seed, config hash) so a
table is self-describing; no timestamps, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__
from .analytic import Trek
from .config import ScenarioConfig
from .dgp import PairSample
from .harness import TableResult


@dataclass(frozen=True)
class Provenance:
    """Reproducibility metadata embedded in every output file."""

    seed: int
    config_digest: str
    version: str = __version__

    @classmethod
    def of(cls, config: ScenarioConfig) -> "Provenance":
        return cls(seed=config.seed, config_digest=config.digest())

    def comment_lines(self, prefix: str = "#") -> list[str]:
        return [
            f"{prefix} gainscore {self.version}",
            f"{prefix} seed: {self.seed}",
            f"{prefix} config: sha256:{self.config_digest}",
        ]

    def as_dict(self) -> dict:
        return {
            "tool": "gainscore",
            "version": self.version,
            "seed": self.seed,
            "config": f"sha256:{self.config_digest}",
        }


_TABLE_HEADER = (
    "scenario,set,eta,pi,extra_params,"
    "b1,b1_ci_low,b1_ci_high,b2,b2_ci_low,b2_ci_high,"
    "b_c,b_c_ci_low,b_c_ci_high,coverage_pct,valid"
)


def _row_values(cell, verdict) -> list[str]:
    agg = cell.aggregate
    fields = [
        cell.scenario.value,
        cell.sim_set.label,
        f"{agg.eta:g}",
        f"{agg.pi:g}",
        f'"{cell.extra_label}"',
    ]
    for name in ("t1", "t2", "c"):
        if name in agg.regressors:
            s = agg.regressors[name]
            fields += [f"{s.mean_coef:.6f}", f"{s.mean_ci_low:.6f}", f"{s.mean_ci_high:.6f}"]
        else:
            fields += ["", "", ""]
    fields.append(f"{agg.coverage_pct:.1f}")
    fields.append("yes" if verdict.valid else "no")
    return fields


def _pair_of(set_label: str) -> int:
    return 1 if set_label.startswith("1") else 2


def table_to_csv(table: TableResult, provenance: Provenance) -> str:
    lines = provenance.comment_lines()
    lines.append(_TABLE_HEADER)
    for cell in table.cells:
        verdict = table.verdict(cell.scenario, _pair_of(cell.sim_set.label))
        lines.append(",".join(_row_values(cell, verdict)))
    return "\n".join(lines) + "\n"


def table_to_json(table: TableResult, provenance: Provenance) -> str:
    rows = []
    for cell in table.cells:
        agg = cell.aggregate
        verdict = table.verdict(cell.scenario, _pair_of(cell.sim_set.label))
        rows.append({
            "scenario": cell.scenario.value,
            "set": cell.sim_set.label,
            "eta": agg.eta,
            "pi": agg.pi,
            "extra_params": cell.extra_label,
            "n_runs": agg.n_runs,
            "regressors": {
                name: {
                    "mean_coef": s.mean_coef,
                    "mean_ci_low": s.mean_ci_low,
                    "mean_ci_high": s.mean_ci_high,
                    "coverage_pct": s.coverage_pct,
                }
                for name, s in agg.regressors.items()
            },
            "coverage_pct": agg.coverage_pct,
            "valid": verdict.valid,
        })
    verdicts = [
        {
            "scenario": v.scenario.value,
            "set_pair": v.set_pair,
            "valid": v.valid,
            "rationale": v.rationale,
        }
        for v in table.verdicts
    ]
    payload = {
        "meta": provenance.as_dict(),
        "table": table.name,
        "rows": rows,
        "verdicts": verdicts,
    }
    return json.dumps(payload, indent=2) + "\n"


def _markdown_rows(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    def fmt(row: list[str]) -> str:
        return "| " + " | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) + " |"
    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([fmt(header), sep] + [fmt(r) for r in rows])


def table_to_markdown(table: TableResult, provenance: Provenance) -> str:
    header = ["scenario", "set", "eta", "pi", "extra params",
              "b1", "b2", "b_c", "b_c 95% CI", "cover %", "valid"]
    rows = []
    for cell in table.cells:
        agg = cell.aggregate
        verdict = table.verdict(cell.scenario, _pair_of(cell.sim_set.label))
        def coef(name: str) -> str:
            return f"{agg.regressors[name].mean_coef:.3f}" if name in agg.regressors else ""
        ci = ""
        if "c" in agg.regressors:
            s = agg.regressors["c"]
            ci = f"{s.mean_ci_low:.3f}, {s.mean_ci_high:.3f}"
        rows.append([
            cell.scenario.value, cell.sim_set.label, f"{agg.eta:g}", f"{agg.pi:g}",
            cell.extra_label, coef("t1"), coef("t2"), coef("c"), ci,
            f"{agg.coverage_pct:.1f}", "yes" if verdict.valid else "no",
        ])
    meta = " ".join(provenance.comment_lines(prefix="")).strip()
    title = f"## {table.name}\n\n_{meta}_\n\n"
    return title + _markdown_rows(header, rows) + "\n"


def render_table(table: TableResult, provenance: Provenance, fmt: str) -> str:
    renderers = {"csv": table_to_csv, "json": table_to_json, "md": table_to_markdown}
    if fmt not in renderers:
        raise ValueError(f"unknown format '{fmt}'")
    return renderers[fmt](table, provenance)


_CELL_HEADER = (
    "scenario,set,eta,pi,"
    "b1,b1_ci_low,b1_ci_high,b2,b2_ci_low,b2_ci_high,"
    "b_c,b_c_ci_low,b_c_ci_high,coverage_pct"
)


def cell_to_csv(agg, provenance: Provenance) -> str:
    lines = provenance.comment_lines()
    lines.append(_CELL_HEADER)
    fields = [agg.scenario.value, agg.set_label, f"{agg.eta:g}", f"{agg.pi:g}"]
    for name in ("t1", "t2", "c"):
        if name in agg.regressors:
            s = agg.regressors[name]
            fields += [f"{s.mean_coef:.6f}", f"{s.mean_ci_low:.6f}", f"{s.mean_ci_high:.6f}"]
        else:
            fields += ["", "", ""]
    fields.append(f"{agg.coverage_pct:.1f}")
    lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def cell_to_json(agg, provenance: Provenance) -> str:
    payload = {
        "meta": provenance.as_dict(),
        "scenario": agg.scenario.value,
        "set": agg.set_label,
        "eta": agg.eta,
        "pi": agg.pi,
        "n_runs": agg.n_runs,
        "regressors": {
            name: {
                "mean_coef": s.mean_coef,
                "mean_ci_low": s.mean_ci_low,
                "mean_ci_high": s.mean_ci_high,
                "coverage_pct": s.coverage_pct,
            }
            for name, s in agg.regressors.items()
        },
        "coverage_pct": agg.coverage_pct,
    }
    return json.dumps(payload, indent=2) + "\n"


def cell_to_markdown(agg, provenance: Provenance) -> str:
    header = ["regressor", "mean coef", "mean 95% CI", "cover %"]
    rows = []
    for name, s in agg.regressors.items():
        rows.append([
            name, f"{s.mean_coef:.3f}",
            f"{s.mean_ci_low:.3f}, {s.mean_ci_high:.3f}",
            f"{s.coverage_pct:.1f}",
        ])
    meta = " ".join(provenance.comment_lines(prefix="")).strip()
    title = (f"## {agg.scenario.value} / set {agg.set_label} "
             f"(eta={agg.eta:g}, pi={agg.pi:g}, {agg.n_runs} runs)\n\n_{meta}_\n\n")
    return title + _markdown_rows(header, rows) + "\n"


def render_cell(agg, provenance: Provenance, fmt: str) -> str:
    renderers = {"csv": cell_to_csv, "json": cell_to_json, "md": cell_to_markdown}
    if fmt not in renderers:
        raise ValueError(f"unknown format '{fmt}'")
    return renderers[fmt](agg, provenance)


def sample_to_csv(sample: PairSample) -> str:
    """One replication as CSV with header u_prime,c,t1,t2,y1,y2,d."""
    lines = ["u_prime,c,t1,t2,y1,y2,d"]
    for i in range(sample.n):
        lines.append(
            f"{float(sample.u_prime[i])!r},{int(sample.c[i])},{int(sample.t1[i])},"
            f"{int(sample.t2[i])},{float(sample.y1[i])!r},{float(sample.y2[i])!r},"
            f"{float(sample.d[i])!r}"
        )
    return "\n".join(lines) + "\n"


def analytic_report_csv(
    treks: list[Trek], partials: dict[str, float], provenance: Provenance,
    condition: float | None = None,
) -> str:
    lines = provenance.comment_lines()
    lines.append("kind,label,value")
    for trek in treks:
        lines.append(f'trek,"{trek.describe()}",{trek.product!r}')
    for name, value in partials.items():
        lines.append(f"partial,b_{name},{value!r}")
    return "\n".join(lines) + "\n"


def analytic_report_json(
    treks: list[Trek], partials: dict[str, float], provenance: Provenance,
) -> str:
    payload = {
        "meta": provenance.as_dict(),
        "treks": [{"path": t.describe(), "product": t.product} for t in treks],
        "partial_coefficients": partials,
    }
    return json.dumps(payload, indent=2) + "\n"


def analytic_report_text(
    treks: list[Trek], partials: dict[str, float], provenance: Provenance,
) -> str:
    lines = provenance.comment_lines()
    lines.append("")
    if treks:
        width = max(len(t.describe()) for t in treks)
        lines.append(f"{'path'.ljust(width)}  product")
        for t in treks:
            lines.append(f"{t.describe().ljust(width)}  {t.product:.10g}")
        total = sum(t.product for t in treks)
        lines.append(f"{'(sum)'.ljust(width)}  {total:.10g}")
    lines.append("")
    for name, value in partials.items():
        lines.append(f"b_{name} = {value:.10g}")
    return "\n".join(lines) + "\n"
