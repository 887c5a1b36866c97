"""Preset experiments for the published tables and side-by-side rendering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harness import ExperimentConfig, SummaryTable, run_experiment
from .ml import ESTIMANDS
from .published import PUBLISHED, ROWS

TABLES = ("table1", "table2", "table3", "table4", "table5")
PRIORS = (-2, 0, 2, 7)
PDMI = {nu: f"PDMI(D=5,nu={nu})" for nu in PRIORS}

_ESTIMATORS = {
    "table1": ("ML", "MLMI(D=5)", PDMI[0]),
    "table2": tuple(PDMI.values()),
    "table3": ("ML", "MLMI(D=5)") + tuple(PDMI.values()),
    "table4": ("ML",) + tuple(PDMI.values()),
    "table5": ("ML",) + tuple(PDMI.values()),
}
_INTERVALS = {
    "table4": [{"estimator": "ML", "method": "normal"}] + [{"estimator": PDMI[v], "method": "t"} for v in PRIORS],
    "table5": [{"estimator": "ML", "method": "tstar", "bounded": True}]
    + [{"estimator": PDMI[v], "method": "t", "bounded": True} for v in PRIORS],
}
DEFAULT_REPS = {
    "table1": {25: 40_000, 100: 20_000},
    "table2": {25: 40_000, 100: 20_000},
    "table3": {25: 40_000, 100: 20_000},
    "table4": {25: 8_000, 100: 8_000},
    "table5": {25: 8_000, 100: 8_000},
}


def preset(table: str, n: int, pattern: str, replications: int | None = None, seed: int = 0) -> ExperimentConfig:
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; expected one of {TABLES}")
    return ExperimentConfig(
        n=n,
        pattern=pattern,
        estimators=_ESTIMATORS[table],
        intervals=tuple(_INTERVALS.get(table, ())),
        replications=replications or DEFAULT_REPS[table][n],
        seed=seed,
    )


@dataclass
class Reproduction:
    table: str
    results: dict  # (n, pattern) -> SummaryTable

    def comparisons(self):
        """Yield (row key, n, pattern, estimand, statistic, ours, published text)."""
        first, second = _STATS[self.table]
        for (n, pattern), summary in self.results.items():
            for key in _row_keys(self.table):
                cells = PUBLISHED[self.table][(key, n, pattern)]
                ours1, ours2 = _ours(self.table, summary, key)
                for k, name in enumerate(ESTIMANDS):
                    yield key, n, pattern, name, first, ours1[k], cells[k][0].text
                    yield key, n, pattern, name, second, ours2[k], cells[k][1].text


_STATS = {
    "table1": ("mean", "sd"),
    "table2": ("mean", "sd"),
    "table3": ("rmse", "rank"),
    "table4": ("length", "coverage_pct"),
    "table5": ("length", "coverage_pct"),
}


def _row_keys(table: str):
    if table in ("table4", "table5"):
        suffix = "/t" if table == "table4" else "/t-bounded"
        ml = "ML/normal" if table == "table4" else "ML/tstar-bounded"
        return (ml,) + tuple(PDMI[v] + suffix for v in PRIORS)
    return _ESTIMATORS[table]


def _ours(table: str, summary: SummaryTable, key: str):
    if table in ("table4", "table5"):
        c = summary.intervals.index(key)
        return summary.ci_length[c], 100.0 * summary.ci_coverage[c]
    e = summary.estimators.index(key)
    if table == "table3":
        return summary.rms[e], rms_rank(summary.rms)[e]
    return summary.mean[e], summary.sd[e]


def rms_rank(rms):
    """Ranks by RMS about zero, the statistic behind the published Table 3."""
    order = np.argsort(rms, axis=0, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(1, rms.shape[0] + 1)[:, None], axis=0)
    return rank


def reproduce(table: str, replications: int | None = None, seed: int = 0, workers: int = 1, rows=ROWS) -> Reproduction:
    results = {}
    for n, pattern in rows:
        results[(n, pattern)] = run_experiment(preset(table, n, pattern, replications, seed), workers)
    return Reproduction(table, results)


def _fmt(v: float) -> str:
    if v != v:
        return "nan"
    if abs(v) >= 1e4:
        return f"{v:.1e}"
    return f"{v:.3f}" if abs(v) < 10 else f"{v:.1f}"


def render_text(rep: Reproduction) -> str:
    """Paper layout, each cell shown as ``ours [published]``."""
    first, second = _STATS[rep.table]
    lines = [f"{rep.table}: {first} ({second}); published values in brackets"]
    if rep.table == "table3":
        lines.append("note: published RMSE values correspond to RMS about zero, which is what is shown here")
    header = f"{'row':<26}{'n':>4} {'pattern':<6}" + "".join(f"{e:>34}" for e in ESTIMANDS)
    lines.append(header)
    for (n, pattern), summary in rep.results.items():
        for key in _row_keys(rep.table):
            cells = PUBLISHED[rep.table][(key, n, pattern)]
            a, b = _ours(rep.table, summary, key)
            row = f"{key:<26}{n:>4} {pattern:<6}"
            for k in range(len(ESTIMANDS)):
                ours = f"{_fmt(a[k])} ({_fmt(b[k])})"
                row += f"{ours} [{cells[k][0].text} ({cells[k][1].text})]".rjust(34)
            lines.append(row)
        lines.append(f"  replications={summary.replications} regenerated={summary.regenerations}")
    return "\n".join(lines) + "\n"
