"""Deterministic report rendering.

Every report embeds a schema tag and the full resolved configuration as
comment lines (CSV) or top-level fields (JSON), so a report can be replayed
to byte-identical output from its own header.  Floats render via repr,
which is shortest-roundtrip and stable across runs.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from .density import DensityEstimate, ExactDensity
from .walks import WalkEstimate

DENSITY_SCHEMA = "tmlab.density/1"
EXACT_SCHEMA = "tmlab.exact-density/1"
WALK_SCHEMA = "tmlab.walk/1"

_DENSITY_COLUMNS = (
    "event,model,a,n,trials,hits,p_hat,ci_lo,ci_hi,master_seed"
)
_EXACT_COLUMNS = "event,a,n,hits,total,numerator,denominator,value"
_WALK_COLUMNS = "k,exact_cdf,mc_estimate,ci_lo,ci_hi"


def _config_line(config: dict) -> str:
    return "# config=" + json.dumps(config, sort_keys=True, separators=(",", ":"))


def _num(x: float) -> str:
    return repr(float(x))


def density_rows_csv(rows: Sequence[DensityEstimate], config: dict) -> str:
    lines = [f"# schema={DENSITY_SCHEMA}", _config_line(config), _DENSITY_COLUMNS]
    for r in rows:
        lines.append(
            f"{r.event.token},{r.model.geometry.value},{r.a},{r.n},{r.trials},"
            f"{r.hits},{_num(r.p_hat)},{_num(r.ci_lo)},{_num(r.ci_hi)},{r.master_seed}"
        )
    return "\n".join(lines) + "\n"


def _density_row_json(r: DensityEstimate) -> dict:
    return {
        "event": r.event.token,
        "model": r.model.geometry.value,
        "a": r.a,
        "n": r.n,
        "trials": r.trials,
        "hits": r.hits,
        "p_hat": r.p_hat,
        "ci_lo": r.ci_lo,
        "ci_hi": r.ci_hi,
        "master_seed": r.master_seed,
    }


def density_rows_json(rows: Sequence[DensityEstimate], config: dict) -> str:
    doc = {
        "schema": DENSITY_SCHEMA,
        "config": config,
        "rows": [_density_row_json(r) for r in rows],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def exact_rows_csv(rows: Sequence[ExactDensity], config: dict) -> str:
    lines = [f"# schema={EXACT_SCHEMA}", _config_line(config), _EXACT_COLUMNS]
    for r in rows:
        frac = r.fraction
        lines.append(
            f"{r.event.token},{r.a},{r.n},{r.hits},{r.total},"
            f"{frac.numerator},{frac.denominator},{_num(r.value)}"
        )
    return "\n".join(lines) + "\n"


def exact_rows_json(rows: Sequence[ExactDensity], config: dict) -> str:
    doc = {
        "schema": EXACT_SCHEMA,
        "config": config,
        "rows": [
            {
                "event": r.event.token,
                "a": r.a,
                "n": r.n,
                "hits": r.hits,
                "total": r.total,
                "numerator": r.fraction.numerator,
                "denominator": r.fraction.denominator,
                "value": r.value,
            }
            for r in rows
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def walk_rows_csv(
    points: Sequence[tuple[int, Optional[float], Optional[WalkEstimate]]],
    config: dict,
) -> str:
    """Rows of (horizon, exact value or None, Monte Carlo estimate or None)."""
    lines = [f"# schema={WALK_SCHEMA}", _config_line(config), _WALK_COLUMNS]
    for k, exact, est in points:
        exact_cell = "" if exact is None else _num(exact)
        if est is None:
            lines.append(f"{k},{exact_cell},,,")
        else:
            lines.append(
                f"{k},{exact_cell},{_num(est.p_hat)},{_num(est.ci_lo)},{_num(est.ci_hi)}"
            )
    return "\n".join(lines) + "\n"


def walk_rows_json(
    points: Sequence[tuple[int, Optional[float], Optional[WalkEstimate]]],
    config: dict,
) -> str:
    rows = []
    for k, exact, est in points:
        row: dict = {"k": k, "exact_cdf": exact}
        if est is None:
            row.update(mc_estimate=None, ci_lo=None, ci_hi=None)
        else:
            row.update(
                mc_estimate=est.p_hat,
                ci_lo=est.ci_lo,
                ci_hi=est.ci_hi,
                trials=est.trials,
                hits=est.hits,
            )
        rows.append(row)
    doc = {"schema": WALK_SCHEMA, "config": config, "rows": rows}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
