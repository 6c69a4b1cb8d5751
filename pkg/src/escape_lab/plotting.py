"""Static vector-graphics charts from experiment CSVs.

Matplotlib is imported lazily (Agg backend) so that headless use and
non-plotting workflows never pay for it.  Charts are written as
self-contained SVG (or whatever the output extension selects).
"""

from __future__ import annotations

import csv
import json
import os

from .analytic import lambda_critical
from .errors import ConfigError

_REQUIRED = {
    "survival": ["lam", "survival_freq", "wilson_low", "wilson_high"],
    "profile": ["c", "n", "empirical_exponent", "analytic_exponent"],
}


def _load_rows(csv_path: str, kind: str) -> list[dict]:
    if kind not in _REQUIRED:
        raise ConfigError(
            f"unknown plot kind {kind!r}; expected one of {sorted(_REQUIRED)}"
        )
    try:
        with open(csv_path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            fields = reader.fieldnames or []
            missing = [c for c in _REQUIRED[kind] if c not in fields]
            if missing:
                raise ConfigError(
                    f"{csv_path} is missing required columns: {', '.join(missing)}"
                )
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{csv_path} contains no data rows")
    return rows


def _sidecar_value(csv_path: str, key: str):
    try:
        with open(csv_path + ".meta.json", encoding="utf-8") as handle:
            return json.load(handle).get(key)
    except (OSError, ValueError):
        return None


def emit_plot(csv_path: str, kind: str, out_path: str, d: int | None = None) -> str:
    """Render one chart from an experiment CSV; returns the output path.

    ``survival``: frequency vs takeover rate with Wilson band and a
    vertical marker at the critical value (needs ``d``, taken from the
    CSV sidecar when not given).  ``profile``: empirical growth exponent
    vs speed for the largest measured level, overlaid with the analytic
    profile curve.
    """
    rows = _load_rows(csv_path, kind)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    if kind == "survival":
        if d is None:
            d = _sidecar_value(csv_path, "d")
        lams = [float(r["lam"]) for r in rows]
        freqs = [float(r["survival_freq"]) for r in rows]
        lows = [float(r["wilson_low"]) for r in rows]
        highs = [float(r["wilson_high"]) for r in rows]
        order = sorted(range(len(lams)), key=lambda i: lams[i])
        lams = [lams[i] for i in order]
        freqs = [freqs[i] for i in order]
        lows = [lows[i] for i in order]
        highs = [highs[i] for i in order]
        ax.fill_between(lams, lows, highs, alpha=0.25, label="Wilson 95%")
        ax.plot(lams, freqs, marker="o", label="alive-at-budget frequency")
        if d is not None:
            crit = lambda_critical(int(d))
            ax.axvline(crit, linestyle="--", color="0.3", label=f"critical rate {crit:.4f}")
        ax.set_xlabel("takeover rate")
        ax.set_ylabel("survival-proxy frequency")
        ax.set_title("Survival proxy vs takeover rate")
    else:
        top_n = max(int(r["n"]) for r in rows)
        sel = [r for r in rows if int(r["n"]) == top_n and r["empirical_exponent"] != ""]
        if not sel:
            raise ConfigError(
                f"{csv_path} has no empirical exponents at the largest level {top_n}"
            )
        sel.sort(key=lambda r: float(r["c"]))
        cs = [float(r["c"]) for r in sel]
        emp = [float(r["empirical_exponent"]) for r in sel]
        ana = [float(r["analytic_exponent"]) for r in sel]
        ax.plot(cs, emp, marker="o", label=f"empirical (level {top_n})")
        ax.plot(cs, ana, linestyle="--", label="analytic profile")
        ax.set_xlabel("speed c")
        ax.set_ylabel("growth exponent")
        ax.set_title("Growth-profile exponent")
    ax.legend()
    fig.tight_layout()
    out_dir = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(out_dir, exist_ok=True)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
