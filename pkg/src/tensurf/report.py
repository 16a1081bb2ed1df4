"""Report serialization (table, CSV, JSON) and the convergence figure."""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

REPORT_FIELDS = ("identity_id", "surface", "resolution", "lhs", "rhs", "residual",
                 "tolerance", "pass", "wall_time_ms")
CONVERGENCE_FIELDS = ("identity_id", "surface", "resolution", "residual", "observed_order")


@dataclass
class ConvergenceRow:
    identity_id: str
    surface: str
    resolution: str
    residual: float
    observed_order: Optional[float] = None

    def as_record(self):
        return {
            "identity_id": self.identity_id,
            "surface": self.surface,
            "resolution": self.resolution,
            "residual": float(self.residual),
            "observed_order": None if self.observed_order is None else float(self.observed_order),
        }


def observed_orders(residuals):
    """log2 of successive residual ratios; None where undefined."""
    orders = [None]
    for prev, cur in zip(residuals, residuals[1:]):
        if prev > 0 and cur > 0:
            orders.append(math.log2(prev / cur))
        else:
            orders.append(None)
    return orders


def _cell(value, machine):
    if value is None:
        return "" if machine else "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if machine else f"{value:.3g}"
    if isinstance(value, list):
        if machine:
            return json.dumps(value)
        return "(" + ", ".join(f"{v:.6g}" for v in value) + ")"
    return str(value)


def to_json(records):
    return json.dumps(records, indent=2) + "\n"


def to_csv(records, fields):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        writer.writerow([_cell(rec.get(f), machine=True) for f in fields])
    return buf.getvalue()


def to_table(records, fields):
    human = []
    for rec in records:
        row = []
        for f in fields:
            v = rec.get(f)
            if f in ("residual", "tolerance") and isinstance(v, float):
                row.append(f"{v:.2e}")
            elif f == "pass":
                row.append("PASS" if v else "FAIL")
            elif f in ("lhs", "rhs") and isinstance(v, float):
                row.append(f"{v:.10g}")
            else:
                row.append(_cell(v, machine=False))
        human.append(row)
    widths = [max([len(f)] + [len(r[i]) for r in human]) for i, f in enumerate(fields)]
    lines = ["  ".join(f.ljust(w) for f, w in zip(fields, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in human:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render(records, fmt, fields):
    if fmt == "json":
        return to_json(records)
    if fmt == "csv":
        return to_csv(records, fields)
    if fmt == "table":
        return to_table(records, fields)
    raise ValueError(f"unknown format {fmt!r}")


def plot_convergence(rows, path):
    """Residual against resolution, one line per (surface, identity), saved to ``path``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {}
    for row in rows:
        series.setdefault((row.surface, row.identity_id), []).append(row)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for (surface, ident), pts in series.items():
        xs = [int(str(p.resolution).split("x")[0].split("/")[0]) for p in pts]
        ys = [max(p.residual, 1e-17) for p in pts]
        ax.semilogy(xs, ys, marker="o", label=f"{ident} on {surface}")
    ax.set_xlabel("nodes per axis")
    ax.set_ylabel("residual (max norm)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
