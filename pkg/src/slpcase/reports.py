"""Quality report rendering: a delimited table in Table-style column order
plus bar-chart figures written as PNG files alongside it."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .quality import DIMENSIONS, AggregateReport

REPORT_COLUMNS = ("group", "n", "structural", "consistency", "clinical", "documentation", "overall")


def quality_table(reports: list[AggregateReport]) -> str:
    """CSV table, one row per group, 2-dp half-up rounding on display."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS)
    writer.writeheader()
    for report in reports:
        writer.writerow(report.display_row())
    return buf.getvalue()


def render_report(reports: list[AggregateReport], out_dir: str | Path) -> dict[str, Path]:
    """Write quality_report.csv and PNG figures into ``out_dir``.

    Figures: grouped per-dimension bar chart and an overall-mean comparison.
    Returns the paths keyed by artifact name.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    table_path = out_dir / "quality_report.csv"
    table_path.write_text(quality_table(reports))
    paths["table"] = table_path

    groups = [r.group_key for r in reports]
    if groups:
        fig, ax = plt.subplots(figsize=(max(6, 1.5 * len(groups)), 4))
        width = 0.2
        for j, dim in enumerate(DIMENSIONS):
            values = [getattr(r, f"{dim}_mean") for r in reports]
            ax.bar([i + j * width for i in range(len(groups))], values, width, label=dim)
        ax.set_xticks([i + 1.5 * width for i in range(len(groups))])
        ax.set_xticklabels(groups, rotation=20, ha="right")
        ax.set_ylim(0, 5.2)
        ax.set_ylabel("mean score")
        ax.set_title("Quality by dimension")
        ax.legend(fontsize=8)
        fig.tight_layout()
        dim_path = out_dir / "quality_dimensions.png"
        fig.savefig(dim_path, dpi=120)
        plt.close(fig)
        paths["dimensions"] = dim_path

        fig, ax = plt.subplots(figsize=(max(5, 1.2 * len(groups)), 4))
        ax.bar(groups, [r.overall_mean for r in reports], color="#4878a8")
        ax.set_ylim(0, 5.2)
        ax.set_ylabel("overall mean")
        ax.set_title("Overall quality")
        ax.tick_params(axis="x", rotation=20)
        fig.tight_layout()
        overall_path = out_dir / "quality_overall.png"
        fig.savefig(overall_path, dpi=120)
        plt.close(fig)
        paths["overall"] = overall_path

    return paths
