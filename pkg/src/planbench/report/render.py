"""Writing report tables (CSV, Markdown) and figures (SVG).

Everything is rendered from a :class:`~planbench.report.metrics.Report`
with fixed two-decimal formatting and no timestamps, so re-rendering the
same log gives byte-identical files.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from xml.sax.saxutils import escape

from ..runner import domain_sort_key
from ..validator import Outcome
from .metrics import Report

COLORS = {Outcome.SUCCESS: "#2e9e44", Outcome.FAILURE: "#d23c3c", Outcome.NO_PLAN: "#9e9e9e"}
BAR_COLOR = "#4c72b0"
FONT = 'font-family="Helvetica, Arial, sans-serif"'


class OutputDirUnwritable(OSError):
    pass


def fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def markdown_table(header: list[str], rows: list[list[str]], align_left: int = 1) -> str:
    rows = [[c if c != "" else "-" for c in row] for row in rows]
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    out = []
    for row in [header] + rows:
        cells = [str(c).ljust(w) if i < align_left else str(c).rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        out.append("| " + " | ".join(cells) + " |")
        if row is header:
            out.append("|" + "|".join(
                ":" + "-" * (w + 1) if i < align_left else "-" * (w + 1) + ":" for i, w in enumerate(widths)
            ) + "|")
    return "\n".join(out) + "\n"


def summary_table(report: Report) -> tuple[list[str], list[list[str]]]:
    """Per-domain SR/PL/Ac followed by the MEAN columns, one row per planner."""
    header = ["planner"]
    for d in report.domains:
        header += [f"{d}_sr", f"{d}_pl", f"{d}_ac"]
    header += ["mean_sr", "mean_pl", "mean_ac"]
    rows = []
    for ps in report.planner_summaries:
        row = [ps.planner]
        for ds in report.domain_summaries[ps.planner]:
            row += [fmt(ds.success_rate_pct), fmt(ds.mean_plan_length), fmt(ds.mean_executed_actions)]
        row += [fmt(ps.overall_success_rate_pct), fmt(ps.overall_mean_plan_length), fmt(ps.overall_mean_executed_actions)]
        rows.append(row)
    return header, rows


def summary_markdown(report: Report) -> str:
    header, rows = summary_table(report)
    pretty = ["Planner"]
    for d in report.domains:
        pretty += [f"{d.capitalize()} SR", "PL", "Ac"]
    pretty += ["MEAN SR", "PL", "Ac"]
    return markdown_table(pretty, rows)


def timing_table(report: Report) -> tuple[list[str], list[list[str]]]:
    header = ["planner", "avg_planning_time_s"]
    return header, [[ps.planner, fmt(ps.mean_planning_time_s)] for ps in report.planner_summaries]


def fidelity_table(report: Report) -> tuple[list[str], list[list[str]]]:
    header = ["planner", "mean_plan_length", "mean_executed_actions", "fidelity_pct"]
    rows = [
        [ps.planner, fmt(ps.overall_mean_plan_length), fmt(ps.overall_mean_executed_actions), fmt(ps.execution_fidelity_pct)]
        for ps in report.planner_summaries
    ]
    return header, rows


def success_table(report: Report) -> tuple[list[str], list[list[str]]]:
    header = ["planner"] + [f"{d}_sr" for d in report.domains] + ["overall_sr"]
    rows = []
    for ps in report.planner_summaries:
        rows.append(
            [ps.planner]
            + [fmt(ds.success_rate_pct) for ds in report.domain_summaries[ps.planner]]
            + [fmt(ps.overall_success_rate_pct)]
        )
    return header, rows


def grid_table(report: Report) -> tuple[list[str], list[list[str]]]:
    header = ["planner", "domain", "problem", "outcome"]
    rows = []
    for planner, cells in report.grid.rows:
        rows += [[planner, c.domain, c.problem, c.outcome.value] for c in cells]
    return header, rows


def _svg(width: float, height: float, body: list[str]) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n"
    )


def _nice_max(v: float) -> float:
    step = 10.0
    while v > step * 10:
        step *= 10
    return max(step, step * -(-v // step))


def fidelity_svg(report: Report) -> str:
    """Scatter of mean executed actions against mean plan length with the y = x line."""
    pts = [
        (ps.planner, ps.overall_mean_plan_length, ps.overall_mean_executed_actions)
        for ps in report.planner_summaries
        if ps.overall_mean_plan_length is not None
    ]
    top = _nice_max(max([p[1] for p in pts] + [1.0]))
    left, right, bottom, upper, size = 60, 220, 50, 20, 360
    w, h = left + size + right, upper + size + bottom

    def x(v):
        return left + size * v / top

    def y(v):
        return upper + size - size * v / top

    body = [
        f'<line x1="{x(0):.2f}" y1="{y(0):.2f}" x2="{x(top):.2f}" y2="{y(0):.2f}" stroke="black"/>',
        f'<line x1="{x(0):.2f}" y1="{y(0):.2f}" x2="{x(0):.2f}" y2="{y(top):.2f}" stroke="black"/>',
        f'<line class="ideal" x1="{x(0):.2f}" y1="{y(0):.2f}" x2="{x(top):.2f}" y2="{y(top):.2f}" '
        f'stroke="#555" stroke-dasharray="6,4"/>',
    ]
    for i in range(6):
        v = top * i / 5
        body.append(f'<text x="{x(v):.2f}" y="{y(0) + 16:.2f}" font-size="11" text-anchor="middle" {FONT}>{v:g}</text>')
        body.append(f'<text x="{x(0) - 6:.2f}" y="{y(v) + 4:.2f}" font-size="11" text-anchor="end" {FONT}>{v:g}</text>')
    body.append(
        f'<text x="{left + size / 2:.2f}" y="{h - 10}" font-size="12" text-anchor="middle" {FONT}>Mean plan length (PL)</text>'
    )
    body.append(
        f'<text transform="translate(16,{upper + size / 2:.2f}) rotate(-90)" font-size="12" text-anchor="middle" {FONT}>'
        "Mean executed actions (Ac)</text>"
    )
    palette = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"]
    for i, (name, pl, ac) in enumerate(pts):
        color = palette[i % len(palette)]
        body.append(
            f'<circle class="point" cx="{x(pl):.2f}" cy="{y(ac):.2f}" r="5" fill="{color}">'
            f"<title>{escape(name)}: PL {pl:.2f}, Ac {ac:.2f}</title></circle>"
        )
        ly = upper + 14 + 18 * i
        body.append(f'<circle cx="{left + size + 20}" cy="{ly - 4}" r="5" fill="{color}"/>')
        body.append(f'<text x="{left + size + 30}" y="{ly}" font-size="11" {FONT}>{escape(name)}</text>')
    return _svg(w, h, body)


def success_svg(report: Report) -> str:
    """Horizontal bars of overall success rate per planner."""
    rows = [(ps.planner, ps.overall_success_rate_pct) for ps in report.planner_summaries]
    label_w, bar_w, row_h, upper = 200, 400, 24, 20
    w, h = label_w + bar_w + 70, upper + row_h * len(rows) + 40
    body = []
    for i, (name, sr) in enumerate(rows):
        y0 = upper + i * row_h
        body.append(f'<text x="{label_w - 8}" y="{y0 + 15}" font-size="12" text-anchor="end" {FONT}>{escape(name)}</text>')
        body.append(
            f'<rect class="bar" x="{label_w}" y="{y0 + 3}" width="{bar_w * sr / 100:.2f}" height="{row_h - 6}" fill="{BAR_COLOR}">'
            f"<title>{escape(name)}: {sr:.2f}%</title></rect>"
        )
        body.append(f'<text x="{label_w + bar_w * sr / 100 + 6:.2f}" y="{y0 + 15}" font-size="11" {FONT}>{sr:.2f}</text>')
    axis_y = upper + row_h * len(rows)
    body.append(f'<line x1="{label_w}" y1="{axis_y}" x2="{label_w + bar_w}" y2="{axis_y}" stroke="black"/>')
    for v in range(0, 101, 20):
        xv = label_w + bar_w * v / 100
        body.append(f'<text x="{xv:.2f}" y="{axis_y + 16}" font-size="11" text-anchor="middle" {FONT}>{v}</text>')
    body.append(
        f'<text x="{label_w + bar_w / 2}" y="{axis_y + 32}" font-size="12" text-anchor="middle" {FONT}>Success rate (%)</text>'
    )
    return _svg(w, h, body)


def grid_svg(report: Report) -> str:
    """One row per planner, one square per problem, grouped by domain."""
    cell, gap, label_w, upper = 12, 8, 200, 40
    columns: list[tuple[str, str]] = []
    for _, cells in report.grid.rows:
        for c in cells:
            if (c.domain, c.problem) not in columns:
                columns.append((c.domain, c.problem))
    columns.sort(key=lambda k: (domain_sort_key(k[0]), k[1]))
    xpos = {}
    xcur = label_w
    last_domain = None
    heads = []
    for d, p in columns:
        if d != last_domain:
            if last_domain is not None:
                xcur += gap
            heads.append((d, xcur))
            last_domain = d
        xpos[(d, p)] = xcur
        xcur += cell
    w = xcur + 20
    h = upper + cell * len(report.grid.rows) + 40
    body = [f'<text x="{x0}" y="{upper - 8}" font-size="11" {FONT}>{escape(d)}</text>' for d, x0 in heads]
    for i, (planner, cells) in enumerate(report.grid.rows):
        y0 = upper + i * cell
        body.append(f'<text x="{label_w - 8}" y="{y0 + cell - 2}" font-size="11" text-anchor="end" {FONT}>{escape(planner)}</text>')
        for c in cells:
            body.append(
                f'<rect class="cell {c.outcome.value}" x="{xpos[(c.domain, c.problem)]}" y="{y0}" width="{cell - 1}" '
                f'height="{cell - 1}" fill="{COLORS[c.outcome]}"><title>{escape(planner)} {escape(c.domain)}/'
                f"{escape(c.problem)}: {c.outcome.value}</title></rect>"
            )
    ly = h - 16
    for j, (outcome, label) in enumerate([(Outcome.SUCCESS, "success"), (Outcome.FAILURE, "failure"), (Outcome.NO_PLAN, "no plan")]):
        lx = label_w + j * 90
        body.append(f'<rect x="{lx}" y="{ly - 10}" width="10" height="10" fill="{COLORS[outcome]}"/>')
        body.append(f'<text x="{lx + 14}" y="{ly}" font-size="11" {FONT}>{label}</text>')
    return _svg(w, h, body)


def render_files(report: Report) -> dict[str, str]:
    """File name to contents for every report artifact."""
    files = {}
    header, rows = summary_table(report)
    files["domain_summary.csv"] = _csv([header] + rows)
    files["domain_summary.md"] = summary_markdown(report)
    header, rows = timing_table(report)
    files["planning_time.csv"] = _csv([header] + rows)
    files["planning_time.md"] = markdown_table(["Planner", "Avg. planning time (s)"], rows)
    header, rows = fidelity_table(report)
    files["fidelity.csv"] = _csv([header] + rows)
    files["fidelity.svg"] = fidelity_svg(report)
    header, rows = success_table(report)
    files["success_rate.csv"] = _csv([header] + rows)
    files["success_rate.svg"] = success_svg(report)
    header, rows = grid_table(report)
    files["outcome_grid.csv"] = _csv([header] + rows)
    files["outcome_grid.svg"] = grid_svg(report)
    return files


def emit_report(report: Report, output_dir: str | Path) -> list[Path]:
    output_dir = Path(output_dir)
    written = []
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        for name, text in render_files(report).items():
            path = output_dir / name
            path.write_text(text, encoding="utf-8", newline="\n")
            written.append(path)
    except OSError as exc:
        raise OutputDirUnwritable(f"cannot write report to {output_dir}: {exc}") from None
    return written
