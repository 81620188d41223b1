from .metrics import (
    DomainSummary,
    DuplicateEpisode,
    EmptyInput,
    GridCell,
    OutcomeGrid,
    PlannerSummary,
    Report,
    build_outcome_grid,
    build_report,
    summarize_domain,
    summarize_planner,
)
from .render import OutputDirUnwritable, emit_report, fmt, markdown_table, render_files, summary_markdown, summary_table
