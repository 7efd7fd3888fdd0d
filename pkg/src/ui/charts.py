"""Plotly figure builders shared by the dashboard and the bench command."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd
import plotly.graph_objects as go

from src.compute.booster import TrainingHistory
from src.schema.models import BoundReport
from src.ui.theme import theme

logger = logging.getLogger(__name__)


def _layout(fig: go.Figure, title: str, x_title: str, y_title: str) -> go.Figure:
    t = theme
    fig.update_layout(
        title=title,
        xaxis_title=x_title,
        yaxis_title=y_title,
        font=dict(family=t.font_chart.family, size=t.font_chart.size, color=t.color_base.ink),
        paper_bgcolor=t.color_surface.background,
        plot_bgcolor=t.color_surface.background,
        legend=dict(orientation="h", yanchor="bottom", y=1.02, x=0),
        margin=dict(l=60, r=20, t=60, b=50),
    )
    fig.update_xaxes(gridcolor=t.color_base.grid)
    fig.update_yaxes(gridcolor=t.color_base.grid)
    return fig


def training_curve_figure(history: TrainingHistory) -> go.Figure:
    """Train (and valid) loss per iteration with the best iteration marked."""
    fig = go.Figure()
    iterations = list(range(len(history.train_loss)))
    fig.add_trace(
        go.Scatter(x=iterations, y=history.train_loss, mode="lines", name="train",
                   line=dict(color=theme.color_series.train))
    )
    if history.valid_loss is not None:
        fig.add_trace(
            go.Scatter(x=iterations, y=history.valid_loss, mode="lines", name="valid",
                       line=dict(color=theme.color_series.valid))
        )
    if history.best_iteration >= 0:
        fig.add_vline(x=history.best_iteration, line_dash="dot", line_color=theme.color_base.muted)
    return _layout(fig, "Loss per iteration", "iteration", "loss")


def bench_figure(frame: pd.DataFrame) -> go.Figure:
    """Seconds per 100 trees against class count, one line per strategy."""
    fig = go.Figure()
    for strategy, group in frame.groupby("strategy", sort=False):
        group = group.sort_values("classes")
        fig.add_trace(
            go.Scatter(
                x=group["classes"],
                y=group["seconds"],
                mode="lines+markers",
                name=str(strategy),
                line=dict(color=theme.strategy_color(str(strategy))),
            )
        )
    return _layout(fig, "Training time vs number of classes", "classes", "seconds per 100 trees")


def bounds_figure(reports: Sequence[BoundReport]) -> go.Figure:
    """Empirical scoring error against the operator-norm error, per strategy."""
    fig = go.Figure()
    frame = pd.DataFrame([r.model_dump(mode="json") for r in reports])
    if frame.empty:
        return _layout(fig, "Scoring error vs operator error", "operator error", "empirical sup error")
    for strategy, group in frame.groupby("strategy", sort=False):
        fig.add_trace(
            go.Scatter(
                x=group["operator_bound"],
                y=group["empirical_sup_error"],
                mode="markers",
                name=str(strategy),
                marker=dict(color=theme.strategy_color(str(strategy))),
            )
        )
    top = float(frame["operator_bound"].max())
    fig.add_trace(
        go.Scatter(x=[0.0, top], y=[0.0, top], mode="lines", name="y = x",
                   line=dict(color=theme.color_base.muted, dash="dash"))
    )
    return _layout(fig, "Scoring error vs operator error", "operator error", "empirical sup error")


def write_static_figure(fig: go.Figure, path: Union[str, Path]) -> Path:
    """Write SVG via kaleido; fall back to HTML next to `path` if static export fails."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    error: Optional[Exception] = None
    try:
        fig.write_image(str(path), format=path.suffix.lstrip(".") or "svg")
        return path
    except (ValueError, ImportError, RuntimeError) as e:
        error = e
    fallback = path.with_suffix(".html")
    logger.warning("Static image export failed (%s); writing %s instead", error, fallback)
    fig.write_html(str(fallback), include_plotlyjs="cdn")
    return fallback
