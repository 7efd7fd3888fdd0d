"""Bounds view: per-trial sketch errors from a verify-bounds report."""

import json
from pathlib import Path

import pandas as pd
import streamlit as st
from pydantic import ValidationError

from src.schema.models import BoundReport
from src.ui.charts import bounds_figure
from src.ui.components.alert_card import AlertSeverity, alert_card


def load_reports(path: Path) -> list[BoundReport]:
    if not path.exists():
        raise FileNotFoundError(f"Bound report not found: {path}")
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    return [BoundReport(**r) for r in raw.get("reports", [])]


def render(path: str) -> None:
    st.subheader("Sketch error bounds")
    if not path:
        alert_card("Enter the path of a JSON report written by `sketchboost verify-bounds --out`.", AlertSeverity.INFO)
        return
    try:
        reports = load_reports(Path(path))
    except FileNotFoundError as e:
        alert_card(str(e), AlertSeverity.WARNING)
        return
    except (json.JSONDecodeError, ValidationError) as e:
        alert_card(f"Cannot read report: {e}", AlertSeverity.CRITICAL)
        return

    violations = [r for r in reports if not r.score_bound_holds or r.strategy_bound_holds is False]
    if violations:
        alert_card(f"{len(violations)} deterministic bound violations.", AlertSeverity.CRITICAL)
    else:
        alert_card(f"All deterministic bounds hold over {len(reports)} sketches.", AlertSeverity.INFO)

    st.plotly_chart(bounds_figure(reports), use_container_width=True)
    frame = pd.DataFrame([r.model_dump(mode="json") for r in reports])
    if not frame.empty:
        summary = frame.groupby("strategy")[["empirical_sup_error", "operator_bound", "strategy_bound"]].mean()
        st.dataframe(summary, use_container_width=True)
