"""Alert Card: a bordered notice for missing inputs and failed checks."""

from __future__ import annotations

from enum import Enum

import streamlit as st

from src.ui.theme import theme


class AlertSeverity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    CRITICAL = "critical"


def alert_card(message: str, severity: AlertSeverity = AlertSeverity.INFO) -> None:
    t = theme
    colors = {
        AlertSeverity.INFO: t.color_series.bound_ok,
        AlertSeverity.WARNING: t.color_series.valid,
        AlertSeverity.CRITICAL: t.color_series.bound_violated,
    }
    html = f"""
    <div style="
        background: {t.color_surface.panel};
        border-left: 4px solid {colors[severity]};
        padding: 1rem;
        border-radius: 10px;
        margin-bottom: 1rem;
        font-family: {t.font_chart.family};
        color: {t.color_base.ink};
    ">
        {message}
    </div>
    """
    st.markdown(html, unsafe_allow_html=True)
