"""Benchmark view: time per 100 trees vs class count."""

from pathlib import Path

import streamlit as st

from src.experiments.benchmark import read_bench_csv
from src.ui.charts import bench_figure
from src.ui.components.alert_card import AlertSeverity, alert_card


def render(path: str) -> None:
    st.subheader("Scaling benchmark")
    if not path:
        alert_card("Enter the path of a CSV written by `sketchboost bench`.", AlertSeverity.INFO)
        return
    try:
        frame = read_bench_csv(Path(path))
    except (FileNotFoundError, ValueError) as e:
        alert_card(str(e), AlertSeverity.WARNING)
        return

    st.plotly_chart(bench_figure(frame), use_container_width=True)
    pivot = frame.pivot_table(index="classes", columns="strategy", values="seconds")
    if "none" in pivot.columns and len(pivot.columns) > 1:
        speedup = pivot.drop(columns="none").rdiv(pivot["none"], axis=0)
        st.caption("Speedup over the unsketched search")
        st.dataframe(speedup.style.format("{:.2f}x"), use_container_width=True)
    st.dataframe(frame, use_container_width=True, hide_index=True)
