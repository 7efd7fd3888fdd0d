"""
Sketchboost dashboard: training curves, scaling benchmark and bound reports.

Run with `streamlit run app.py`.
"""

from pathlib import Path

import streamlit as st

from src.config import configure_logging, load_config
from src.ui.layout import NAV_ITEMS, render_path_input, render_sidebar_nav
from src.ui.pages import benchmark, bounds, training

st.set_page_config(
    page_title="Sketchboost",
    layout="wide",
    initial_sidebar_state="expanded",
)

PAGES = {
    "training": training.render,
    "benchmark": benchmark.render,
    "bounds": bounds.render,
}


def main():
    root = Path(__file__).parent
    config = load_config(root / "config.yaml")
    configure_logging(config.logging.level, config.logging.format)

    st.sidebar.title("Sketchboost")
    st.sidebar.caption("Multioutput boosting with sketched split search")

    page_key = render_sidebar_nav()
    path = render_path_input(page_key)
    PAGES[page_key](path)

    labels = dict((key, label) for label, key in NAV_ITEMS)
    st.sidebar.caption(f"Viewing: {labels[page_key]}")


if __name__ == "__main__":
    main()
