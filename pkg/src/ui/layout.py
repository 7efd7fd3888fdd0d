"""
Sketchboost dashboard layout: sidebar navigation plus one artifact path per page.
"""

from __future__ import annotations

import streamlit as st

NAV_ITEMS = [
    ("Training", "training"),
    ("Benchmark", "benchmark"),
    ("Bounds", "bounds"),
]

DEFAULT_PATHS = {
    "training": "model.json",
    "benchmark": "bench.csv",
    "bounds": "bounds.json",
}


def render_sidebar_nav() -> str:
    """Render nav radio. Returns selected nav key."""
    st.sidebar.markdown("---")
    st.sidebar.caption("Navigate")
    labels = [label for label, _ in NAV_ITEMS]
    keys = [key for _, key in NAV_ITEMS]
    idx = st.sidebar.radio(
        "Nav",
        range(len(labels)),
        format_func=lambda i: labels[i],
        label_visibility="collapsed",
        key="nav_radio",
    )
    return keys[idx]


def render_path_input(page_key: str) -> str:
    return st.sidebar.text_input("Artifact path", value=DEFAULT_PATHS[page_key], key=f"path_{page_key}").strip()
