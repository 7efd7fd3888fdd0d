"""Training view: loss curves and ensemble summary of a saved model."""

from pathlib import Path

import streamlit as st

from src.data.model_store import load_model
from src.errors import ModelFormatError
from src.ui.charts import training_curve_figure
from src.ui.components.alert_card import AlertSeverity, alert_card


def render(path: str) -> None:
    st.subheader("Training")
    if not path:
        alert_card("Enter the path of a model file written by `sketchboost train`.", AlertSeverity.INFO)
        return
    try:
        model = load_model(Path(path))
    except FileNotFoundError as e:
        alert_card(str(e), AlertSeverity.WARNING)
        return
    except ModelFormatError as e:
        alert_card(f"Cannot read model: {e}", AlertSeverity.CRITICAL)
        return

    history = model.history
    col1, col2, col3, col4 = st.columns(4)
    col1.metric("Task", model.task.value)
    col2.metric("Outputs", model.n_outputs)
    col3.metric("Trees kept", model.n_trees, help=f"Trained: {len(history.train_loss)}")
    col4.metric("Best iteration", history.best_iteration)

    if history.train_loss:
        st.plotly_chart(training_curve_figure(history), use_container_width=True)
    depths = [tree.depth for tree in model.trees]
    if depths:
        st.caption(f"Tree depth: min {min(depths)}, max {max(depths)} | learning rate {model.learning_rate:g}")
