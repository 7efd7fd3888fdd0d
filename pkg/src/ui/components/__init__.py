from src.ui.components.alert_card import AlertSeverity, alert_card

__all__ = ["AlertSeverity", "alert_card"]
