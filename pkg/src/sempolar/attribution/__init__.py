from sempolar.attribution.model import ReferenceClassifier, TrainMetrics, train_classifier
from sempolar.attribution.ig import integrated_gradients
from sempolar.attribution.tokens import (
    AttributionReport,
    lag_split,
    lag_windows,
    token_attributions,
)

__all__ = [
    "ReferenceClassifier",
    "TrainMetrics",
    "train_classifier",
    "integrated_gradients",
    "AttributionReport",
    "token_attributions",
    "lag_split",
    "lag_windows",
]
