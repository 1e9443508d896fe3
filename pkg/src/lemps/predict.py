"""Uniform prediction surface over all model families."""

import numpy as np

from .forest import ForestModel
from .linear.model import LinearModel
from .svr import SvrModel

_MODEL_TYPES = (LinearModel, ForestModel, SvrModel)


def predict(model, X) -> np.ndarray:
    """Apply a fitted model's prediction contract row-wise."""
    if not isinstance(model, _MODEL_TYPES):
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return model.predict(X)
