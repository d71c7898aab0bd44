"""Stochastic quantization of the matrix-basis phi^4 model on the Moyal plane at finite cutoff."""

from __future__ import annotations

from .params import ConfigError, ModelParams
from .spectral import WeightTable, h_norm, m_norm

__version__ = "0.1.0"

__all__ = ["ConfigError", "ModelParams", "WeightTable", "h_norm", "m_norm", "__version__"]
