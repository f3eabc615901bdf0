"""Regenerative hydrogen turboshaft with a nitrogen Rankine accessory loop.

Cycle model, thermal NOx estimate, design-space sampling and a numpy MLP
surrogate of thermal efficiency and NOx mass flow.
"""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    REFERENCE_POINT,
    CycleInput,
    EngineConfig,
    Envelope,
    InfeasiblePoint,
    PerformancePoint,
    evaluate_cycle,
    trend_study,
)

__all__ = [
    "REFERENCE_POINT",
    "CycleInput",
    "EngineConfig",
    "Envelope",
    "InfeasiblePoint",
    "PerformancePoint",
    "evaluate_cycle",
    "trend_study",
]
