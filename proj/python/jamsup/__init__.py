"""Jammer suppression for spreading-code massive-connectivity uplinks.

Thin wrapper over the C++ core: signal synthesis, the convolutional
denoiser, RDD detection and Monte-Carlo evaluation.
"""

from ._core import (
    ActiveSet,
    DetectionResult,
    EvalResult,
    NetworkConfig,
    ScenarioConfig,
    ScenarioRealization,
    SpreadingMatrix,
    SymbolAlphabet,
    TrainConfig,
    TrainedModel,
    denoise,
    evaluate,
    generate_scenario,
    hadamard_codes,
    load_model,
    mfb,
    precode_symbol,
    qpsk,
    rdd_detect,
    run_gradcheck,
    save_model,
    train,
)

__all__ = [
    "ActiveSet",
    "DetectionResult",
    "EvalResult",
    "NetworkConfig",
    "ScenarioConfig",
    "ScenarioRealization",
    "SpreadingMatrix",
    "SymbolAlphabet",
    "TrainConfig",
    "TrainedModel",
    "denoise",
    "evaluate",
    "generate_scenario",
    "hadamard_codes",
    "load_model",
    "mfb",
    "precode_symbol",
    "qpsk",
    "rdd_detect",
    "run_gradcheck",
    "save_model",
    "train",
]
