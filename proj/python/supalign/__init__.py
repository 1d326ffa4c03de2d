from ._core import (
    Dataset,
    Error,
    Method,
    Model,
    build_h,
    correlations,
    det_h,
    fit,
    load_dataset,
    load_model,
    loso,
    map_dataset,
    projector,
    synth,
)

__all__ = [
    "Dataset",
    "Error",
    "Method",
    "Model",
    "build_h",
    "correlations",
    "det_h",
    "fit",
    "load_dataset",
    "load_model",
    "loso",
    "map_dataset",
    "projector",
    "synth",
]
