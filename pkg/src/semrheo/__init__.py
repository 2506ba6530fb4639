"""Similarity walks through embedding spaces and MSD diffusion analysis."""

from .embeddings import (
    EmbeddingSet,
    TokenRef,
    l2_normalize,
    load_canonical,
    load_glove_text,
    load_word2vec_text,
    save_canonical,
    save_glove_text,
    save_word2vec_text,
)
# the msd *function* itself stays at semrheo.msd.msd so the submodule name
# remains importable
from .msd import (
    DiffusionReport,
    MsdCurve,
    PowerLawFit,
    Trajectory,
    analyze_trajectory,
    classify_regime,
    displacement,
    fit_power_law,
    segment_phases,
    step_lengths,
    tail_exponent,
)
from .projection import Projection2D, pca_2d
from .similarity import CompositeQuery, Neighbor, composite_vector, cosine, top_k
from .synthetic import SyntheticSpec, expected_msd, generate
from .walks import (
    AbsorptionReport,
    Walk,
    WalkParams,
    detect_absorption,
    free_walk,
    guided_walk,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionReport",
    "CompositeQuery",
    "DiffusionReport",
    "EmbeddingSet",
    "MsdCurve",
    "Neighbor",
    "PowerLawFit",
    "Projection2D",
    "SyntheticSpec",
    "TokenRef",
    "Trajectory",
    "Walk",
    "WalkParams",
    "analyze_trajectory",
    "classify_regime",
    "composite_vector",
    "cosine",
    "detect_absorption",
    "displacement",
    "expected_msd",
    "fit_power_law",
    "free_walk",
    "generate",
    "guided_walk",
    "l2_normalize",
    "load_canonical",
    "load_glove_text",
    "load_word2vec_text",
    "pca_2d",
    "save_canonical",
    "save_glove_text",
    "save_word2vec_text",
    "segment_phases",
    "step_lengths",
    "tail_exponent",
    "top_k",
]
