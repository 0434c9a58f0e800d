"""Gaussian process regression three ways: exact, random Fourier features, and
a bit-faithful statevector simulation of the quantum-assisted pipeline."""

__version__ = "0.1.0"

from .errors import CapacityError, ConfigError, IoError, PostSelectionError, QrffError
from .kernel import (
    Dataset,
    KernelHyper,
    Posterior,
    exact_posterior,
    gram_matrix,
    rbf_kernel,
    spectral_density,
)
from .pipeline import (
    EncodingPlan,
    InversionConstants,
    PipelineConfig,
    PosteriorEstimate,
    PreparedPipeline,
    SpectralRegisters,
    estimate_mean,
    estimate_variance,
    invert_for_mean,
    invert_for_variance,
    plan_encoding,
    prepare_data_state,
    spectral_extraction,
)
from .rff import (
    FeatureModel,
    FrequencySet,
    build_feature_model,
    feature_map,
    rff_posterior,
    sample_frequencies,
    scaled_feature_vector,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "Dataset",
    "EncodingPlan",
    "FeatureModel",
    "FrequencySet",
    "InversionConstants",
    "IoError",
    "KernelHyper",
    "PipelineConfig",
    "Posterior",
    "PosteriorEstimate",
    "PostSelectionError",
    "PreparedPipeline",
    "QrffError",
    "SpectralRegisters",
    "build_feature_model",
    "estimate_mean",
    "estimate_variance",
    "exact_posterior",
    "feature_map",
    "gram_matrix",
    "invert_for_mean",
    "invert_for_variance",
    "plan_encoding",
    "prepare_data_state",
    "rbf_kernel",
    "rff_posterior",
    "sample_frequencies",
    "scaled_feature_vector",
    "spectral_density",
    "spectral_extraction",
]
