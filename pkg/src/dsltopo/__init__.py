"""Directional sign loss with topological dissimilarity oracles."""

from .exceptions import (
    AxisError,
    ConfigError,
    DegenerateAxisError,
    DegenerateBatchError,
    FormatError,
    InfiniteDeathError,
    NonDifferentiableError,
    NumericError,
    ShapeError,
    TrainingDivergedError,
    UndefinedCorrelationError,
)
from .tensor import (
    MAX_RANK,
    as_tensor,
    finite_difference,
    read_tensor,
    tensor_create,
    write_tensor,
)
from .loss import (
    DEFAULT_SHARPNESS,
    DslConfig,
    Reduction,
    SignKind,
    comparisons_per_example,
    dsl_forward,
    dsl_gradient,
    exact_sign_mismatch_count,
    sign_like,
)
from .topology import (
    InfiniteDeathPolicy,
    Matching,
    PersistenceDiagram,
    min_cost_assignment,
    pairwise_correlation_distance,
    read_diagram,
    sublevel_persistence_0d,
    wasserstein_distance,
    write_diagram,
)
from .calibration import CalibrationConfig, ReferenceLoss, find_sharpness
from .autoencoder import (
    WALK_LENGTH,
    WAVE_LENGTH,
    WALK_MODEL,
    WAVE_MODEL,
    AutoencoderModel,
    ModelSpec,
    ReconstructionScores,
    TrainConfig,
    cumulative_signs,
    demo_preset,
    directional_agreement,
    evaluate_reconstructions,
    generate_walk_dataset,
    generate_wave_dataset,
    held_out_split,
    initialize_model,
    load_checkpoint,
    save_checkpoint,
    train_autoencoder,
    write_evaluation_csv,
    write_training_log,
)
from .bench import BenchRecord, LossKind, benchmark_losses, write_bench_csv

__version__ = "0.1.0"

__all__ = [
    "AutoencoderModel",
    "AxisError",
    "BenchRecord",
    "CalibrationConfig",
    "ConfigError",
    "DEFAULT_SHARPNESS",
    "DegenerateAxisError",
    "DegenerateBatchError",
    "DslConfig",
    "FormatError",
    "InfiniteDeathError",
    "InfiniteDeathPolicy",
    "LossKind",
    "MAX_RANK",
    "Matching",
    "ModelSpec",
    "NonDifferentiableError",
    "NumericError",
    "PersistenceDiagram",
    "ReconstructionScores",
    "Reduction",
    "ReferenceLoss",
    "ShapeError",
    "SignKind",
    "TrainConfig",
    "TrainingDivergedError",
    "UndefinedCorrelationError",
    "WALK_LENGTH",
    "WALK_MODEL",
    "WAVE_LENGTH",
    "WAVE_MODEL",
    "as_tensor",
    "benchmark_losses",
    "comparisons_per_example",
    "cumulative_signs",
    "demo_preset",
    "directional_agreement",
    "dsl_forward",
    "dsl_gradient",
    "evaluate_reconstructions",
    "exact_sign_mismatch_count",
    "find_sharpness",
    "finite_difference",
    "generate_walk_dataset",
    "generate_wave_dataset",
    "held_out_split",
    "initialize_model",
    "load_checkpoint",
    "min_cost_assignment",
    "pairwise_correlation_distance",
    "read_diagram",
    "read_tensor",
    "save_checkpoint",
    "sign_like",
    "sublevel_persistence_0d",
    "tensor_create",
    "train_autoencoder",
    "wasserstein_distance",
    "write_bench_csv",
    "write_diagram",
    "write_evaluation_csv",
    "write_tensor",
    "write_training_log",
]
