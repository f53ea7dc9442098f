"""RBF networks with an adaptively fused cosine/Gaussian kernel."""

from .centers import (
    GridSpec,
    SubtractiveClustering,
    SubtractiveSpec,
    subtractive_clustering,
    uniform_grid_centers,
)
from .data import (
    Dataset,
    PlantParams,
    gen_function_grid,
    gen_plant_series,
    load_csv_dataset,
)
from .estimator import AdaptiveKernelRBFClassifier, AdaptiveKernelRBFRegressor
from .exceptions import (
    AdaptiveRBFError,
    ConfigError,
    DataError,
    DegenerateMixingError,
    DivergenceError,
)
from .kernels import (
    KernelConfig,
    KernelVector,
    MixingState,
    alpha_gradient,
    cosine_eval,
    fused_eval,
    gaussian_eval,
    normalized_weights,
)
from .metrics import classification_accuracy, mse_db
from .network import (
    RbfNetwork,
    TrainConfig,
    TrainTrace,
    forward,
    load_snapshot,
    predict_batch,
    save_snapshot,
    train,
    train_step,
)

__version__ = "0.1.0"
