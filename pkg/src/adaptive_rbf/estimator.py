"""scikit-learn compatible front end for the adaptive-kernel RBF network."""

from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin, TransformerMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .centers import SubtractiveSpec, subtractive_clustering
from .kernels import DEFAULT_GAMMA, KernelConfig, MixingState, fuse
from .network import RbfNetwork, TrainConfig, kernel_matrices, predict_batch, train

#: Initial raw mixing weights and whether they are learned, per comparison arm.
ARMS = {
    "cosine": ((1.0, 0.0), True),
    "euclidean": ((0.0, 1.0), True),
    "manual": ((0.5, 0.5), True),
    "adaptive": ((0.5, 0.5), False),
}


def arm_mixing(arm):
    """``(MixingState, freeze_mixing)`` for a named comparison arm."""
    try:
        (a1, a2), frozen = ARMS[arm]
    except KeyError:
        raise ValueError(f"unknown arm {arm!r}; expected one of {sorted(ARMS)}") from None
    return MixingState(a1, a2), frozen


class AdaptiveKernelRBFRegressor(RegressorMixin, TransformerMixin, BaseEstimator):
    """RBF network whose kernel mixes cosine and Gaussian responses.

    Parameters
    ----------
    centers : array-like of shape (n_centers, n_features) or "subtractive" or "data"
        Fixed hidden-unit centers. ``"subtractive"`` selects them from the
        training inputs by subtractive clustering; ``"data"`` uses every
        training input.
    sigma : float
        Gaussian spread.
    gamma : float
        Cosine denominator guard.
    mixing : (float, float)
        Initial raw weights of the cosine and Gaussian kernels.
    freeze_mixing : bool
        Keep the mixing weights fixed during training.
    eta : float
        Learning rate shared by every parameter.
    epochs : int
    shuffle : bool
        Visit samples in a fresh random order each epoch.
    influence, max_centers :
        Subtractive clustering settings, used when ``centers="subtractive"``.
    random_state : int
        Seed for the shuffling order.

    Attributes
    ----------
    network_ : RbfNetwork
    trace_ : TrainTrace
    centers_ : ndarray
    mixing_weights_ : (float, float)
        Normalized (cosine, Gaussian) weights after training.
    """

    def __init__(self, centers="subtractive", sigma=0.2, gamma=DEFAULT_GAMMA,
                 mixing=(0.5, 0.5), freeze_mixing=False, eta=1e-3, epochs=100,
                 shuffle=False, influence=0.1, max_centers=None, random_state=0):
        self.centers = centers
        self.sigma = sigma
        self.gamma = gamma
        self.mixing = mixing
        self.freeze_mixing = freeze_mixing
        self.eta = eta
        self.epochs = epochs
        self.shuffle = shuffle
        self.influence = influence
        self.max_centers = max_centers
        self.random_state = random_state

    def _select_centers(self, X):
        if isinstance(self.centers, str):
            if self.centers == "data":
                return X.copy()
            if self.centers == "subtractive":
                spec = SubtractiveSpec(self.influence, max_centers=self.max_centers)
                return subtractive_clustering(X, spec)
            raise ValueError(f"unknown center strategy {self.centers!r}")
        C = check_array(self.centers)
        if C.shape[1] != X.shape[1]:
            raise ValueError(
                f"centers have {C.shape[1]} features but X has {X.shape[1]}"
            )
        return C

    def _train_config(self):
        return TrainConfig(
            eta=self.eta, epochs=self.epochs, shuffle=self.shuffle,
            seed=int(self.random_state or 0), freeze_mixing=self.freeze_mixing,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.n_features_in_ = X.shape[1]
        self.centers_ = self._select_centers(X)
        self.network_ = RbfNetwork.zeros(
            self.centers_, KernelConfig(self.sigma, self.gamma), MixingState(*self.mixing)
        )
        self.trace_ = train(self.network_, X, y, self._train_config())
        return self

    def partial_fit(self, X, y):
        """Continue training the fitted network for ``epochs`` more passes."""
        if not hasattr(self, "network_"):
            return self.fit(X, y)
        X, y = check_X_y(X, y, y_numeric=True)
        self.trace_ = train(self.network_, X, y, self._train_config())
        return self

    @property
    def mixing_weights_(self):
        check_is_fitted(self, "network_")
        return self.network_.mixing.normalized

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X)
        return predict_batch(self.network_, X)

    def transform(self, X):
        """Fused hidden-layer responses, shape ``(n_samples, n_centers)``."""
        check_is_fitted(self, "network_")
        X = check_array(X)
        P1, P2 = kernel_matrices(self.network_, X)
        return fuse(P1, P2, self.network_.mixing)


class AdaptiveKernelRBFClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier: the regressor trained on 0/1 targets.

    Takes the same parameters as :class:`AdaptiveKernelRBFRegressor` plus
    ``threshold``; outputs at or above it are assigned to ``classes_[1]``.
    """

    def __init__(self, centers="subtractive", sigma=0.2, gamma=DEFAULT_GAMMA,
                 mixing=(0.5, 0.5), freeze_mixing=False, eta=1e-3, epochs=500,
                 shuffle=False, influence=0.1, max_centers=None, random_state=0,
                 threshold=0.5):
        self.centers = centers
        self.sigma = sigma
        self.gamma = gamma
        self.mixing = mixing
        self.freeze_mixing = freeze_mixing
        self.eta = eta
        self.epochs = epochs
        self.shuffle = shuffle
        self.influence = influence
        self.max_centers = max_centers
        self.random_state = random_state
        self.threshold = threshold

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        if len(self.classes_) != 2:
            raise ValueError(f"binary classification only; got {len(self.classes_)} classes")
        params = self.get_params()
        params.pop("threshold")
        self.regressor_ = AdaptiveKernelRBFRegressor(**params)
        self.regressor_.fit(X, (y == self.classes_[1]).astype(float))
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def network_(self):
        check_is_fitted(self, "regressor_")
        return self.regressor_.network_

    @property
    def trace_(self):
        check_is_fitted(self, "regressor_")
        return self.regressor_.trace_

    def decision_function(self, X):
        check_is_fitted(self, "regressor_")
        return self.regressor_.predict(X)

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores >= self.threshold).astype(int)]
