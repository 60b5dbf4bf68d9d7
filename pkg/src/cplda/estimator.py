"""Scikit-learn style classifier wrapping the full pipeline.

``CpLdaClassifier`` goes from labeled tensor samples to a decision rule:
moment-based discriminant estimation, spectral warm start, iterative
low-rank refinement, and the plug-in linear rule.  ``select_rank`` picks
the decomposition rank by balanced leave-k-out cross validation.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import classify, discriminant, refine, sampling, warmstart

_HELD_OUT_PER_CLASS = 5


def _split_classes(x, y):
    """Validate (X, y) and return per-class sample blocks and the labels."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if x.ndim < 3:
        raise ValueError(
            "expected samples of tensor order >= 2, got array of ndim %d"
            % x.ndim
        )
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise ValueError(
            "y has %d entries for %d samples" % (y.size, x.shape[0])
        )
    classes = np.unique(y)
    if classes.shape[0] != 2:
        raise ValueError("expected exactly 2 classes, got %d" % classes.shape[0])
    x1 = x[y == classes[0]]
    x2 = x[y == classes[1]]
    if min(x1.shape[0], x2.shape[0]) < 2:
        raise ValueError(
            "each class needs at least 2 samples, got %d and %d"
            % (x1.shape[0], x2.shape[0])
        )
    return x1, x2, classes


def select_rank(
    x1,
    x2,
    ranks,
    rng,
    n_folds=10,
    eigengap_c0=0.1,
    split=None,
    n_projections=None,
    overlap=0.5,
    tol=1e-6,
    max_iter=50,
    ridge=None,
):
    """Choose a rank by balanced leave-k-out cross validation.

    Each fold holds out _HELD_OUT_PER_CLASS samples per class, drawn
    without replacement from one shuffle per class, so folds are
    disjoint.  Returns (best_rank, mean_errors) where mean_errors[i] is
    the mean held-out misclassification of ranks[i]; ties go to the
    smaller rank.
    """
    ranks = sorted(set(int(r) for r in ranks))
    if not ranks or ranks[0] < 1:
        raise ValueError("candidate ranks must be >= 1")
    n1, n2 = x1.shape[0], x2.shape[0]
    need = n_folds * _HELD_OUT_PER_CLASS + 2
    if min(n1, n2) < need:
        raise ValueError(
            "rank selection with %d folds needs >= %d samples per class, "
            "got %d and %d" % (n_folds, need, n1, n2)
        )
    perm1 = rng.permutation(n1)
    perm2 = rng.permutation(n2)
    errors = np.zeros((len(ranks), n_folds))
    for fold in range(n_folds):
        lo = fold * _HELD_OUT_PER_CLASS
        hi = lo + _HELD_OUT_PER_CLASS
        hold1, hold2 = perm1[lo:hi], perm2[lo:hi]
        train1 = np.delete(x1, hold1, axis=0)
        train2 = np.delete(x2, hold2, axis=0)
        est = discriminant.sample_discriminant(train1, train2, ridge=ridge)
        for i, rank in enumerate(ranks):
            config = warmstart.InitConfig(
                rank=rank,
                split=split,
                eigengap_c0=eigengap_c0,
                n_projections=n_projections,
                overlap=overlap,
            )
            warm = warmstart.rc_pca(est.b_hat, config, rng)
            report = refine.refine_cp(est.b_hat, warm, tol=tol, max_iter=max_iter)
            rule = classify.rule_from_estimate(est, report.model)
            errors[i, fold] = classify.misclassification_rate(
                rule, x1[hold1], x2[hold2]
            )
    means = errors.mean(axis=1)
    return ranks[int(np.argmin(means))], means


class CpLdaClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier for tensor-valued samples via a low-rank rule.

    Parameters mirror the pipeline stages: ``rank`` fixes the
    decomposition rank (None fits the raw moment rule), ``cv_ranks``
    switches on cross-validated rank selection over the given
    candidates, and the remaining knobs feed the warm start and the
    refinement loop.

    Attributes after ``fit``: ``classes_``, ``estimate_``, ``rank_``,
    ``model_``, ``report_``, ``rule_``.
    """

    def __init__(
        self,
        rank=None,
        cv_ranks=None,
        n_folds=10,
        eigengap_c0=0.1,
        split=None,
        n_projections=None,
        overlap=0.5,
        tol=1e-6,
        max_iter=50,
        ridge=None,
        random_state=0,
    ):
        self.rank = rank
        self.cv_ranks = cv_ranks
        self.n_folds = n_folds
        self.eigengap_c0 = eigengap_c0
        self.split = split
        self.n_projections = n_projections
        self.overlap = overlap
        self.tol = tol
        self.max_iter = max_iter
        self.ridge = ridge
        self.random_state = random_state

    def fit(self, X, y):
        x1, x2, self.classes_ = _split_classes(X, y)
        rng = sampling.make_rng(self.random_state)
        self.estimate_ = discriminant.sample_discriminant(
            x1, x2, ridge=self.ridge
        )
        if self.cv_ranks is not None:
            self.rank_, self.cv_errors_ = select_rank(
                x1,
                x2,
                self.cv_ranks,
                rng,
                n_folds=self.n_folds,
                eigengap_c0=self.eigengap_c0,
                split=self.split,
                n_projections=self.n_projections,
                overlap=self.overlap,
                tol=self.tol,
                max_iter=self.max_iter,
                ridge=self.ridge,
            )
        else:
            self.rank_ = self.rank
            self.cv_errors_ = None
        if self.rank_ is None:
            self.warm_start_ = None
            self.report_ = None
            self.model_ = None
        else:
            config = warmstart.InitConfig(
                rank=self.rank_,
                split=self.split,
                eigengap_c0=self.eigengap_c0,
                n_projections=self.n_projections,
                overlap=self.overlap,
            )
            self.warm_start_ = warmstart.rc_pca(
                self.estimate_.b_hat, config, rng
            )
            self.report_ = refine.refine_cp(
                self.estimate_.b_hat,
                self.warm_start_,
                tol=self.tol,
                max_iter=self.max_iter,
            )
            self.model_ = self.report_.model
        self.rule_ = classify.rule_from_estimate(self.estimate_, self.model_)
        return self

    def _check_input(self, X):
        check_is_fitted(self, "rule_")
        X = np.asarray(X, dtype=float)
        dims = self.rule_.dims
        if X.shape == dims:
            X = X[None, ...]
        if X.shape[1:] != dims:
            raise ValueError(
                "sample dims %s do not match fitted dims %s"
                % (X.shape[1:], dims)
            )
        return X

    def decision_function(self, X):
        """Signed statistic per sample; positive favors ``classes_[1]``."""
        X = self._check_input(X)
        return classify.decision_values(self.rule_, X)

    def predict(self, X):
        X = self._check_input(X)
        return self.classes_[classify.predict(self.rule_, X) - 1]
