"""Simulation scenarios and the Monte-Carlo benchmark harness.

A ``Scenario`` describes one two-class tensor-normal configuration:
low-rank mean-difference tensor with equal or geometrically decaying
weights, orthogonal or deliberately correlated factor bases, identity or
constant-off-diagonal covariances.  ``run_scenario`` runs seeded
replications of the full pipeline (moment estimate, spectral warm start,
iterative refinement, plug-in rule) and aggregates estimation and
classification metrics.
"""

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import classify, discriminant, refine, sampling, tensor, warmstart
from .exceptions import (
    DegenerateComponentError,
    DegenerateVarianceError,
    NotPositiveDefiniteError,
    ProjectionPoolError,
    SingularMatrixError,
)
from .refine import CpModel

_BASIS_KINDS = ("orthogonal", "non-orthogonal")
_COV_KINDS = ("identity", "general")
_SCHEDULES = ("equal", "geometric")
_THETA_RULES = ("per-component", "fixed")

_GRAM_TOL = 1e-10
# replication failures below this fraction are excluded, above it the
# scenario aborts
_MAX_FAILURE_FRACTION = 0.1

METRIC_NAMES = (
    "rel_error_sample",
    "rel_error_cp",
    "basis_error",
    "misclass_sample",
    "misclass_cp",
)

_REPLICATION_ERRORS = (
    SingularMatrixError,
    NotPositiveDefiniteError,
    DegenerateVarianceError,
    DegenerateComponentError,
    ProjectionPoolError,
)


@dataclass
class Scenario:
    """One benchmark configuration plus its replication protocol."""

    scenario_id: str
    dims: tuple = (30, 30, 30)
    rank: int = 5
    n1: int = 200
    n2: int = 200
    n_test: int = 500
    weight_schedule: str = "equal"
    w_max: float = 5.0
    ratio: float = 1.25
    basis_kind: str = "orthogonal"
    delta: float = 0.1
    theta_rule: str = "per-component"
    cov_kind: str = "identity"
    replications: int = 10
    seed: int = 0

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        if self.weight_schedule not in _SCHEDULES:
            raise ValueError("unknown weight schedule %r" % self.weight_schedule)
        if self.basis_kind not in _BASIS_KINDS:
            raise ValueError("unknown basis kind %r" % self.basis_kind)
        if self.cov_kind not in _COV_KINDS:
            raise ValueError("unknown covariance kind %r" % self.cov_kind)
        if self.theta_rule not in _THETA_RULES:
            raise ValueError("unknown theta rule %r" % self.theta_rule)
        if self.w_max <= 0.0:
            raise ValueError("w_max must be positive, got %g" % self.w_max)
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1), got %g" % self.delta)
        if self.replications < 1:
            raise ValueError(
                "replications must be >= 1, got %d" % self.replications
            )
        if self.rank > min(self.dims):
            raise ValueError(
                "rank %d exceeds smallest dim %d" % (self.rank, min(self.dims))
            )

    def weights(self):
        r = np.arange(self.rank)
        if self.weight_schedule == "equal":
            return np.full(self.rank, float(self.w_max))
        return self.w_max / self.ratio**r


@dataclass
class ReplicationResult:
    rel_error_sample: float
    rel_error_cp: float
    basis_error: float
    misclass_sample: float
    misclass_cp: float
    seconds: float

    def __post_init__(self):
        values = [getattr(self, name) for name in METRIC_NAMES]
        if not all(np.isfinite(values)):
            raise ValueError("non-finite replication metrics: %r" % values)
        if min(values) < 0.0:
            raise ValueError("negative replication metrics: %r" % values)
        if max(self.misclass_sample, self.misclass_cp) > 1.0:
            raise ValueError("misclassification rate above 1")


@dataclass
class ScenarioResult:
    scenario: Scenario
    means: dict
    stds: dict
    n_aggregated: int
    failures: list
    wall_seconds: float
    results: list = field(repr=False, default_factory=list)


def make_bases(dims, rank, kind, delta, rng, theta_rule="per-component"):
    """Draw per-mode factor matrices with unit columns.

    Orthogonal kind: QR orthonormalization of i.i.d. uniform(0, 1)
    matrices.  Non-orthogonal kind: keeps the first orthogonal column
    and tilts column r >= 2 toward it, a_r <- (a_1 + eta_r a_r)/norm
    with eta_r = (theta_r^(-2/M) - 1)^(1/2); theta_r is delta/(r-1) per
    component, or delta/(rank-1) for every column under the "fixed"
    rule.
    """
    if rank > min(dims):
        raise ValueError(
            "rank %d exceeds smallest dim %d" % (rank, min(dims))
        )
    if kind not in _BASIS_KINDS:
        raise ValueError("unknown basis kind %r" % kind)
    order = len(dims)
    bases = [np.linalg.qr(rng.random((d, rank)))[0] for d in dims]
    if kind == "orthogonal" or rank == 1:
        return bases
    tilted = []
    for a in bases:
        out = a.copy()
        for r in range(1, rank):
            denom = r if theta_rule == "per-component" else rank - 1
            theta = delta / denom
            eta = np.sqrt(theta ** (-2.0 / order) - 1.0)
            col = a[:, 0] + eta * a[:, r]
            out[:, r] = col / np.linalg.norm(col)
        tilted.append(out)
    return tilted


def make_scenario_params(scenario, rng):
    """Draw the ground truth for one replication.

    Returns (truth_model, population) where the population's class
    means are 0 and the composed tensor (identity covariances) or its
    per-mode covariance transform (general covariances), so the
    population discriminant equals the low-rank truth in both cases.
    """
    factors = make_bases(
        scenario.dims,
        scenario.rank,
        scenario.basis_kind,
        scenario.delta,
        rng,
        theta_rule=scenario.theta_rule,
    )
    truth = CpModel(weights=scenario.weights(), factors=factors)
    b = truth.compose()
    if scenario.cov_kind == "identity":
        covs = tuple(np.eye(d) for d in scenario.dims)
        mean2 = b
    else:
        covs = tuple(
            np.full((d, d), 2.0 / d) + (1.0 - 2.0 / d) * np.eye(d)
            for d in scenario.dims
        )
        mean2 = b
        for m, cov in enumerate(covs):
            mean2 = tensor.mode_product(mean2, cov, m)
    population = sampling.TgmmParams(
        mean1=np.zeros(scenario.dims), mean2=mean2, covs=covs
    )
    return truth, population


def run_replication(scenario, rep):
    """Run one seeded replication; returns a ReplicationResult."""
    start = time.perf_counter()
    rng = sampling.make_rng(sampling.substream_seed(scenario.seed, rep))
    truth, population = make_scenario_params(scenario, rng)
    b_true = truth.compose()
    # fixed draw order: train class 1, train class 2, then test sets
    x1 = sampling.sample_tensor_normal(
        rng, population.mean1, population.covs, scenario.n1
    )
    x2 = sampling.sample_tensor_normal(
        rng, population.mean2, population.covs, scenario.n2
    )
    t1 = sampling.sample_tensor_normal(
        rng, population.mean1, population.covs, scenario.n_test
    )
    t2 = sampling.sample_tensor_normal(
        rng, population.mean2, population.covs, scenario.n_test
    )
    est = discriminant.sample_discriminant(x1, x2)
    config = warmstart.InitConfig(rank=scenario.rank)
    warm = warmstart.rc_pca(est.b_hat, config, rng)
    report = refine.refine_cp(est.b_hat, warm)
    rule_sample = classify.rule_from_estimate(est)
    rule_cp = classify.rule_from_estimate(est, report.model)
    return ReplicationResult(
        rel_error_sample=classify.rel_tensor_error(est.b_hat, b_true),
        rel_error_cp=classify.rel_tensor_error(
            report.model.compose(), b_true
        ),
        basis_error=classify.basis_error(report.model.factors, truth.factors),
        misclass_sample=classify.misclassification_rate(rule_sample, t1, t2),
        misclass_cp=classify.misclassification_rate(rule_cp, t1, t2),
        seconds=time.perf_counter() - start,
    )


def _worker_count():
    raw = os.environ.get("CPLDA_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError("CPLDA_THREADS must be an integer, got %r" % raw)
    return max(1, workers)


def run_scenario(scenario):
    """Run all replications and aggregate metric means and stds.

    Replications that fail with a numeric degeneracy are recorded by
    exception name and excluded; if they reach 10% of the configured
    count the scenario aborts with RuntimeError.  Aggregation is a
    deterministic reduction in replication-index order regardless of
    thread count.
    """
    start = time.perf_counter()

    def attempt(rep):
        try:
            return run_replication(scenario, rep)
        except _REPLICATION_ERRORS as exc:
            return "%s: %s" % (type(exc).__name__, exc)

    workers = _worker_count()
    reps = range(scenario.replications)
    if workers == 1:
        outcomes = [attempt(rep) for rep in reps]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(attempt, reps))
    results = [out for out in outcomes if isinstance(out, ReplicationResult)]
    failures = [out for out in outcomes if isinstance(out, str)]
    if len(failures) >= _MAX_FAILURE_FRACTION * scenario.replications:
        raise RuntimeError(
            "scenario %s aborted: %d of %d replications failed (%s)"
            % (
                scenario.scenario_id,
                len(failures),
                scenario.replications,
                "; ".join(failures),
            )
        )
    means = {}
    stds = {}
    for name in METRIC_NAMES:
        values = np.array([getattr(r, name) for r in results])
        means[name] = float(values.mean())
        stds[name] = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return ScenarioResult(
        scenario=scenario,
        means=means,
        stds=stds,
        n_aggregated=len(results),
        failures=failures,
        wall_seconds=time.perf_counter() - start,
        results=results,
    )


def write_bench_csv(path, scenario_results):
    """Write aggregated rows, one per (scenario, metric)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "scenario_id",
                "basis_kind",
                "cov_kind",
                "weight_schedule",
                "w_max",
                "metric",
                "mean",
                "std",
                "replications",
                "seed",
                "wall_seconds",
            ]
        )
        for res in scenario_results:
            scn = res.scenario
            for name in METRIC_NAMES:
                writer.writerow(
                    [
                        scn.scenario_id,
                        scn.basis_kind,
                        scn.cov_kind,
                        scn.weight_schedule,
                        repr(float(scn.w_max)),
                        name,
                        repr(res.means[name]),
                        repr(res.stds[name]),
                        res.n_aggregated,
                        scn.seed,
                        "%.3f" % res.wall_seconds,
                    ]
                )


def _weight_token(value):
    text = "%g" % value
    return text


def _build_presets():
    presets = {}
    equal_ws = (1.5, 2.5, 3.5, 5.0)
    geometric_ws = (3.0, 4.5, 6.0)
    for table, cov_kind, schedule, w_values in (
        ("t1", "identity", "equal", equal_ws),
        ("t2", "general", "geometric", geometric_ws),
        ("t3", "identity", "equal", equal_ws),
        ("t4", "general", "geometric", geometric_ws),
    ):
        for basis_kind, basis_token in (
            ("orthogonal", "orth"),
            ("non-orthogonal", "nonorth"),
        ):
            for w in w_values:
                cov_token = "id" if cov_kind == "identity" else "gen"
                w_token = (
                    "w" if schedule == "equal" else "wmax"
                ) + _weight_token(w)
                name = "%s-%s-%s-%s" % (table, basis_token, cov_token, w_token)
                presets[name] = Scenario(
                    scenario_id=name,
                    weight_schedule=schedule,
                    w_max=w,
                    basis_kind=basis_kind,
                    cov_kind=cov_kind,
                )
    return presets


PRESETS = _build_presets()


def preset_scenario(name, **overrides):
    """Look up a named preset, optionally overriding fields."""
    if name not in PRESETS:
        raise KeyError(
            "unknown preset %r; known: %s" % (name, ", ".join(sorted(PRESETS)))
        )
    base = PRESETS[name]
    fields = {k: getattr(base, k) for k in base.__dataclass_fields__}
    fields.update(overrides)
    return Scenario(**fields)
