"""Reproducible synthetic generators with ground-truth graphs and models.

Two named benchmarks are provided. The chain benchmark draws six exogenous
features, one mediated feature, and an outcome assembled from fixed
coefficients. The student surrogate draws four z-scored variables with two
confounders, a mediator, and an outcome whose noise variance is chosen so
the outcome itself has unit variance.

Every generator splits one seed into independent per-column streams, so the
output is identical regardless of evaluation order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataValidationError
from .graphs import MixedGraph, topological_sort
from .scm import LinearScm, NodeEquation
from .stats import Dataset

__all__ = [
    "FeatureParams",
    "SynthConfig",
    "SurrogateConfig",
    "GeneratedBundle",
    "generate_chain_synthetic",
    "generate_student_surrogate",
    "random_dag",
    "random_linear_scm",
    "sample_from_scm",
]

CHAIN_LABELS = ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "y")
SURROGATE_LABELS = ("node13", "node16", "node34", "node39")


@dataclass(frozen=True)
class FeatureParams:
    """Marginal parameters for the chain benchmark's feature columns.

    The x3 entries describe the optional rescaled presentation of the
    mediated column; they do not affect generation unless rescaling is on.
    """

    x1_mean: float = 50.0
    x1_sd: float = 5.0
    x2_mean: float = 20.0
    x2_sd: float = 1.0
    x3_mean: float = 45.0
    x3_sd: float = 6.0
    x4_prob: float = 0.6
    x5_prob: float = 0.3
    x6_mean: float = 70.0
    x6_sd: float = 5.0
    x7_mean: float = 50.0
    x7_sd: float = 5.0

    def __post_init__(self) -> None:
        for name in ("x1_sd", "x2_sd", "x3_sd", "x6_sd", "x7_sd"):
            if not getattr(self, name) > 0:
                raise DataValidationError(f"{name} must be positive")
        for name in ("x4_prob", "x5_prob"):
            p = getattr(self, name)
            if not 0.0 < p < 1.0:
                raise DataValidationError(f"{name} must lie strictly in (0, 1)")


@dataclass(frozen=True)
class SynthConfig:
    """Configuration for the chain benchmark generator."""

    n: int = 5000
    seed: int = 0
    beta: tuple[float, ...] = (0.4, 0.6, 0.4, 0.6, 0.7, 0.4, 0.4)
    noise_sd_e1: float = 1.0
    noise_sd_e2: float = 2.0
    feature_params: FeatureParams = field(default_factory=FeatureParams)
    rescale_x3: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DataValidationError("sample size must be at least 1")
        if len(self.beta) != 7:
            raise DataValidationError("beta must hold exactly 7 coefficients")
        if not all(math.isfinite(b) for b in self.beta):
            raise DataValidationError("beta coefficients must be finite")
        if not (self.noise_sd_e1 > 0 and self.noise_sd_e2 > 0):
            raise DataValidationError("noise standard deviations must be positive")


@dataclass(frozen=True)
class SurrogateConfig:
    """Configuration for the student surrogate generator.

    outcome_coefficients are ordered (c_16, c_13, c_34); confounder_strengths
    are the coefficients of 13 and 34 in the mediator equation. Noise
    variances for the mediator and outcome are derived so both have unit
    variance, which constrains how large the coefficients may be.
    """

    n: int = 5000
    seed: int = 0
    outcome_coefficients: tuple[float, float, float] = (0.19, 0.486, 0.187)
    confounder_strengths: tuple[float, float] = (0.6, 0.4)
    pass_threshold_z: float = -0.901

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DataValidationError("sample size must be at least 1")
        values = (*self.outcome_coefficients, *self.confounder_strengths,
                  self.pass_threshold_z)
        if not all(math.isfinite(v) for v in values):
            raise DataValidationError("surrogate parameters must be finite")
        if self.mediator_noise_variance() <= 0:
            raise DataValidationError(
                "confounder strengths leave no positive mediator noise variance"
            )
        if self.outcome_noise_variance() <= 0:
            raise DataValidationError(
                "outcome coefficients leave no positive outcome noise variance"
            )

    def mediator_noise_variance(self) -> float:
        a, b = self.confounder_strengths
        return 1.0 - a * a - b * b

    def outcome_noise_variance(self) -> float:
        c16, c13, c34 = self.outcome_coefficients
        a, b = self.confounder_strengths
        # expand 39 over the exogenous drivers 13, 34, e16
        explained = (
            (c13 + c16 * a) ** 2
            + (c34 + c16 * b) ** 2
            + c16 * c16 * self.mediator_noise_variance()
        )
        return 1.0 - explained


@dataclass(frozen=True)
class GeneratedBundle:
    """A dataset together with the structure and model that produced it."""

    dataset: Dataset
    truth_dag: MixedGraph
    truth_scm: LinearScm
    drawn_noise: dict[int, np.ndarray]


def generate_chain_synthetic(cfg: SynthConfig) -> GeneratedBundle:
    """Draw the chain benchmark: x7 feeds x3, x1..x6 feed the outcome."""
    fp = cfg.feature_params
    b0, b1, b2, b3, b4, b5, b6 = cfg.beta
    streams = np.random.SeedSequence(cfg.seed).spawn(8)
    rngs = [np.random.default_rng(s) for s in streams]
    n = cfg.n

    x1 = rngs[0].normal(fp.x1_mean, fp.x1_sd, size=n)
    x2 = rngs[1].normal(fp.x2_mean, fp.x2_sd, size=n)
    x4 = (rngs[2].random(n) < fp.x4_prob).astype(np.float64)
    x5 = (rngs[3].random(n) < fp.x5_prob).astype(np.float64)
    x6 = rngs[4].normal(fp.x6_mean, fp.x6_sd, size=n)
    x7 = rngs[5].normal(fp.x7_mean, fp.x7_sd, size=n)
    e1 = rngs[6].normal(0.0, cfg.noise_sd_e1, size=n)
    e2 = rngs[7].normal(0.0, cfg.noise_sd_e2, size=n)

    x3_slope = b0
    x3_intercept = 0.0
    x3_noise_sd = cfg.noise_sd_e1
    x3_noise = e1
    if cfg.rescale_x3:
        # affine shift to the descriptive mean/sd, using population moments
        raw_mean = b0 * fp.x7_mean
        raw_sd = math.sqrt(b0 * b0 * fp.x7_sd**2 + cfg.noise_sd_e1**2)
        scale = fp.x3_sd / raw_sd
        x3_slope = b0 * scale
        x3_intercept = fp.x3_mean - scale * raw_mean
        x3_noise_sd = scale * cfg.noise_sd_e1
        x3_noise = scale * e1
    x3 = x3_intercept + x3_slope * x7 + x3_noise
    y = b0 + b1 * x1 + b2 * x2 + b3 * x3 + b4 * x4 + b5 * x5 + b6 * x6 + e2

    dataset = Dataset(CHAIN_LABELS, np.column_stack([x1, x2, x3, x4, x5, x6, x7, y]))
    truth_dag = MixedGraph(
        CHAIN_LABELS,
        directed=[(6, 2), (0, 7), (1, 7), (2, 7), (3, 7), (4, 7), (5, 7)],
    )
    truth_scm = LinearScm(
        graph=truth_dag,
        equations=(
            NodeEquation((), (), fp.x1_mean, fp.x1_sd**2),
            NodeEquation((), (), fp.x2_mean, fp.x2_sd**2),
            NodeEquation((6,), (x3_slope,), x3_intercept, x3_noise_sd**2),
            NodeEquation((), (), fp.x4_prob, fp.x4_prob * (1 - fp.x4_prob)),
            NodeEquation((), (), fp.x5_prob, fp.x5_prob * (1 - fp.x5_prob)),
            NodeEquation((), (), fp.x6_mean, fp.x6_sd**2),
            NodeEquation((), (), fp.x7_mean, fp.x7_sd**2),
            NodeEquation(
                (0, 1, 2, 3, 4, 5), (b1, b2, b3, b4, b5, b6), b0,
                cfg.noise_sd_e2**2,
            ),
        ),
    )
    drawn_noise = {
        0: x1 - fp.x1_mean,
        1: x2 - fp.x2_mean,
        2: x3_noise,
        3: x4 - fp.x4_prob,
        4: x5 - fp.x5_prob,
        5: x6 - fp.x6_mean,
        6: x7 - fp.x7_mean,
        7: e2,
    }
    return GeneratedBundle(dataset, truth_dag, truth_scm, drawn_noise)


def generate_student_surrogate(cfg: SurrogateConfig) -> GeneratedBundle:
    """Draw the four-node student surrogate in z-score units."""
    c16, c13, c34 = cfg.outcome_coefficients
    a, b = cfg.confounder_strengths
    med_var = cfg.mediator_noise_variance()
    out_var = cfg.outcome_noise_variance()
    streams = np.random.SeedSequence(cfg.seed).spawn(4)
    rngs = [np.random.default_rng(s) for s in streams]
    n = cfg.n

    n13 = rngs[0].standard_normal(n)
    n34 = rngs[1].standard_normal(n)
    e16 = rngs[2].normal(0.0, math.sqrt(med_var), size=n)
    u1 = rngs[3].normal(0.0, math.sqrt(out_var), size=n)
    n16 = a * n13 + b * n34 + e16
    n39 = c16 * n16 + c13 * n13 + c34 * n34 + u1

    dataset = Dataset(SURROGATE_LABELS, np.column_stack([n13, n16, n34, n39]))
    truth_dag = MixedGraph(
        SURROGATE_LABELS,
        directed=[(0, 1), (2, 1), (0, 3), (1, 3), (2, 3)],
    )
    truth_scm = LinearScm(
        graph=truth_dag,
        equations=(
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((0, 2), (a, b), 0.0, med_var),
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((0, 1, 2), (c13, c16, c34), 0.0, out_var),
        ),
    )
    drawn_noise = {0: n13, 1: e16, 2: n34, 3: u1}
    return GeneratedBundle(dataset, truth_dag, truth_scm, drawn_noise)


def random_dag(
    n_nodes: int, edge_prob: float, rng: np.random.Generator
) -> MixedGraph:
    """Draw a DAG on n_nodes by orienting a random order and keeping each
    forward pair with probability edge_prob."""
    if n_nodes < 1:
        raise DataValidationError("a graph needs at least one node")
    if not 0.0 <= edge_prob <= 1.0:
        raise DataValidationError("edge probability must lie in [0, 1]")
    order = rng.permutation(n_nodes)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
        if rng.random() < edge_prob
    ]
    return MixedGraph([f"v{i}" for i in range(n_nodes)], directed=edges)


def random_linear_scm(g: MixedGraph, rng: np.random.Generator) -> LinearScm:
    """Attach random linear equations to a DAG.

    Coefficient magnitudes stay in [0.4, 1.2] so no edge is vanishingly
    weak, which keeps generated data faithful to the graph.
    """
    equations = []
    for v in range(len(g.node_labels)):
        parents = tuple(sorted(g.parents(v)))
        signs = rng.choice([-1.0, 1.0], size=len(parents))
        magnitudes = rng.uniform(0.4, 1.2, size=len(parents))
        equations.append(
            NodeEquation(
                parents=parents,
                coefficients=tuple(float(s * m) for s, m in zip(signs, magnitudes)),
                intercept=float(rng.uniform(-1.0, 1.0)),
                noise_variance=float(rng.uniform(0.5, 1.5)),
            )
        )
    return LinearScm(graph=g, equations=tuple(equations))


def sample_from_scm(
    scm: LinearScm, n: int, rng: np.random.Generator
) -> tuple[Dataset, dict[int, np.ndarray]]:
    """Ancestral sampling from a linear SCM; returns data and drawn noise."""
    if n < 1:
        raise DataValidationError("sample size must be at least 1")
    p = scm.node_count
    values = np.empty((n, p))
    noise: dict[int, np.ndarray] = {}
    for v in topological_sort(scm.graph):
        eq = scm.equations[v]
        noise[v] = rng.normal(0.0, math.sqrt(eq.noise_variance), size=n)
        column = eq.intercept + noise[v]
        for parent, coef in zip(eq.parents, eq.coefficients):
            column = column + coef * values[:, parent]
        values[:, v] = column
    return Dataset(scm.node_labels, values), noise
