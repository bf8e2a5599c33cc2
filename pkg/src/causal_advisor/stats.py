"""Statistical core: correlations, CI tests, OLS, normalization.

Everything here operates on a :class:`Dataset`, an immutable matrix of
finite float64 values with named columns. Functions are pure; the
correlation matrix can be computed once and shared read-only across
concurrent conditional-independence tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import (
    DataValidationError,
    DegenerateCorrelationError,
    DuplicateHeaderError,
    InsufficientSampleError,
    MissingValueError,
    RankDeficiencyError,
    SingularMatrixError,
    UnknownColumnError,
    UnknownNodeError,
    ZeroVarianceError,
)

RCOND_LIMIT = 1e-12
DEGENERATE_R = 1.0 - 1e-12


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable n×p matrix of finite reals with unique column names."""

    column_names: tuple[str, ...]
    values: np.ndarray

    def __init__(self, column_names, values):
        names = tuple(str(s) for s in column_names)
        arr = np.array(values, dtype=np.float64, order="C")
        if arr.ndim != 2:
            raise DataValidationError(f"values must be 2-D, got ndim={arr.ndim}")
        n, p = arr.shape
        if n < 1 or p < 1:
            raise DataValidationError("dataset needs at least one row and one column")
        if len(names) != p:
            raise DataValidationError(
                f"{len(names)} column names for {p} columns"
            )
        seen: set[str] = set()
        for name in names:
            if not name:
                raise DataValidationError("empty column name")
            if name in seen:
                raise DuplicateHeaderError(f"duplicate column name {name!r}")
            seen.add(name)
        bad = ~np.isfinite(arr)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise MissingValueError(
                f"non-finite value in column {names[c]!r} at data row {r + 1}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "values", arr)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def index_of(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise UnknownColumnError(f"unknown column {name!r}") from None

    def column(self, key: int | str) -> np.ndarray:
        idx = key if isinstance(key, int) else self.index_of(key)
        if not (0 <= idx < self.n_cols):
            raise UnknownColumnError(f"column index {idx} out of range")
        return self.values[:, idx]


@dataclass(frozen=True)
class CiTestResult:
    """Outcome of one conditional-independence test."""

    statistic: float
    p_value: float
    independent: bool
    conditioning_size: int


@dataclass(frozen=True)
class OlsFit:
    """Least-squares fit of one outcome on a set of regressor columns.

    Maps are keyed by the regressor's column index. ``residual_variance``
    is the unbiased estimate (residual sum of squares over n − k − 1).
    """

    coefficients: dict[int, float]
    intercept: float
    std_errors: dict[int, float]
    p_values: dict[int, float]
    residual_variance: float
    n_used: int


@dataclass(frozen=True)
class NormalizationRecord:
    """Per-column mean and sample standard deviation of a z-scoring pass."""

    column_names: tuple[str, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def _idx(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise UnknownColumnError(f"unknown column {name!r}") from None

    def raw_to_z(self, name: str, value: float) -> float:
        i = self._idx(name)
        return (float(value) - self.means[i]) / self.stds[i]

    def z_to_raw(self, name: str, z: float) -> float:
        i = self._idx(name)
        return float(z) * self.stds[i] + self.means[i]


def _column_stds(values: np.ndarray, names: tuple[str, ...]) -> np.ndarray:
    stds = values.std(axis=0, ddof=1) if values.shape[0] > 1 else np.zeros(values.shape[1])
    for j, s in enumerate(stds):
        if s == 0.0:
            raise ZeroVarianceError(names[j])
    return stds


def correlation_matrix(d: Dataset) -> np.ndarray:
    """Pearson correlation matrix of the dataset's columns.

    Symmetric with an exact unit diagonal.

    Raises
    ------
    ZeroVarianceError
        Naming the first constant column encountered.
    InsufficientSampleError
        With fewer than 2 rows.
    """
    if d.n_rows < 2:
        raise InsufficientSampleError("correlation needs at least 2 rows")
    _column_stds(d.values, d.column_names)
    corr = np.corrcoef(d.values, rowvar=False)
    corr = np.atleast_2d(corr)
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def partial_correlation(
    corr: np.ndarray, a: int, b: int, conditioning: set[int] | frozenset[int]
) -> float:
    """Partial correlation of columns a, b given a conditioning set.

    Uses the precision-matrix formula: invert the correlation submatrix
    over {a, b} ∪ conditioning and read off the normalized off-diagonal.

    Raises
    ------
    SingularMatrixError
        When the submatrix has reciprocal condition number below 1e-12,
        e.g. because the conditioning set contains a duplicated column.
    """
    p = corr.shape[0]
    cond = sorted(set(conditioning))
    if a == b:
        raise ValueError("a and b must differ")
    if a in conditioning or b in conditioning:
        raise ValueError("conditioning set may not contain a or b")
    for v in [a, b, *cond]:
        if not (0 <= v < p):
            raise UnknownNodeError(f"index {v} outside correlation matrix")
    if not cond:
        # exact by definition, and keeps |r| = 1 pairs out of the inversion
        return float(corr[a, b])
    idx = [a, b, *cond]
    sub = corr[np.ix_(idx, idx)]
    sv = np.linalg.svd(sub, compute_uv=False)
    if sv[0] <= 0.0 or sv[-1] / sv[0] < RCOND_LIMIT:
        raise SingularMatrixError(
            f"conditioning submatrix is singular (rcond < {RCOND_LIMIT:g})"
        )
    prec = np.linalg.inv(sub)
    r = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
    return float(np.clip(r, -1.0, 1.0))


def fisher_z_from_corr(
    corr: np.ndarray,
    n_rows: int,
    a: int,
    b: int,
    conditioning: set[int] | frozenset[int],
    alpha: float,
    lenient: bool = False,
) -> CiTestResult:
    """Fisher-Z test from a precomputed correlation matrix.

    Shared, read-only variant used by discovery so the correlation
    matrix is computed once per dataset.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    k = len(conditioning)
    if n_rows <= k + 3:
        raise InsufficientSampleError(
            f"need more than {k + 3} rows for |conditioning|={k}, have {n_rows}"
        )
    r = partial_correlation(corr, a, b, conditioning)
    if abs(r) >= DEGENERATE_R:
        if not lenient:
            raise DegenerateCorrelationError(
                f"partial correlation {r:+.12f} too close to ±1 for Fisher-Z"
            )
        r = math.copysign(DEGENERATE_R, r)
    z = math.atanh(r)
    statistic = math.sqrt(n_rows - k - 3) * abs(z)
    p_value = float(2.0 * sps.norm.sf(statistic))
    return CiTestResult(
        statistic=statistic,
        p_value=p_value,
        independent=p_value > alpha,
        conditioning_size=k,
    )


def fisher_z_ci_test(
    d: Dataset,
    a: int,
    b: int,
    conditioning: set[int] | frozenset[int],
    alpha: float,
    lenient: bool = False,
) -> CiTestResult:
    """Test conditional independence of columns a and b given a set.

    The statistic is sqrt(n − |S| − 3) · |atanh(r)| for partial
    correlation r, compared against the standard-normal two-sided tail;
    ``independent`` holds exactly when p_value > alpha. Symmetric in
    (a, b).

    Raises
    ------
    InsufficientSampleError
        Unless n > |conditioning| + 3.
    DegenerateCorrelationError
        When |r| ≥ 1 − 1e-12 and ``lenient`` is off; with ``lenient``
        the value is clamped and the test reports dependence.
    """
    corr = correlation_matrix(d)
    return fisher_z_from_corr(corr, d.n_rows, a, b, conditioning, alpha, lenient)


def ols_fit(d: Dataset, outcome: int, regressors: list[int] | tuple[int, ...]) -> OlsFit:
    """Ordinary least squares of one column on others, with an intercept.

    Standard errors come from the unbiased residual variance and the
    inverse Gram matrix; p-values are two-sided Student-t with
    n − k − 1 degrees of freedom. A perfect fit yields zero residual
    variance and zero standard errors.

    Raises
    ------
    RankDeficiencyError
        On duplicate or collinear regressors.
    InsufficientSampleError
        Unless n > |regressors| + 1.
    """
    regs = [int(v) for v in regressors]
    for v in [outcome, *regs]:
        if not (0 <= v < d.n_cols):
            raise UnknownColumnError(f"column index {v} out of range")
    if outcome in regs:
        raise ValueError("outcome may not be one of the regressors")
    if len(set(regs)) != len(regs):
        raise RankDeficiencyError("duplicate regressor column")
    n, k = d.n_rows, len(regs)
    if n <= k + 1:
        raise InsufficientSampleError(
            f"need more than {k + 1} rows to fit {k} regressors, have {n}"
        )
    X = np.column_stack([np.ones(n), d.values[:, regs]]) if regs else np.ones((n, 1))
    y = d.values[:, outcome]
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficiencyError("design matrix is rank deficient")
    gram = X.T @ X
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[-1] / sv[0] < RCOND_LIMIT:
        raise RankDeficiencyError("design matrix is numerically rank deficient")
    gram_inv = np.linalg.inv(gram)
    beta = gram_inv @ (X.T @ y)
    resid = y - X @ beta
    dof = n - k - 1
    rss = float(resid @ resid)
    s2 = rss / dof
    if s2 > 0.0:
        se = np.sqrt(s2 * np.diag(gram_inv))
        t = beta / se
        pvals = 2.0 * sps.t.sf(np.abs(t), dof)
    else:
        se = np.zeros(k + 1)
        pvals = np.where(np.abs(beta) > 0.0, 0.0, 1.0)
    return OlsFit(
        coefficients={r: float(beta[i + 1]) for i, r in enumerate(regs)},
        intercept=float(beta[0]),
        std_errors={r: float(se[i + 1]) for i, r in enumerate(regs)},
        p_values={r: float(pvals[i + 1]) for i, r in enumerate(regs)},
        residual_variance=s2,
        n_used=n,
    )


def zscore_normalize(d: Dataset) -> tuple[Dataset, NormalizationRecord]:
    """Center each column at 0 and scale to sample standard deviation 1.

    Returns the transformed dataset together with the per-column
    mean/std record needed to map values back to raw units.

    Raises
    ------
    ZeroVarianceError
        On any constant column.
    """
    if d.n_rows < 2:
        raise InsufficientSampleError("z-scoring needs at least 2 rows")
    stds = _column_stds(d.values, d.column_names)
    means = d.values.mean(axis=0)
    z = (d.values - means) / stds
    record = NormalizationRecord(
        column_names=d.column_names,
        means=tuple(float(m) for m in means),
        stds=tuple(float(s) for s in stds),
    )
    return Dataset(d.column_names, z), record
