"""Exception types raised across the toolkit.

Data/validation problems (bad files, inconsistent constraints, malformed
queries) and numerical failures (singular matrices, degenerate
correlations) are kept as distinct exception families so callers such as
the CLI can map them to different exit codes.
"""


class CausalAdvisorError(Exception):
    """Base class for all toolkit errors."""


class DataValidationError(CausalAdvisorError):
    """Invalid inputs: files, graphs, knowledge, or query structure."""


class NumericalError(CausalAdvisorError):
    """A computation failed numerically (singularity, degeneracy)."""


# -- graph errors -----------------------------------------------------------

class CycleError(DataValidationError):
    """A directed cycle was found where a DAG is required."""


class SizeMismatchError(DataValidationError):
    """Two graphs with different node counts were compared."""


class KnowledgeConflictError(DataValidationError):
    """Background-knowledge constraints contradict each other or the data."""


class UnknownNodeError(DataValidationError):
    """A node index or name does not exist in the graph or model."""


class InvalidQueryError(DataValidationError):
    """A causal query is structurally invalid (e.g. outcome causes treatment)."""


# -- statistics errors ------------------------------------------------------

class ZeroVarianceError(NumericalError):
    """A column has no sample variance; correlation/normalization undefined."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class SingularMatrixError(NumericalError):
    """A conditioning submatrix is numerically singular."""


class DegenerateCorrelationError(NumericalError):
    """|r| is numerically 1, so the variance-stabilizing transform diverges."""


class InsufficientSampleError(DataValidationError):
    """Too few rows for the requested test or fit."""


class RankDeficiencyError(NumericalError):
    """Regression design matrix is rank deficient (collinear regressors)."""


# -- SCM errors -------------------------------------------------------------

class MissingValueError(DataValidationError):
    """An observation does not cover a node required by the computation."""


class ZeroEffectError(NumericalError):
    """No causal path carries the requested intervention to the target."""


# -- IO errors --------------------------------------------------------------

class IoError(CausalAdvisorError):
    """Filesystem read/write failure."""


class ParseError(DataValidationError):
    """Malformed input; for CSV cells carries the 1-based (row, column)."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f"{message} at row {row}, column {column}"
        elif row is not None:
            message = f"{message} at row {row}"
        super().__init__(message)


class EmptyFileError(DataValidationError):
    """The input file has no header or no data rows."""


class DuplicateHeaderError(DataValidationError):
    """The CSV header repeats a column name."""


class UnknownColumnError(DataValidationError):
    """A referenced column name is not present in the dataset."""


class OrientationConflictWarning(UserWarning):
    """Two collider orientations (or a collider and prior knowledge)
    disagree about an edge; the edge is left as the earlier, safer state."""
