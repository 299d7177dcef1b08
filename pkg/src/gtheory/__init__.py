"""Generalizability-theory toolkit for person x item x occasion survey panels."""

__version__ = "0.1.0"

from .errors import (DataError, DegenerateMeasurementError, DesignError,  # noqa: E402
                     DuplicateRecordError, GTheoryError)
from .data import (CodingConfig, LongRecord, ResponseCube, describe, ingest,  # noqa: E402
                   read_csv)
from .gstudy import (EFFECTS, MeanSquaresTable, VarianceComponents,  # noqa: E402
                     estimate_components, gstudy, mean_squares)
from .dstudy import DStudyCell, dependability, dstudy_grid, g_coefficient  # noqa: E402
from .classical import (TrueScoreDecomposition, cross_wave_correlations,  # noqa: E402
                        internal_consistency, scale_reliability, scree_eigenvalues,
                        spearman_brown)
from .simulate import (BootstrapSpec, GeneratorSpec, bootstrap_scale_reliability,  # noqa: E402
                       generate, recovery_experiment)
