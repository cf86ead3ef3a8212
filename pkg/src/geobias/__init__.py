"""Information-theoretic geographic-bias scores for geolocated evaluations.

The package measures where, and under which spatial factor, a model's
geolocated performance departs from spatial randomness: self-information
of marked point patterns (Moran's I surprisal) and patch-weighted KL
divergence under scale, distance and direction partitionings, next to a
random-grid dispersion baseline.
"""

from .divergence import PerformanceHistogram, histogram, kl_divergence, smooth
from .errors import GeoBiasError
from .partition import (
    Partitioning,
    Patch,
    direction_sector,
    distance_lag,
    partition_roi,
    scale_grid,
)
from .perfmap import (
    BINARY_LAYOUT,
    BinLayout,
    PerformanceMap,
    binarize_classification,
    binarize_regression,
    encode_categorical,
    load_map,
    save_map,
)
from .pipeline import RunConfig, compute_report
from .report import (
    PointRecord,
    ScoreReport,
    normalize_for_map,
    serialize_locals_csv,
    serialize_locals_geojson,
    serialize_summary,
    write_report,
)
from .roi import (ROI, ROISet, build_index, enumerate_candidates, enumerate_rois,
                  retrieve_roi, roi_is_scoreable, roiset_from_candidates)
from .spad import SpadConfig, spad_score
from .sphere import (
    GeoLocation,
    fibonacci_cap,
    great_circle_distance,
    initial_bearing,
    inverse_azimuthal,
    project_azimuthal,
)
from .sre import GlobalSRE, LocalSRE, global_sre, local_sre, score_roiset, sweep_hyperparameters
from .ssi import (
    LocalSSI,
    MarkedPattern,
    MoranResult,
    assemble_pattern,
    local_ssi,
    morans_i,
    ssi_convert,
)

__version__ = "0.1.0"

__all__ = [
    "BINARY_LAYOUT",
    "BinLayout",
    "GeoBiasError",
    "GeoLocation",
    "GlobalSRE",
    "LocalSRE",
    "LocalSSI",
    "MarkedPattern",
    "MoranResult",
    "Partitioning",
    "Patch",
    "PerformanceHistogram",
    "PerformanceMap",
    "PointRecord",
    "ROI",
    "ROISet",
    "RunConfig",
    "ScoreReport",
    "SpadConfig",
    "assemble_pattern",
    "binarize_classification",
    "binarize_regression",
    "build_index",
    "compute_report",
    "direction_sector",
    "distance_lag",
    "encode_categorical",
    "enumerate_candidates",
    "enumerate_rois",
    "fibonacci_cap",
    "global_sre",
    "great_circle_distance",
    "histogram",
    "initial_bearing",
    "inverse_azimuthal",
    "kl_divergence",
    "load_map",
    "local_sre",
    "local_ssi",
    "morans_i",
    "normalize_for_map",
    "partition_roi",
    "project_azimuthal",
    "retrieve_roi",
    "roi_is_scoreable",
    "roiset_from_candidates",
    "save_map",
    "scale_grid",
    "score_roiset",
    "serialize_locals_csv",
    "serialize_locals_geojson",
    "serialize_summary",
    "smooth",
    "spad_score",
    "ssi_convert",
    "sweep_hyperparameters",
    "write_report",
]
