"""Kohonen maps of survey individuals and their answer modalities."""

from .analysis import (
    ComparisonReport,
    DeviationTable,
    SyntheticSpec,
    class_profile,
    deviations,
    generate_synthetic,
    negative_count,
    run_comparison,
)
from .cluster import Dendrogram, ahc_ward, cut
from .kdisj import Assignment, KdisjModel, classify, train_kdisj
from .mca import MCAResult, eigensym, gram_matrix, joint_points, run_mca
from .som import CodeBook, MapTopology, TrainingSchedule, train_numeric_som
from .tables import (
    CategoricalDataset,
    CorrectedTable,
    DisjunctiveTable,
    build_disjunctive,
    chi2_col_distance,
    chi2_row_distance,
    correct_table,
    ingest_csv,
)

__version__ = "0.1.0"
