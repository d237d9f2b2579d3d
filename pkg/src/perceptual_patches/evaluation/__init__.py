"""This package evaluates patches: count errors, overestimation
curves, transfer matrices, hyperparameter ablations and report files.
"""

__all__ = [
    "SceneCounts", "Metrics", "mae_mse", "default_gamma_grid",
    "overestimation_curve",
    "CLEAN", "TransferRow", "TransferMatrix", "scene_placements",
    "clean_counts", "evaluate_patch", "run_transfer_eval", "PGD",
    "evaluate_pgd",
    "AXIS_FIELDS", "LAMBDA_GRID", "AblationRow", "footprint_attention",
    "mean_footprint_attention", "run_ablation",
    "TRANSFER_HEADER", "PER_SCENE_HEADER", "CURVE_HEADER",
    "write_transfer_csv", "read_transfer_csv", "write_per_scene_csv",
    "matrix_to_json", "matrix_from_json", "write_curve_csv",
    "write_table_csv", "side_by_side", "write_visualization"
]

from ._ablation import AXIS_FIELDS, LAMBDA_GRID, AblationRow, \
    footprint_attention, mean_footprint_attention, run_ablation
from ._metrics import SceneCounts, Metrics, mae_mse, default_gamma_grid, \
    overestimation_curve
from ._report import TRANSFER_HEADER, PER_SCENE_HEADER, CURVE_HEADER, \
    write_transfer_csv, read_transfer_csv, write_per_scene_csv, \
    matrix_to_json, matrix_from_json, write_curve_csv, write_table_csv, \
    side_by_side, write_visualization
from ._transfer import CLEAN, TransferRow, TransferMatrix, \
    scene_placements, clean_counts, evaluate_patch, run_transfer_eval, \
    PGD, evaluate_pgd
