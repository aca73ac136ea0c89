from .masks import (JOURNAL_MASK, REPORT_MASK, REPRODUCTION_MASK, LevelMask,
                    default_masks, degrade, reconstruct)
from .diffing import DiffReport, RunBundle, diff_bundles
from .matrix import audit_matrix, matrix_to_csv

__all__ = [
    "LevelMask", "REPRODUCTION_MASK", "REPORT_MASK", "JOURNAL_MASK",
    "default_masks", "degrade", "reconstruct",
    "DiffReport", "RunBundle", "diff_bundles",
    "audit_matrix", "matrix_to_csv",
]
