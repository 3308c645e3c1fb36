from normlab.analysis.bounds import (
    BoundReport,
    NormEquivalenceReport,
    UNBOUNDED_LOSS_NOTE,
    bound_report,
    confidence_term,
    norm_equivalence_check,
    psi_transform,
)
from normlab.analysis.curves import ErrorLossCurve, error_vs_loss_curve
from normlab.analysis.evaluate import EvalReport, dataset_id, evaluate
from normlab.analysis.fits import LinearFit, linear_fit
from normlab.analysis.histogram import OutputHistogram, output_histogram
from normlab.analysis.minnorm import MinNormReport, min_norm_gd_demo
from normlab.analysis.rademacher import RademacherEstimate, rademacher_linear

__all__ = [
    "BoundReport",
    "ErrorLossCurve",
    "EvalReport",
    "LinearFit",
    "MinNormReport",
    "NormEquivalenceReport",
    "OutputHistogram",
    "RademacherEstimate",
    "UNBOUNDED_LOSS_NOTE",
    "bound_report",
    "confidence_term",
    "dataset_id",
    "error_vs_loss_curve",
    "evaluate",
    "linear_fit",
    "min_norm_gd_demo",
    "norm_equivalence_check",
    "output_histogram",
    "psi_transform",
    "rademacher_linear",
]
