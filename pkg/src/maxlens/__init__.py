"""Interactive exploratory data analysis against a constrained Gaussian
background model.

The background model encodes what the user already knows about the data as
expectation constraints on a maximum-entropy Gaussian; whitening the data
against it and running projection pursuit (PCA or ICA) on the result yields
the 2-D view where data and model disagree most. Marking patterns in that
view adds constraints and the loop repeats.
"""

from .constraints import (
    CompositeConstraint,
    PrimitiveConstraint,
    eval_linear,
    eval_quadratic,
    expand_composite,
)
from .data import DataMatrix, load_csv, parse_csv, standardize
from .fit import FitDiagnostics, fit, update_linear, update_quadratic
from .model import BackgroundModel, ClassParams, FitConfig, init_model
from .partition import RowPartition, build_partition
from .session import Session, SessionSettings, confidence_ellipse, selection_stats
from .views import ProjectionView, ica_view, pca_view, project
from .whitening import WhitenedMatrix, sample_background, whiten

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel",
    "ClassParams",
    "CompositeConstraint",
    "DataMatrix",
    "FitConfig",
    "FitDiagnostics",
    "PrimitiveConstraint",
    "ProjectionView",
    "RowPartition",
    "Session",
    "SessionSettings",
    "WhitenedMatrix",
    "build_partition",
    "confidence_ellipse",
    "eval_linear",
    "eval_quadratic",
    "expand_composite",
    "fit",
    "ica_view",
    "init_model",
    "load_csv",
    "parse_csv",
    "pca_view",
    "project",
    "sample_background",
    "selection_stats",
    "standardize",
    "update_linear",
    "update_quadratic",
    "whiten",
    "__version__",
]
