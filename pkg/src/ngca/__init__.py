"""Non-Gaussian subspace estimation via least-squares log-density gradients."""

from .data import ArtificialSpec, LabeledDataset, make_artificial
from .harness import ExperimentConfig, RunResult, run_synthetic, subspace_error
from .lsldg import CvGrid, GradientModel, fit_lsldg
from .lsngca import SubspaceEstimate, lsngca_fit
from .mipp import MippConfig, mipp_fit
from .wf_lsngca import VectorFieldModel, fit_wf, wf_fit_subspace

__all__ = [
    "ArtificialSpec",
    "CvGrid",
    "ExperimentConfig",
    "GradientModel",
    "LabeledDataset",
    "MippConfig",
    "RunResult",
    "SubspaceEstimate",
    "VectorFieldModel",
    "fit_lsldg",
    "fit_wf",
    "lsngca_fit",
    "make_artificial",
    "mipp_fit",
    "run_synthetic",
    "subspace_error",
    "wf_fit_subspace",
]
