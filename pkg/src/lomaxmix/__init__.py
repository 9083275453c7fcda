"""Lomax-mixture models of word-frequency distributions."""

__version__ = "0.1.0"

from .corpus import FrequencyHistogram, build_histogram, ingest_files, tokenize
from .distributions import (
    LomaxComponent,
    MixtureParams,
    ZipfDistribution,
    compound_pmf_numeric,
    lomax_pmf,
    mixture_mean,
    mixture_pmf,
    sample_mixture,
    zipf_pmf,
)
from .errors import (
    BoundaryError,
    ConvergenceError,
    DomainError,
    EmptyCorpusError,
    InsufficientBinsError,
    InsufficientDataError,
    LomaxMixError,
    NumericError,
    ParameterError,
)
from .fitting import FitOptions, FitReport, ModelSelection, fit_mixture, fit_zipf, select_model
from .gof import chi_square, merge_bins

__all__ = [
    "__version__",
    "FrequencyHistogram",
    "build_histogram",
    "ingest_files",
    "tokenize",
    "LomaxComponent",
    "MixtureParams",
    "ZipfDistribution",
    "compound_pmf_numeric",
    "lomax_pmf",
    "mixture_mean",
    "mixture_pmf",
    "sample_mixture",
    "zipf_pmf",
    "BoundaryError",
    "ConvergenceError",
    "DomainError",
    "EmptyCorpusError",
    "InsufficientBinsError",
    "InsufficientDataError",
    "LomaxMixError",
    "NumericError",
    "ParameterError",
    "FitOptions",
    "FitReport",
    "ModelSelection",
    "fit_mixture",
    "fit_zipf",
    "select_model",
    "chi_square",
    "merge_bins",
]
