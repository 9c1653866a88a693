"""Initials-based author name disambiguation with ground-truth evaluation."""

from .core import Dataset, NameOccurrence, Partition, Provenance, Root, normalize_author_name, root_of
from .disambiguation import Method, all_initials, author_count, disambiguate, first_initial, hybrid, select_method
from .errors import (
    ConfigError,
    DatasetFormatError,
    DisambigError,
    InsufficientDataError,
    MissingTruthError,
    NameParseError,
)
from .evaluation import ContaminationReport, brute_force_contamination, contamination, run_experiment, top_k_overlap
from .ingest import parse_author_field, read_dataset, write_dataset
from .simulator import SimulationConfig, preset, simulate, validate_simulation

__all__ = [
    "ConfigError",
    "ContaminationReport",
    "Dataset",
    "DatasetFormatError",
    "DisambigError",
    "InsufficientDataError",
    "Method",
    "MissingTruthError",
    "NameOccurrence",
    "NameParseError",
    "Partition",
    "Provenance",
    "Root",
    "SimulationConfig",
    "all_initials",
    "author_count",
    "brute_force_contamination",
    "contamination",
    "disambiguate",
    "first_initial",
    "hybrid",
    "normalize_author_name",
    "parse_author_field",
    "preset",
    "read_dataset",
    "root_of",
    "run_experiment",
    "select_method",
    "simulate",
    "top_k_overlap",
    "validate_simulation",
    "write_dataset",
]
