"""Rare-disease phenotyping from clinical notes."""

from ._core import (
    Matcher,
    Model,
    OntologyStore,
    Pipeline,
    RarephenError,
    metrics_from_counts,
    micro_admission_metrics,
    normalize,
    rule_prevalence,
    run_cli,
    weak_label_summary,
)

__all__ = [
    "Matcher",
    "Model",
    "OntologyStore",
    "Pipeline",
    "RarephenError",
    "metrics_from_counts",
    "micro_admission_metrics",
    "normalize",
    "rule_prevalence",
    "run_cli",
    "weak_label_summary",
]
