from ._anssim import (
    AnssimError,
    extract_squad_pairs,
    kendall_tau_b,
    lexical_metric_names,
    majority_vote,
    max_over_references,
    meteor,
    normalize,
    pearson_r,
    read_pairs,
    score,
    synthetic_bertscore,
    synthetic_sas,
    tokenize,
)

__all__ = [
    "AnssimError",
    "extract_squad_pairs",
    "kendall_tau_b",
    "lexical_metric_names",
    "majority_vote",
    "max_over_references",
    "meteor",
    "normalize",
    "pearson_r",
    "read_pairs",
    "score",
    "synthetic_bertscore",
    "synthetic_sas",
    "tokenize",
]
