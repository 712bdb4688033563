"""Sublinear-time spectral clustering oracle for bounded-degree graphs."""

from ._subcluster import (
    CapacityError,
    ConfigError,
    ContractViolation,
    Graph,
    NumericError,
    Oracle,
    ParseError,
    PreprocessingFailure,
    WalkPolynomial,
    WrongGraphError,
    approx_k,
    cheb_coefficient,
    disjoint_cliques,
    generate_clusterable,
    load_graph,
    load_oracle,
    misclassification,
    oracle_from_bytes,
    outer_conductance,
    preprocess,
    save_graph,
    spectral_embedding,
    walk_polynomial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
