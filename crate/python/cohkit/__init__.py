"""Quantum coherence from measurement expectation values."""

from ._cohkit import (
    CohkitError,
    CoherenceReport,
    DensityMatrix,
    NumericalError,
    ObservableBasis,
    aklt_row,
    c2b_campaign,
    coherence,
    evolve_squeezing,
    family_row,
    global_correlation,
    local_coherence,
    report,
    report_from_expectations,
    truncation_scan,
)

__all__ = [
    "CohkitError",
    "CoherenceReport",
    "DensityMatrix",
    "NumericalError",
    "ObservableBasis",
    "aklt_row",
    "c2b_campaign",
    "coherence",
    "evolve_squeezing",
    "family_row",
    "global_correlation",
    "local_coherence",
    "report",
    "report_from_expectations",
    "truncation_scan",
]
