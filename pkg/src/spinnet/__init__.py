"""Decoherence of exchange-coupled spin-qubit networks.

Build qubit graphs from elementary units (node / stick / triangle) in
chain, ring, or tree configurations, evolve states under noisy Heisenberg
crosstalk, and extract decoherence times and size-scaling laws from
return-probability envelopes.
"""

from .dynamics import (TimeGrid, propagate_dynamic, propagate_static,
                       spectral_weights, static_return_probability)
from .fitting import (EnvelopeFit, EnvelopePoints, PowerLawFit,
                      extract_envelope, fit_envelope, fit_power_law,
                      half_saturation_time)
from .hamiltonian import (CouplingAssignment, HamiltonianMatrix,
                          build_hamiltonian, dump_hamiltonian_csv, embed_state,
                          sector_restrict)
from .noise import (NoiseSpec, RngStream, gen_fbm_trace, sample_dynamic,
                    sample_quasi_static)
from .observables import (entanglement_entropy, entropy_series,
                          reduced_density, return_probability,
                          return_probability_series)
from .runner import (AveragedSeries, ExperimentConfig, SweepRow,
                     envelope_from_series, run_experiment, run_sweep,
                     units_for_qubits)
from .topology import (ConfigKind, LinkRule, QubitGraph, TriangleRule,
                       UnitKind, build_graph, export_dot, graph_from_json,
                       neel_basis_index, neel_index)

__version__ = "0.1.0"

__all__ = [
    "AveragedSeries", "ConfigKind", "CouplingAssignment", "EnvelopeFit",
    "EnvelopePoints", "ExperimentConfig", "HamiltonianMatrix", "LinkRule", "NoiseSpec",
    "PowerLawFit", "QubitGraph", "RngStream", "SweepRow", "TimeGrid",
    "TriangleRule", "UnitKind", "build_graph", "build_hamiltonian",
    "dump_hamiltonian_csv", "embed_state", "entanglement_entropy",
    "entropy_series", "envelope_from_series", "export_dot", "extract_envelope",
    "fit_envelope", "fit_power_law", "gen_fbm_trace", "graph_from_json",
    "half_saturation_time", "neel_basis_index", "neel_index",
    "propagate_dynamic", "propagate_static", "reduced_density",
    "return_probability", "return_probability_series", "run_experiment",
    "run_sweep", "sample_dynamic", "sample_quasi_static", "sector_restrict",
    "spectral_weights", "static_return_probability", "units_for_qubits",
]
