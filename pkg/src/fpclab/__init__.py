"""Fractal product codes: carpet graphs, GF(2) homology, duality, and
Monte Carlo thermal simulation."""

from __future__ import annotations

from .carpet import (
    CarpetSpec,
    CarpetGraph,
    DualCarpetGraph,
    PerforatedLatticeSpec,
    build_carpet_graph,
    build_dual_graph,
    build_perforated_lattice,
    closed_form_counts,
    barrier_closed_form,
    energy_barrier_cut,
    hausdorff_dimension,
    save_graph,
    load_graph,
)
from .complexes import (
    ChainComplex,
    ComplexValidationError,
    toric_complex,
    dualize,
    homology_dim,
    cohomology_dim,
    save_complex,
    load_complex,
)
from .css import (
    CssCode,
    CodeValidationError,
    code_from_complex,
    num_logical_qubits,
    logical_basis,
    classify_global,
    export_hamiltonian,
    reduce_coset_weight,
    sector_swap_maps,
    save_code,
    load_code,
)
from .fpc import FpcBundle, build_fpc, fpc_parameters
from .gf2 import BasisSet, BinaryMatrix, kernel_basis, rank
from .ising import (
    IsingModel,
    DualSystem,
    GeneratingSet,
    sector_model,
    symmetry_group,
    constraint_group,
    fpc_constraint_generators,
    merlini_gruber_dual,
    brute_force_Z,
    brute_force_log_Z,
    duality_identity_check,
    gks_check,
    carpet_slice_extract,
    graph_ising_model,
    square_lattice_model,
    chain_model,
    save_model,
    load_model,
)
from .mc import (
    Schedule,
    SpinConfig,
    ObservableRecord,
    CrossingResult,
    default_carpet_schedule,
    derive_stream,
    metropolis_sweep,
    wolff_update,
    run_schedule,
    aggregate_records,
    binder_crossing,
    write_records_csv,
    read_records_csv,
)
from .product import ProductComplex, product, middle_code_complex, kunneth_check

__version__ = "0.1.0"
